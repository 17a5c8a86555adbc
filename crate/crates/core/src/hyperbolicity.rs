//! Neutral spaces of orbit segments, advance functionals, sufficiency,
//! richness of symbolic collision sequences, orbit-span decomposition and
//! Monte Carlo sufficiency surveys.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::flow::{
    cylinder_distance, evolve, random_phase_point, random_unit_vector, OrbitSegment, PhasePoint,
    DEFAULT_MAX_EVENTS,
};
use crate::geometry::{BilliardTable, LatticeSubspace};
use crate::linalg::{
    axpy, dot, from_coords, gram_schmidt, norm, orthonormal_span, project, scale, sub, unit, Mat,
    Svd,
};
use crate::scalar::Scalar;
use crate::tangent::{transport_tangent, TangentVector};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeutralMethod {
    AdvanceSystem,
    DerivativeKernel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeutralSpaceResult<T> {
    /// Orthonormal basis of the neutral space at the start of the segment.
    pub basis: Vec<Vec<T>>,
    pub dim: usize,
    /// Advance tuple of each basis vector, one entry per collision.
    pub advances: Vec<Vec<T>>,
    pub method: NeutralMethod,
}

/// Neutral space from the linear advance system in `(W, alpha)`:
/// `W_1 = W`, `W_{k+1} = W_k + alpha_k (v_{k+1} - v_k)` and
/// `P_{L_k}(W_k - alpha_k v_k) = 0` with pre-collision velocities `v_k`.
/// A segment without collisions has the whole space as neutral space.
pub fn neutral_space_advance<T: Scalar>(
    segment: &OrbitSegment<T>,
    table: &BilliardTable<T>,
) -> Result<NeutralSpaceResult<T>> {
    segment.ensure_nonsingular()?;
    let d = table.dim();
    let n = segment.events.len();
    if n == 0 {
        return Ok(full_space(d, NeutralMethod::AdvanceSystem));
    }
    let mut rows: Vec<Vec<T>> = Vec::new();
    // Coefficients of W_k in terms of (W, alpha): W_k = W + sum_j alpha_j delta_j.
    let mut deltas: Vec<Vec<T>> = Vec::with_capacity(n);
    for (k, e) in segment.events.iter().enumerate() {
        let cyl = table.cylinder(e.cylinder_index)?;
        for b in cyl.base().ortho_basis() {
            let mut row = vec![T::zero(); d + n];
            row[..d].copy_from_slice(b);
            for (j, delta) in deltas.iter().enumerate() {
                row[d + j] = dot(b, delta);
            }
            row[d + k] = -dot(b, &e.v_pre);
            rows.push(row);
        }
        deltas.push(sub(&e.v_post, &e.v_pre));
    }
    let m = Mat::from_rows(&rows);
    let svd = Svd::new(&m);
    let kernel = svd.kernel(svd.max_singular() * T::lit(RANK_TOL));
    let w_parts: Vec<Vec<T>> = kernel.iter().map(|x| x[..d].to_vec()).collect();
    let basis = orthonormal_span(&w_parts, d);
    finish(basis, segment, table, NeutralMethod::AdvanceSystem)
}

/// Neutral space as the kernel of the velocity response: a displacement
/// `W'` at a reference time strictly inside the segment is carried to both
/// ends, and neutral displacements change neither end velocity. The kernel
/// is reported at the segment start.
pub fn neutral_space_numeric<T: Scalar>(
    segment: &OrbitSegment<T>,
    table: &BilliardTable<T>,
) -> Result<NeutralSpaceResult<T>> {
    segment.ensure_nonsingular()?;
    let d = table.dim();
    let n = segment.events.len();
    if n == 0 {
        return Ok(full_space(d, NeutralMethod::DerivativeKernel));
    }
    let tau = reference_time(segment);
    let zero = vec![T::zero(); d];
    let mut back_q = Vec::with_capacity(d);
    let mut back_v = Vec::with_capacity(d);
    let mut fwd_v = Vec::with_capacity(d);
    for i in 0..d {
        let tv = TangentVector::new(unit(d, i), zero.clone());
        let b = transport_tangent(&tv, segment, table, tau, T::zero())?;
        let f = transport_tangent(&tv, segment, table, tau, segment.duration)?;
        back_q.push(b.dq);
        back_v.push(b.dv);
        fwd_v.push(f.dv);
    }
    let block = |cols: &[Vec<T>]| {
        let m = Mat::from_cols(cols, d);
        let s = m.max_abs();
        if s > T::zero() {
            m.scaled(T::one() / s)
        } else {
            m
        }
    };
    let m = block(&back_v).vstack(&block(&fwd_v));
    let svd = Svd::new(&m);
    let tol = svd.max_singular().max(T::min_positive_value()) * T::lit(RANK_TOL);
    let kernel = svd.kernel(tol);
    let back = Mat::from_cols(&back_q, d);
    let at_start: Vec<Vec<T>> = kernel.iter().map(|w| back.mul_vec(w)).collect();
    let basis = orthonormal_span(&at_start, d);
    finish(basis, segment, table, NeutralMethod::DerivativeKernel)
}

/// Midpoint between the middle collision and the next event boundary.
fn reference_time<T: Scalar>(segment: &OrbitSegment<T>) -> T {
    let n = segment.events.len();
    let j = n.div_ceil(2);
    let t_j = segment.events[j - 1].time;
    let t_next = segment.events.get(j).map_or(segment.duration, |e| e.time);
    (t_j + t_next) / T::two()
}

fn full_space<T: Scalar>(d: usize, method: NeutralMethod) -> NeutralSpaceResult<T> {
    NeutralSpaceResult {
        basis: (0..d).map(|i| unit(d, i)).collect(),
        dim: d,
        advances: vec![Vec::new(); d],
        method,
    }
}

fn finish<T: Scalar>(
    basis: Vec<Vec<T>>,
    segment: &OrbitSegment<T>,
    table: &BilliardTable<T>,
    method: NeutralMethod,
) -> Result<NeutralSpaceResult<T>> {
    let advances = basis
        .iter()
        .map(|w| advance_values(segment, w, table))
        .collect::<Result<Vec<_>>>()?;
    Ok(NeutralSpaceResult {
        dim: basis.len(),
        basis,
        advances,
        method,
    })
}

/// Least-squares advances without the consistency check.
fn advance_values<T: Scalar>(
    segment: &OrbitSegment<T>,
    w: &[T],
    table: &BilliardTable<T>,
) -> Result<Vec<T>> {
    walk_advances(segment, w, table, None)
}

fn walk_advances<T: Scalar>(
    segment: &OrbitSegment<T>,
    w: &[T],
    table: &BilliardTable<T>,
    tol: Option<T>,
) -> Result<Vec<T>> {
    let mut wk = w.to_vec();
    let mut alphas = Vec::with_capacity(segment.events.len());
    for (k, e) in segment.events.iter().enumerate() {
        let cyl = table.cylinder(e.cylinder_index)?;
        let onb = cyl.base().ortho_basis();
        let pw = project(onb, &wk);
        let pv = project(onb, &e.v_pre);
        let alpha = dot(&pw, &pv) / dot(&pv, &pv);
        if let Some(tol) = tol {
            let mut res = pw.clone();
            axpy(&mut res, -alpha, &pv);
            let r = norm(&res);
            if r > tol {
                return Err(Error::NotNeutral {
                    collision: k + 1,
                    residual: r.as_f64(),
                });
            }
        }
        axpy(&mut wk, alpha, &sub(&e.v_post, &e.v_pre));
        alphas.push(alpha);
    }
    Ok(alphas)
}

/// The advance `alpha_k` of every collision under the translation `w`, or
/// `NotNeutral` if some collision constraint cannot be met.
pub fn advance_functionals<T: Scalar>(
    segment: &OrbitSegment<T>,
    w: &[T],
    table: &BilliardTable<T>,
) -> Result<Vec<T>> {
    segment.ensure_nonsingular()?;
    let tol = T::lit(1e-8) * norm(w).max(T::one());
    walk_advances(segment, w, table, Some(tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyVerdict<T> {
    pub sufficient: bool,
    pub neutral_dim: usize,
    pub witness: NeutralSpaceResult<T>,
}

/// A segment is sufficient when its neutral space is spanned by the velocity.
pub fn sufficiency<T: Scalar>(
    segment: &OrbitSegment<T>,
    table: &BilliardTable<T>,
) -> Result<SufficiencyVerdict<T>> {
    let witness = neutral_space_advance(segment, table)?;
    Ok(SufficiencyVerdict {
        sufficient: witness.dim == 1,
        neutral_dim: witness.dim,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichnessReport {
    /// Distinct cylinder indices in the sequence, ascending.
    pub collided: Vec<usize>,
    pub span_dim: usize,
    pub full_span: bool,
    /// Every pair of collided base spaces meets in dimension at least 2.
    pub codim2_ok: bool,
    /// Every pair of collided base spaces meets nontrivially.
    pub relaxed_ok: bool,
}

pub fn richness_report<T: Scalar>(
    symbolic: &[usize],
    table: &BilliardTable<T>,
) -> Result<RichnessReport> {
    if symbolic.is_empty() {
        return Err(Error::EmptySequence);
    }
    let collided = distinct(symbolic, table)?;
    let bases: Vec<&[Vec<i64>]> = collided
        .iter()
        .map(|&i| table.cylinders()[i].base().integer_basis())
        .collect();
    let all: Vec<Vec<i64>> = bases.iter().flat_map(|b| b.iter().cloned()).collect();
    let span_dim = exact::int_rank(&all);
    let mut min_meet = usize::MAX;
    for i in 0..bases.len() {
        for j in (i + 1)..bases.len() {
            min_meet = min_meet.min(exact::intersection_dim(bases[i], bases[j]));
        }
    }
    Ok(RichnessReport {
        collided,
        span_dim,
        full_span: span_dim == table.dim(),
        codim2_ok: min_meet >= 2,
        relaxed_ok: min_meet >= 1,
    })
}

fn distinct<T: Scalar>(symbolic: &[usize], table: &BilliardTable<T>) -> Result<Vec<usize>> {
    let mut c: Vec<usize> = symbolic.to_vec();
    c.sort_unstable();
    c.dedup();
    for &i in &c {
        table.cylinder(i)?;
    }
    Ok(c)
}

/// `L*` spanned by the collided base spaces and its complement `A*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanDecomposition<T> {
    pub l_star: Vec<Vec<T>>,
    pub a_star: Vec<Vec<T>>,
    pub is_full: bool,
}

pub fn span_decomposition<T: Scalar>(
    symbolic: &[usize],
    table: &BilliardTable<T>,
) -> Result<SpanDecomposition<T>> {
    let d = table.dim();
    let collided = distinct(symbolic, table)?;
    let all: Vec<Vec<i64>> = collided
        .iter()
        .flat_map(|&i| table.cylinders()[i].base().integer_basis().iter().cloned())
        .collect();
    let span = LatticeSubspace::<T>::span_of(&all, d)?;
    Ok(SpanDecomposition {
        l_star: span.ortho_basis().to_vec(),
        a_star: span.complement_basis().to_vec(),
        is_full: span.dim() == d,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyMode {
    /// Uniform phase points.
    Generic,
    /// Outgoing points on scatterer boundaries close to tangency.
    Ansatz,
}

/// Upper end of the `cos(phi)` band sampled in ansatz mode.
pub const ANSATZ_COS_BAND: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub sample_id: u64,
    pub seed: u64,
    pub n_collisions: usize,
    pub distinct_cylinders: usize,
    pub span_dim: usize,
    pub codim2_ok: bool,
    pub relaxed_ok: bool,
    pub full_span: bool,
    pub neutral_dim: Option<usize>,
    pub sufficient: Option<bool>,
    pub singular_flag: Option<String>,
}

impl SurveyRow {
    pub fn nonsingular(&self) -> bool {
        self.singular_flag.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub mode: SurveyMode,
    pub seed: u64,
    pub duration: f64,
    pub samples: usize,
    pub nonsingular: usize,
    pub sufficient: usize,
    pub sufficient_fraction: f64,
    pub full_span: usize,
    pub full_span_sufficient: usize,
    pub full_span_sufficient_fraction: f64,
    pub codim2_full_span: usize,
    pub codim2_full_span_sufficient: usize,
    /// Sample ids of nonsingular full-span segments that are not sufficient.
    pub full_span_not_sufficient: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Survey {
    pub rows: Vec<SurveyRow>,
    pub summary: SurveySummary,
}

/// Sample `sample_count` phase points, evolve each for `duration` and
/// classify its segment. Sample `i` draws from ChaCha8 stream `i` of `seed`,
/// so the output does not depend on scheduling.
pub fn survey_sufficiency<T: Scalar>(
    table: &BilliardTable<T>,
    sample_count: usize,
    duration: T,
    seed: u64,
    mode: SurveyMode,
) -> Survey {
    let rows: Vec<SurveyRow> = (0..sample_count as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            let x = match mode {
                SurveyMode::Generic => random_phase_point(table, &mut rng),
                SurveyMode::Ansatz => boundary_phase_point(table, &mut rng),
            };
            classify(id, seed, &x, table, duration)
        })
        .collect();
    let summary = summarize(&rows, mode, seed, duration.as_f64());
    Survey { rows, summary }
}

fn classify<T: Scalar>(
    id: u64,
    seed: u64,
    x: &PhasePoint<T>,
    table: &BilliardTable<T>,
    duration: T,
) -> SurveyRow {
    let mut row = SurveyRow {
        sample_id: id,
        seed,
        n_collisions: 0,
        distinct_cylinders: 0,
        span_dim: 0,
        codim2_ok: false,
        relaxed_ok: false,
        full_span: false,
        neutral_dim: None,
        sufficient: None,
        singular_flag: None,
    };
    let segment = match evolve(x, table, duration, DEFAULT_MAX_EVENTS) {
        Ok(s) => s,
        Err(e) => {
            row.singular_flag = Some(format!("error: {e}"));
            return row;
        }
    };
    row.n_collisions = segment.events.len();
    let symbolic = segment.symbolic();
    if let Ok(r) = richness_report(&symbolic, table) {
        row.distinct_cylinders = r.collided.len();
        row.span_dim = r.span_dim;
        row.codim2_ok = r.codim2_ok;
        row.relaxed_ok = r.relaxed_ok;
        row.full_span = r.full_span;
    }
    if let Some(flag) = segment.singular {
        row.singular_flag = Some(flag.to_string());
        return row;
    }
    match sufficiency(&segment, table) {
        Ok(v) => {
            row.neutral_dim = Some(v.neutral_dim);
            row.sufficient = Some(v.sufficient);
        }
        Err(e) => row.singular_flag = Some(format!("error: {e}")),
    }
    row
}

fn summarize(rows: &[SurveyRow], mode: SurveyMode, seed: u64, duration: f64) -> SurveySummary {
    let ok: Vec<&SurveyRow> = rows.iter().filter(|r| r.nonsingular()).collect();
    let suff = |r: &&&SurveyRow| r.sufficient == Some(true);
    let fraction = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let full: Vec<&SurveyRow> = ok.iter().copied().filter(|r| r.full_span).collect();
    let codim2: Vec<&SurveyRow> = full.iter().copied().filter(|r| r.codim2_ok).collect();
    let sufficient = ok.iter().filter(suff).count();
    let full_span_sufficient = full.iter().filter(suff).count();
    SurveySummary {
        mode,
        seed,
        duration,
        samples: rows.len(),
        nonsingular: ok.len(),
        sufficient,
        sufficient_fraction: fraction(sufficient, ok.len()),
        full_span: full.len(),
        full_span_sufficient,
        full_span_sufficient_fraction: fraction(full_span_sufficient, full.len()),
        codim2_full_span: codim2.len(),
        codim2_full_span_sufficient: codim2.iter().filter(suff).count(),
        full_span_not_sufficient: full
            .iter()
            .filter(|r| r.sufficient != Some(true))
            .map(|r| r.sample_id)
            .collect(),
    }
}

/// Outgoing phase point on the boundary of a random cylinder with
/// `cos(phi)` uniform in `(0, ANSATZ_COS_BAND)`.
pub fn boundary_phase_point<T: Scalar, R: Rng + ?Sized>(
    table: &BilliardTable<T>,
    rng: &mut R,
) -> PhasePoint<T> {
    let d = table.dim();
    let k = table.cylinders().len();
    loop {
        let ci = rng.gen_range(0..k);
        let cyl = &table.cylinders()[ci];
        let raw: Vec<T> = (0..d).map(|_| T::lit(rng.gen::<f64>())).collect();
        let along = project(cyl.generator().ortho_basis(), &raw);
        let radial: Vec<T> = random_unit_vector(cyl.base_dim(), rng);
        let normal = from_coords(cyl.base().ortho_basis(), &radial, d);
        let mut q = cyl.translation().to_vec();
        axpy(&mut q, T::one(), &along);
        axpy(&mut q, cyl.radius(), &normal);
        let clear = table.cylinders().iter().enumerate().all(|(j, c)| {
            j == ci || cylinder_distance(&q, c).0 > c.radius() + T::lit(1e-9)
        });
        if !clear {
            continue;
        }
        let cos_phi = T::lit(rng.gen::<f64>() * ANSATZ_COS_BAND);
        if cos_phi <= T::zero() {
            continue;
        }
        let mut tangent = random_unit_vector::<T, R>(d, rng);
        let c = dot(&tangent, &normal);
        axpy(&mut tangent, -c, &normal);
        let tn = norm(&tangent);
        if tn < T::lit(1e-6) {
            continue;
        }
        let tangent = scale(&tangent, T::one() / tn);
        let sin_phi = (T::one() - cos_phi * cos_phi).sqrt();
        let mut v = scale(&normal, cos_phi);
        axpy(&mut v, sin_phi, &tangent);
        let v = scale(&v, T::one() / norm(&v));
        if let Ok(x) = PhasePoint::new(q, v) {
            return x;
        }
    }
}

/// Orthonormal basis of `span(vectors)` with the rank tolerance used here.
pub fn orthonormalize<T: Scalar>(vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    gram_schmidt(vectors, T::lit(RANK_TOL))
}
