//! Linearization of the billiard flow.
//!
//! Tangent vectors `(dq, dv)` are carried through free flights and
//! collisions; normal vectors `(z, w)` of flow-invariant hypersurfaces follow
//! the dual law, and `Q(n) = <z, w>` is non-increasing along the forward flow
//! because the second fundamental form of a cylinder is positive
//! semi-definite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{
    CollisionEvent, FlowState, OrbitSegment, PhasePoint, Step, EPS_TANG,
};
use crate::geometry::{BilliardTable, Cylinder};
use crate::linalg::{axpy, dot, gram_schmidt, norm, scale, sub, Mat};
use crate::scalar::Scalar;

/// Default number of collisions between re-orthonormalizations.
pub const DEFAULT_RENORM_INTERVAL: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector<T> {
    pub dq: Vec<T>,
    pub dv: Vec<T>,
}

impl<T: Scalar> TangentVector<T> {
    pub fn new(dq: Vec<T>, dv: Vec<T>) -> Self {
        Self { dq, dv }
    }

    pub fn zero(d: usize) -> Self {
        Self::new(vec![T::zero(); d], vec![T::zero(); d])
    }

    pub fn dim(&self) -> usize {
        self.dq.len()
    }

    /// Euclidean norm on R^d x R^d.
    pub fn norm(&self) -> T {
        (dot(&self.dq, &self.dq) + dot(&self.dv, &self.dv)).sqrt()
    }

    fn flat(&self) -> Vec<T> {
        let mut f = self.dq.clone();
        f.extend_from_slice(&self.dv);
        f
    }

    fn from_flat(f: &[T]) -> Self {
        let d = f.len() / 2;
        Self::new(f[..d].to_vec(), f[d..].to_vec())
    }
}

/// Normal vector `n = (z, w)`; `q_value` caches `Q(n) = <z, w>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalVector<T> {
    pub z: Vec<T>,
    pub w: Vec<T>,
    pub q_value: T,
}

impl<T: Scalar> NormalVector<T> {
    pub fn new(z: Vec<T>, w: Vec<T>) -> Self {
        let q_value = dot(&z, &w);
        Self { z, w, q_value }
    }

    pub fn q(&self) -> T {
        dot(&self.z, &self.w)
    }

    /// Positive rescaling to unit Euclidean norm (leaves the sign of Q fixed).
    pub fn normalized(&self) -> Self {
        let n = (dot(&self.z, &self.z) + dot(&self.w, &self.w)).sqrt();
        if n == T::zero() {
            return self.clone();
        }
        Self::new(scale(&self.z, T::one() / n), scale(&self.w, T::one() / n))
    }
}

/// The time-reversal involution `I`.
pub trait TimeReversal {
    fn time_reversed(&self) -> Self;
}

impl<T: Scalar> TimeReversal for PhasePoint<T> {
    fn time_reversed(&self) -> Self {
        self.reversed()
    }
}

impl<T: Scalar> TimeReversal for NormalVector<T> {
    /// `I(z, w) = (z, -w)`, so `Q(I n) = -Q(n)`.
    fn time_reversed(&self) -> Self {
        let w: Vec<T> = self.w.iter().map(|&x| -x).collect();
        Self {
            z: self.z.clone(),
            w,
            q_value: -self.q_value,
        }
    }
}

impl<T: Scalar> TimeReversal for TangentVector<T> {
    fn time_reversed(&self) -> Self {
        Self::new(self.dq.clone(), self.dv.iter().map(|&x| -x).collect())
    }
}

pub fn time_reverse<X: TimeReversal>(x: &X) -> X {
    x.time_reversed()
}

/// `dq' = dq + t dv`, `dv' = dv`.
pub fn free_flight_derivative<T: Scalar>(tv: &TangentVector<T>, t: T) -> TangentVector<T> {
    let mut dq = tv.dq.clone();
    axpy(&mut dq, t, &tv.dv);
    TangentVector::new(dq, tv.dv.clone())
}

/// Operators of the linearized reflection at one collision, as ambient
/// d x d matrices.
#[derive(Clone, Debug)]
pub struct CollisionOperators<T> {
    /// Reflection across the tangent hyperplane of the boundary.
    pub r: Mat<T>,
    /// `v_pre`-parallel projection onto the tangent hyperplane.
    pub v: Mat<T>,
    /// Adjoint of `v`: projection onto `v_pre^⊥` parallel to the normal.
    pub v_star: Mat<T>,
    /// `v_post`-parallel projection onto the tangent hyperplane.
    pub v1: Mat<T>,
    pub v1_star: Mat<T>,
    /// Second fundamental form `(P_L - n n^T) / r`.
    pub k: Mat<T>,
    pub cos_phi: T,
    forward_curvature: Mat<T>,
    backward_curvature: Mat<T>,
    normal_curvature: Mat<T>,
}

impl<T: Scalar> CollisionOperators<T> {
    pub fn new(
        normal: &[T],
        v_pre: &[T],
        v_post: &[T],
        cylinder: &Cylinder<T>,
    ) -> Result<Self> {
        let d = normal.len();
        let cos_phi = dot(normal, v_post);
        if !(cos_phi > T::lit(EPS_TANG)) {
            return Err(Error::TangentialEvent {
                cylinder: usize::MAX,
                cos_phi: cos_phi.as_f64(),
            });
        }
        let id = Mat::identity(d);
        let nn = Mat::outer(normal, normal);
        let r = &id - &nn.scaled(T::two());
        let v = &id - &Mat::outer(v_pre, normal).scaled(T::one() / dot(v_pre, normal));
        let v_star = v.transpose();
        let v1 = &id - &Mat::outer(v_post, normal).scaled(T::one() / dot(v_post, normal));
        let v1_star = v1.transpose();
        let k = (cylinder.base_projector() - &nn).scaled(T::one() / cylinder.radius());
        let two_cos = T::two() * cos_phi;
        let forward_curvature = (&(&r * &v_star) * &(&k * &v)).scaled(two_cos);
        let backward_curvature = (&(&r * &v1_star) * &(&k * &v1)).scaled(two_cos);
        let normal_curvature = (&v1_star * &(&k * &v1)).scaled(two_cos);
        Ok(Self {
            r,
            v,
            v_star,
            v1,
            v1_star,
            k,
            cos_phi,
            forward_curvature,
            backward_curvature,
            normal_curvature,
        })
    }
}

/// Operators for a recorded collision event.
pub fn collision_operators<T: Scalar>(
    event: &CollisionEvent<T>,
    table: &BilliardTable<T>,
) -> Result<CollisionOperators<T>> {
    let cyl = table.cylinder(event.cylinder_index)?;
    CollisionOperators::new(&event.normal, &event.v_pre, &event.v_post, cyl).map_err(|e| match e {
        Error::TangentialEvent { cos_phi, .. } => Error::TangentialEvent {
            cylinder: event.cylinder_index,
            cos_phi,
        },
        other => other,
    })
}

/// Forward: `dq+ = R dq-`, `dv+ = R dv- + 2 cos(phi) R V* K V dq-`.
/// Inverse: `dq- = R dq+`, `dv- = R dv+ - 2 cos(phi) R V1* K V1 dq+`.
pub fn collision_derivative<T: Scalar>(
    tv: &TangentVector<T>,
    ops: &CollisionOperators<T>,
    inverse: bool,
) -> TangentVector<T> {
    let dq = ops.r.mul_vec(&tv.dq);
    let mut dv = ops.r.mul_vec(&tv.dv);
    if inverse {
        let c = ops.backward_curvature.mul_vec(&tv.dq);
        axpy(&mut dv, -T::one(), &c);
    } else {
        let c = ops.forward_curvature.mul_vec(&tv.dq);
        axpy(&mut dv, T::one(), &c);
    }
    TangentVector::new(dq, dv)
}

/// Push a tangent vector from the start to the end of a segment.
pub fn evolve_tangent<T: Scalar>(
    tv: &TangentVector<T>,
    segment: &OrbitSegment<T>,
    table: &BilliardTable<T>,
) -> Result<TangentVector<T>> {
    transport_tangent(tv, segment, table, T::zero(), segment.duration)
}

/// Carry a tangent vector along the segment from time `from` to time `to`
/// (either direction). Neither time may coincide with a collision.
pub fn transport_tangent<T: Scalar>(
    tv: &TangentVector<T>,
    segment: &OrbitSegment<T>,
    table: &BilliardTable<T>,
    from: T,
    to: T,
) -> Result<TangentVector<T>> {
    segment.ensure_nonsingular()?;
    let mut cur = tv.clone();
    let mut t = from;
    if to >= from {
        for e in segment.events.iter().filter(|e| e.time > from && e.time < to) {
            cur = free_flight_derivative(&cur, e.time - t);
            cur = collision_derivative(&cur, &collision_operators(e, table)?, false);
            t = e.time;
        }
    } else {
        for e in segment
            .events
            .iter()
            .rev()
            .filter(|e| e.time < from && e.time > to)
        {
            cur = free_flight_derivative(&cur, e.time - t);
            cur = collision_derivative(&cur, &collision_operators(e, table)?, true);
            t = e.time;
        }
    }
    Ok(free_flight_derivative(&cur, to - t))
}

/// Normal vector after free flight of length `t`: `(z, w - t z)`.
pub fn normal_free_flight<T: Scalar>(n: &NormalVector<T>, t: T) -> NormalVector<T> {
    let mut w = n.w.clone();
    axpy(&mut w, -t, &n.z);
    NormalVector::new(n.z.clone(), w)
}

/// Normal vector across a collision:
/// `n+ = (R z - 2 cos(phi) V1* K V1 R w, R w)`.
pub fn normal_collision<T: Scalar>(
    n: &NormalVector<T>,
    ops: &CollisionOperators<T>,
) -> NormalVector<T> {
    let rw = ops.r.mul_vec(&n.w);
    let mut z = ops.r.mul_vec(&n.z);
    let c = ops.normal_curvature.mul_vec(&rw);
    axpy(&mut z, -T::one(), &c);
    NormalVector::new(z, rw)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Start,
    PreCollision,
    PostCollision,
    End,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QSample<T> {
    pub time: T,
    pub kind: SampleKind,
    pub normal: NormalVector<T>,
    pub q_value: T,
}

/// Evolve a normal vector along a segment, sampling `Q` at the start, on both
/// sides of every collision and at the end.
pub fn evolve_normal<T: Scalar>(
    n: &NormalVector<T>,
    segment: &OrbitSegment<T>,
    table: &BilliardTable<T>,
) -> Result<Vec<QSample<T>>> {
    segment.ensure_nonsingular()?;
    let sample = |time: T, kind: SampleKind, n: &NormalVector<T>| QSample {
        time,
        kind,
        q_value: n.q(),
        normal: n.clone(),
    };
    let mut out = vec![sample(T::zero(), SampleKind::Start, n)];
    let mut cur = n.clone();
    let mut t = T::zero();
    for e in &segment.events {
        cur = normal_free_flight(&cur, e.time - t);
        out.push(sample(e.time, SampleKind::PreCollision, &cur));
        cur = normal_collision(&cur, &collision_operators(e, table)?);
        out.push(sample(e.time, SampleKind::PostCollision, &cur));
        t = e.time;
    }
    cur = normal_free_flight(&cur, segment.duration - t);
    out.push(sample(segment.duration, SampleKind::End, &cur));
    Ok(out)
}

/// Finite-time Lyapunov exponents of the reduced transversal space
/// `v^⊥ x v^⊥` (dimension `2d - 2`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    /// Sorted descending.
    pub exponents: Vec<f64>,
    pub duration: f64,
    pub renorm_interval: usize,
    pub renormalizations: usize,
    pub collisions: usize,
    pub seed: u64,
}

struct Frame<T> {
    vectors: Vec<TangentVector<T>>,
    log_growth: Vec<f64>,
    renormalizations: usize,
}

impl<T: Scalar> Frame<T> {
    fn random(v: &[T], rng: &mut ChaCha8Rng) -> Self {
        let d = v.len();
        let m = 2 * d - 2;
        let mut raw = Vec::new();
        while raw.len() < m {
            let mut f: Vec<T> = (0..2 * d)
                .map(|_| T::lit(StandardNormal.sample(rng)))
                .collect();
            project_out_velocity(&mut f, v);
            raw.push(f);
            raw = gram_schmidt(&raw, T::lit(1e-8));
        }
        Self {
            vectors: raw.iter().map(|f| TangentVector::from_flat(f)).collect(),
            log_growth: vec![0.0; m],
            renormalizations: 0,
        }
    }

    fn map(&mut self, f: impl Fn(&TangentVector<T>) -> TangentVector<T>) {
        for tv in &mut self.vectors {
            *tv = f(tv);
        }
    }

    fn renormalize(&mut self, v: &[T]) {
        let mut flats: Vec<Vec<T>> = self.vectors.iter().map(|t| t.flat()).collect();
        for f in &mut flats {
            project_out_velocity(f, v);
        }
        // Gram-Schmidt keeping track of the diagonal of R.
        let mut q: Vec<Vec<T>> = Vec::with_capacity(flats.len());
        for (i, f) in flats.iter().enumerate() {
            let mut w = f.clone();
            for _ in 0..2 {
                for u in &q {
                    let c = dot(u, &w);
                    axpy(&mut w, -c, u);
                }
            }
            let n = norm(&w);
            self.log_growth[i] += n.as_f64().ln();
            q.push(scale(&w, T::one() / n));
        }
        self.vectors = q.iter().map(|f| TangentVector::from_flat(f)).collect();
        self.renormalizations += 1;
    }

    fn report(&self, duration: f64, renorm_interval: usize, collisions: usize, seed: u64) -> LyapunovReport {
        let mut exponents: Vec<f64> = if duration > 0.0 {
            self.log_growth.iter().map(|g| g / duration).collect()
        } else {
            vec![0.0; self.log_growth.len()]
        };
        exponents.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        LyapunovReport {
            exponents,
            duration,
            renorm_interval,
            renormalizations: self.renormalizations,
            collisions,
            seed,
        }
    }
}

/// Remove the components of `dq` and `dv` along the unit velocity `v`.
fn project_out_velocity<T: Scalar>(flat: &mut [T], v: &[T]) {
    let d = v.len();
    let (dq, dv) = flat.split_at_mut(d);
    let a = dot(dq, v);
    axpy(dq, -a, v);
    let b = dot(dv, v);
    axpy(dv, -b, v);
}

/// Benettin-style estimate: evolve an orthonormal frame of the reduced
/// transversal space, re-orthonormalize every `renorm_interval` collisions
/// and average the logarithmic stretching. The initial frame is drawn from
/// `seed`.
pub fn lyapunov_spectrum<T: Scalar>(
    x: &PhasePoint<T>,
    table: &BilliardTable<T>,
    duration: T,
    renorm_interval: usize,
    seed: u64,
) -> Result<LyapunovReport> {
    let renorm_interval = renorm_interval.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frame = Frame::random(&x.v, &mut rng);
    let mut state = FlowState::new(table, x.clone());
    let mut last = T::zero();
    let mut collisions = 0usize;
    loop {
        match state.advance(duration)? {
            Step::Collision(e) => {
                let ops = collision_operators(&e, table)?;
                let dt = e.time - last;
                frame.map(|tv| collision_derivative(&free_flight_derivative(tv, dt), &ops, false));
                last = e.time;
                collisions += 1;
                if collisions.is_multiple_of(renorm_interval) {
                    frame.renormalize(&e.v_post);
                }
            }
            Step::Reached => break,
            Step::Singular(flag, hit) => {
                let at = (last + hit.flight).as_f64();
                let partial = frame.report(at, renorm_interval, collisions, seed);
                let _ = flag;
                return Err(Error::SingularityEncountered {
                    partial: Box::new(partial),
                });
            }
        }
    }
    let dt = duration - last;
    frame.map(|tv| free_flight_derivative(tv, dt));
    frame.renormalize(&state.point.v);
    Ok(frame.report(duration.as_f64(), renorm_interval, collisions, seed))
}

/// Symplectic-style pairing `<dq, z> + <dv, w>` of a tangent vector with a
/// normal vector; invariant under simultaneous evolution.
pub fn pairing<T: Scalar>(tv: &TangentVector<T>, n: &NormalVector<T>) -> T {
    dot(&tv.dq, &n.z) + dot(&tv.dv, &n.w)
}

/// Relative difference of two tangent vectors.
pub fn relative_error<T: Scalar>(a: &TangentVector<T>, b: &TangentVector<T>) -> T {
    let diff = TangentVector::new(sub(&a.dq, &b.dq), sub(&a.dv, &b.dv));
    let scale = a.norm().max(b.norm());
    if scale == T::zero() {
        return T::zero();
    }
    diff.norm() / scale
}
