//! Event-driven billiard flow on the torus: free flight, first-collision
//! search over cylinders and their lattice translates, specular reflection,
//! and singularity flagging.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BilliardTable, Cylinder};
use crate::linalg::{axpy, dot, norm, sub};
use crate::scalar::Scalar;

/// Grazing threshold on `|<v, n>|`.
pub const EPS_TANG: f64 = 1e-9;
/// Two contacts closer in time than this make a double collision.
pub const EPS_DOUBLE: f64 = 1e-9;
/// Roots at or below this flight time are ignored.
pub const MIN_FLIGHT: f64 = 1e-12;
/// Slack allowed for points on (or numerically just inside) a boundary.
pub const BOUNDARY_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_EVENTS: usize = 1_000_000;
/// Flight-time window per collision search; bounds the number of lattice
/// translates enumerated per search.
const LOOKAHEAD: f64 = 1.0;

/// Reduce a point of R^d to its representative in `[0,1)^d`.
pub fn reduce_torus<T: Scalar>(q: &mut [T]) {
    for x in q.iter_mut() {
        let mut r = *x - x.floor();
        if r >= T::one() {
            r = T::zero();
        }
        *x = r;
    }
}

/// Difference `a - b` wrapped into `[-1/2, 1/2)^d`.
pub fn torus_delta<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let half = T::lit(0.5);
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d - (d + half).floor()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint<T> {
    pub q: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> PhasePoint<T> {
    /// Position is reduced to the torus; velocity must be a unit vector.
    pub fn new(mut q: Vec<T>, v: Vec<T>) -> Result<Self> {
        if q.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                found: v.len(),
            });
        }
        let n = norm(&v);
        if (n - T::one()).abs() > T::lit(1e-12) {
            return Err(Error::InvalidVelocity { norm: n.as_f64() });
        }
        reduce_torus(&mut q);
        Ok(Self { q, v })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Time reversal `(q, v) -> (q, -v)`.
    pub fn reversed(&self) -> Self {
        Self {
            q: self.q.clone(),
            v: self.v.iter().map(|&x| -x).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent<T> {
    /// Time since the start of the segment.
    pub time: T,
    pub cylinder_index: usize,
    pub q_hit: Vec<T>,
    /// Ambient representative of the lattice translate that was hit.
    pub lattice_offset: Vec<T>,
    /// Outward unit normal of the scatterer (points into the domain).
    pub normal: Vec<T>,
    pub v_pre: Vec<T>,
    pub v_post: Vec<T>,
    pub cos_phi: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularFlag {
    Tangential(usize),
    Double(usize),
    BudgetExceeded,
}

impl std::fmt::Display for SingularFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SingularFlag::Tangential(i) => write!(f, "tangential({})", i + 1),
            SingularFlag::Double(i) => write!(f, "double({})", i + 1),
            SingularFlag::BudgetExceeded => f.write_str("budget_exceeded"),
        }
    }
}

/// A finite piece of trajectory. If `singular` is set, the segment ends at
/// the flagged event, which is not included in `events`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSegment<T> {
    pub start: PhasePoint<T>,
    pub end: PhasePoint<T>,
    pub duration: T,
    pub events: Vec<CollisionEvent<T>>,
    pub singular: Option<SingularFlag>,
}

impl<T: Scalar> OrbitSegment<T> {
    /// Symbolic collision sequence (0-based cylinder indices).
    pub fn symbolic(&self) -> Vec<usize> {
        self.events.iter().map(|e| e.cylinder_index).collect()
    }

    pub fn is_singular(&self) -> bool {
        matches!(
            self.singular,
            Some(SingularFlag::Tangential(_) | SingularFlag::Double(_))
        )
    }

    pub fn ensure_nonsingular(&self) -> Result<()> {
        match self.singular {
            Some(flag) => Err(Error::SingularSegment(flag.to_string())),
            None => Ok(()),
        }
    }

    /// The first `m` collisions, ending halfway between collision `m` and
    /// the next one (or the original end).
    pub fn prefix(&self, m: usize) -> Self {
        let m = m.min(self.events.len());
        let t_m = if m == 0 {
            T::zero()
        } else {
            self.events[m - 1].time
        };
        let t_next = self
            .events
            .get(m)
            .map_or(self.duration, |e| e.time);
        let duration = (t_m + t_next) / T::two();
        let v = if m == 0 {
            self.start.v.clone()
        } else {
            self.events[m - 1].v_post.clone()
        };
        let q_base = if m == 0 {
            self.start.q.clone()
        } else {
            self.events[m - 1].q_hit.clone()
        };
        let mut q = q_base;
        axpy(&mut q, duration - t_m, &v);
        reduce_torus(&mut q);
        Self {
            start: self.start.clone(),
            end: PhasePoint { q, v },
            duration,
            events: self.events[..m].to_vec(),
            singular: None,
        }
    }
}

/// Distance from a torus point to a cylinder's axis set and the ambient
/// lattice offset realizing it.
pub fn cylinder_distance<T: Scalar>(q: &[T], cyl: &Cylinder<T>) -> (T, Vec<T>) {
    let y = cyl.base_coords(&sub(q, cyl.translation()));
    let (x, d2) = cyl.lattice().closest(&y);
    let offset = cyl.from_base_coords(&cyl.lattice().point(&x));
    (d2.max(T::zero()).sqrt(), offset)
}

/// A boundary contact found by [`next_collision`], before reflection.
#[derive(Clone, Debug, PartialEq)]
pub struct Hit<T> {
    /// Flight time from the query point.
    pub flight: T,
    pub cylinder_index: usize,
    pub q_hit: Vec<T>,
    pub lattice_offset: Vec<T>,
    pub normal: Vec<T>,
    /// `-<v, n>`, positive for a genuine inward hit.
    pub cos_phi: T,
    pub tangential: bool,
    /// Cylinder of a second contact within `EPS_DOUBLE` of this one.
    pub double_with: Option<usize>,
}

/// Earliest collision of the ray `q + s v`, `s in (MIN_FLIGHT, t_max]`, with
/// any cylinder translate.
pub fn next_collision<T: Scalar>(
    x: &PhasePoint<T>,
    table: &BilliardTable<T>,
    t_max: T,
) -> Result<Option<Hit<T>>> {
    let min_flight = T::lit(MIN_FLIGHT);
    let eps_double = T::lit(EPS_DOUBLE);
    let horizon = t_max + eps_double;
    let mut best: Option<Hit<T>> = None;
    let mut runner_up: Option<(T, usize)> = None;

    for (ci, cyl) in table.cylinders().iter().enumerate() {
        let r = cyl.radius();
        let y0 = cyl.base_coords(&sub(&x.q, cyl.translation()));
        let u = cyl.base_coords(&x.v);
        let a = dot(&u, &u);
        let reach = a.sqrt() * horizon + r + T::lit(BOUNDARY_TOL);
        let inside_limit = r - T::lit(BOUNDARY_TOL);
        let mut inside: Option<T> = None;
        let mut hits: Vec<(T, Vec<i64>)> = Vec::new();
        // Budget is effectively unbounded: the window keeps the ball small.
        let _ = cyl
            .lattice()
            .for_each_within(&y0, reach, usize::MAX, |coef, d2| {
                let dist = d2.max(T::zero()).sqrt();
                if dist < inside_limit {
                    inside = Some(dist);
                    return;
                }
                if a <= T::zero() {
                    return;
                }
                let p = cyl.lattice().point(coef);
                let rel = sub(&y0, &p);
                let bh = dot(&rel, &u);
                if bh >= T::zero() {
                    return;
                }
                let c = dot(&rel, &rel) - r * r;
                let disc = bh * bh - a * c;
                if disc <= T::zero() {
                    return;
                }
                // Smaller root of a s^2 + 2 bh s + c = 0 in cancellation-free form.
                let s = c / (-bh + disc.sqrt());
                if s > min_flight && s <= horizon {
                    hits.push((s, coef.to_vec()));
                }
            });
        if let Some(distance) = inside {
            return Err(Error::StartsInsideScatterer {
                cylinder: ci,
                distance: distance.as_f64(),
                radius: r.as_f64(),
            });
        }
        for (s, coef) in hits {
            let better = best.as_ref().is_none_or(|b| s < b.flight);
            if better {
                if let Some(b) = best.take() {
                    runner_up = Some(pick_min(runner_up, (b.flight, b.cylinder_index)));
                }
                best = Some(make_hit(x, cyl, ci, s, &coef));
            } else {
                runner_up = Some(pick_min(runner_up, (s, ci)));
            }
        }
    }

    let Some(mut hit) = best else {
        return Ok(None);
    };
    if hit.flight > t_max {
        return Ok(None);
    }
    if let Some((s2, ci2)) = runner_up {
        if s2 - hit.flight < eps_double {
            hit.double_with = Some(ci2);
        }
    }
    Ok(Some(hit))
}

fn pick_min<T: Scalar>(cur: Option<(T, usize)>, cand: (T, usize)) -> (T, usize) {
    match cur {
        Some(c) if c.0 <= cand.0 => c,
        _ => cand,
    }
}

fn make_hit<T: Scalar>(
    x: &PhasePoint<T>,
    cyl: &Cylinder<T>,
    ci: usize,
    s: T,
    coef: &[i64],
) -> Hit<T> {
    let mut q_hit = x.q.clone();
    axpy(&mut q_hit, s, &x.v);
    let lambda = cyl.lattice().point(coef);
    let lattice_offset = cyl.from_base_coords(&lambda);
    let radial = sub(&cyl.base_coords(&sub(&q_hit, cyl.translation())), &lambda);
    let normal_raw = cyl.from_base_coords(&radial);
    let n = norm(&normal_raw);
    let normal: Vec<T> = normal_raw.iter().map(|&c| c / n).collect();
    let cos_phi = -dot(&x.v, &normal);
    Hit {
        flight: s,
        cylinder_index: ci,
        q_hit,
        lattice_offset,
        normal,
        cos_phi,
        tangential: cos_phi.abs() < T::lit(EPS_TANG),
        double_with: None,
    }
}

/// Specular reflection `v' = v - 2 <v, n> n` at a boundary point.
pub fn reflect<T: Scalar>(x: &PhasePoint<T>, normal: &[T]) -> Result<PhasePoint<T>> {
    let vn = dot(&x.v, normal);
    if !(vn < T::zero()) {
        return Err(Error::OutwardVelocity {
            normal_velocity: vn.as_f64(),
        });
    }
    let mut v = x.v.clone();
    axpy(&mut v, -T::two() * vn, normal);
    Ok(PhasePoint {
        q: x.q.clone(),
        v,
    })
}

/// Outcome of one [`FlowState::advance`] call.
#[derive(Clone, Debug)]
pub enum Step<T> {
    Collision(CollisionEvent<T>),
    Singular(SingularFlag, Hit<T>),
    Reached,
}

/// Running state of the flow; yields collisions one at a time.
#[derive(Clone, Debug)]
pub struct FlowState<'a, T> {
    table: &'a BilliardTable<T>,
    pub point: PhasePoint<T>,
    pub time: T,
}

impl<'a, T: Scalar> FlowState<'a, T> {
    pub fn new(table: &'a BilliardTable<T>, start: PhasePoint<T>) -> Self {
        Self {
            table,
            point: start,
            time: T::zero(),
        }
    }

    /// Fly until the next collision or until absolute time `until`.
    pub fn advance(&mut self, until: T) -> Result<Step<T>> {
        let window = T::lit(LOOKAHEAD);
        loop {
            let remaining = until - self.time;
            if remaining <= T::zero() {
                return Ok(Step::Reached);
            }
            let final_window = remaining <= window;
            let t_max = if final_window { remaining } else { window };
            match next_collision(&self.point, self.table, t_max)? {
                None => {
                    axpy(&mut self.point.q, t_max, &self.point.v);
                    reduce_torus(&mut self.point.q);
                    self.time = if final_window { until } else { self.time + t_max };
                    if final_window {
                        return Ok(Step::Reached);
                    }
                }
                Some(hit) => {
                    if hit.tangential {
                        return Ok(Step::Singular(SingularFlag::Tangential(hit.cylinder_index), hit));
                    }
                    if hit.double_with.is_some() {
                        return Ok(Step::Singular(SingularFlag::Double(hit.cylinder_index), hit));
                    }
                    let at = PhasePoint {
                        q: hit.q_hit.clone(),
                        v: self.point.v.clone(),
                    };
                    let out = reflect(&at, &hit.normal)?;
                    self.time = self.time + hit.flight;
                    let event = CollisionEvent {
                        time: self.time,
                        cylinder_index: hit.cylinder_index,
                        q_hit: hit.q_hit,
                        lattice_offset: hit.lattice_offset,
                        normal: hit.normal,
                        v_pre: self.point.v.clone(),
                        v_post: out.v.clone(),
                        cos_phi: hit.cos_phi,
                    };
                    let mut q = out.q;
                    reduce_torus(&mut q);
                    self.point = PhasePoint { q, v: out.v };
                    return Ok(Step::Collision(event));
                }
            }
        }
    }
}

/// Evolve `x` for time `duration`, stopping early at `max_events`
/// collisions or at a tangential/double collision.
pub fn evolve<T: Scalar>(
    x: &PhasePoint<T>,
    table: &BilliardTable<T>,
    duration: T,
    max_events: usize,
) -> Result<OrbitSegment<T>> {
    let mut state = FlowState::new(table, x.clone());
    let mut events = Vec::new();
    let mut singular = None;
    loop {
        if events.len() >= max_events {
            singular = Some(SingularFlag::BudgetExceeded);
            break;
        }
        match state.advance(duration)? {
            Step::Collision(e) => events.push(e),
            Step::Reached => break,
            Step::Singular(flag, hit) => {
                singular = Some(flag);
                // Park the end point at the singular contact.
                state.time = state.time + hit.flight;
                let mut q = hit.q_hit;
                reduce_torus(&mut q);
                state.point.q = q;
                break;
            }
        }
    }
    Ok(OrbitSegment {
        start: x.clone(),
        end: state.point,
        duration: state.time,
        events,
        singular,
    })
}

/// Uniform unit vector in R^d.
pub fn random_unit_vector<T: Scalar, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<T> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return g.iter().map(|&x| T::lit(x / n)).collect();
        }
    }
}

/// Whether `q` lies outside every scatterer by more than `margin`.
pub fn is_outside<T: Scalar>(q: &[T], table: &BilliardTable<T>, margin: T) -> bool {
    table
        .cylinders()
        .iter()
        .all(|c| cylinder_distance(q, c).0 > c.radius() + margin)
}

/// Phase point with position uniform on the free domain (rejection
/// sampling) and velocity uniform on the sphere.
pub fn random_phase_point<T: Scalar, R: Rng + ?Sized>(
    table: &BilliardTable<T>,
    rng: &mut R,
) -> PhasePoint<T> {
    let d = table.dim();
    let margin = T::lit(1e-9);
    let q = loop {
        let q: Vec<T> = (0..d).map(|_| T::lit(rng.gen::<f64>())).collect();
        if is_outside(&q, table, margin) {
            break q;
        }
    };
    let v = random_unit_vector(d, rng);
    PhasePoint { q, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_cylinder;

    fn disk_table(r: f64) -> BilliardTable<f64> {
        BilliardTable::new(2, vec![build_cylinder(&[], &[0.0, 0.0], r, 2).unwrap()]).unwrap()
    }

    fn axis_table() -> BilliardTable<f64> {
        BilliardTable::new(3, vec![build_cylinder(&[vec![0, 0, 1]], &[0.0; 3], 0.2, 3).unwrap()])
            .unwrap()
    }

    #[test]
    fn distance_examples() {
        let t = disk_table(0.2);
        let (d, off) = cylinder_distance(&[0.4, 0.0], &t.cylinders()[0]);
        assert!((d - 0.4).abs() < 1e-15);
        assert!(off.iter().all(|x| x.abs() < 1e-15));
        let (d, off) = cylinder_distance(&[0.9, 0.0], &t.cylinders()[0]);
        assert!((d - 0.1).abs() < 1e-15);
        assert!((off[0] - 1.0).abs() < 1e-15 && off[1].abs() < 1e-15);
        let a = axis_table();
        let (d, _) = cylinder_distance(&[0.3, 0.4, 0.7], &a.cylinders()[0]);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn head_on_collisions() {
        let t = disk_table(0.2);
        let x = PhasePoint::new(vec![0.5, 0.0], vec![-1.0, 0.0]).unwrap();
        let h = next_collision(&x, &t, 1.0).unwrap().unwrap();
        assert!((h.flight - 0.3).abs() < 1e-15);
        assert!((h.q_hit[0] - 0.2).abs() < 1e-15);
        assert!((h.normal[0] - 1.0).abs() < 1e-15);
        let x = PhasePoint::new(vec![0.5, 0.0], vec![1.0, 0.0]).unwrap();
        let h = next_collision(&x, &t, 1.0).unwrap().unwrap();
        assert!((h.flight - 0.3).abs() < 1e-15);
        assert!((h.q_hit[0] - 0.8).abs() < 1e-15);
        assert!((h.normal[0] + 1.0).abs() < 1e-15);
        assert!((h.lattice_offset[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn motion_along_generator_never_collides() {
        let t = axis_table();
        let x = PhasePoint::new(vec![0.5, 0.5, 0.0], vec![0.0, 0.0, 1.0]).unwrap();
        assert!(next_collision(&x, &t, 1e3).unwrap().is_none());
        let seg = evolve(&x, &t, 50.0, 100).unwrap();
        assert!(seg.events.is_empty() && seg.singular.is_none());
    }

    #[test]
    fn start_inside_is_an_error() {
        let t = disk_table(0.2);
        let x = PhasePoint::new(vec![0.1, 0.0], vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            next_collision(&x, &t, 1.0),
            Err(Error::StartsInsideScatterer { .. })
        ));
    }

    #[test]
    fn reflection_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = PhasePoint { q: vec![0.2, 0.0], v: vec![-1.0, 0.0] };
        assert_eq!(reflect(&x, &[1.0, 0.0]).unwrap().v, vec![1.0, 0.0]);
        let x = PhasePoint { q: vec![0.2, 0.0], v: vec![-s, s] };
        let v = reflect(&x, &[1.0, 0.0]).unwrap().v;
        assert!((v[0] - s).abs() < 1e-16 && (v[1] - s).abs() < 1e-16);
        let n = [0.6, 0.8];
        let x = PhasePoint { q: vec![0.0, 0.0], v: vec![-0.6f64, -0.8] };
        let v = reflect(&x, &n).unwrap().v;
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15);
        let x = PhasePoint { q: vec![0.0, 0.0], v: vec![1.0, 0.0] };
        assert!(matches!(reflect(&x, &[1.0, 0.0]), Err(Error::OutwardVelocity { .. })));
    }

    #[test]
    fn bouncing_orbit_between_translates() {
        let t = disk_table(0.2);
        let x = PhasePoint::new(vec![0.5, 0.0], vec![-1.0, 0.0]).unwrap();
        let seg = evolve(&x, &t, 1.0, 100).unwrap();
        assert_eq!(seg.symbolic(), vec![0, 0]);
        assert!((seg.events[0].time - 0.3).abs() < 1e-15);
        assert!((seg.events[1].time - 0.9).abs() < 1e-14);
        assert_eq!(seg.end.v, vec![-1.0, 0.0]);
        assert!((seg.end.q[0] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn exact_tangency_produces_no_event() {
        let t = disk_table(0.2);
        let x = PhasePoint::new(vec![0.5, 0.2], vec![-1.0, 0.0]).unwrap();
        let seg = evolve(&x, &t, 0.9, 10).unwrap();
        assert!(seg.events.is_empty());
        assert!(seg.singular.is_none());
    }

    #[test]
    fn near_grazing_is_flagged() {
        let t = disk_table(0.2);
        // Impact parameter r - 1e-20 relative: cos phi ~ 1e-10.
        let x = PhasePoint::new(vec![0.5, 0.2 - 1e-19], vec![-1.0, 0.0]).unwrap();
        let h = next_collision(&x, &t, 1.0).unwrap();
        if let Some(h) = h {
            assert!(h.tangential);
        }
    }

    #[test]
    fn budget_exceeded_flag() {
        let t = disk_table(0.2);
        let x = PhasePoint::new(vec![0.5, 0.0], vec![-1.0, 0.0]).unwrap();
        let seg = evolve(&x, &t, 100.0, 3).unwrap();
        assert_eq!(seg.events.len(), 3);
        assert_eq!(seg.singular, Some(SingularFlag::BudgetExceeded));
    }

    #[test]
    fn torus_delta_wraps() {
        let d = torus_delta(&[0.95f64, 0.1], &[0.05, 0.9]);
        assert!((d[0] + 0.1).abs() < 1e-12 && (d[1] - 0.2).abs() < 1e-12);
    }
}
