mod common;

use common::{rng, segment_with};
use cylbill::flow::{evolve, torus_delta, PhasePoint};
use cylbill::linalg::{axpy, dot, norm, scale, sub, Mat};
use cylbill::tangent::{
    collision_derivative, collision_operators, evolve_normal, evolve_tangent, lyapunov_spectrum,
    relative_error, time_reverse, NormalVector, TangentVector,
};
use cylbill::geometry::BilliardTable;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn gaussian(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..d).map(|_| rng.sample(rand_distr::StandardNormal)).collect()
}

fn perp(mut x: Vec<f64>, v: &[f64]) -> Vec<f64> {
    let a = dot(&x, v);
    axpy(&mut x, -a, v);
    x
}

fn table(which: u8) -> BilliardTable<f64> {
    match which % 3 {
        0 => common::sinai(0.2),
        1 => common::two_lines(0.2),
        _ => common::ball3(0.3),
    }
}

/// Flow difference quotient at `x` along `tv`, requiring the same
/// collision sequence on both sides.
fn central_difference(
    x: &PhasePoint<f64>,
    table: &BilliardTable<f64>,
    t: f64,
    tv: &TangentVector<f64>,
    h: f64,
) -> TangentVector<f64> {
    let reference = evolve(x, table, t, usize::MAX).unwrap().symbolic();
    let run = |s: f64| {
        let mut q = x.q.clone();
        axpy(&mut q, s, &tv.dq);
        let mut v = x.v.clone();
        axpy(&mut v, s, &tv.dv);
        let v = scale(&v, 1.0 / norm(&v));
        let seg = evolve(&PhasePoint::new(q, v).unwrap(), table, t, usize::MAX).unwrap();
        assert_eq!(seg.symbolic(), reference);
        seg.end
    };
    let (p, m) = (run(h), run(-h));
    TangentVector::new(
        scale(&torus_delta(&p.q, &m.q), 0.5 / h),
        scale(&sub(&p.v, &m.v), 0.5 / h),
    )
}

#[test]
fn head_on_disk_collision_matches_finite_differences() {
    // Hit at time 0.3, then free flight for 0.1.
    let table = common::sinai(0.2);
    let x = PhasePoint::new(vec![0.5, 0.0], vec![-1.0, 0.0]).unwrap();
    let seg = evolve(&x, &table, 0.4, usize::MAX).unwrap();
    assert_eq!(seg.events.len(), 1);
    let tv = TangentVector::new(vec![0.0, 1.0], vec![0.0, 0.0]);
    let lin = evolve_tangent(&tv, &seg, &table).unwrap();
    let fd = central_difference(&x, &table, 0.4, &tv, 1e-6);
    // (dq, 0) -> (dq, (2/r) dq) at the wall, then dq grows by 0.1 * 10.
    let expected = TangentVector::new(vec![0.0, 2.0], vec![0.0, 10.0]);
    assert!(relative_error(&lin, &expected) < 1e-12);
    assert!(relative_error(&lin, &fd) < 1e-5);

    let ops = collision_operators(&seg.events[0], &table).unwrap();
    assert!((ops.cos_phi - 1.0).abs() < 1e-15);
    let at_wall = collision_derivative(&tv, &ops, false);
    assert!(norm(&sub(&at_wall.dv, &[0.0, 10.0])) < 1e-12);
}

#[test]
fn free_flight_along_generator_has_zero_exponents() {
    let table = common::one_line(0.2);
    let x = PhasePoint::new(vec![0.5, 0.5, 0.0], vec![0.0, 0.0, 1.0]).unwrap();
    let report = lyapunov_spectrum(&x, &table, 1e5, 5, 3).unwrap();
    assert_eq!(report.collisions, 0);
    assert_eq!(report.exponents.len(), 4);
    for e in &report.exponents {
        assert!(e.abs() < 1e-3, "{e}");
    }
}

#[test]
fn exponents_sum_to_zero() {
    for (table, d) in [(common::sinai(0.2), 2), (common::two_lines(0.2), 3)] {
        let x = cylbill::flow::random_phase_point(&table, &mut rng(77));
        let report = lyapunov_spectrum(&x, &table, 300.0, 5, 9).unwrap();
        let sum: f64 = report.exponents.iter().sum();
        assert!(sum.abs() < 1e-3 * d as f64, "sum {sum}");
        assert!(report.exponents.windows(2).all(|w| w[0] >= w[1]));
        assert!(report.exponents[0] > 0.0);
    }
}

#[test]
fn normal_vector_examples() {
    let table = common::sinai(0.2);
    let x = PhasePoint::new(vec![0.5, 0.1], vec![-0.8, 0.6]).unwrap();
    let seg = evolve(&x, &table, 2.0, usize::MAX).unwrap();
    // z = 0: nothing moves in flight and Q stays 0.
    let n = NormalVector::new(vec![0.0, 0.0], vec![0.3, -1.0]);
    let samples = evolve_normal(&n, &seg.prefix(0), &table).unwrap();
    assert!(samples.iter().all(|s| s.q_value == 0.0 && s.normal == n));
    // (z, 0) after unit flight: Q = -|z|^2.
    let free = common::one_line(0.2);
    let y = PhasePoint::new(vec![0.5, 0.5, 0.0], vec![0.0, 0.0, 1.0]).unwrap();
    let seg = evolve(&y, &free, 1.0, usize::MAX).unwrap();
    let n = NormalVector::new(vec![1.0, 2.0, 0.5], vec![0.0; 3]);
    let last = evolve_normal(&n, &seg, &free).unwrap().pop().unwrap();
    assert!((last.q_value + 5.25).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_undoes_forward(seed in any::<u64>(), which in 0u8..3) {
        let table = table(which);
        let mut rng = rng(seed);
        let (_, seg) = segment_with(&table, 1, &mut rng);
        let e = &seg.events[0];
        let d = table.dim();
        let ops = collision_operators(e, &table).unwrap();
        let tv = TangentVector::new(
            perp(gaussian(d, &mut rng), &e.v_pre),
            perp(gaussian(d, &mut rng), &e.v_pre),
        );
        let back = collision_derivative(&collision_derivative(&tv, &ops, false), &ops, true);
        prop_assert!(relative_error(&back, &tv) < 1e-12);
    }

    #[test]
    fn reflection_is_an_involution(seed in any::<u64>(), which in 0u8..3) {
        let table = table(which);
        let (_, seg) = segment_with(&table, 1, &mut rng(seed));
        let ops = collision_operators(&seg.events[0], &table).unwrap();
        let rr = &ops.r * &ops.r;
        let id = Mat::identity(table.dim());
        prop_assert!((&rr - &id).max_abs() < 1e-14);
        // K is positive semi-definite.
        let mut r = rng(seed ^ 1);
        for _ in 0..8 {
            let x = gaussian(table.dim(), &mut r);
            prop_assert!(dot(&x, &ops.k.mul_vec(&x)) >= -1e-14);
        }
    }

    #[test]
    fn q_is_non_increasing(seed in any::<u64>(), which in 0u8..3) {
        let table = table(which);
        let mut rng = rng(seed);
        let n_coll = rng.gen_range(1..=8);
        let (_, seg) = segment_with(&table, n_coll, &mut rng);
        let d = table.dim();
        let n = NormalVector::new(gaussian(d, &mut rng), gaussian(d, &mut rng));
        let samples = evolve_normal(&n, &seg, &table).unwrap();
        for w in samples.windows(2) {
            let slack = 1e-12 * w[0].q_value.abs().max(1.0);
            prop_assert!(w[1].q_value <= w[0].q_value + slack);
        }
        // Free flight law on the first leg.
        let t = samples[1].time;
        let z = &samples[0].normal.z;
        prop_assert!((samples[1].q_value - samples[0].q_value + t * dot(z, z)).abs() < 1e-12 * (1.0 + t));
    }

    #[test]
    fn reversal_flips_q(z in prop::collection::vec(-10.0f64..10.0, 4), w in prop::collection::vec(-10.0f64..10.0, 4)) {
        let n = NormalVector::new(z, w);
        let r = time_reverse(&n);
        prop_assert!((r.q() + n.q()).abs() <= 1e-15 * n.q().abs().max(1.0));
        prop_assert_eq!(time_reverse(&r), n);
    }
}
