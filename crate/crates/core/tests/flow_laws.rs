mod common;

use common::{rng, segment_with};
use cylbill::flow::{cylinder_distance, evolve, PhasePoint};
use cylbill::geometry::BilliardTable;
use cylbill::linalg::{dot, norm, sub};
use cylbill::tangent::time_reverse;
use proptest::prelude::*;
use rand::Rng;

fn table(which: u8) -> BilliardTable<f64> {
    match which % 4 {
        0 => common::sinai(0.2),
        1 => common::two_lines(0.2),
        2 => common::ball3(0.3),
        _ => common::shared_generator(0.2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn events_satisfy_their_invariants(seed in any::<u64>(), which in 0u8..4) {
        let table = table(which);
        let (_, seg) = segment_with(&table, 12, &mut rng(seed));
        let mut last = 0.0;
        for e in &seg.events {
            prop_assert!(e.time > last);
            last = e.time;
            let cyl = &table.cylinders()[e.cylinder_index];
            let (dist, _) = cylinder_distance(&e.q_hit, cyl);
            prop_assert!((dist - cyl.radius()).abs() < 1e-10);
            prop_assert!((dot(&e.normal, &e.v_pre) + e.cos_phi).abs() < 1e-12);
            prop_assert!(e.cos_phi > 0.0);
            let a = dot(&e.v_pre, &e.normal);
            let mirrored: Vec<f64> = e.v_pre.iter().zip(&e.normal).map(|(v, n)| v - 2.0 * a * n).collect();
            prop_assert!(norm(&sub(&mirrored, &e.v_post)) < 1e-14);
            // The recorded offset realizes the contact.
            let rel = sub(&sub(&e.q_hit, cyl.translation()), &e.lattice_offset);
            prop_assert!((norm(&cyl.base_coords(&rel)) - cyl.radius()).abs() < 1e-10);
        }
    }

    #[test]
    fn shifting_along_common_generators_changes_nothing(seed in any::<u64>(), shift in -3.0f64..3.0) {
        // Both cylinders contain e4 in their generators.
        let table = common::shared_generator(0.2);
        let (x, seg) = segment_with(&table, 6, &mut rng(seed));
        let mut q = x.q.clone();
        q[3] += shift;
        let moved = evolve(&PhasePoint::new(q, x.v.clone()).unwrap(), &table, seg.duration, usize::MAX).unwrap();
        prop_assert_eq!(moved.symbolic(), seg.symbolic());
        for (a, b) in moved.events.iter().zip(&seg.events) {
            prop_assert!((a.time - b.time).abs() < 1e-9);
        }
    }

    #[test]
    fn lattice_translates_of_the_start_are_the_same_orbit(seed in any::<u64>(), k in prop::collection::vec(-4i32..4, 3)) {
        let table = common::two_lines(0.2);
        let (x, seg) = segment_with(&table, 5, &mut rng(seed));
        let q: Vec<f64> = x.q.iter().zip(&k).map(|(&a, &n)| a + n as f64).collect();
        let y = PhasePoint::new(q, x.v.clone()).unwrap();
        prop_assert!(norm(&sub(&y.q, &x.q)) < 1e-12);
        let other = evolve(&y, &table, seg.duration, usize::MAX).unwrap();
        prop_assert_eq!(other.symbolic(), seg.symbolic());
    }

    #[test]
    fn involution_squares_to_identity(seed in any::<u64>()) {
        let table = common::ball3(0.3);
        let x = cylbill::flow::random_phase_point(&table, &mut rng(seed));
        prop_assert_eq!(time_reverse(&time_reverse(&x)), x.clone());
        let r = time_reverse(&x);
        prop_assert_eq!(&r.q, &x.q);
        prop_assert!(r.v.iter().zip(&x.v).all(|(a, b)| *a == -*b));
    }
}

#[test]
fn short_round_trips_return_in_double_precision() {
    // Few collisions keep the amplification small enough for f64.
    let table = common::two_lines(0.2);
    let mut r = rng(5);
    for _ in 0..50 {
        let n = r.gen_range(1..=3);
        let (x, seg) = segment_with(&table, n, &mut r);
        let back = evolve(&time_reverse(&seg.end), &table, seg.duration, usize::MAX).unwrap();
        assert_eq!(back.events.len(), n);
        let y = time_reverse(&back.end);
        let dq = cylbill::flow::torus_delta(&y.q, &x.q);
        assert!(norm(&dq) < 1e-6 && norm(&sub(&y.v, &x.v)) < 1e-6);
    }
}
