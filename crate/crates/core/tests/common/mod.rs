#![allow(dead_code)]

use cylbill::flow::{evolve, random_phase_point, OrbitSegment, PhasePoint};
use cylbill::geometry::{build_cylinder, validate_table, BilliardTable, ValidationOptions};
use cylbill::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn table(d: usize, cyls: &[(Vec<Vec<i64>>, Vec<f64>, f64)]) -> BilliardTable<f64> {
    table_in(d, cyls)
}

fn table_in<T: Scalar>(d: usize, cyls: &[(Vec<Vec<i64>>, Vec<f64>, f64)]) -> BilliardTable<T> {
    let cylinders = cyls
        .iter()
        .map(|(g, t, r)| {
            let t: Vec<T> = t.iter().map(|&x| T::lit(x)).collect();
            build_cylinder(g, &t, T::lit(*r), d).unwrap()
        })
        .collect();
    validate_table(
        BilliardTable::new(d, cylinders).unwrap(),
        &ValidationOptions::default(),
    )
}

pub fn e(d: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

/// Disk of radius `r` in the unit 2-torus.
pub fn sinai(r: f64) -> BilliardTable<f64> {
    table(2, &[(vec![], vec![0.0, 0.0], r)])
}

/// Two skew families of lines in the 3-torus (axes along e3 and e1); base
/// spaces meet along e2.
pub fn two_lines(r: f64) -> BilliardTable<f64> {
    two_lines_in(r)
}

pub fn two_lines_in<T: Scalar>(r: f64) -> BilliardTable<T> {
    table_in(
        3,
        &[
            (vec![e(3, 2)], vec![0.0, 0.0, 0.0], r),
            (vec![e(3, 0)], vec![0.5, 0.5, 0.5], r),
        ],
    )
}

/// One family of lines along e3 in the 3-torus.
pub fn one_line(r: f64) -> BilliardTable<f64> {
    table(3, &[(vec![e(3, 2)], vec![0.0; 3], r)])
}

/// Ball scatterer in the 3-torus.
pub fn ball3(r: f64) -> BilliardTable<f64> {
    table(3, &[(vec![], vec![0.0; 3], r)])
}

/// Lines along e3 of radius `r` plus a ball of radius `rb` centred at the
/// middle of the 3-torus.
pub fn line_and_ball(r: f64, rb: f64) -> BilliardTable<f64> {
    table(
        3,
        &[
            (vec![e(3, 2)], vec![0.0; 3], r),
            (vec![], vec![0.5; 3], rb),
        ],
    )
}

/// Two planes in the 4-torus with orthogonal base spaces span{e1,e2} and
/// span{e3,e4}.
pub fn orthogonal_planes(r: f64) -> BilliardTable<f64> {
    table(
        4,
        &[
            (vec![e(4, 2), e(4, 3)], vec![0.0; 4], r),
            (vec![e(4, 0), e(4, 1)], vec![0.5; 4], r),
        ],
    )
}

/// Two planes in the 4-torus whose generators share e4, so velocity along
/// e4 is never changed.
pub fn shared_generator(r: f64) -> BilliardTable<f64> {
    table(
        4,
        &[
            (vec![e(4, 2), e(4, 3)], vec![0.0; 4], r),
            (vec![e(4, 0), e(4, 3)], vec![0.5; 4], r),
        ],
    )
}

/// A random nonsingular segment with exactly `n` collisions, ending halfway
/// to the next one.
pub fn segment_with<T: Scalar>(
    table: &BilliardTable<T>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (PhasePoint<T>, OrbitSegment<T>) {
    loop {
        let x = random_phase_point(table, rng);
        let Ok(seg) = evolve(&x, table, T::lit(200.0), n + 1) else {
            continue;
        };
        if seg.is_singular() || seg.events.len() < n {
            continue;
        }
        return (x, seg.prefix(n));
    }
}
