//! Exact arithmetic on integer and rational matrices.
//!
//! Ranks, kernels and intersections of lattice subspaces are decided here
//! without rounding. The elimination routines are generic over any exact
//! field; in practice they run on [`Rational`].

use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// An exact field: elimination never needs a tolerance.
pub trait Field: Clone + PartialEq + Num + Neg<Output = Self> {}
impl<F: Clone + PartialEq + Num + Neg<Output = F>> Field for F {}

pub fn rational(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

pub fn to_rational_rows(rows: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| rational(x)).collect())
        .collect()
}

/// Reduce `rows` to reduced row echelon form in place, returning the pivot
/// columns. Zero rows are dropped.
pub fn rref<F: Field>(rows: &mut Vec<Vec<F>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = F::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in c..ncols {
                let t = rows[r][j].clone() * f.clone();
                rows[i][j] = rows[i][j].clone() - t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank<F: Field>(rows: &[Vec<F>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : rows * x = 0}` in F^ncols.
pub fn nullspace<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse<F: Field>(a: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = a.len();
    let mut aug: Vec<Vec<F>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Scale a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn big_to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("integer basis entry exceeds i64")
}

pub fn int_rank(rows: &[Vec<i64>]) -> usize {
    rank(&to_rational_rows(rows))
}

/// Integer basis (primitive vectors) of the rational kernel of `rows`.
/// With no rows the result is the standard basis of Z^d.
pub fn integer_nullspace(rows: &[Vec<i64>], d: usize) -> Vec<Vec<i64>> {
    if rows.is_empty() {
        return (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
    }
    nullspace(&to_rational_rows(rows), d)
        .iter()
        .map(|v| primitive_integer(v).iter().map(big_to_i64).collect())
        .collect()
}

/// Integer basis of the rational span of `rows` (dependent rows removed).
pub fn integer_span_basis(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut m = to_rational_rows(rows);
    rref(&mut m);
    m.iter()
        .map(|v| primitive_integer(v).iter().map(big_to_i64).collect())
        .collect()
}

pub fn int_dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| i128::from(x) * i128::from(y)).sum()
}

/// `dim(U ∩ W) = dim U + dim W - dim(U + W)` for integer-spanned subspaces.
pub fn intersection_dim(u: &[Vec<i64>], w: &[Vec<i64>]) -> usize {
    let mut both = u.to_vec();
    both.extend_from_slice(w);
    int_rank(u) + int_rank(w) - int_rank(&both)
}

/// Integer basis of `U ∩ W`.
pub fn intersection_basis(u: &[Vec<i64>], w: &[Vec<i64>], d: usize) -> Vec<Vec<i64>> {
    // U ∩ W = (U^⊥ + W^⊥)^⊥
    let mut perp = integer_nullspace(u, d);
    perp.extend(integer_nullspace(w, d));
    if perp.is_empty() {
        return (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
    }
    integer_nullspace(&perp, d)
}

/// Row echelon form over Z using unimodular row operations. The nonzero rows
/// of the result form a basis of the lattice generated by the input rows.
pub fn integer_echelon(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        loop {
            let pivot = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()));
            let Some(p) = pivot else { break };
            rows.swap(r, p);
            let mut done = true;
            for i in (r + 1)..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                for j in c..ncols {
                    let t = &rows[r][j] * &q;
                    rows[i][j] -= t;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                r += 1;
                break;
            }
        }
    }
    rows.truncate(r);
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    rows
}

/// Basis of the lattice `P_M(Z^d)`, where `P_M` is the orthogonal projection
/// onto the rational subspace spanned by `subspace` (integer rows).
///
/// The projections of the unit vectors are computed exactly, cleared of
/// denominators, echelonized over Z and scaled back.
pub fn projected_lattice_basis(subspace: &[Vec<i64>], d: usize) -> Vec<Vec<Rational>> {
    let basis = integer_span_basis(subspace);
    if basis.is_empty() {
        return Vec::new();
    }
    let b = to_rational_rows(&basis);
    let k = b.len();
    // Gram matrix B B^T and its inverse.
    let gram: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    b[i].iter()
                        .zip(&b[j])
                        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
                })
                .collect()
        })
        .collect();
    let ginv = inverse(&gram).expect("independent basis has invertible Gram matrix");
    // P = B^T G^{-1} B; P is symmetric so row j is P e_j.
    let gb: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            (0..d)
                .map(|c| {
                    (0..k).fold(Rational::zero(), |acc, m| acc + &ginv[i][m] * &b[m][c])
                })
                .collect()
        })
        .collect();
    let proj: Vec<Vec<Rational>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|c| (0..k).fold(Rational::zero(), |acc, m| acc + &b[m][j] * &gb[m][c]))
                .collect()
        })
        .collect();
    let denom = proj
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<Vec<BigInt>> = proj
        .iter()
        .map(|row| row.iter().map(|x| (x * &denom).to_integer()).collect())
        .collect();
    let ech = integer_echelon(ints);
    debug_assert_eq!(ech.len(), k);
    let dr = Rational::from_integer(denom);
    ech.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| Rational::from_integer(x) / dr.clone())
                .collect()
        })
        .collect()
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a ratio of floats for huge numerators/denominators.
        x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_nullspace() {
        let rows = vec![vec![1, 1, 0], vec![2, 2, 0]];
        assert_eq!(int_rank(&rows), 1);
        let ns = integer_nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert_eq!(int_dot(v, &[1, 1, 0]), 0);
        }
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let a = vec![vec![1, 0, 0], vec![0, 1, 0]];
        let b = vec![vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(intersection_dim(&a, &b), 1);
        let basis = intersection_basis(&a, &b, 3);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0, 1, 0]);
    }

    #[test]
    fn echelon_finds_gcd_generator() {
        // 4 and 6 generate 2Z.
        let ech = integer_echelon(vec![vec![BigInt::from(4)], vec![BigInt::from(6)]]);
        assert_eq!(ech, vec![vec![BigInt::from(2)]]);
    }

    #[test]
    fn projected_lattice_of_diagonal_line_complement() {
        // L = (1,1,0)^⊥; P_L(Z^3) is generated by (1/2,-1/2,0) and e3.
        let l = integer_nullspace(&[vec![1, 1, 0]], 3);
        let basis = projected_lattice_basis(&l, 3);
        assert_eq!(basis.len(), 2);
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        // The lattice contains (1/2,-1/2,0): solve in the basis exactly.
        let target = [half.clone(), -half, Rational::zero()];
        let mut rows: Vec<Vec<Rational>> = (0..3)
            .map(|c| vec![basis[0][c].clone(), basis[1][c].clone(), -target[c].clone()])
            .collect();
        rref(&mut rows);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        let scale = ns[0][2].clone();
        for x in &ns[0][..2] {
            assert!((x / &scale).is_integer());
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = to_rational_rows(&[vec![2, 1], vec![1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, to_rational_rows(&[vec![1, -1], vec![-1, 2]]));
        assert!(inverse(&to_rational_rows(&[vec![1, 2], vec![2, 4]])).is_none());
    }
}
