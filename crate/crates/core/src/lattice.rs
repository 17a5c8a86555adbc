//! Full-rank lattices in R^k: LLL reduction and Fincke-Pohst enumeration of
//! lattice points inside a ball. Used for projected lattices `P_L(Z^d)`
//! expressed in an orthonormal frame of `L`.

use crate::linalg::{dot, solve, sub, Mat};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetExceeded;

/// A lattice with an LLL-reduced basis and its Gram-Schmidt data.
#[derive(Clone, Debug)]
pub struct Lattice<T> {
    basis: Vec<Vec<T>>,
    /// `mu[i][j]` for `j < i`.
    mu: Vec<Vec<T>>,
    bstar_sq: Vec<T>,
    /// `(B^T)^{-1}`: maps a point to its real basis coefficients.
    coeff_map: Mat<T>,
}

impl<T: Scalar> Lattice<T> {
    /// Reduce `basis` (rows, square, independent) and precompute the
    /// Gram-Schmidt orthogonalization.
    pub fn new(basis: Vec<Vec<T>>) -> Self {
        let basis = lll_reduce(basis, T::lit(0.99));
        let (mu, bstar_sq) = gso(&basis);
        let k = basis.len();
        let bt = Mat::from_rows(&basis).transpose();
        let cols: Vec<Vec<T>> = (0..k)
            .map(|j| solve(&bt, &crate::linalg::unit(k, j)).expect("lattice basis is nonsingular"))
            .collect();
        let coeff_map = Mat::from_cols(&cols, k);
        Self {
            basis,
            mu,
            bstar_sq,
            coeff_map,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn point(&self, coeffs: &[i64]) -> Vec<T> {
        let k = self.dim();
        let mut p = vec![T::zero(); k];
        for (b, &c) in self.basis.iter().zip(coeffs) {
            let c = T::from_i64(c).expect("coefficient");
            for (pi, &bi) in p.iter_mut().zip(b) {
                *pi = *pi + c * bi;
            }
        }
        p
    }

    /// Real coefficients `c` with `sum c_i b_i = target`.
    pub fn coefficients(&self, target: &[T]) -> Vec<T> {
        self.coeff_map.mul_vec(target)
    }

    /// Babai nearest-plane rounding.
    pub fn babai(&self, target: &[T]) -> Vec<i64> {
        let k = self.dim();
        let c = self.coefficients(target);
        let mut x = vec![0i64; k];
        let mut y = vec![T::zero(); k];
        for j in (0..k).rev() {
            let mut center = c[j];
            for i in (j + 1)..k {
                center = center - self.mu[i][j] * y[i];
            }
            let xj = center.round();
            x[j] = xj.to_i64().unwrap_or(0);
            y[j] = xj - c[j];
        }
        x
    }

    /// Visit every lattice point `p` with `|p - target| <= radius`, passing its
    /// coefficient vector and squared distance. Aborts after `budget` search
    /// nodes.
    pub fn for_each_within<F>(
        &self,
        target: &[T],
        radius: T,
        budget: usize,
        mut visit: F,
    ) -> Result<(), BudgetExceeded>
    where
        F: FnMut(&[i64], T),
    {
        let k = self.dim();
        if k == 0 {
            visit(&[], T::zero());
            return Ok(());
        }
        let c = self.coefficients(target);
        let mut x = vec![0i64; k];
        let mut y = vec![T::zero(); k];
        let mut nodes = 0usize;
        let r2 = radius * radius;
        self.enumerate_level(k - 1, T::zero(), r2, &c, &mut x, &mut y, &mut nodes, budget, &mut visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_level<F>(
        &self,
        j: usize,
        partial: T,
        r2: T,
        c: &[T],
        x: &mut [i64],
        y: &mut [T],
        nodes: &mut usize,
        budget: usize,
        visit: &mut F,
    ) -> Result<(), BudgetExceeded>
    where
        F: FnMut(&[i64], T),
    {
        let k = self.dim();
        let mut center = c[j];
        for i in (j + 1)..k {
            center = center - self.mu[i][j] * y[i];
        }
        let slack = (r2 - partial) / self.bstar_sq[j];
        if slack < T::zero() {
            return Ok(());
        }
        let half = slack.sqrt();
        let lo = (center - half).ceil().to_i64().unwrap_or(i64::MIN / 2);
        let hi = (center - -half).floor().to_i64().unwrap_or(i64::MAX / 2);
        for xj in lo..=hi {
            *nodes += 1;
            if *nodes > budget {
                return Err(BudgetExceeded);
            }
            let xf = T::from_i64(xj).expect("coefficient");
            let off = xf - center;
            let part = partial + off * off * self.bstar_sq[j];
            if part > r2 {
                continue;
            }
            x[j] = xj;
            y[j] = xf - c[j];
            if j == 0 {
                visit(x, part);
            } else {
                self.enumerate_level(j - 1, part, r2, c, x, y, nodes, budget, visit)?;
            }
        }
        Ok(())
    }

    /// Closest lattice point to `target`: (coefficients, squared distance).
    pub fn closest(&self, target: &[T]) -> (Vec<i64>, T) {
        let guess = self.babai(target);
        let p = self.point(&guess);
        let diff = sub(&p, target);
        let mut best_d2 = dot(&diff, &diff);
        let mut best = guess;
        let radius = best_d2.sqrt() * (T::one() + T::lit(1e-9)) + T::lit(1e-12);
        let _ = self.for_each_within(target, radius, usize::MAX, |x, d2| {
            if d2 < best_d2 {
                best_d2 = d2;
                best = x.to_vec();
            }
        });
        (best, best_d2)
    }

    /// Length of a shortest nonzero lattice vector.
    pub fn shortest_norm(&self) -> T {
        let k = self.dim();
        if k == 0 {
            return T::infinity();
        }
        let bound = self
            .basis
            .iter()
            .map(|b| dot(b, b))
            .fold(T::infinity(), |m, x| m.min(x));
        let mut best = bound;
        let zero = vec![T::zero(); k];
        let _ = self.for_each_within(&zero, bound.sqrt() * T::lit(1.0 + 1e-12), usize::MAX, |x, d2| {
            if x.iter().any(|&xi| xi != 0) && d2 < best {
                best = d2;
            }
        });
        best.sqrt()
    }
}

fn gso<T: Scalar>(basis: &[Vec<T>]) -> (Vec<Vec<T>>, Vec<T>) {
    let k = basis.len();
    let mut bstar: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut mu = vec![vec![T::zero(); k]; k];
    let mut bsq = vec![T::zero(); k];
    for i in 0..k {
        let mut v = basis[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&basis[i], &bstar[j]) / bsq[j];
            for (vi, &bj) in v.iter_mut().zip(&bstar[j]) {
                *vi = *vi - mu[i][j] * bj;
            }
        }
        bsq[i] = dot(&v, &v);
        bstar.push(v);
    }
    (mu, bsq)
}

/// Textbook LLL with Lovasz parameter `delta`.
pub fn lll_reduce<T: Scalar>(mut b: Vec<Vec<T>>, delta: T) -> Vec<Vec<T>> {
    let k = b.len();
    if k <= 1 {
        return b;
    }
    let half = T::lit(0.5);
    let mut i = 1;
    let mut guard = 0usize;
    while i < k && guard < 100_000 {
        guard += 1;
        for j in (0..i).rev() {
            let m = gso(&b).0[i][j];
            if m.abs() > half {
                let q = m.round();
                let bj = b[j].clone();
                for (x, &y) in b[i].iter_mut().zip(&bj) {
                    *x = *x - q * y;
                }
            }
        }
        let (mu, bsq) = gso(&b);
        if bsq[i] >= (delta - mu[i][i - 1] * mu[i][i - 1]) * bsq[i - 1] {
            i += 1;
        } else {
            b.swap(i, i - 1);
            i = i.saturating_sub(1).max(1);
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice_closest_and_shortest() {
        let lat = Lattice::new(vec![vec![1.0, 0.0], vec![0.0, 1.0f64]]);
        assert!((lat.shortest_norm() - 1.0).abs() < 1e-15);
        let (x, d2) = lat.closest(&[0.9, 0.0]);
        assert_eq!(lat.point(&x), vec![1.0, 0.0]);
        assert!((d2.sqrt() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn reduction_of_skewed_basis() {
        let lat = Lattice::new(vec![vec![1.0, 0.0], vec![100.0, 1.0f64]]);
        assert!((lat.shortest_norm() - 1.0).abs() < 1e-12);
        for b in lat.basis() {
            assert!(dot(b, b) <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn enumeration_counts_points_in_disk() {
        let lat = Lattice::new(vec![vec![1.0, 0.0], vec![0.0, 1.0f64]]);
        let mut count = 0;
        lat.for_each_within(&[0.0, 0.0], 1.5, usize::MAX, |_, _| count += 1)
            .unwrap();
        // (0,0), 4 axis neighbours, 4 diagonals.
        assert_eq!(count, 9);
    }

    #[test]
    fn budget_is_enforced() {
        let lat = Lattice::new(vec![vec![1.0, 0.0], vec![0.0, 1.0f64]]);
        let r = lat.for_each_within(&[0.0, 0.0], 100.0, 10, |_, _| {});
        assert_eq!(r, Err(BudgetExceeded));
    }
}
