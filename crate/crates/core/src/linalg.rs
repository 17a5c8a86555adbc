//! Small dense linear algebra over [`Scalar`]: vector helpers, a row-major
//! matrix, Gram-Schmidt, one-sided Jacobi SVD and kernel extraction.
//!
//! Dimensions in this crate are tiny (d rarely exceeds 10), so everything is
//! written for clarity over blocking or cache behaviour.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn norm_inf<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<T: Scalar>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `y += s * x`
pub fn axpy<T: Scalar>(y: &mut [T], s: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + s * xi;
    }
}

pub fn unit<T: Scalar>(d: usize, i: usize) -> Vec<T> {
    let mut e = vec![T::zero(); d];
    e[i] = T::one();
    e
}

pub fn normalized<T: Scalar>(a: &[T]) -> Vec<T> {
    let n = norm(a);
    scale(a, T::one() / n)
}

pub fn to_f64<T: Scalar>(a: &[T]) -> Vec<f64> {
    a.iter().map(|x| x.as_f64()).collect()
}

pub fn from_f64<T: Scalar>(a: &[f64]) -> Vec<T> {
    a.iter().map(|&x| T::lit(x)).collect()
}

/// Projection of `x` onto the span of an orthonormal set.
pub fn project<T: Scalar>(onb: &[Vec<T>], x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    for u in onb {
        axpy(&mut out, dot(u, x), u);
    }
    out
}

/// Coordinates of `x` in an orthonormal set.
pub fn coords<T: Scalar>(onb: &[Vec<T>], x: &[T]) -> Vec<T> {
    onb.iter().map(|u| dot(u, x)).collect()
}

/// Ambient vector from coordinates in an orthonormal set.
pub fn from_coords<T: Scalar>(onb: &[Vec<T>], c: &[T], d: usize) -> Vec<T> {
    let mut out = vec![T::zero(); d];
    for (u, &ci) in onb.iter().zip(c) {
        axpy(&mut out, ci, u);
    }
    out
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_cols(cols: &[Vec<T>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for i in 0..nrows {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// `u v^T`
    pub fn outer(u: &[T], v: &[T]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for i in 0..u.len() {
            for j in 0..v.len() {
                m[(i, j)] = u[i] * v[j];
            }
        }
        m
    }

    /// Orthogonal projector `sum u u^T` onto the span of an orthonormal set.
    pub fn projector(onb: &[Vec<T>], d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for u in onb {
            m = &m + &Self::outer(u, u);
        }
        m
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Scalar> std::ops::Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> std::ops::Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Modified Gram-Schmidt with re-orthogonalization. Vectors whose residual
/// norm falls below `tol` times their original norm are dropped.
pub fn gram_schmidt<T: Scalar>(vectors: &[Vec<T>], tol: T) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == T::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = dot(u, &w);
                axpy(&mut w, -c, u);
            }
        }
        let n = norm(&w);
        if n > tol * n0 {
            out.push(scale(&w, T::one() / n));
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of `span(basis)` in R^d.
pub fn orthocomplement<T: Scalar>(basis: &[Vec<T>], d: usize) -> Vec<Vec<T>> {
    let onb = orthonormal_span(basis, d);
    let mut all = onb.clone();
    let start = all.len();
    // Greedy completion with the standard basis, most-orthogonal first.
    let mut candidates: Vec<Vec<T>> = (0..d).map(|i| unit(d, i)).collect();
    while all.len() < d {
        let mut best = 0;
        let mut best_norm = -T::one();
        for (idx, e) in candidates.iter().enumerate() {
            let r = sub(e, &project(&all, e));
            let n = norm(&r);
            if n > best_norm {
                best_norm = n;
                best = idx;
            }
        }
        let mut w = candidates.swap_remove(best);
        for _ in 0..2 {
            for u in &all {
                let c = dot(u, &w);
                axpy(&mut w, -c, u);
            }
        }
        let w = normalized(&w);
        all.push(w);
    }
    all.split_off(start)
}

/// Orthonormal basis of `span(vectors)` using SVD rank detection.
pub fn orthonormal_span<T: Scalar>(vectors: &[Vec<T>], d: usize) -> Vec<Vec<T>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    // Columns of the d x m matrix whose column space is the span.
    let a = Mat::from_cols(vectors, d);
    let svd = Svd::new(&a.transpose());
    let tol = svd.max_singular() * T::lit(1e-10);
    svd.row_space_basis(tol)
}

/// Thin singular value decomposition `A = U diag(s) V^T` by one-sided Jacobi
/// rotations on the columns of `A`. `V` is square (n x n) so the kernel is
/// always available.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// Columns of `A V` (length m each), i.e. `s_j u_j`.
    work: Vec<Vec<T>>,
    /// Columns of V.
    v: Vec<Vec<T>>,
    pub singular_values: Vec<T>,
}

impl<T: Scalar> Svd<T> {
    pub fn new(a: &Mat<T>) -> Self {
        let n = a.cols;
        let mut work: Vec<Vec<T>> = (0..n).map(|j| a.col(j)).collect();
        let mut v: Vec<Vec<T>> = (0..n).map(|j| unit(n, j)).collect();
        let eps = T::epsilon();
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha = dot(&work[p], &work[p]);
                    let beta = dot(&work[q], &work[q]);
                    let gamma = dot(&work[p], &work[q]);
                    if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (T::two() * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut work, p, q, c, s);
                    rotate(&mut v, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }
        let singular_values = work.iter().map(|w| norm(w)).collect();
        Self {
            work,
            v,
            singular_values,
        }
    }

    pub fn max_singular(&self) -> T {
        self.singular_values
            .iter()
            .fold(T::zero(), |m, &s| m.max(s))
    }

    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: T) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    /// Orthonormal basis of the kernel: right singular vectors with singular
    /// value at most `tol`.
    pub fn kernel(&self, tol: T) -> Vec<Vec<T>> {
        self.singular_values
            .iter()
            .zip(&self.v)
            .filter(|(&s, _)| s <= tol)
            .map(|(_, v)| v.clone())
            .collect()
    }

    /// Orthonormal basis of the row space (right singular vectors with
    /// singular value above `tol`).
    pub fn row_space_basis(&self, tol: T) -> Vec<Vec<T>> {
        self.singular_values
            .iter()
            .zip(&self.v)
            .filter(|(&s, _)| s > tol)
            .map(|(_, v)| v.clone())
            .collect()
    }

    /// Left singular vectors for singular values above `tol`.
    pub fn column_space_basis(&self, tol: T) -> Vec<Vec<T>> {
        self.singular_values
            .iter()
            .zip(&self.work)
            .filter(|(&s, _)| s > tol)
            .map(|(&s, w)| scale(w, T::one() / s))
            .collect()
    }
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Kernel of `a` with the relative threshold `rel_tol * sigma_max`.
pub fn kernel<T: Scalar>(a: &Mat<T>, rel_tol: T) -> Vec<Vec<T>> {
    let svd = Svd::new(a);
    let tol = svd.max_singular() * rel_tol;
    svd.kernel(tol)
}

pub fn rank<T: Scalar>(a: &Mat<T>, rel_tol: T) -> usize {
    let svd = Svd::new(a);
    let tol = svd.max_singular() * rel_tol;
    svd.rank(tol)
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal bases of equal dimension. Returns 1 when the dimensions differ.
pub fn max_principal_angle_sin<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> T {
    if a.len() != b.len() {
        return T::one();
    }
    if a.is_empty() {
        return T::zero();
    }
    let d = a[0].len();
    let residuals: Vec<Vec<T>> = b.iter().map(|v| sub(v, &project(a, v))).collect();
    let m = Mat::from_cols(&residuals, d);
    Svd::new(&m).max_singular().min(T::one())
}

/// Solve a square system by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular matrix.
pub fn solve<T: Scalar>(a: &Mat<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale_ref = m.max_abs();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| m[(i, k)].abs().partial_cmp(&m[(j, k)].abs()).unwrap())
            .unwrap();
        if m[(piv, k)].abs() <= scale_ref * T::lit(1e-14) {
            return None;
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            x.swap(k, piv);
        }
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                m[(i, j)] = m[(i, j)] - f * m[(k, j)];
            }
            x[i] = x[i] - f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s = s - m[(k, j)] * x[j];
        }
        x[k] = s / m[(k, k)];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_reconstructs_singular_values_of_diagonal() {
        let a = Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, -2.0], vec![0.0, 0.0]]);
        let svd = Svd::new(&a);
        let mut s = svd.singular_values.clone();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((s[0] - 3.0f64).abs() < 1e-14);
        assert!((s[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        // x + y + z = 0
        let a = Mat::from_rows(&[vec![1.0, 1.0, 1.0f64]]);
        let k = kernel(&a, 1e-10);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot(v, &[1.0, 1.0, 1.0]).abs() < 1e-14);
            assert!((norm(v) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn orthocomplement_examples() {
        let l = orthocomplement(&[vec![1.0, 0.0, 0.0f64]], 3);
        assert_eq!(l.len(), 2);
        for u in &l {
            assert!(u[0].abs() < 1e-15);
        }
        let full = orthocomplement::<f64>(&[], 2);
        assert_eq!(full.len(), 2);
        let diag = orthocomplement(&[vec![1.0, 1.0f64]], 2);
        assert_eq!(diag.len(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((diag[0][0].abs() - s).abs() < 1e-15);
        assert!((diag[0][0] + diag[0][1]).abs() < 1e-15);
    }

    #[test]
    fn orthocomplement_of_dependent_input() {
        let l = orthocomplement(&[vec![1.0, 2.0, 0.0f64], vec![2.0, 4.0, 0.0]], 3);
        assert_eq!(l.len(), 2);
    }

    #[test]
    fn principal_angle_detects_rotation() {
        let a = vec![vec![1.0, 0.0f64]];
        let t = 1e-3f64;
        let b = vec![vec![t.cos(), t.sin()]];
        let s = max_principal_angle_sin(&a, &b);
        assert!((s - t.sin()).abs() < 1e-15);
    }

    #[test]
    fn solve_small_system() {
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0f64]]);
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }
}
