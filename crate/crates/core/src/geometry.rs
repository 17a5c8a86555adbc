//! Billiard tables built from lattice subspaces of R^d (fundamental lattice
//! Z^d): cylinders, their projected lattices, table validation and the
//! transitivity (orthogonal non-splitting) test for base-space systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::lattice::Lattice;
use crate::linalg::{self, coords, dot, from_coords, orthonormal_span, Mat};
use crate::scalar::Scalar;

/// Inner products of orthonormal basis vectors above this magnitude make two
/// subspaces non-orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Default node budget for the disjointness enumeration.
pub const DEFAULT_DISJOINT_BUDGET: usize = 1_000_000;

/// A subspace of R^d spanned by integer vectors, together with float
/// orthonormal bases of itself and of its orthocomplement.
#[derive(Clone, Debug)]
pub struct LatticeSubspace<T> {
    ambient_dim: usize,
    integer_basis: Vec<Vec<i64>>,
    complement_integer_basis: Vec<Vec<i64>>,
    ortho_basis: Vec<Vec<T>>,
    complement_basis: Vec<Vec<T>>,
}

impl<T: Scalar> LatticeSubspace<T> {
    /// `integer_basis` must be linearly independent (possibly empty).
    pub fn new(integer_basis: Vec<Vec<i64>>, ambient_dim: usize) -> Result<Self> {
        if ambient_dim < 2 {
            return Err(Error::AmbientTooSmall(ambient_dim));
        }
        for v in &integer_basis {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
        }
        let rank = exact::int_rank(&integer_basis);
        if rank != integer_basis.len() {
            return Err(Error::DependentBasis {
                rank,
                count: integer_basis.len(),
            });
        }
        let complement_integer_basis = exact::integer_nullspace(&integer_basis, ambient_dim);
        let ortho_basis = orthonormal_from_integers(&integer_basis);
        let complement_basis = orthonormal_from_integers(&complement_integer_basis);
        Ok(Self {
            ambient_dim,
            integer_basis,
            complement_integer_basis,
            ortho_basis,
            complement_basis,
        })
    }

    /// The span of arbitrary integer vectors (dependent ones are dropped).
    pub fn span_of(vectors: &[Vec<i64>], ambient_dim: usize) -> Result<Self> {
        Self::new(exact::integer_span_basis(vectors), ambient_dim)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.integer_basis.len()
    }

    pub fn integer_basis(&self) -> &[Vec<i64>] {
        &self.integer_basis
    }

    pub fn ortho_basis(&self) -> &[Vec<T>] {
        &self.ortho_basis
    }

    pub fn complement_basis(&self) -> &[Vec<T>] {
        &self.complement_basis
    }

    pub fn complement_integer_basis(&self) -> &[Vec<i64>] {
        &self.complement_integer_basis
    }

    /// The orthocomplement as a lattice subspace of its own.
    pub fn complement(&self) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            integer_basis: self.complement_integer_basis.clone(),
            complement_integer_basis: self.integer_basis.clone(),
            ortho_basis: self.complement_basis.clone(),
            complement_basis: self.ortho_basis.clone(),
        }
    }

    pub fn projector(&self) -> Mat<T> {
        Mat::projector(&self.ortho_basis, self.ambient_dim)
    }

    /// Exact intersection with another lattice subspace.
    pub fn intersection(&self, other: &Self) -> Self {
        let basis =
            exact::intersection_basis(&self.integer_basis, &other.integer_basis, self.ambient_dim);
        Self::span_of(&basis, self.ambient_dim).expect("intersection of valid subspaces")
    }

    pub fn contains(&self, x: &[T]) -> bool {
        let p = linalg::project(&self.ortho_basis, x);
        linalg::norm(&linalg::sub(x, &p)) <= T::lit(1e-10) * (T::one() + linalg::norm(x))
    }
}

fn orthonormal_from_integers<T: Scalar>(rows: &[Vec<i64>]) -> Vec<Vec<T>> {
    let vecs: Vec<Vec<T>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| T::from_i64(x).expect("integer")).collect())
        .collect();
    linalg::gram_schmidt(&vecs, T::lit(1e-12))
}

/// Orthonormal basis of the orthocomplement of `span(basis)` in R^d.
pub fn orthocomplement<T: Scalar>(basis: &[Vec<T>], d: usize) -> Vec<Vec<T>> {
    linalg::orthocomplement(basis, d)
}

/// One cylindric scatterer: the set of torus points within `radius` of the
/// translated subtorus `translation + A/(A ∩ Z^d)`.
#[derive(Clone, Debug)]
pub struct Cylinder<T> {
    generator: LatticeSubspace<T>,
    base: LatticeSubspace<T>,
    translation: Vec<T>,
    radius: T,
    /// `P_L(Z^d)` in coordinates of `base.ortho_basis()`, LLL-reduced.
    lattice: Lattice<T>,
    projected_lattice_basis: Vec<Vec<T>>,
    shortest: T,
    projector: Mat<T>,
}

impl<T: Scalar> Cylinder<T> {
    pub fn ambient_dim(&self) -> usize {
        self.generator.ambient_dim()
    }

    pub fn generator(&self) -> &LatticeSubspace<T> {
        &self.generator
    }

    pub fn base(&self) -> &LatticeSubspace<T> {
        &self.base
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn translation(&self) -> &[T] {
        &self.translation
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    /// Ambient basis vectors of the projected lattice `P_L(Z^d)`.
    pub fn projected_lattice_basis(&self) -> &[Vec<T>] {
        &self.projected_lattice_basis
    }

    pub fn shortest_lattice_vector(&self) -> T {
        self.shortest
    }

    /// Orthogonal projector onto the base space `L`.
    pub fn base_projector(&self) -> &Mat<T> {
        &self.projector
    }

    /// Coordinates of a vector in the orthonormal frame of `L`.
    pub fn base_coords(&self, x: &[T]) -> Vec<T> {
        coords(self.base.ortho_basis(), x)
    }

    /// Ambient vector from coordinates in the frame of `L`.
    pub fn from_base_coords(&self, c: &[T]) -> Vec<T> {
        from_coords(self.base.ortho_basis(), c, self.ambient_dim())
    }

    /// Same cylinder with a different radius (validity re-checked).
    pub fn with_radius(&self, radius: T) -> Result<Self> {
        check_radius(radius, self.shortest)?;
        let mut c = self.clone();
        c.radius = radius;
        Ok(c)
    }
}

fn check_radius<T: Scalar>(radius: T, shortest: T) -> Result<()> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::InvalidRadius {
            radius: radius.as_f64(),
        });
    }
    if T::two() * radius >= shortest {
        return Err(Error::RadiusTooLarge {
            radius: radius.as_f64(),
            shortest: shortest.as_f64(),
        });
    }
    Ok(())
}

/// Builds the cylinder with integer generator basis `A`, translation `t`
/// (reduced into `[0,1)^d`) and radius `r`.
pub fn build_cylinder<T: Scalar>(
    generator_basis: &[Vec<i64>],
    translation: &[T],
    radius: T,
    d: usize,
) -> Result<Cylinder<T>> {
    if translation.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: translation.len(),
        });
    }
    let generator = LatticeSubspace::new(generator_basis.to_vec(), d)?;
    let base_dim = d - generator.dim();
    if base_dim < 2 {
        return Err(Error::BaseDimTooSmall {
            base_dim,
            ambient: d,
        });
    }
    let base = generator.complement();
    let (lattice, projected_lattice_basis) = projected_lattice(&base);
    let shortest = lattice.shortest_norm();
    check_radius(radius, shortest)?;
    let translation = translation.iter().map(|&x| x - x.floor()).collect();
    let projector = base.projector();
    Ok(Cylinder {
        generator,
        base,
        translation,
        radius,
        lattice,
        projected_lattice_basis,
        shortest,
        projector,
    })
}

/// `P_M(Z^d)` for a lattice subspace `M`, as a reduced lattice in the
/// coordinates of `M`'s orthonormal frame, plus its ambient basis.
pub fn projected_lattice<T: Scalar>(m: &LatticeSubspace<T>) -> (Lattice<T>, Vec<Vec<T>>) {
    let d = m.ambient_dim();
    let exact_basis = exact::projected_lattice_basis(m.integer_basis(), d);
    let frame = m.ortho_basis();
    let coords_basis: Vec<Vec<T>> = exact_basis
        .iter()
        .map(|row| {
            let amb: Vec<T> = row
                .iter()
                .map(|x| T::lit(exact::rational_to_f64(x)))
                .collect();
            coords(frame, &amb)
        })
        .collect();
    let lattice = Lattice::new(coords_basis);
    let ambient = lattice
        .basis()
        .iter()
        .map(|c| from_coords(frame, c, d))
        .collect();
    (lattice, ambient)
}

/// Tri-state outcome of a check that may be skipped or run out of budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Holds,
    Fails,
    Unchecked,
}

/// Validation state of a table.
///
/// Connectedness of the open configuration domain and positivity of the
/// spatial angle at boundary points are never decided by this crate; they
/// are recorded as assumptions the caller is responsible for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFlags {
    /// Closures of the scatterers are pairwise disjoint.
    pub disjoint: Check,
    /// Every pair of base spaces intersects nontrivially.
    pub base_intersections: bool,
    pub transitive: bool,
    pub interior_connected: Assumption,
    pub positive_spatial_angle: Assumption,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    Assumed,
}

impl Default for TableFlags {
    fn default() -> Self {
        Self {
            disjoint: Check::Unchecked,
            base_intersections: false,
            transitive: false,
            interior_connected: Assumption::Assumed,
            positive_spatial_angle: Assumption::Assumed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BilliardTable<T> {
    dim: usize,
    cylinders: Vec<Cylinder<T>>,
    pub flags: TableFlags,
}

impl<T: Scalar> BilliardTable<T> {
    pub fn new(dim: usize, cylinders: Vec<Cylinder<T>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::AmbientTooSmall(dim));
        }
        for c in &cylinders {
            if c.ambient_dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.ambient_dim(),
                });
            }
        }
        Ok(Self {
            dim,
            cylinders,
            flags: TableFlags::default(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cylinders(&self) -> &[Cylinder<T>] {
        &self.cylinders
    }

    pub fn cylinder(&self, index: usize) -> Result<&Cylinder<T>> {
        self.cylinders
            .get(index)
            .ok_or(Error::UnknownCylinderIndex(index))
    }

    pub fn base_spaces(&self) -> Vec<LatticeSubspace<T>> {
        self.cylinders.iter().map(|c| c.base().clone()).collect()
    }

    /// Same table with every radius multiplied by `factor` (0 < factor <= 1
    /// keeps all cylinders valid).
    pub fn scaled_radii(&self, factor: T) -> Result<Self> {
        let cylinders = self
            .cylinders
            .iter()
            .map(|c| c.with_radius(c.radius() * factor))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, cylinders)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationOptions {
    pub check_disjoint: bool,
    pub disjoint_budget: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            check_disjoint: true,
            disjoint_budget: DEFAULT_DISJOINT_BUDGET,
        }
    }
}

/// Fills in the table's validation flags.
pub fn validate_table<T: Scalar>(
    mut table: BilliardTable<T>,
    opts: &ValidationOptions,
) -> BilliardTable<T> {
    let k = table.cylinders.len();
    let mut base_ok = true;
    for i in 0..k {
        for j in (i + 1)..k {
            let dim = exact::intersection_dim(
                table.cylinders[i].base().integer_basis(),
                table.cylinders[j].base().integer_basis(),
            );
            if dim == 0 {
                base_ok = false;
            }
        }
    }
    table.flags.base_intersections = base_ok;
    table.flags.disjoint = if opts.check_disjoint {
        disjointness(&table, opts.disjoint_budget)
    } else {
        Check::Unchecked
    };
    table.flags.transitive = transitivity_report(&table.base_spaces())
        .map(|r| r.transitive)
        .unwrap_or(false);
    table
}

/// Closures of two cylinders are disjoint iff the distance between their
/// axis sets exceeds `r_i + r_j`. That distance is the distance from
/// `P_M(t_i - t_j)` to the lattice `P_M(Z^d)` with `M = L_i ∩ L_j`.
fn disjointness<T: Scalar>(table: &BilliardTable<T>, budget: usize) -> Check {
    let k = table.cylinders.len();
    let mut result = Check::Holds;
    for i in 0..k {
        for j in (i + 1)..k {
            match pair_disjoint(&table.cylinders[i], &table.cylinders[j], budget) {
                Check::Fails => return Check::Fails,
                Check::Unchecked => result = Check::Unchecked,
                Check::Holds => {}
            }
        }
    }
    result
}

fn pair_disjoint<T: Scalar>(a: &Cylinder<T>, b: &Cylinder<T>, budget: usize) -> Check {
    let m = a.base().intersection(b.base());
    if m.dim() == 0 {
        return Check::Fails;
    }
    let (lattice, _) = projected_lattice(&m);
    let diff = linalg::sub(a.translation(), b.translation());
    let target = coords(m.ortho_basis(), &diff);
    let reach = a.radius() + b.radius();
    let mut touching = false;
    match lattice.for_each_within(&target, reach, budget, |_, _| touching = true) {
        Ok(()) if touching => Check::Fails,
        Ok(()) => Check::Holds,
        Err(_) => Check::Unchecked,
    }
}

/// Transitivity analysis of a system of base spaces.
#[derive(Clone, Debug, Serialize)]
pub struct TransitivityReport<T> {
    pub span_dim: usize,
    pub generator_intersection_dim: usize,
    pub graph_components: Vec<Vec<usize>>,
    pub onsp_holds: bool,
    pub transitive: bool,
    /// Orthonormal bases `(B1, B2)` of a nontrivial orthogonal splitting with
    /// every base space inside one side.
    pub splitting_witness: Option<(Vec<Vec<T>>, Vec<Vec<T>>)>,
}

/// Decides the orthogonal non-splitting property: the non-orthogonality
/// graph of the base spaces is connected and they span R^d.
pub fn transitivity_report<T: Scalar>(
    subspaces: &[LatticeSubspace<T>],
) -> Result<TransitivityReport<T>> {
    let Some(first) = subspaces.first() else {
        return Err(Error::EmptySequence);
    };
    let d = first.ambient_dim();
    for (i, s) in subspaces.iter().enumerate() {
        if s.ambient_dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.ambient_dim(),
            });
        }
        if s.dim() == 0 {
            return Err(Error::ZeroSubspace { index: i });
        }
    }
    let k = subspaces.len();
    let tol = T::lit(ORTHOGONALITY_TOL);
    let adjacent = |i: usize, j: usize| {
        subspaces[i].ortho_basis().iter().any(|u| {
            subspaces[j]
                .ortho_basis()
                .iter()
                .any(|v| dot(u, v).abs() > tol)
        })
    };
    let components = connected_components(k, adjacent);

    let all_rows: Vec<Vec<i64>> = subspaces
        .iter()
        .flat_map(|s| s.integer_basis().iter().cloned())
        .collect();
    let span_dim = exact::int_rank(&all_rows);
    let onsp_holds = components.len() == 1 && span_dim == d;

    let splitting_witness = if onsp_holds {
        None
    } else {
        let comp_vectors: Vec<Vec<T>> = components[0]
            .iter()
            .flat_map(|&i| subspaces[i].ortho_basis().iter().cloned())
            .collect();
        let b1 = orthonormal_span(&comp_vectors, d);
        let b2 = linalg::orthocomplement(&b1, d);
        Some((b1, b2))
    };
    Ok(TransitivityReport {
        span_dim,
        generator_intersection_dim: d - span_dim,
        graph_components: components,
        onsp_holds,
        transitive: onsp_holds,
        splitting_witness,
    })
}

fn connected_components(k: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for s in 0..k {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            for j in 0..k {
                if !seen[j] && adjacent(i, j) {
                    seen[j] = true;
                    comp.push(j);
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Base spaces `L_ij` of the hard-sphere system of `n` particles in R^nu,
/// embedded in R^(nu n): only the coordinates of particles `i` and `j` move.
/// With `reduced`, each is intersected with the zero-total-displacement
/// hyperplane `sum_m dq_m = 0`, leaving `dq_i = -dq_j`.
pub fn hard_sphere_subspaces<T: Scalar>(
    n: usize,
    nu: usize,
    reduced: bool,
) -> Result<Vec<LatticeSubspace<T>>> {
    let d = n * nu;
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut basis = Vec::new();
            for c in 0..nu {
                if reduced {
                    let mut v = vec![0i64; d];
                    v[i * nu + c] = 1;
                    v[j * nu + c] = -1;
                    basis.push(v);
                } else {
                    for p in [i, j] {
                        let mut v = vec![0i64; d];
                        v[p * nu + c] = 1;
                        basis.push(v);
                    }
                }
            }
            out.push(LatticeSubspace::new(basis, d)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_i(d: usize, i: usize) -> Vec<i64> {
        (0..d).map(|j| i64::from(i == j)).collect()
    }

    #[test]
    fn subspace_bases_are_orthonormal_and_complementary() {
        let s = LatticeSubspace::<f64>::new(vec![vec![1, 1, 0], vec![0, 1, 2]], 3).unwrap();
        let mut all = s.ortho_basis().to_vec();
        all.extend_from_slice(s.complement_basis());
        assert_eq!(all.len(), 3);
        for (i, u) in all.iter().enumerate() {
            for (j, v) in all.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(u, v) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dependent_basis_rejected() {
        let r = LatticeSubspace::<f64>::new(vec![vec![1, 2, 0], vec![2, 4, 0]], 3);
        assert!(matches!(r, Err(Error::DependentBasis { .. })));
    }

    #[test]
    fn disk_cylinder_has_square_lattice() {
        let c = build_cylinder::<f64>(&[], &[0.0, 0.0], 0.2, 2).unwrap();
        assert_eq!(c.base_dim(), 2);
        assert!((c.shortest_lattice_vector() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axis_cylinder_base_is_coordinate_plane() {
        let c = build_cylinder::<f64>(&[unit_i(3, 2)], &[0.0; 3], 0.3, 3).unwrap();
        assert_eq!(c.base_dim(), 2);
        for u in c.base().ortho_basis() {
            assert!(u[2].abs() < 1e-15);
        }
        assert!((c.shortest_lattice_vector() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_construction_errors() {
        let r = build_cylinder::<f64>(&[unit_i(3, 0), unit_i(3, 1)], &[0.0; 3], 0.1, 3);
        assert!(matches!(r, Err(Error::BaseDimTooSmall { base_dim: 1, .. })));
        let r = build_cylinder::<f64>(&[], &[0.0; 2], 0.5, 2);
        assert!(matches!(r, Err(Error::RadiusTooLarge { .. })));
        let r = build_cylinder::<f64>(&[], &[0.0; 2], -0.1, 2);
        assert!(matches!(r, Err(Error::InvalidRadius { .. })));
    }

    #[test]
    fn parallel_cylinders_are_disjoint() {
        let a = build_cylinder::<f64>(&[unit_i(3, 2)], &[0.0; 3], 0.1, 3).unwrap();
        let b = build_cylinder::<f64>(&[unit_i(3, 2)], &[0.5, 0.5, 0.0], 0.1, 3).unwrap();
        let t = validate_table(BilliardTable::new(3, vec![a, b]).unwrap(), &Default::default());
        assert_eq!(t.flags.disjoint, Check::Holds);
        assert!(t.flags.base_intersections);
    }

    #[test]
    fn single_disk_table_flags() {
        let a = build_cylinder::<f64>(&[], &[0.0; 2], 0.2, 2).unwrap();
        let t = validate_table(BilliardTable::new(2, vec![a]).unwrap(), &Default::default());
        assert_eq!(t.flags.disjoint, Check::Holds);
        assert!(t.flags.base_intersections);
        assert!(t.flags.transitive);
    }

    #[test]
    fn orthogonal_cylinders_intersecting_bases() {
        let a = build_cylinder::<f64>(&[unit_i(3, 0)], &[0.0; 3], 0.1, 3).unwrap();
        let b = build_cylinder::<f64>(&[unit_i(3, 1)], &[0.0, 0.0, 0.5], 0.1, 3).unwrap();
        let t = validate_table(BilliardTable::new(3, vec![a, b]).unwrap(), &Default::default());
        assert!(t.flags.base_intersections);
        assert_eq!(t.flags.disjoint, Check::Holds);
        assert!(t.flags.transitive);
        // Same axes at the same height: the axes cross.
        let a = build_cylinder::<f64>(&[unit_i(3, 0)], &[0.0; 3], 0.1, 3).unwrap();
        let b = build_cylinder::<f64>(&[unit_i(3, 1)], &[0.0; 3], 0.1, 3).unwrap();
        let t = validate_table(BilliardTable::new(3, vec![a, b]).unwrap(), &Default::default());
        assert_eq!(t.flags.disjoint, Check::Fails);
    }

    #[test]
    fn transitivity_examples() {
        let full = LatticeSubspace::<f64>::new(vec![unit_i(2, 0), unit_i(2, 1)], 2).unwrap();
        let r = transitivity_report(&[full]).unwrap();
        assert!(r.transitive && r.splitting_witness.is_none());

        let l1 = LatticeSubspace::<f64>::new(vec![unit_i(4, 0), unit_i(4, 1)], 4).unwrap();
        let l2 = LatticeSubspace::<f64>::new(vec![unit_i(4, 2), unit_i(4, 3)], 4).unwrap();
        let r = transitivity_report(&[l1, l2]).unwrap();
        assert!(!r.transitive);
        let (b1, b2) = r.splitting_witness.unwrap();
        assert_eq!((b1.len(), b2.len()), (2, 2));
        for u in &b1 {
            assert!(u[2].abs() < 1e-12 && u[3].abs() < 1e-12);
        }

        let l1 = LatticeSubspace::<f64>::new(vec![unit_i(3, 0), unit_i(3, 1)], 3).unwrap();
        let l2 = LatticeSubspace::<f64>::new(vec![unit_i(3, 1), unit_i(3, 2)], 3).unwrap();
        let r = transitivity_report(&[l1, l2]).unwrap();
        assert!(r.transitive);
        assert_eq!(r.span_dim, 3);
    }

    #[test]
    fn connected_but_not_spanning_is_split() {
        let l1 = LatticeSubspace::<f64>::new(vec![unit_i(3, 0), unit_i(3, 1)], 3).unwrap();
        let r = transitivity_report(&[l1]).unwrap();
        assert!(!r.transitive);
        let (b1, b2) = r.splitting_witness.unwrap();
        assert_eq!((b1.len(), b2.len()), (2, 1));
    }

    #[test]
    fn hard_sphere_examples() {
        let s = hard_sphere_subspaces::<f64>(2, 2, false).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].dim(), 4);
        let s = hard_sphere_subspaces::<f64>(3, 2, true).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(exact::intersection_dim(s[0].integer_basis(), s[2].integer_basis()), 0);
        let s = hard_sphere_subspaces::<f64>(3, 2, false).unwrap();
        // pairs (1,2) and (2,3)
        assert_eq!(exact::intersection_dim(s[0].integer_basis(), s[2].integer_basis()), 2);
    }
}
