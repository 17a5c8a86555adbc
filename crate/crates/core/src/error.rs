use thiserror::Error;

use crate::tangent::LyapunovReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ambient dimension {0} is too small (need at least 2)")]
    AmbientTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("generator basis is linearly dependent (rank {rank} < {count} vectors)")]
    DependentBasis { rank: usize, count: usize },

    #[error("base space has dimension {base_dim} in R^{ambient}; at least 2 is required")]
    BaseDimTooSmall { base_dim: usize, ambient: usize },

    #[error("radius {radius} is not positive and finite")]
    InvalidRadius { radius: f64 },

    #[error("radius {radius} too large: 2r must be below the shortest projected lattice vector {shortest}")]
    RadiusTooLarge { radius: f64, shortest: f64 },

    #[error("subspace {index} is zero")]
    ZeroSubspace { index: usize },

    #[error("velocity must be a unit vector (norm {norm})")]
    InvalidVelocity { norm: f64 },

    #[error("start point lies inside scatterer {cylinder}: distance {distance} < radius {radius}")]
    StartsInsideScatterer {
        cylinder: usize,
        distance: f64,
        radius: f64,
    },

    #[error("velocity does not point into the scatterer at reflection (<v, n> = {normal_velocity})")]
    OutwardVelocity { normal_velocity: f64 },

    #[error("tangential collision with cylinder {cylinder} (cos phi = {cos_phi})")]
    TangentialEvent { cylinder: usize, cos_phi: f64 },

    #[error("segment is singular: {0}")]
    SingularSegment(String),

    #[error("segment has no collisions")]
    EmptySequence,

    #[error("vector is not neutral at collision {collision} (residual {residual})")]
    NotNeutral { collision: usize, residual: f64 },

    #[error("unknown cylinder index {0}")]
    UnknownCylinderIndex(usize),

    #[error("singularity encountered after {} renormalizations", partial.renormalizations)]
    SingularityEncountered { partial: Box<LyapunovReport> },
}
