//! Cylindric billiards on flat tori: table geometry, the billiard flow, its
//! linearization, and neutral-space (sufficiency) analysis.
//!
//! Everything numeric is generic over [`Scalar`] (`f32`, `f64` or the
//! extended-precision [`DoubleDouble`]); lattice
//! and subspace bookkeeping is exact over integers and rationals. The
//! aliases at the crate root fix the scalar to `f64`.

pub mod ddouble;
pub mod error;
pub mod exact;
pub mod flow;
pub mod geometry;
pub mod hyperbolicity;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod scalar;
pub mod tangent;

pub use error::{Error, Result};
pub use flow::{evolve, next_collision, CollisionEvent, FlowState, SingularFlag, Step};
pub use geometry::{
    build_cylinder, hard_sphere_subspaces, transitivity_report, validate_table, Check,
    ValidationOptions,
};
pub use hyperbolicity::{
    advance_functionals, neutral_space_advance, neutral_space_numeric, richness_report,
    span_decomposition, sufficiency, survey_sufficiency, RichnessReport, SurveyMode,
};
pub use ddouble::DoubleDouble;
pub use scalar::Scalar;
pub use tangent::{
    collision_derivative, collision_operators, evolve_normal, evolve_tangent,
    free_flight_derivative, lyapunov_spectrum, time_reverse, LyapunovReport,
};

pub type LatticeSubspace = geometry::LatticeSubspace<f64>;
pub type Cylinder = geometry::Cylinder<f64>;
pub type BilliardTable = geometry::BilliardTable<f64>;
pub type TransitivityReport = geometry::TransitivityReport<f64>;
pub type PhasePoint = flow::PhasePoint<f64>;
pub type OrbitSegment = flow::OrbitSegment<f64>;
pub type TangentVector = tangent::TangentVector<f64>;
pub type NormalVector = tangent::NormalVector<f64>;
pub type CollisionOperators = tangent::CollisionOperators<f64>;
pub type NeutralSpaceResult = hyperbolicity::NeutralSpaceResult<f64>;
pub type SufficiencyVerdict = hyperbolicity::SufficiencyVerdict<f64>;
pub type SpanDecomposition = hyperbolicity::SpanDecomposition<f64>;
