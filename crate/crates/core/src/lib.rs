//! Numerical convex geometry: volume products, Santaló points, polar duality,
//! discrete symmetry groups, signed-volume vectors and symplectic capacities
//! of convex bodies in low dimensions.
//!
//! The crate is organised around two body representations: exact polytopes
//! ([`polytope::VPolytope`]) and smooth star bodies given by their radial
//! function ([`starbody::StarBody`]). On top of those sit the volume-product
//! machinery ([`mahler`]), the signed-volume estimates ([`signed`]) and the
//! capacity formulas for Lagrangian products ([`symplectic`]).

pub mod geometry;
pub mod mahler;
pub mod polytope;
pub mod signed;
pub mod starbody;
pub mod symmetry;
pub mod symplectic;
pub mod tolerance;

pub use geometry::{Matrix, Vector};
pub use tolerance::Tolerances;

/// Errors shared across the crate's geometric operations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum GeometryError {
    #[error("input points are not full-dimensional")]
    DegenerateInput,
    #[error("center point is not strictly interior")]
    CenterNotInterior,
    #[error("origin is not strictly interior")]
    OriginNotInterior,
    #[error("zero vector is not a valid direction")]
    ZeroVector,
    #[error("point is not on the body boundary")]
    NotOnBoundary,
    #[error("operation requires a smooth body kind")]
    NonSmoothKind,
    #[error("spanning vectors are linearly dependent")]
    DependentVectors,
    #[error("test point lies outside the body")]
    PointOutside,
    #[error("group enumeration exceeds the supported cap")]
    TooLarge,
    #[error("body is not invariant under the requested group")]
    NotInvariant,
    #[error("frame points are not on the body boundary; dilate first")]
    ScalingRequired,
    #[error("sampled convexity check failed for the perturbed body")]
    ConvexityLost,
    #[error("iteration cap reached without convergence")]
    NonConvergence,
    #[error("body is not centrally symmetric")]
    NotCentrallySymmetric,
    #[error("hypothesis {0} of the inequality is violated numerically")]
    HypothesisViolated(usize),
    #[error("body matches no supported class for the implication chain")]
    HypothesisNotCovered,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, GeometryError>;
