//! Exact verification engine for equivariant holomorphic Lefschetz numbers
//! of differential operators on model spaces.
//!
//! The crate computes both sides of the fixed-point trace identity for
//! CP^1-type geometries with equivariant line bundles, the finite-group
//! averaging corollary, and the underlying twisted Hochschild / gamma-trace
//! algebra, all in exact cyclotomic arithmetic. A small numerical module
//! checks the heat-kernel limits that pin the localization constants.

pub mod geometry;
pub mod gtrace;
pub mod heat;
pub mod hochschild;
pub mod lefschetz;
pub mod linalg;
pub mod mat;
pub mod orbifold;
pub mod report;
pub mod scalars;
pub mod weyl;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("untwisted direction: some eigenvalue equals 1; split off the fixed subspace first")]
    UntwistedDirection,
    #[error("raise degree_bound: membership system inconsistent within bound")]
    RaiseDegreeBound,
    #[error("boundary operator is undefined on degree-0 chains")]
    DegreeZeroBoundary,
    #[error("not a global operator: poles remain in the chart at infinity")]
    NotGlobal,
    #[error("non-isolated fixed set: use product decomposition or out of scope")]
    NonIsolatedFixedSet,
    #[error("operator is not invariant under the group")]
    NotInvariant,
    #[error("unsupported jet at a flip fixed point: operator is not polynomial in z d - k/2")]
    UnsupportedFlipJet,
    #[error("grid resolution guard violated: {0}")]
    GridResolution(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub use mat::Mat;
pub use scalars::{Cyclotomic, Rat};
pub use weyl::{DiagonalAction, FormalDiffOp, Monomial, PolyVec};
