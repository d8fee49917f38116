use thiserror::Error;

use crate::model::Vector;

pub type Result<T> = std::result::Result<T, InvexError>;

/// Why a stationarity audit rejected a function.
#[derive(Debug, Clone, PartialEq)]
pub enum AuditFailure {
    /// A grid point away from the conjectured minimizer has a (near) zero subgradient.
    StationaryAwayFromMin { norm: f64 },
    /// A grid point has a smaller value than the conjectured minimizer.
    BelowMinimum { value: f64, min_value: f64 },
    /// The conjectured minimizer itself is not stationary.
    KnownMinNotStationary { norm: f64 },
}

#[derive(Debug, Error)]
pub enum InvexError {
    #[error("point {point:?} is outside the domain")]
    Domain { point: Vec<f64> },

    #[error("non-finite entry at index {index} in vector")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("Jacobian transform is singular at {point:?}")]
    SingularJacobian { point: Vec<f64> },

    #[error("{nondegenerate} nondegenerate intervals exceed the enumeration limit of {limit}")]
    CombinatorialLimit { nondegenerate: usize, limit: usize },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("subdifferential leaves smooth+box form: {0}")]
    Representation(String),

    #[error("sign requirement violated: {what} = {value} at {point:?}")]
    SignViolation {
        what: &'static str,
        value: f64,
        point: Vec<f64>,
    },

    #[error("inner function value {value} at {point:?} escapes the interval ({lo}, {hi})")]
    Range {
        value: f64,
        lo: f64,
        hi: f64,
        point: Vec<f64>,
    },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("kernels differ: `{left}` vs `{right}`")]
    KernelMismatch { left: String, right: String },

    #[error("function `{0}` carries no invexity certificate")]
    UncertifiedFunction(String),

    #[error("stationarity audit failed at {witness:?}: {reason:?}")]
    AuditFailed {
        witness: Vector,
        reason: AuditFailure,
    },

    #[error("function `{0}` has no kernel")]
    MissingKernel(String),

    #[error("kernel is not of the form alpha(x, y) * (y - x) with a single shared alpha")]
    NotScaledDifference,

    #[error("domain is not convex")]
    NonConvexDomain,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("feasible acceptance rate {rate} is below {floor}")]
    InsufficientFeasibleSamples { rate: f64, floor: f64 },
}
