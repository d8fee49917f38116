//! Shared domain types: points, domains, subdifferentials, kernels,
//! function objects, check reports and constrained problems.

pub mod domain;
pub mod function;
pub mod kernel;
pub mod problem;
pub mod report;
pub mod subgradient;
pub mod vector;

pub use domain::{BoxRegion, DomainKind, DomainSpec};
pub use function::{
    AuditRecord, Body, Certificates, Certification, FunctionObject, Provenance, KINK_TOL,
};
pub use kernel::{kernel_eval, AlphaRule, CanonicalVariant, KernelFn, Rule};
pub use problem::ConstrainedProblem;
pub use report::{CheckReport, Witness};
pub use subgradient::{subgradient_extreme_points, SubgradientSet};
pub use vector::Vector;
