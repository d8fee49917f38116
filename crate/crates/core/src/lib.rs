//! Construction of invex functions with explicit kernels, and sampled
//! verification of invexity and related generalized-convexity properties.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod analysis;
pub mod cli;
pub mod error;
pub mod model;
pub mod solve;

pub use error::{AuditFailure, InvexError, Result};
pub use model::*;
