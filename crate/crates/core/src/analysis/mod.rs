//! Sampled verification of invexity and related generalized-convexity properties.

pub mod checks;
pub mod sampler;
pub mod smooth;
pub mod stationary;

pub use checks::{
    check_convexity, check_invexity, check_pseudoconvex_definitional,
    check_pseudoconvex_structural, check_quasiconvex,
};
pub use sampler::{PointSampler, SamplerConfig};
pub use smooth::{
    check_pl, check_quasar_convex, induced_kernel_from_pl, induced_kernel_from_quasar,
};
pub use stationary::check_stationary_global;

use crate::model::{SubgradientSet, Vector};

/// Slack for comparisons between function values.
pub const VALUE_SLACK: f64 = 1e-9;
/// Slack for algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// A least-norm subgradient at most this long marks a stationary point.
pub const STATIONARY_TOL: f64 = 1e-8;
/// Gradient-only checks skip points this close to a kink locus.
pub const SMOOTH_SKIP_TOL: f64 = 1e-9;

/// The element of the set closest to the origin: per coordinate, 0 clamped
/// into `[smooth_i + lo_i, smooth_i + hi_i]`.
pub fn min_norm_subgradient(s: &SubgradientSet) -> Vector {
    Vector::new(s.min_norm_element()).expect("finite subgradient set")
}

/// The extreme point of `s` maximizing `<xi, d>`.
pub(crate) fn maximizing_element(s: &SubgradientSet, d: &[f64]) -> Vec<f64> {
    (0..s.dim())
        .map(|i| {
            let (lo, hi) = s.coordinate_range(i);
            if d[i] > 0.0 {
                hi
            } else {
                lo
            }
        })
        .collect()
}
