//! Constructors that produce invex functions together with explicit kernels.
//!
//! Each constructor checks its hypotheses on probe points of the operands'
//! sample regions and returns a [`FunctionObject`] whose kernel is the
//! closed-form `eta` of the construction. Kernels are never assumed correct:
//! `analysis::check_invexity` verifies them.

pub mod atoms;
pub mod canonical;
pub mod compose;
pub mod sums;

pub use atoms::{
    abs_atom, certify_concave_sampled, certify_convex_sampled, identity_positive, make_convex_atom,
    ConvexAtomSpec,
};
pub use canonical::{
    canonical_kernel, declare_invex_by_stationarity_audit, StationarityAudit,
    AUDIT_EXCLUSION_RADIUS, AUDIT_FLOOR,
};
pub use compose::{
    compose_transform, concave_composite, fractional, log_compose, power_compose, ratio_compose,
    ScalarConcaveSpec, Transform,
};
pub use sums::{separable_sum, weighted_sum};

use rand::Rng;

use crate::analysis::sampler;
use crate::model::FunctionObject;

/// Deterministic probe set for hypothesis checks: region corners, the center,
/// the center moved onto each kink locus, and `random` seeded uniform points.
pub(crate) fn probe_points(f: &FunctionObject, random: usize) -> Vec<Vec<f64>> {
    let region = f.sample_region();
    let mut pts = Vec::new();
    if f.dim() <= 10 {
        pts.extend(region.corners());
    }
    let center = region.center();
    pts.push(center.clone());
    for (i, ks) in f.kinks().iter().enumerate() {
        for k in ks {
            if region.lo()[i] <= *k && *k <= region.hi()[i] {
                let mut p = center.clone();
                p[i] = *k;
                pts.push(p);
            }
        }
    }
    let mut rng = sampler::rng(42);
    for _ in 0..random {
        pts.push(
            (0..f.dim())
                .map(|i| rng.random_range(region.lo()[i]..=region.hi()[i]))
                .collect(),
        );
    }
    pts.retain(|p| f.domain().contains(p));
    pts
}

/// Number of random probe points used by constructors.
pub(crate) const PROBES: usize = 2_000;
