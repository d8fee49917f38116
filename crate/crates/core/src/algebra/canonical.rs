//! Case-defined kernels for functions whose stationary points are global
//! minimizers, and a grid audit that establishes that property on a box.

use std::sync::Arc;

use crate::error::{AuditFailure, InvexError, Result};
use crate::model::vector::norm;
use crate::model::{
    AuditRecord, BoxRegion, CanonicalVariant, Certification, FunctionObject, KernelFn, Provenance,
    Vector,
};

/// Smallest least-norm subgradient tolerated away from the minimizer.
pub const AUDIT_FLOOR: f64 = 1e-6;
/// Radius of the ball around the minimizer excluded from the floor test.
pub const AUDIT_EXCLUSION_RADIUS: f64 = 1e-3;
/// The conjectured minimizer must have a least-norm subgradient below this.
pub const AUDIT_STATIONARY_TOL: f64 = 1e-8;
/// Slack when comparing grid values against the minimizer's value.
pub const AUDIT_VALUE_SLACK: f64 = 1e-9;

/// The canonical kernel of a certified function.
pub fn canonical_kernel(f: &FunctionObject, variant: CanonicalVariant) -> Result<KernelFn> {
    if f.certificates().invex.is_none() {
        return Err(InvexError::UncertifiedFunction(f.signature().to_string()));
    }
    Ok(KernelFn::Canonical {
        function: Arc::clone(f.body()),
        variant,
    })
}

/// Grid audit settings. `known_min = None` asserts that the region holds no
/// stationary point at all.
#[derive(Debug, Clone)]
pub struct StationarityAudit {
    pub known_min: Option<Vector>,
    pub region: BoxRegion,
    /// Total number of grid points requested; the per-axis count is
    /// `ceil(density^(1/n))`, rounded up to an odd number so the center is a node.
    pub grid_density: usize,
    pub floor: f64,
    pub exclusion_radius: f64,
}

impl StationarityAudit {
    pub fn new(known_min: Option<Vector>, region: BoxRegion, grid_density: usize) -> Self {
        StationarityAudit {
            known_min,
            region,
            grid_density,
            floor: AUDIT_FLOOR,
            exclusion_radius: AUDIT_EXCLUSION_RADIUS,
        }
    }

    pub fn points_per_axis(&self) -> usize {
        let n = self.region.dim() as f64;
        let mut m = (self.grid_density.max(2) as f64).powf(1.0 / n).ceil() as usize;
        // guard against powf rounding just above an integer
        if m > 1 && ((m - 1) as f64).powf(n) >= self.grid_density as f64 {
            m -= 1;
        }
        m = m.max(3);
        if m.is_multiple_of(2) {
            m += 1;
        }
        m
    }

    /// Audit `f` and, on success, attach the nonsmooth canonical kernel.
    pub fn run(&self, f: &FunctionObject) -> Result<FunctionObject> {
        let n = f.dim();
        if self.region.dim() != n {
            return Err(InvexError::DimMismatch {
                expected: n,
                got: self.region.dim(),
            });
        }
        if !(self.floor > 0.0 && self.exclusion_radius >= 0.0) {
            return Err(InvexError::Param("audit floor must be positive".into()));
        }
        let min_value = match &self.known_min {
            Some(m) => {
                let v = f.eval(m)?;
                let nrm = norm(&f.subdiff(m)?.min_norm_element());
                if nrm > AUDIT_STATIONARY_TOL {
                    return Err(InvexError::AuditFailed {
                        witness: m.clone(),
                        reason: AuditFailure::KnownMinNotStationary { norm: nrm },
                    });
                }
                Some(v)
            }
            None => None,
        };

        let m = self.points_per_axis();
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let (lo, hi) = (self.region.lo()[i], self.region.hi()[i]);
                let (c, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                let d = (m - 1) as f64;
                (0..m)
                    .map(|k| c + half * ((2 * k) as f64 - d) / d)
                    .collect()
            })
            .collect();

        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        let mut stationary_witness: Option<(Vec<f64>, f64)> = None;
        let mut below_witness: Option<(Vec<f64>, f64)> = None;
        let mut min_norm_seen = f64::INFINITY;
        let mut lipschitz: f64 = 0.0;
        loop {
            for i in 0..n {
                x[i] = axes[i][idx[i]];
            }
            if f.domain().contains(&x) {
                let s = f.subdiff_unchecked(&x);
                let nrm = norm(&s.min_norm_element());
                let far: Vec<f64> = (0..n)
                    .map(|i| {
                        let (a, b) = s.coordinate_range(i);
                        a.abs().max(b.abs())
                    })
                    .collect();
                lipschitz = lipschitz.max(norm(&far));
                let excluded = self.known_min.as_ref().is_some_and(|k| {
                    norm(&crate::model::vector::sub(&x, k)) <= self.exclusion_radius
                });
                if !excluded {
                    min_norm_seen = min_norm_seen.min(nrm);
                    if nrm < self.floor && stationary_witness.is_none() {
                        stationary_witness = Some((x.clone(), nrm));
                    }
                }
                if let Some(mv) = min_value {
                    let v = f.eval_unchecked(&x);
                    if v < mv - AUDIT_VALUE_SLACK && below_witness.as_ref().is_none_or(|w| v < w.1)
                    {
                        below_witness = Some((x.clone(), v));
                    }
                }
            }
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }

        if let (Some((w, value)), Some(mv)) = (below_witness, min_value) {
            return Err(InvexError::AuditFailed {
                witness: Vector::new(w)?,
                reason: AuditFailure::BelowMinimum {
                    value,
                    min_value: mv,
                },
            });
        }
        if let Some((w, nrm)) = stationary_witness {
            return Err(InvexError::AuditFailed {
                witness: Vector::new(w)?,
                reason: AuditFailure::StationaryAwayFromMin { norm: nrm },
            });
        }

        let record = AuditRecord {
            region: self.region.clone(),
            grid_density: self.grid_density,
            points_per_axis: m,
            floor: self.floor,
            exclusion_radius: self.exclusion_radius,
            known_min: self.known_min.clone(),
            min_subgradient_norm: min_norm_seen,
        };
        let mut certificates = f.certificates().clone();
        certificates.invex = Some(Certification::Audited(Box::new(record)));
        let certified = f.clone().with_certificates(certificates);
        let kernel = canonical_kernel(&certified, CanonicalVariant::Nonsmooth)?;
        Ok(certified
            .with_kernel(kernel, Provenance::StationarityAudit)
            .with_lipschitz_note(lipschitz))
    }
}

/// Audit with the default floor and exclusion radius.
pub fn declare_invex_by_stationarity_audit(
    f: &FunctionObject,
    known_min: Option<&Vector>,
    region: &BoxRegion,
    grid_density: usize,
) -> Result<FunctionObject> {
    StationarityAudit::new(known_min.cloned(), region.clone(), grid_density).run(f)
}
