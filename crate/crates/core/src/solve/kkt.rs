//! KKT residuals and a sampled audit of global optimality for constrained problems.

use rand::Rng;
use serde::Serialize;

use crate::analysis::sampler::{self, SamplerConfig};
use crate::analysis::VALUE_SLACK;
use crate::error::{InvexError, Result};
use crate::model::report::Tracker;
use crate::model::vector::norm;
use crate::model::{CheckReport, ConstrainedProblem, SubgradientSet, Vector, Witness};

/// Below this feasible acceptance rate the audit refuses to conclude.
pub const FEASIBLE_RATE_FLOOR: f64 = 1e-4;

/// A candidate point with one multiplier per constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktPoint {
    pub x: Vector,
    pub multipliers: Vec<f64>,
}

impl KktPoint {
    pub fn new(x: Vector, multipliers: Vec<f64>) -> Self {
        KktPoint { x, multipliers }
    }
}

/// Worst of: the least-norm element of `df(x) + sum_i lambda_i dg_i(x)`,
/// `max_i g_i(x)`, `max_i |lambda_i g_i(x)|` and `max_i -lambda_i`.
pub fn kkt_check(p: &ConstrainedProblem, cand: &KktPoint, tol: f64) -> Result<CheckReport> {
    let cons = p.constraints();
    if cand.multipliers.len() != cons.len() {
        return Err(InvexError::DimMismatch {
            expected: cons.len(),
            got: cand.multipliers.len(),
        });
    }
    let x = cand.x.as_slice();
    let f = p.objective();
    f.eval(x)?;
    let mut lagrangian: SubgradientSet = f.subdiff(x)?;
    let mut worst: f64 = 0.0;
    for (g, &lam) in cons.iter().zip(&cand.multipliers) {
        let gx = g.eval(x)?;
        lagrangian = lagrangian.add(&g.subdiff(x)?.scale(lam))?;
        worst = worst.max(gx).max((lam * gx).abs()).max(-lam);
    }
    worst = worst.max(norm(&lagrangian.min_norm_element()));
    let mut t = Tracker::new("kkt", tol, 0);
    t.sample();
    t.count_evals(1 + 2 * cons.len() as u64);
    t.observe(worst, || Witness {
        x: x.to_vec(),
        y: None,
        xi: Some(lagrangian.min_norm_element()),
    });
    Ok(t.finish())
}

/// Whether the problem meets the shared-kernel hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HypothesisStatus {
    SharedKernel,
    KernelMismatch { left: String, right: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuditVerdict {
    /// No feasible sample beats the candidate.
    GlobalOptimal,
    /// A better feasible point exists, which the kernel mismatch permits.
    NonGlobalExpected,
    /// A better feasible point exists although the kernels are shared.
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktAudit {
    pub report: CheckReport,
    pub hypothesis: HypothesisStatus,
    pub verdict: AuditVerdict,
    pub feasible: usize,
    pub drawn: usize,
}

/// Compare `f(cand.x)` with `f` at feasible points of the region: its
/// corners, its center and `cfg.pair_count` uniform draws.
pub fn kkt_global_audit(
    p: &ConstrainedProblem,
    cand: &KktPoint,
    cfg: &SamplerConfig,
) -> Result<KktAudit> {
    cfg.validate()?;
    let f = p.objective();
    let region = cfg
        .region
        .clone()
        .unwrap_or_else(|| f.sample_region().clone());
    if region.dim() != f.dim() {
        return Err(InvexError::DimMismatch {
            expected: f.dim(),
            got: region.dim(),
        });
    }
    let f_cand = f.eval(&cand.x)?;
    let mut points = if region.dim() <= 10 {
        region.corners()
    } else {
        Vec::new()
    };
    points.push(region.center());
    let mut rng = sampler::rng(cfg.seed);
    let mut t = Tracker::new("kkt_global", VALUE_SLACK, cfg.seed);
    let (mut drawn, mut feasible) = (0usize, 0usize);
    let mut visit = |y: &[f64], t: &mut Tracker| {
        drawn += 1;
        t.sample();
        if !f.domain().contains(y) {
            return;
        }
        t.count_evals(1 + p.constraints().len() as u64);
        if p.constraints()
            .iter()
            .all(|g| g.domain().contains(y) && g.eval_unchecked(y) <= 0.0)
        {
            feasible += 1;
            t.observe(f_cand - f.eval_unchecked(y), || {
                Witness::pair(&cand.x, y, None)
            });
        }
    };
    for y in &points {
        visit(y, &mut t);
    }
    for _ in 0..cfg.pair_count {
        let y: Vec<f64> = (0..region.dim())
            .map(|i| rng.random_range(region.lo()[i]..=region.hi()[i]))
            .collect();
        visit(&y, &mut t);
    }
    let rate = feasible as f64 / drawn as f64;
    if rate < FEASIBLE_RATE_FLOOR {
        return Err(InvexError::InsufficientFeasibleSamples {
            rate,
            floor: FEASIBLE_RATE_FLOOR,
        });
    }
    let report = t.finish();
    let hypothesis = match p.kernel_mismatch() {
        None if p.common_kernel().is_some() => HypothesisStatus::SharedKernel,
        Some(InvexError::KernelMismatch { left, right }) => {
            HypothesisStatus::KernelMismatch { left, right }
        }
        _ => HypothesisStatus::KernelMismatch {
            left: "<none>".into(),
            right: "<none>".into(),
        },
    };
    let verdict = match (report.passed, &hypothesis) {
        (true, _) => AuditVerdict::GlobalOptimal,
        (false, HypothesisStatus::SharedKernel) => AuditVerdict::Contradiction,
        (false, _) => AuditVerdict::NonGlobalExpected,
    };
    Ok(KktAudit {
        report,
        hypothesis,
        verdict,
        feasible,
        drawn,
    })
}
