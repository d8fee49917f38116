//! Quasar-convexity and the Polyak-Lojasiewicz inequality, with the kernels
//! they induce. Both are gradient conditions, so points near kinks are skipped.

use std::sync::Arc;

use crate::analysis::sampler::{PointSampler, SamplerConfig};
use crate::analysis::{SMOOTH_SKIP_TOL, VALUE_SLACK};
use crate::error::{InvexError, Result};
use crate::model::report::Tracker;
use crate::model::vector::{dot, sub};
use crate::model::{CheckReport, FunctionObject, KernelFn, Rule, Vector, Witness};

fn gamma_ok(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(InvexError::Precondition(format!(
            "gamma = {gamma} is not in (0, 1]"
        )))
    }
}

/// `f(x*) - f(x) >= (1/gamma) <grad f(x), x* - x>` at sampled differentiable
/// `x`, together with `f(x*) <= f(y)` at an independent sample `y`, which
/// is what makes the induced kernel valid for every pair.
pub fn check_quasar_convex(
    f: &FunctionObject,
    x_star: &Vector,
    gamma: f64,
    cfg: &SamplerConfig,
) -> Result<CheckReport> {
    gamma_ok(gamma)?;
    let f_star = f.eval(x_star)?;
    let mut sampler = PointSampler::new(f, cfg)?;
    let mut t = Tracker::new("quasar_convex", VALUE_SLACK, cfg.seed);
    for _ in 0..cfg.pair_count {
        let x = sampler.point();
        let y = sampler.point();
        t.sample();
        let s = f.subdiff_unchecked(&x);
        if !s.is_singleton() || f.near_kink(&x, SMOOTH_SKIP_TOL) {
            t.skip();
            continue;
        }
        let grad = s.smooth_part();
        let fx = f.eval_unchecked(&x);
        let quasar = dot(grad, &sub(x_star, &x)) / gamma - (f_star - fx);
        let below = f_star - f.eval_unchecked(&y);
        t.count_evals(3);
        if quasar >= below {
            t.observe(quasar, || Witness::pair(&x, x_star, Some(grad)));
        } else {
            t.observe(below, || Witness::pair(x_star, &y, None));
        }
    }
    Ok(t.finish())
}

/// `(1/2)|grad f(x)|^2 >= mu (f(x) - f*)` at sampled differentiable `x`.
pub fn check_pl(
    f: &FunctionObject,
    f_star: f64,
    mu: f64,
    cfg: &SamplerConfig,
) -> Result<CheckReport> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(InvexError::Precondition(format!(
            "mu = {mu} must be positive"
        )));
    }
    let mut sampler = PointSampler::new(f, cfg)?;
    let mut t = Tracker::new("polyak_lojasiewicz", VALUE_SLACK, cfg.seed);
    for _ in 0..cfg.pair_count {
        let x = sampler.point();
        t.sample();
        let s = f.subdiff_unchecked(&x);
        if !s.is_singleton() || f.near_kink(&x, SMOOTH_SKIP_TOL) {
            t.skip();
            continue;
        }
        let grad = s.smooth_part();
        t.count_evals(2);
        let violation = mu * (f.eval_unchecked(&x) - f_star) - 0.5 * dot(grad, grad);
        t.observe(violation, || Witness {
            x: x.clone(),
            y: None,
            xi: Some(grad.to_vec()),
        });
    }
    Ok(t.finish())
}

/// `eta(x, y) = (1/gamma)(x* - x)`.
pub fn induced_kernel_from_quasar(x_star: &Vector, gamma: f64) -> Result<KernelFn> {
    gamma_ok(gamma)?;
    let target = x_star.clone();
    Ok(KernelFn::Explicit(Rule::pair(
        format!("quasar[x*={target};gamma={gamma}]"),
        move |x, _| {
            x.iter()
                .zip(target.iter())
                .map(|(a, b)| (b - a) / gamma)
                .collect()
        },
    )))
}

/// `eta(x, y) = -(1/(2 mu)) xi(x)` with `xi` the least-norm subgradient.
pub fn induced_kernel_from_pl(f: &FunctionObject, mu: f64) -> Result<KernelFn> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(InvexError::Precondition(format!(
            "mu = {mu} must be positive"
        )));
    }
    let body = Arc::clone(f.body());
    Ok(KernelFn::Explicit(Rule::pair(
        format!("pl[mu={mu};{}]", f.signature()),
        move |x, _| {
            body.subdiff_unchecked(x)
                .min_norm_element()
                .iter()
                .map(|g| -g / (2.0 * mu))
                .collect()
        },
    )))
}
