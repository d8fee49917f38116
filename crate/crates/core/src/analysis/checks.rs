//! Sampled checks of the invexity, convexity, pseudoconvexity and
//! quasiconvexity inequalities.

use rand::Rng;

use crate::analysis::sampler::{self, PointSampler, SamplerConfig};
use crate::analysis::{maximizing_element, VALUE_SLACK};
use crate::error::{InvexError, Result};
use crate::model::report::Tracker;
use crate::model::vector::{dot, sub};
use crate::model::{CheckReport, FunctionObject, KernelFn, Witness};

/// Lower bound on sampled `alpha` in the structural pseudoconvexity test.
pub const ALPHA_FLOOR: f64 = 1e-12;
/// Per-coordinate `alpha` values closer than this count as one shared `alpha`.
pub const SHARED_ALPHA_TOL: f64 = 1e-12;
/// Segment positions tested by the quasiconvexity check.
pub const SEGMENT_STEPS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn kernel_inequality(
    f: &FunctionObject,
    cfg: &SamplerConfig,
    tol: f64,
    property: &str,
    eta: impl Fn(&[f64], &[f64]) -> Result<Vec<f64>>,
) -> Result<CheckReport> {
    let mut sampler = PointSampler::new(f, cfg)?;
    let mut t = Tracker::new(property, tol, cfg.seed);
    for _ in 0..cfg.pair_count {
        let x = sampler.point();
        let y = sampler.point();
        t.sample();
        let e = eta(&x, &y)?;
        let s = f.subdiff_unchecked(&x);
        let xi = maximizing_element(&s, &e);
        let df = f.eval_unchecked(&y) - f.eval_unchecked(&x);
        t.count_evals(3);
        t.observe(dot(&xi, &e) - df, || Witness::pair(&x, &y, Some(&xi)));
    }
    Ok(t.finish())
}

/// `<xi, eta(x, y)> - (f(y) - f(x))` maximized over the subdifferential at
/// sampled pairs; passes iff the worst value is at most `tol`.
pub fn check_invexity(f: &FunctionObject, cfg: &SamplerConfig, tol: f64) -> Result<CheckReport> {
    let k = f
        .kernel()
        .ok_or_else(|| InvexError::MissingKernel(f.signature().to_string()))?
        .clone();
    kernel_inequality(f, cfg, tol, "invex", |x, y| k.eval(x, y))
}

/// The invexity check with `eta(x, y) = y - x`.
pub fn check_convexity(f: &FunctionObject, cfg: &SamplerConfig, tol: f64) -> Result<CheckReport> {
    if !f.domain().is_convex() {
        return Err(InvexError::NonConvexDomain);
    }
    kernel_inequality(f, cfg, tol, "convex", |x, y| Ok(sub(y, x)))
}

fn scalar_alpha(k: &KernelFn, x: &[f64], y: &[f64]) -> Result<f64> {
    match k {
        KernelFn::ScaledDifference(a) => Ok((a.func())(x, y)),
        KernelFn::Componentwise(parts) => {
            let mut shared: Option<f64> = None;
            for (i, p) in parts.iter().enumerate() {
                let KernelFn::ScaledDifference(a) = p else {
                    return Err(InvexError::NotScaledDifference);
                };
                let v = (a.func())(&x[i..i + 1], &y[i..i + 1]);
                match shared {
                    None => shared = Some(v),
                    Some(s) if (s - v).abs() <= SHARED_ALPHA_TOL => {}
                    Some(_) => return Err(InvexError::NotScaledDifference),
                }
            }
            shared.ok_or(InvexError::NotScaledDifference)
        }
        _ => Err(InvexError::NotScaledDifference),
    }
}

/// Structural test: the kernel has the form `alpha(x, y) (y - x)` with a
/// single `alpha`, and `alpha` is nonnegative at pairs drawn uniformly from
/// `cfg.region`, which is required.
///
/// Kernels of another form are rejected with `NotScaledDifference`.
pub fn check_pseudoconvex_structural(k: &KernelFn, cfg: &SamplerConfig) -> Result<CheckReport> {
    cfg.validate()?;
    if !matches!(
        k,
        KernelFn::ScaledDifference(_) | KernelFn::Componentwise(_)
    ) {
        return Err(InvexError::NotScaledDifference);
    }
    let region = cfg.region.as_ref().ok_or_else(|| {
        InvexError::Precondition("structural check needs a sampling region".into())
    })?;
    let mut rng = sampler::rng(cfg.seed);
    let mut draw = || -> Vec<f64> {
        (0..region.dim())
            .map(|i| rng.random_range(region.lo()[i]..=region.hi()[i]))
            .collect()
    };
    let mut t = Tracker::new("pseudoconvex_structural", ALPHA_FLOOR, cfg.seed);
    for _ in 0..cfg.pair_count {
        let x = draw();
        let y = draw();
        t.sample();
        t.count_evals(1);
        let a = scalar_alpha(k, &x, &y)?;
        t.observe(-a, || Witness::pair(&x, &y, None));
    }
    Ok(t.finish())
}

/// If some `xi` in the subdifferential at `x` has `<xi, y - x> >= 0`, then
/// `f(x) <= f(y)` must hold up to the value slack.
pub fn check_pseudoconvex_definitional(
    f: &FunctionObject,
    cfg: &SamplerConfig,
) -> Result<CheckReport> {
    if !f.domain().is_convex() {
        return Err(InvexError::NonConvexDomain);
    }
    let mut sampler = PointSampler::new(f, cfg)?;
    let mut t = Tracker::new("pseudoconvex", VALUE_SLACK, cfg.seed);
    for _ in 0..cfg.pair_count {
        let x = sampler.point();
        let y = sampler.point();
        t.sample();
        let d = sub(&y, &x);
        let s = f.subdiff_unchecked(&x);
        let xi = maximizing_element(&s, &d);
        t.count_evals(1);
        if dot(&xi, &d) >= 0.0 {
            t.count_evals(2);
            let gap = f.eval_unchecked(&x) - f.eval_unchecked(&y);
            t.observe(gap, || Witness::pair(&x, &y, Some(&xi)));
        }
    }
    Ok(t.finish())
}

/// `f(t x + (1 - t) y) <= max(f(x), f(y))` at nine points of each sampled segment.
pub fn check_quasiconvex(f: &FunctionObject, cfg: &SamplerConfig) -> Result<CheckReport> {
    if !f.domain().is_convex() {
        return Err(InvexError::NonConvexDomain);
    }
    let mut sampler = PointSampler::new(f, cfg)?;
    let mut t = Tracker::new("quasiconvex", VALUE_SLACK, cfg.seed);
    for _ in 0..cfg.pair_count {
        let x = sampler.point();
        let y = sampler.point();
        t.sample();
        let top = f.eval_unchecked(&x).max(f.eval_unchecked(&y));
        let mut worst = f64::NEG_INFINITY;
        for s in SEGMENT_STEPS {
            let z: Vec<f64> = x
                .iter()
                .zip(&y)
                .map(|(a, b)| s * a + (1.0 - s) * b)
                .collect();
            worst = worst.max(f.eval_unchecked(&z) - top);
        }
        t.count_evals(2 + SEGMENT_STEPS.len() as u64);
        t.observe(worst, || Witness::pair(&x, &y, None));
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        abs_atom, fractional, identity_positive, log_compose, make_convex_atom, ratio_compose,
        separable_sum, ConvexAtomSpec,
    };
    use crate::model::{AlphaRule, DomainSpec, SubgradientSet};

    fn cfg(pairs: usize) -> SamplerConfig {
        SamplerConfig::default().with_pairs(pairs)
    }

    fn log_reg() -> FunctionObject {
        let g = make_convex_atom(ConvexAtomSpec::Abs {
            shift: 0.0,
            offset: 1.0,
        })
        .unwrap();
        let p = log_compose(&g).unwrap();
        separable_sum(&[p.clone(), p]).unwrap()
    }

    #[test]
    fn ratio_of_square_is_invex() {
        let sq = make_convex_atom(ConvexAtomSpec::Square).unwrap();
        let f = ratio_compose(&sq, 1.0).unwrap();
        let r = check_invexity(&f, &cfg(20_000), 1e-9).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert!(r.witness.is_none());
    }

    #[test]
    fn wrong_kernel_is_caught() {
        let f = FunctionObject::from_rules(
            "-x^2",
            DomainSpec::all_space(1),
            |x| -x[0] * x[0],
            |x| SubgradientSet::singleton(vec![-2.0 * x[0]]),
        )
        .with_kernel(
            KernelFn::scaled(AlphaRule::unit()),
            crate::model::Provenance::Declared,
        );
        let r = check_invexity(&f, &cfg(1_000), 1e-9).unwrap();
        assert!(!r.passed);
        assert!(r.witness.is_some());
        let bare = FunctionObject::from_rules(
            "c",
            DomainSpec::all_space(1),
            |_| 0.0,
            |_| SubgradientSet::singleton(vec![0.0]),
        );
        assert!(matches!(
            check_invexity(&bare, &cfg(10), 1e-9),
            Err(InvexError::MissingKernel(_))
        ));
    }

    #[test]
    fn structural_pseudoconvexity() {
        let fx = fractional(&abs_atom(1.0), &identity_positive()).unwrap();
        let pos = cfg(1_000).with_region(fx.sample_region().clone());
        let r = check_pseudoconvex_structural(fx.kernel().unwrap(), &pos).unwrap();
        assert!(r.passed);
        let lr = log_reg();
        let plane = cfg(1_000).with_region(lr.sample_region().clone());
        assert!(matches!(
            check_pseudoconvex_structural(lr.kernel().unwrap(), &plane),
            Err(InvexError::NotScaledDifference)
        ));
        let unit = KernelFn::scaled(AlphaRule::unit());
        assert!(check_pseudoconvex_structural(&unit, &plane).unwrap().passed);
        assert!(matches!(
            check_pseudoconvex_structural(&unit, &cfg(10)),
            Err(InvexError::Precondition(_))
        ));
        let neg = KernelFn::scaled(AlphaRule::alpha("neg", |_, _| -1.0));
        assert!(!check_pseudoconvex_structural(&neg, &plane).unwrap().passed);
    }

    #[test]
    fn one_dimensional_log_passes_two_dimensional_fails() {
        let g = make_convex_atom(ConvexAtomSpec::Abs {
            shift: 0.0,
            offset: 1.0,
        })
        .unwrap();
        let one = log_compose(&g).unwrap();
        assert!(
            check_pseudoconvex_definitional(&one, &cfg(20_000))
                .unwrap()
                .passed
        );
        assert!(check_quasiconvex(&one, &cfg(5_000)).unwrap().passed);
        let two = log_reg();
        let p = check_pseudoconvex_definitional(&two, &cfg(20_000)).unwrap();
        assert!(!p.passed && p.witness.is_some());
        assert!(!check_quasiconvex(&two, &cfg(20_000)).unwrap().passed);
    }

    #[test]
    fn affine_and_convex_atoms_pass_everything() {
        let a = make_convex_atom(ConvexAtomSpec::Affine {
            coeffs: vec![1.0, -2.0],
            offset: 0.5,
        })
        .unwrap();
        let c = cfg(5_000);
        assert!(check_pseudoconvex_definitional(&a, &c).unwrap().passed);
        assert!(check_quasiconvex(&a, &c).unwrap().passed);
        assert!(check_convexity(&a, &c, 1e-9).unwrap().passed);
        let l1 = make_convex_atom(ConvexAtomSpec::Norm1 { dim: 2 }).unwrap();
        assert!(check_convexity(&l1, &c, 1e-9).unwrap().passed);
        assert!(!check_convexity(&log_reg(), &c, 1e-9).unwrap().passed);
    }

    #[test]
    fn reports_are_deterministic() {
        let f = log_reg();
        let a = check_quasiconvex(&f, &cfg(2_000)).unwrap();
        let b = check_quasiconvex(&f, &cfg(2_000)).unwrap();
        assert_eq!(a, b);
        let c = check_quasiconvex(&f, &cfg(2_000).with_seed(7)).unwrap();
        assert_eq!(c.rng_seed, 7);
    }
}
