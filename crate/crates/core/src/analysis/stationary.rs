//! Do stationary points of a function attain its sampled minimum?
//!
//! Sampling alone almost never lands on the measure-zero stationary set of a
//! smooth function, so the check also hunts for stationary points: projected
//! subgradient descent on `f` finds local minima, and descent on the squared
//! least-norm subgradient finds maxima and saddle points.

use crate::analysis::sampler::{PointSampler, SamplerConfig};
use crate::analysis::{STATIONARY_TOL, VALUE_SLACK};
use crate::error::Result;
use crate::model::report::Tracker;
use crate::model::vector::{dot, norm};
use crate::model::{BoxRegion, CheckReport, FunctionObject, Witness};
use crate::solve::{multi_start_box, DescentConfig, StepRule};

/// Starting points for each of the two hunting phases.
pub const HUNT_SEEDS: usize = 50;
/// Iteration budget per hunting run.
pub const HUNT_ITERATIONS: usize = 2_000;
const FD_STEP: f64 = 1e-6;
const ARMIJO: f64 = 1e-4;

fn residual(f: &FunctionObject, x: &[f64]) -> f64 {
    let xi = f.subdiff_unchecked(x).min_norm_element();
    dot(&xi, &xi)
}

/// Armijo descent on `|xi(x)|^2` with a central-difference gradient,
/// projected onto the region. Returns the final point and its evaluation count.
fn residual_descent(f: &FunctionObject, region: &BoxRegion, x0: Vec<f64>) -> (Vec<f64>, u64) {
    let mut x = x0;
    let mut evals = 0u64;
    let inside = |p: &[f64]| region.contains(p) && f.domain().contains(p);
    for _ in 0..HUNT_ITERATIONS {
        let r = residual(f, &x);
        evals += 1;
        if r.sqrt() <= STATIONARY_TOL {
            break;
        }
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let (mut up, mut dn) = (x.clone(), x.clone());
            up[i] += FD_STEP;
            dn[i] -= FD_STEP;
            let (up_ok, dn_ok) = (inside(&up), inside(&dn));
            grad[i] = match (up_ok, dn_ok) {
                (true, true) => (residual(f, &up) - residual(f, &dn)) / (2.0 * FD_STEP),
                (true, false) => (residual(f, &up) - r) / FD_STEP,
                (false, true) => (r - residual(f, &dn)) / FD_STEP,
                (false, false) => 0.0,
            };
            evals += 2;
        }
        let gg = dot(&grad, &grad);
        if !(gg > 0.0) || !gg.is_finite() {
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand = region.clamp(
                &x.iter()
                    .zip(&grad)
                    .map(|(a, g)| a - t * g)
                    .collect::<Vec<_>>(),
            );
            if inside(&cand) {
                let rc = residual(f, &cand);
                evals += 1;
                if rc <= r - ARMIJO * t * gg {
                    x = cand;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, evals)
}

/// Every point found with least-norm subgradient at most the stationarity
/// tolerance must satisfy `f(s) <= f(y) + 1e-9` for all sampled `y`. No
/// stationary point found means a vacuous pass.
pub fn check_stationary_global(f: &FunctionObject, cfg: &SamplerConfig) -> Result<CheckReport> {
    let mut sampler = PointSampler::new(f, cfg)?;
    let region = sampler.region().clone();
    let mut t = Tracker::new("stationary_global", VALUE_SLACK, cfg.seed);

    let mut points = vec![region.center()];
    for _ in 0..cfg.pair_count {
        points.push(sampler.point());
    }
    let points: Vec<Vec<f64>> = points
        .into_iter()
        .filter(|p| f.domain().contains(p))
        .collect();
    let mut lowest: Option<(Vec<f64>, f64)> = None;
    let mut candidates = Vec::new();
    for p in &points {
        t.sample();
        t.count_evals(2);
        let v = f.eval_unchecked(p);
        if lowest.as_ref().is_none_or(|(_, m)| v < *m) {
            lowest = Some((p.clone(), v));
        }
        if norm(&f.subdiff_unchecked(p).min_norm_element()) <= STATIONARY_TOL {
            candidates.push(p.clone());
        }
    }

    let span = region
        .lo()
        .iter()
        .zip(region.hi().iter())
        .map(|(a, b)| b - a)
        .fold(0.0, f64::max);
    let descent = DescentConfig::new(StepRule::Diminishing { c: 0.1 * span })
        .with_max_iter(HUNT_ITERATIONS)
        .with_grad_tol(STATIONARY_TOL)
        .with_seed(cfg.seed);
    for run in multi_start_box(f, &region, HUNT_SEEDS, &descent)? {
        t.count_evals(2 * run.len() as u64);
        let x = run.final_point().to_vec();
        if run.final_subgrad_norm() <= STATIONARY_TOL {
            candidates.push(x);
        }
    }
    for _ in 0..HUNT_SEEDS {
        let (x, evals) = residual_descent(f, &region, sampler.point());
        t.count_evals(evals);
        if residual(f, &x).sqrt() <= STATIONARY_TOL {
            candidates.push(x);
        }
    }

    if let Some((y, low)) = lowest {
        for s in &candidates {
            t.count_evals(1);
            let gap = f.eval_unchecked(s) - low;
            t.observe(gap, || Witness::pair(s, &y, None));
        }
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{abs_atom, fractional, identity_positive};
    use crate::model::{DomainSpec, SubgradientSet};

    fn cfg() -> SamplerConfig {
        SamplerConfig::default().with_pairs(5_000)
    }

    #[test]
    fn saddle_free_function_passes_vacuously() {
        let f = FunctionObject::from_rules(
            "x-y^2",
            DomainSpec::all_space(2),
            |x| x[0] - x[1] * x[1],
            |x| SubgradientSet::singleton(vec![1.0, -2.0 * x[1]]),
        );
        let r = check_stationary_global(&f, &cfg()).unwrap();
        assert!(r.passed);
        assert_eq!(r.considered, 0);
    }

    #[test]
    fn maximum_of_negated_square_is_caught() {
        let f = FunctionObject::from_rules(
            "-t^2",
            DomainSpec::all_space(1),
            |x| -x[0] * x[0],
            |x| SubgradientSet::singleton(vec![-2.0 * x[0]]),
        );
        let r = check_stationary_global(&f, &cfg()).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!(w.x, vec![0.0]);
        assert!(f.eval(w.y.as_ref().unwrap()).unwrap() < -1.0);
    }

    #[test]
    fn fraction_kink_minimum_is_global() {
        let f = fractional(&abs_atom(1.0), &identity_positive()).unwrap();
        let r = check_stationary_global(&f, &cfg()).unwrap();
        assert!(r.passed);
        assert!(r.considered > 0);
    }
}
