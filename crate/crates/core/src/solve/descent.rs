//! Subgradient descent along the least-norm subgradient.

use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::analysis::sampler;
use crate::error::{InvexError, Result};
use crate::model::vector::norm;
use crate::model::{BoxRegion, FunctionObject, Vector};

/// Step halvings tried before a step that leaves the domain ends the run.
pub const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum StepRule {
    /// `(f(x_k) - f*) / |xi_k|^2`.
    Polyak {
        f_star: f64,
    },
    /// `c / sqrt(k)`.
    Diminishing {
        c: f64,
    },
    Constant {
        s: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentConfig {
    pub step_rule: StepRule,
    pub max_iter: usize,
    pub grad_tol: f64,
    /// Seeds the starting points of [`multi_start_box`].
    pub seed: u64,
    /// Land exactly on a declared kink locus whenever a step would cross it.
    pub snap_to_kinks: bool,
}

impl DescentConfig {
    pub fn new(step_rule: StepRule) -> Self {
        DescentConfig {
            step_rule,
            max_iter: 100_000,
            grad_tol: 1e-10,
            seed: sampler::DEFAULT_SEED,
            snap_to_kinks: true,
        }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_grad_tol(mut self, grad_tol: f64) -> Self {
        self.grad_tol = grad_tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.step_rule {
            StepRule::Polyak { f_star } => f_star.is_finite(),
            StepRule::Diminishing { c } => c > 0.0 && c.is_finite(),
            StepRule::Constant { s } => s > 0.0 && s.is_finite(),
        };
        if !ok {
            return Err(InvexError::Param(format!(
                "invalid step rule {:?}",
                self.step_rule
            )));
        }
        if self.max_iter == 0 {
            return Err(InvexError::Param("max_iter must be at least 1".into()));
        }
        if !(self.grad_tol >= 0.0) {
            return Err(InvexError::Param("grad_tol must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    GradTol,
    MaxIter,
    DomainBoundary,
    /// Polyak steps only: `f(x_k) <= f*`.
    TargetReached,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub iterates: Vec<Vector>,
    pub values: Vec<f64>,
    pub subgrad_norms: Vec<f64>,
    pub terminated_by: Termination,
}

impl Trajectory {
    pub fn final_point(&self) -> &Vector {
        self.iterates.last().expect("nonempty trajectory")
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("nonempty trajectory")
    }

    pub fn final_subgrad_norm(&self) -> f64 {
        *self.subgrad_norms.last().expect("nonempty trajectory")
    }

    /// Number of recorded points; a run that stops at `x0` has one.
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    /// CSV with columns `iteration, x1..xn, value, subgrad_norm`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let csv_err = |e: csv::Error| InvexError::InvalidSpec(format!("csv output failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let n = self.iterates.first().map_or(0, Vector::dim);
        let mut header = vec!["iteration".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("value".into());
        header.push("subgrad_norm".into());
        w.write_record(&header).map_err(csv_err)?;
        for (k, x) in self.iterates.iter().enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(x.iter().map(|v| format!("{v:.16e}")));
            row.push(format!("{:.16e}", self.values[k]));
            row.push(format!("{:.16e}", self.subgrad_norms[k]));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()
            .map_err(|e| InvexError::InvalidSpec(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

fn snap(f: &FunctionObject, from: &[f64], to: &mut [f64]) {
    for (i, ks) in f.kinks().iter().enumerate() {
        let (a, b) = (from[i], to[i]);
        let (lo, hi) = (a.min(b), a.max(b));
        let crossed = ks
            .iter()
            .copied()
            .filter(|k| *k != a && lo <= *k && *k <= hi)
            .min_by(|p, q| (p - a).abs().total_cmp(&(q - a).abs()));
        if let Some(k) = crossed {
            to[i] = k;
        }
    }
}

fn run(
    f: &FunctionObject,
    x0: &[f64],
    cfg: &DescentConfig,
    bounds: Option<&BoxRegion>,
) -> Result<Trajectory> {
    cfg.validate()?;
    f.eval(x0)?;
    let mut x = x0.to_vec();
    let mut traj = Trajectory {
        iterates: Vec::new(),
        values: Vec::new(),
        subgrad_norms: Vec::new(),
        terminated_by: Termination::MaxIter,
    };
    let mut k = 0usize;
    loop {
        let fx = f.eval_unchecked(&x);
        let xi = f.subdiff_unchecked(&x).min_norm_element();
        let g = norm(&xi);
        traj.iterates.push(Vector::new(x.clone())?);
        traj.values.push(fx);
        traj.subgrad_norms.push(g);
        let residual = match bounds {
            None => g,
            Some(b) => {
                let moved: Vec<f64> = x.iter().zip(&xi).map(|(v, d)| v - d).collect();
                let p = b.clamp(&moved);
                norm(&x.iter().zip(&p).map(|(u, v)| u - v).collect::<Vec<_>>())
            }
        };
        if residual <= cfg.grad_tol {
            traj.terminated_by = Termination::GradTol;
            break;
        }
        if k >= cfg.max_iter {
            traj.terminated_by = Termination::MaxIter;
            break;
        }
        k += 1;
        let mut t = match cfg.step_rule {
            StepRule::Polyak { f_star } => {
                let gap = fx - f_star;
                if gap <= 0.0 {
                    traj.terminated_by = Termination::TargetReached;
                    break;
                }
                gap / (g * g)
            }
            StepRule::Diminishing { c } => c / (k as f64).sqrt(),
            StepRule::Constant { s } => s,
        };
        let mut next = None;
        for _ in 0..=MAX_HALVINGS {
            let mut cand: Vec<f64> = x.iter().zip(&xi).map(|(v, d)| v - t * d).collect();
            if cfg.snap_to_kinks {
                snap(f, &x, &mut cand);
            }
            if let Some(b) = bounds {
                cand = b.clamp(&cand);
            }
            if f.domain().contains(&cand) && f.eval_unchecked(&cand).is_finite() {
                next = Some(cand);
                break;
            }
            t *= 0.5;
        }
        match next {
            Some(c) => x = c,
            None => {
                traj.terminated_by = Termination::DomainBoundary;
                break;
            }
        }
    }
    Ok(traj)
}

/// `x_{k+1} = x_k - t_k xi_k` with `xi_k` the least-norm subgradient.
pub fn subgradient_descent(
    f: &FunctionObject,
    x0: &Vector,
    cfg: &DescentConfig,
) -> Result<Trajectory> {
    run(f, x0, cfg, None)
}

/// Descent followed by a clamp into `bounds`; stops when the projected
/// step `x - clamp(x - xi)` is within `grad_tol`.
pub fn projected_descent_box(
    f: &FunctionObject,
    bounds: &BoxRegion,
    x0: &Vector,
    cfg: &DescentConfig,
) -> Result<Trajectory> {
    if bounds.dim() != f.dim() {
        return Err(InvexError::DimMismatch {
            expected: f.dim(),
            got: bounds.dim(),
        });
    }
    if !bounds.contains(x0) {
        return Err(InvexError::Precondition(format!(
            "x0 = {x0} is outside the box"
        )));
    }
    run(f, x0, cfg, Some(bounds))
}

/// Projected descent from `count` starts drawn uniformly from `bounds`
/// (restricted to the domain) with `cfg.seed`.
pub fn multi_start_box(
    f: &FunctionObject,
    bounds: &BoxRegion,
    count: usize,
    cfg: &DescentConfig,
) -> Result<Vec<Trajectory>> {
    let mut rng = sampler::rng(cfg.seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(InvexError::Precondition(
                "box barely meets the domain".into(),
            ));
        }
        let x: Vec<f64> = (0..bounds.dim())
            .map(|i| rng.random_range(bounds.lo()[i]..=bounds.hi()[i]))
            .collect();
        if !f.domain().contains(&x) {
            continue;
        }
        out.push(projected_descent_box(f, bounds, &Vector::new(x)?, cfg)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        abs_atom, fractional, identity_positive, make_convex_atom, ConvexAtomSpec,
    };
    use crate::model::{DomainSpec, SubgradientSet};

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    fn wave() -> FunctionObject {
        FunctionObject::from_rules(
            "x^2-6cos(x)",
            DomainSpec::all_space(1),
            |x| x[0] * x[0] - 6.0 * x[0].cos(),
            |x| SubgradientSet::singleton(vec![2.0 * x[0] + 6.0 * x[0].sin()]),
        )
    }

    #[test]
    fn polyak_on_wave_reaches_origin() {
        let cfg = DescentConfig::new(StepRule::Polyak { f_star: -6.0 });
        for x0 in [-10.0, -3.0, 2.0, 8.0] {
            let t = subgradient_descent(&wave(), &v(&[x0]), &cfg).unwrap();
            assert!(
                t.final_point()[0].abs() <= 1e-6,
                "x0={x0}: {:?}",
                t.final_point()
            );
            assert!(t.final_value() <= -6.0 + 1e-8);
            assert!(t.len() <= 100_001);
        }
    }

    #[test]
    fn constant_function_stops_at_once() {
        let c = FunctionObject::from_rules(
            "1",
            DomainSpec::all_space(1),
            |_| 1.0,
            |_| SubgradientSet::singleton(vec![0.0]),
        );
        let t = subgradient_descent(
            &c,
            &v(&[3.0]),
            &DescentConfig::new(StepRule::Constant { s: 0.1 }),
        )
        .unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.terminated_by, Termination::GradTol);
    }

    #[test]
    fn fraction_diminishing_steps_find_kink_minimum() {
        let f = fractional(&abs_atom(1.0), &identity_positive()).unwrap();
        let t = subgradient_descent(
            &f,
            &v(&[5.0]),
            &DescentConfig::new(StepRule::Diminishing { c: 1.0 }),
        )
        .unwrap();
        assert!((t.final_point()[0] - 1.0).abs() <= 1e-4);
        assert!(t.final_value() <= 1e-4);
        assert!(t.iterates.iter().all(|x| x[0] > 0.0));
        let at_min = subgradient_descent(
            &f,
            &v(&[1.0]),
            &DescentConfig::new(StepRule::Diminishing { c: 1.0 }),
        )
        .unwrap();
        assert_eq!(at_min.len(), 1);
    }

    #[test]
    fn infeasible_start_is_a_domain_error() {
        let f = identity_positive();
        let cfg = DescentConfig::new(StepRule::Constant { s: 1.0 });
        assert!(matches!(
            subgradient_descent(&f, &v(&[-1.0]), &cfg),
            Err(InvexError::Domain { .. })
        ));
    }

    #[test]
    fn steps_leaving_the_half_line_are_halved() {
        let f = identity_positive();
        let cfg = DescentConfig::new(StepRule::Constant { s: 10.0 }).with_max_iter(50);
        let t = subgradient_descent(&f, &v(&[1.0]), &cfg).unwrap();
        assert!(t.iterates.iter().all(|x| x[0] > 0.0));
    }

    #[test]
    fn polyak_distance_is_monotone_on_convex_atom() {
        let f = make_convex_atom(ConvexAtomSpec::SquaredNorm { dim: 2 }).unwrap();
        let t = subgradient_descent(
            &f,
            &v(&[3.0, -4.0]),
            &DescentConfig::new(StepRule::Polyak { f_star: 0.0 }),
        )
        .unwrap();
        let d: Vec<f64> = t.iterates.iter().map(|x| norm(x)).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn csv_layout() {
        let f = make_convex_atom(ConvexAtomSpec::Square).unwrap();
        let cfg = DescentConfig::new(StepRule::Polyak { f_star: 0.0 });
        let t = subgradient_descent(&f, &v(&[1.0]), &cfg).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("iteration,x1,value,subgrad_norm"));
        assert_eq!(
            lines.next(),
            Some("0,1.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0")
        );
    }
}
