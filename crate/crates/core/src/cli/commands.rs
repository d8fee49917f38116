//! Implementations of the command-line verbs.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::make_convex_atom;
use crate::algebra::ConvexAtomSpec;
use crate::analysis::{
    check_convexity, check_invexity, check_pseudoconvex_definitional, check_quasiconvex,
    check_stationary_global, SamplerConfig,
};
use crate::cli::catalog::{lookup, CatalogEntry, Property, CATALOG};
use crate::error::InvexError;
use crate::model::{BoxRegion, CheckReport, ConstrainedProblem, FunctionObject, Vector, Witness};
use crate::solve::{
    kkt_check, kkt_global_audit, projected_descent_box, subgradient_descent, AuditVerdict,
    DescentConfig, KktPoint, StepRule,
};

pub const SCHEMA: &str = "invexkit/1";
/// Bounds closer than this to an iterate count as active.
pub const ACTIVE_BOUND_TOL: f64 = 1e-9;
/// Stationarity tolerance for the KKT check after a boxed minimization.
pub const KKT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown catalog id `{0}` (try `list`)")]
    UnknownId(String),
    #[error("unknown property `{0}`; expected one of invex, pseudoconvex, quasiconvex, convex")]
    UnknownProperty(String),
    #[error("unknown figure `{0}`; expected one of fig1, fig2, fig3a, fig3b, fig5a, fig5b, fig5c")]
    UnknownFigure(String),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Invex(#[from] InvexError),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("output failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    pub pairs: usize,
    pub tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            seed: 42,
            pairs: 100_000,
            tol: 1e-9,
        }
    }
}

/// Work spent by a check, counted in function and subdifferential evaluations
/// so that reports stay byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Runtime {
    pub unit: &'static str,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub passed: bool,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub samples: usize,
    pub considered: usize,
    pub skipped: usize,
    pub runtime: Runtime,
    pub witness: Option<Witness>,
}

impl From<CheckReport> for CheckRecord {
    fn from(r: CheckReport) -> Self {
        CheckRecord {
            check: r.property,
            passed: r.passed,
            worst_violation: r.worst_violation,
            tolerance: r.tolerance,
            seed: r.rng_seed,
            samples: r.samples,
            considered: r.considered,
            skipped: r.skipped,
            runtime: Runtime {
                unit: "evaluations",
                value: r.evaluations,
            },
            witness: r.witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub property: Property,
    pub expected: bool,
    pub observed: bool,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryOutcome {
    pub id: &'static str,
    pub recipe: &'static str,
    pub expected_class: Vec<Property>,
    pub observed_class: Vec<Property>,
    pub matches: bool,
    pub properties: Vec<PropertyOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub seed: u64,
    pub pairs: usize,
    pub tolerance: f64,
    pub all_match: bool,
    pub entries: Vec<EntryOutcome>,
}

impl ReportDocument {
    fn new(opts: &CheckOptions, entries: Vec<EntryOutcome>) -> Self {
        ReportDocument {
            schema: SCHEMA,
            seed: opts.seed,
            pairs: opts.pairs,
            tolerance: opts.tol,
            all_match: entries.iter().all(|e| e.matches),
            entries,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn entry(id: &str) -> CliResult<&'static CatalogEntry> {
    lookup(id).ok_or_else(|| CliError::UnknownId(id.to_string()))
}

pub fn parse_properties(list: &str) -> CliResult<Vec<Property>> {
    let mut out = Vec::new();
    for name in list.split(',').filter(|s| !s.trim().is_empty()) {
        let p =
            Property::parse(name).ok_or_else(|| CliError::UnknownProperty(name.trim().into()))?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(CliError::BadArgument("empty property list".into()));
    }
    Ok(out)
}

/// Run the sampled checks behind each property. Invexity needs both the
/// kernel inequality and the stationary-points-are-global test.
pub fn check_property(
    f: &FunctionObject,
    p: Property,
    opts: &CheckOptions,
) -> CliResult<Vec<CheckReport>> {
    let cfg = SamplerConfig::default()
        .with_pairs(opts.pairs)
        .with_seed(opts.seed);
    Ok(match p {
        Property::Invex => vec![
            check_invexity(f, &cfg, opts.tol)?,
            check_stationary_global(f, &cfg)?,
        ],
        Property::Pseudoconvex => vec![check_pseudoconvex_definitional(f, &cfg)?],
        Property::Quasiconvex => vec![check_quasiconvex(f, &cfg)?],
        Property::Convex => vec![check_convexity(f, &cfg, opts.tol)?],
    })
}

pub fn run_entry(
    e: &'static CatalogEntry,
    props: &[Property],
    opts: &CheckOptions,
) -> CliResult<EntryOutcome> {
    let f = e.build()?;
    let mut properties = Vec::new();
    for &p in props {
        let reports = check_property(&f, p, opts)?;
        properties.push(PropertyOutcome {
            property: p,
            expected: e.expects(p),
            observed: reports.iter().all(|r| r.passed),
            checks: reports.into_iter().map(CheckRecord::from).collect(),
        });
    }
    let observed_class = properties
        .iter()
        .filter(|o| o.observed)
        .map(|o| o.property)
        .collect();
    Ok(EntryOutcome {
        id: e.id,
        recipe: e.recipe,
        expected_class: e.expected.to_vec(),
        observed_class,
        matches: properties.iter().all(|o| o.expected == o.observed),
        properties,
    })
}

pub fn cmd_list(out: &mut dyn Write) -> CliResult<()> {
    writeln!(
        out,
        "{:<12} {:<38} {:<7} recipe",
        "id", "expected", "figure"
    )?;
    for e in &CATALOG {
        let expected: Vec<&str> = e.expected.iter().map(|p| p.name()).collect();
        writeln!(
            out,
            "{:<12} {:<38} {:<7} {}",
            e.id,
            expected.join(","),
            e.figure.unwrap_or("-"),
            e.recipe
        )?;
    }
    Ok(())
}

/// Check one catalog entry; `all_match` reports whether observations met expectations.
pub fn cmd_check(id: &str, props: &[Property], opts: &CheckOptions) -> CliResult<ReportDocument> {
    let e = entry(id)?;
    Ok(ReportDocument::new(opts, vec![run_entry(e, props, opts)?]))
}

pub fn cmd_report(opts: &CheckOptions) -> CliResult<ReportDocument> {
    let mut entries = Vec::new();
    for e in &CATALOG {
        entries.push(run_entry(e, &Property::ALL, opts)?);
    }
    Ok(ReportDocument::new(opts, entries))
}

pub fn parse_vector(s: &str) -> CliResult<Vector> {
    let vals = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| {
            CliError::BadArgument(format!(
                "`{s}` is not a comma-separated list of numbers: {e}"
            ))
        })?;
    Ok(Vector::new(vals)?)
}

pub fn parse_step(s: &str) -> CliResult<StepRule> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| CliError::BadArgument(format!("step `{s}` must look like kind:value")))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::BadArgument(format!("step value `{value}` is not a number")))?;
    match kind.trim() {
        "polyak" => Ok(StepRule::Polyak { f_star: v }),
        "diminishing" => Ok(StepRule::Diminishing { c: v }),
        "constant" => Ok(StepRule::Constant { s: v }),
        other => Err(CliError::BadArgument(format!(
            "unknown step rule `{other}`; expected polyak, diminishing or constant"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    pub x0: Vector,
    pub step: StepRule,
    pub bounds: Option<(f64, f64)>,
    pub max_iter: usize,
    pub seed: u64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOutcome {
    pub trajectory: crate::solve::Trajectory,
    /// Verdict of the KKT audit for boxed runs.
    pub verdict: Option<AuditVerdict>,
    pub kkt_residual: Option<f64>,
}

/// Box constraints `lo - x_i <= 0` and `x_i - hi <= 0`, lower before upper
/// for each coordinate.
pub fn box_constraints(n: usize, lo: f64, hi: f64) -> CliResult<Vec<FunctionObject>> {
    let mut cons = Vec::with_capacity(2 * n);
    for i in 0..n {
        for (sign, offset) in [(-1.0, lo), (1.0, -hi)] {
            let mut coeffs = vec![0.0; n];
            coeffs[i] = sign;
            cons.push(make_convex_atom(ConvexAtomSpec::Affine { coeffs, offset })?);
        }
    }
    Ok(cons)
}

/// Multipliers for active bounds: the smallest admissible values making the
/// Lagrangian subdifferential contain zero coordinatewise.
fn bound_multipliers(f: &FunctionObject, x: &[f64], lo: f64, hi: f64) -> CliResult<Vec<f64>> {
    let s = f.subdiff(x)?;
    let mut lam = Vec::with_capacity(2 * x.len());
    for (i, &xi) in x.iter().enumerate() {
        let (rlo, rhi) = s.coordinate_range(i);
        lam.push(if (xi - lo).abs() <= ACTIVE_BOUND_TOL {
            rlo.max(0.0)
        } else {
            0.0
        });
        lam.push(if (xi - hi).abs() <= ACTIVE_BOUND_TOL {
            (-rhi).max(0.0)
        } else {
            0.0
        });
    }
    Ok(lam)
}

pub fn cmd_minimize(id: &str, opts: &MinimizeOptions) -> CliResult<MinimizeOutcome> {
    let f = entry(id)?.build()?;
    if opts.x0.dim() != f.dim() {
        return Err(InvexError::DimMismatch {
            expected: f.dim(),
            got: opts.x0.dim(),
        }
        .into());
    }
    let cfg = DescentConfig::new(opts.step)
        .with_max_iter(opts.max_iter)
        .with_seed(opts.seed);
    let Some((lo, hi)) = opts.bounds else {
        return Ok(MinimizeOutcome {
            trajectory: subgradient_descent(&f, &opts.x0, &cfg)?,
            verdict: None,
            kkt_residual: None,
        });
    };
    let region = BoxRegion::cube(f.dim(), lo, hi)?;
    let trajectory = projected_descent_box(&f, &region, &opts.x0, &cfg)?;
    let x = trajectory.final_point().clone();
    let lam = bound_multipliers(&f, &x, lo, hi)?;
    let problem = ConstrainedProblem::new(f, box_constraints(x.dim(), lo, hi)?)?;
    let cand = KktPoint::new(x, lam);
    let kkt = kkt_check(&problem, &cand, KKT_TOL)?;
    let audit_cfg = SamplerConfig::default()
        .with_pairs(opts.pairs)
        .with_seed(opts.seed)
        .with_region(region);
    let audit = kkt_global_audit(&problem, &cand, &audit_cfg)?;
    Ok(MinimizeOutcome {
        trajectory,
        verdict: Some(audit.verdict),
        kkt_residual: Some(kkt.worst_violation),
    })
}

/// The plotted grid `lo, lo + step, ..., hi`, computed symmetrically about
/// the midpoint so that the center and integer multiples of `step` are exact.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let m = ((hi - lo) / step).round() as usize + 1;
    let (c, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    (0..m)
        .map(|k| c + half * (2.0 * k as f64 - (m - 1) as f64) / (m - 1) as f64)
        .collect()
}

/// `f(2) + f'(2) eta(2, x)` for `f(x) = x^2/(x^2+1)` with the ratio kernel.
pub fn fig1_tangent(x: f64) -> f64 {
    0.8 + 4.0 * (x - 2.0) / (x * x + 1.0).powi(2)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn cmd_plotdata(figure: &str, out: &mut dyn Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    match figure {
        "fig1" => {
            let f = entry("tangentDemo")?.build()?;
            w.write_record(["x", "f", "tangent"])?;
            for x in grid(-4.0, 4.0, 0.01) {
                w.write_record([fmt(x), fmt(f.eval(&[x])?), fmt(fig1_tangent(x))])?;
            }
        }
        "fig3a" | "fig5b" => {
            let (f, r) = if figure == "fig3a" {
                (crate::cli::catalog::log_part()?, 5.0)
            } else {
                (entry("pert2")?.build()?, 10.0)
            };
            w.write_record(["x", "f"])?;
            for x in grid(-r, r, 0.01) {
                w.write_record([fmt(x), fmt(f.eval(&[x])?)])?;
            }
        }
        "fig2" | "fig3b" | "fig5a" | "fig5c" => {
            let (id, r, step) = match figure {
                "fig2" => ("noStat", 2.0, 0.05),
                "fig3b" => ("logreg", 5.0, 0.1),
                "fig5a" => ("pert1", 5.0, 0.1),
                _ => ("sepPert", 5.0, 0.1),
            };
            let f = entry(id)?.build()?;
            let g = grid(-r, r, step);
            w.write_record(["x", "y", "f"])?;
            for &y in &g {
                for &x in &g {
                    w.write_record([fmt(x), fmt(y), fmt(f.eval(&[x, y])?)])?;
                }
            }
        }
        other => return Err(CliError::UnknownFigure(other.to_string())),
    }
    w.flush()?;
    Ok(())
}
