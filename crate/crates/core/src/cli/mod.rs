//! Command-line surface: the example catalog, check suites, solvers and plot data.
//!
//! Exit codes: 0 when every expectation is met, 1 on an expectation
//! mismatch, 2 on a usage error or a failed precondition.

pub mod catalog;
pub mod commands;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use catalog::{lookup, CatalogEntry, Property, CATALOG};
pub use commands::{CheckOptions, CliError, ReportDocument};

use commands::{CliResult, MinimizeOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "invexkit",
    version,
    about = "Build invex functions and check generalized convexity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog entries with their expected classes.
    List,
    /// Run property checks on one catalog entry and write a JSON report.
    Check {
        id: String,
        /// Comma-separated subset of invex,pseudoconvex,quasiconvex,convex.
        #[arg(long, default_value = "invex,pseudoconvex,quasiconvex,convex")]
        properties: String,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run subgradient descent on a catalog entry and write the trajectory as CSV.
    Minimize {
        id: String,
        /// Starting point, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// polyak:F_STAR, diminishing:C or constant:S.
        #[arg(long, default_value = "diminishing:1", allow_hyphen_values = true)]
        step: String,
        /// Restrict to the cube [lo, hi]^n and audit the end point as a KKT point.
        #[arg(long = "box", allow_hyphen_values = true)]
        bounds: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Samples for the KKT global audit.
        #[arg(long, default_value_t = 100_000)]
        pairs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write sampled-grid CSV for a figure: fig1, fig2, fig3a, fig3b, fig5a, fig5b, fig5c.
    PlotData {
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every catalog entry against every property and write one JSON document.
    Report {
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn options(s: &SamplingArgs) -> CliResult<CheckOptions> {
    if s.pairs == 0 || !(s.tol >= 0.0 && s.tol.is_finite()) {
        return Err(CliError::BadArgument(
            "--pairs must be positive and --tol finite and nonnegative".into(),
        ));
    }
    Ok(CheckOptions {
        seed: s.seed,
        pairs: s.pairs,
        tol: s.tol,
    })
}

fn write_report(doc: &ReportDocument, out: &Option<PathBuf>) -> CliResult<i32> {
    let mut w = sink(out)?;
    w.write_all(doc.to_json()?.as_bytes())?;
    w.flush()?;
    for e in &doc.entries {
        for p in &e.properties {
            let mark = if p.observed == p.expected {
                "ok"
            } else {
                "MISMATCH"
            };
            let verdict = if p.observed { "PASS" } else { "FAIL" };
            let note = if p.expected { "" } else { " (expected fail)" };
            eprintln!(
                "{:<12} {:<13} {verdict}{note} [{mark}]",
                e.id,
                p.property.name()
            );
        }
    }
    Ok(if doc.all_match {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

fn dispatch(cmd: Command) -> CliResult<i32> {
    match cmd {
        Command::List => {
            let mut w = sink(&None)?;
            commands::cmd_list(&mut w)?;
            w.flush()?;
            Ok(EXIT_OK)
        }
        Command::Check {
            id,
            properties,
            sampling,
            out,
        } => {
            let props = commands::parse_properties(&properties)?;
            let doc = commands::cmd_check(&id, &props, &options(&sampling)?)?;
            write_report(&doc, &out)
        }
        Command::Minimize {
            id,
            x0,
            step,
            bounds,
            max_iter,
            seed,
            pairs,
            out,
        } => {
            let bounds = match bounds {
                None => None,
                Some(b) => {
                    let v = commands::parse_vector(&b)?;
                    if v.dim() != 2 || v[0] >= v[1] {
                        return Err(CliError::BadArgument(format!(
                            "--box `{b}` must be lo,hi with lo < hi"
                        )));
                    }
                    Some((v[0], v[1]))
                }
            };
            let opts = MinimizeOptions {
                x0: commands::parse_vector(&x0)?,
                step: commands::parse_step(&step)?,
                bounds,
                max_iter,
                seed,
                pairs,
            };
            let res = commands::cmd_minimize(&id, &opts)?;
            let mut w = sink(&out)?;
            res.trajectory.write_csv(&mut w)?;
            w.flush()?;
            let t = &res.trajectory;
            eprintln!("final point: {}", t.final_point());
            eprintln!("final value: {:e}", t.final_value());
            eprintln!("subgradient norm: {:e}", t.final_subgrad_norm());
            eprintln!("iterations: {} ({:?})", t.len() - 1, t.terminated_by);
            if let (Some(v), Some(r)) = (res.verdict, res.kkt_residual) {
                let flag = match v {
                    crate::solve::AuditVerdict::GlobalOptimal => "GLOBAL",
                    crate::solve::AuditVerdict::NonGlobalExpected => "NON-GLOBAL-KKT",
                    crate::solve::AuditVerdict::Contradiction => "CONTRADICTION",
                };
                eprintln!("kkt residual: {r:e}");
                eprintln!("{flag}");
            }
            Ok(EXIT_OK)
        }
        Command::PlotData { figure, out } => {
            let mut w = sink(&out)?;
            commands::cmd_plotdata(&figure, &mut w)?;
            w.flush()?;
            Ok(EXIT_OK)
        }
        Command::Report { sampling, out } => {
            let started = std::time::Instant::now();
            let doc = commands::cmd_report(&options(&sampling)?)?;
            let code = write_report(&doc, &out)?;
            eprintln!("wall time: {:.1} s", started.elapsed().as_secs_f64());
            Ok(code)
        }
    }
}

/// Parse arguments (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
