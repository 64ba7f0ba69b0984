//! Library side of the `equisep` command-line tool: argument validation,
//! the five subcommands, and their CSV / JSON encodings.
//!
//! Each `cmd_*` function computes everything first and returns the finished
//! document; [`emit`] is the only place that writes.

#![forbid(unsafe_code)]

pub mod check;
pub mod config;
pub mod error;
pub mod format;
pub mod sweep;

use std::io::Write;

use equisep::{
    complete_probabilities, petal_grid, run_trials_with, InnerProduct, SimulationOptions,
};
use serde::Serialize;

pub use config::{Cli, Command, Format, RunConfig, Sweep};
pub use error::CliError;

use format::{float, json, optional, Csv};

/// A finished document plus an optional failure to report after writing it.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub failure: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            failure: None,
        }
    }
}

fn alpha(cfg: &RunConfig) -> Result<InnerProduct, CliError> {
    Ok(InnerProduct::new(cfg.alpha_mod, cfg.theta)?)
}

pub fn cmd_petal(cfg: &RunConfig) -> Result<Output, CliError> {
    let grid = petal_grid(cfg.n, cfg.resolution)?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json(&grid)?,
        Format::Csv => {
            let mut csv = Csv::with_header(&["re", "im", "status", "p_success"]);
            for c in &grid.cells {
                csv.row([
                    float(c.re),
                    float(c.im),
                    c.status.as_str().to_string(),
                    optional(c.p_success),
                ]);
            }
            csv.finish()
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct ModulusCurve<'a> {
    n: usize,
    theta: f64,
    rows: &'a [sweep::ModulusRow],
}

#[derive(Serialize)]
struct PhaseCurve<'a> {
    n: usize,
    alpha_mod: f64,
    rows: &'a [sweep::PhaseRow],
}

pub fn cmd_curves(cfg: &RunConfig) -> Result<Output, CliError> {
    let format = cfg.format.unwrap_or(Format::Csv);
    let text = match cfg.sweep {
        Sweep::Mod => {
            let rows = sweep::modulus_sweep(cfg.n, cfg.theta, cfg.points)?;
            match format {
                Format::Json => json(&ModulusCurve {
                    n: cfg.n,
                    theta: cfg.theta,
                    rows: &rows,
                })?,
                Format::Csv => {
                    let mut csv = Csv::with_header(&["alpha_mod", "p_success"]);
                    for r in &rows {
                        csv.row([float(r.alpha_mod), float(r.p_success)]);
                    }
                    csv.finish()
                }
            }
        }
        Sweep::Theta => {
            let rows = sweep::phase_sweep(cfg.n, cfg.alpha_mod, cfg.points)?;
            match format {
                Format::Json => json(&PhaseCurve {
                    n: cfg.n,
                    alpha_mod: cfg.alpha_mod,
                    rows: &rows,
                })?,
                Format::Csv => {
                    let mut csv = Csv::with_header(&["theta", "p_success", "p_total"]);
                    for r in &rows {
                        csv.row([float(r.theta), optional(r.p_success), optional(r.p_total)]);
                    }
                    csv.finish()
                }
            }
        }
    };
    Ok(Output::ok(text))
}

pub fn cmd_protocol(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = complete_probabilities(cfg.n, alpha(cfg)?, &cfg.priors)?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json(&spec)?,
        Format::Csv => {
            let mut csv = Csv::with_header(&[
                "n",
                "alpha_mod",
                "alpha_phase",
                "s_squared",
                "a_squared",
                "p_success",
                "p_correct_id",
                "p_total",
                "p_err",
                "p_no_info",
            ]);
            csv.row([
                spec.n.to_string(),
                float(spec.alpha.modulus()),
                float(spec.alpha.phase()),
                float(spec.s_squared),
                optional(spec.a_squared),
                float(spec.p_success),
                optional(spec.p_correct_id),
                float(spec.p_total),
                float(spec.p_err),
                float(spec.p_no_info),
            ]);
            csv.finish()
        }
    };
    Ok(Output::ok(text))
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Output, CliError> {
    let options = SimulationOptions {
        exact_isometry: cfg.exact_isometry,
    };
    let report = run_trials_with(
        cfg.n,
        alpha(cfg)?,
        &cfg.priors,
        cfg.trials,
        cfg.seed,
        options,
    )?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv = Csv::with_header(&[
                "quantity",
                "estimate",
                "analytic",
                "difference",
                "std_error",
                "z",
                "flagged",
            ]);
            for d in &report.deviations.deviations {
                csv.row([
                    d.quantity.clone(),
                    float(d.estimate),
                    float(d.analytic),
                    float(d.difference),
                    float(d.std_error),
                    float(d.z),
                    d.flagged.to_string(),
                ]);
            }
            csv.finish()
        }
    };
    let flagged: Vec<&str> = report
        .deviations
        .deviations
        .iter()
        .filter(|d| d.flagged)
        .map(|d| d.quantity.as_str())
        .collect();
    let failure = (!flagged.is_empty()).then(|| {
        format!(
            "simulation deviates from the analytic values by more than {} standard errors in {}",
            equisep::montecarlo::Z_FLAG,
            flagged.join(", ")
        )
    });
    Ok(Output { text, failure })
}

pub fn cmd_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let results = check::run_checks(cfg.n, cfg.seed)?;
    let text = match cfg.format {
        Some(Format::Json) => json(&results)?,
        Some(Format::Csv) => {
            let mut csv = Csv::with_header(&["property", "passed", "cases", "worst", "tolerance"]);
            for r in &results {
                csv.row([
                    r.property.to_string(),
                    r.passed.to_string(),
                    r.cases.to_string(),
                    float(r.worst),
                    float(r.tolerance),
                ]);
            }
            csv.finish()
        }
        None => {
            let mut text = String::new();
            for r in &results {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!(
                    "{} {verdict} cases={} worst={:e} tolerance={:e}",
                    r.property, r.cases, r.worst, r.tolerance
                ));
                if let Some(note) = &r.note {
                    text.push_str(&format!(" ({note})"));
                }
                text.push('\n');
            }
            text
        }
    };
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.property)
        .collect();
    let failure = (!failed.is_empty())
        .then(|| format!("check failed for n={}: {}", cfg.n, failed.join(", ")));
    Ok(Output { text, failure })
}

pub fn run(cfg: &RunConfig) -> Result<Output, CliError> {
    match cfg.command {
        Command::Petal => cmd_petal(cfg),
        Command::Curves => cmd_curves(cfg),
        Command::Protocol => cmd_protocol(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Check => cmd_check(cfg),
    }
}

/// Writes the document to the configured path, or stdout.
pub fn emit(cfg: &RunConfig, output: &Output) -> Result<(), CliError> {
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &output.text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(output.text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Full invocation; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::error::ErrorKind;
    use clap::Parser;

    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let msg = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let output = run(&cfg)?;
        emit(&cfg, &output)?;
        match output.failure {
            Some(msg) => Err(CliError::Failure(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.single_line());
            e.exit_code()
        }
    }
}
