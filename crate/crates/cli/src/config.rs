//! Command-line surface and its validated form.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use equisep::petal::MIN_GRID_RESOLUTION;
use equisep::protocol::validate_priors;
use equisep::uniform_priors;

use crate::error::CliError;

pub const DEFAULT_RESOLUTION: usize = 256;
pub const DEFAULT_POINTS: usize = 512;
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "equisep",
    version,
    about = "Petal regions and two-stage discrimination of equi-separated pure states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Commands,
}

#[derive(Debug, Subcommand)]
pub enum Commands {
    /// Grid of stage-one success probabilities over the unit disk.
    Petal(PetalArgs),
    /// Probability curves swept over the modulus or the phase of α.
    Curves(CurvesArgs),
    /// Every analytic probability of the scheme at one α.
    Protocol(ProtocolArgs),
    /// Monte Carlo run of the scheme, compared with the analytic values.
    Simulate(SimulateArgs),
    /// Internal consistency checks at one n.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    /// Modulus from 0 to the boundary at fixed phase.
    Mod,
    /// Phase over [0, 2π] at fixed modulus.
    Theta,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    /// Phase of α in radians.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "theta_frac")]
    pub theta: Option<f64>,
    /// Phase of α as p·π/q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"], allow_hyphen_values = true)]
    pub theta_frac: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct PetalArgs {
    #[arg(long)]
    pub n: usize,
    /// Samples per axis.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub sweep: Sweep,
    /// Fixed modulus for a phase sweep.
    #[arg(long)]
    pub alpha_mod: Option<f64>,
    #[command(flatten)]
    pub phase: PhaseArgs,
    /// Samples along the curve.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha_mod: f64,
    #[command(flatten)]
    pub phase: PhaseArgs,
    /// Prior probabilities, comma-separated; uniform when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub priors: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha_mod: f64,
    #[command(flatten)]
    pub phase: PhaseArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub priors: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample stage one from the explicit isometry instead of a coin flip.
    #[arg(long)]
    pub exact_isometry: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub n: usize,
    /// Seed for the randomized cases.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Petal,
    Curves,
    Protocol,
    Simulate,
    Check,
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub alpha_mod: f64,
    /// Radians.
    pub theta: f64,
    pub priors: Vec<f64>,
    pub resolution: usize,
    pub points: usize,
    pub sweep: Sweep,
    pub trials: u64,
    pub seed: u64,
    pub exact_isometry: bool,
    pub output_path: Option<PathBuf>,
    /// `None` selects the command's default encoding.
    pub format: Option<Format>,
}

impl RunConfig {
    fn base(command: Command, n: usize, output: OutputArgs) -> Result<Self, CliError> {
        if n < 2 {
            return Err(arg(format!("--n must be at least 2, got {n}")));
        }
        Ok(RunConfig {
            command,
            n,
            alpha_mod: 0.0,
            theta: 0.0,
            priors: uniform_priors(n),
            resolution: DEFAULT_RESOLUTION,
            points: DEFAULT_POINTS,
            sweep: Sweep::Mod,
            trials: DEFAULT_TRIALS,
            seed: 0,
            exact_isometry: false,
            output_path: output.out,
            format: output.format,
        })
    }

    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        match cli.command {
            Commands::Petal(a) => {
                let mut c = Self::base(Command::Petal, a.n, a.output)?;
                if a.resolution < MIN_GRID_RESOLUTION {
                    return Err(arg(format!(
                        "--resolution must be at least {MIN_GRID_RESOLUTION}, got {}",
                        a.resolution
                    )));
                }
                c.resolution = a.resolution;
                Ok(c)
            }
            Commands::Curves(a) => {
                let mut c = Self::base(Command::Curves, a.n, a.output)?;
                if a.points < 2 {
                    return Err(arg(format!(
                        "--points must be at least 2, got {}",
                        a.points
                    )));
                }
                c.points = a.points;
                c.sweep = a.sweep;
                match a.sweep {
                    Sweep::Mod => {
                        c.theta = phase(&a.phase)?
                            .ok_or_else(|| arg("--sweep mod needs --theta or --theta-frac"))?;
                    }
                    Sweep::Theta => {
                        let m = a
                            .alpha_mod
                            .ok_or_else(|| arg("--sweep theta needs --alpha-mod"))?;
                        c.alpha_mod = modulus(m)?;
                    }
                }
                Ok(c)
            }
            Commands::Protocol(a) => {
                let mut c = Self::base(Command::Protocol, a.n, a.output)?;
                c.alpha_mod = modulus(a.alpha_mod)?;
                c.theta = phase(&a.phase)?.unwrap_or(0.0);
                c.priors = priors(a.n, a.priors)?;
                Ok(c)
            }
            Commands::Simulate(a) => {
                let mut c = Self::base(Command::Simulate, a.n, a.output)?;
                if a.trials == 0 {
                    return Err(arg("--trials must be at least 1"));
                }
                c.alpha_mod = modulus(a.alpha_mod)?;
                c.theta = phase(&a.phase)?.unwrap_or(0.0);
                c.priors = priors(a.n, a.priors)?;
                c.trials = a.trials;
                c.seed = a.seed;
                c.exact_isometry = a.exact_isometry;
                Ok(c)
            }
            Commands::Check(a) => {
                let mut c = Self::base(Command::Check, a.n, a.output)?;
                c.seed = a.seed;
                Ok(c)
            }
        }
    }
}

fn arg(msg: impl Into<String>) -> CliError {
    CliError::Argument(msg.into())
}

fn modulus(m: f64) -> Result<f64, CliError> {
    if !(0.0..=1.0).contains(&m) {
        return Err(arg(format!("--alpha-mod must lie in [0, 1], got {m}")));
    }
    Ok(m)
}

fn phase(p: &PhaseArgs) -> Result<Option<f64>, CliError> {
    if let Some(t) = p.theta {
        if !t.is_finite() {
            return Err(arg(format!("--theta must be finite, got {t}")));
        }
        return Ok(Some(t));
    }
    match p.theta_frac.as_deref() {
        Some(&[num, den]) => {
            if den == 0 {
                return Err(arg("--theta-frac denominator must be nonzero"));
            }
            Ok(Some(num as f64 * PI / den as f64))
        }
        Some(_) => Err(arg("--theta-frac takes two integers")),
        None => Ok(None),
    }
}

fn priors(n: usize, given: Option<Vec<f64>>) -> Result<Vec<f64>, CliError> {
    match given {
        None => Ok(uniform_priors(n)),
        Some(p) => {
            validate_priors(n, &p).map_err(|e| arg(format!("--priors: {e}")))?;
            Ok(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("equisep").chain(args.iter().copied()))
            .map_err(|e| CliError::Argument(e.to_string()))?;
        RunConfig::from_cli(cli)
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn theta_frac_is_rational_multiple_of_pi() {
        let c = parse(&[
            "protocol",
            "--n",
            "3",
            "--alpha-mod",
            "0.1",
            "--theta-frac",
            "1",
            "2",
        ])
        .unwrap();
        assert_eq!(c.theta, PI / 2.0);
        let c = parse(&[
            "protocol",
            "--n",
            "3",
            "--alpha-mod",
            "0.1",
            "--theta-frac",
            "-3",
            "4",
        ])
        .unwrap();
        assert_eq!(c.theta, -3.0 * PI / 4.0);
    }

    #[test]
    fn defaults() {
        let c = parse(&["petal", "--n", "5"]).unwrap();
        assert_eq!(c.resolution, 256);
        let c = parse(&["simulate", "--n", "4", "--alpha-mod", "0.1"]).unwrap();
        assert_eq!(c.priors, vec![0.25; 4]);
        assert_eq!(c.trials, 100_000);
        let c = parse(&[
            "curves",
            "--n",
            "4",
            "--sweep",
            "theta",
            "--alpha-mod",
            "0.1",
        ])
        .unwrap();
        assert_eq!(c.points, 512);
    }

    #[test]
    fn rejections_are_argument_errors() {
        for args in [
            &["petal", "--n", "1"][..],
            &["petal", "--n", "3", "--resolution", "8"],
            &["check", "--n", "1"],
            &[
                "simulate",
                "--n",
                "3",
                "--alpha-mod",
                "0.1",
                "--trials",
                "0",
            ],
            &["protocol", "--n", "3", "--alpha-mod", "1.5"],
            &[
                "protocol",
                "--n",
                "3",
                "--alpha-mod",
                "0.1",
                "--priors",
                "0.5,0.5",
            ],
            &[
                "protocol",
                "--n",
                "3",
                "--alpha-mod",
                "0.1",
                "--theta-frac",
                "1",
                "0",
            ],
            &[
                "protocol",
                "--n",
                "3",
                "--alpha-mod",
                "0.1",
                "--theta",
                "1",
                "--theta-frac",
                "1",
                "2",
            ],
            &["curves", "--n", "3", "--sweep", "mod"],
            &["curves", "--n", "3", "--sweep", "theta"],
        ] {
            let err = parse(args).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{args:?}: {err}");
        }
    }

    #[test]
    fn priors_are_comma_separated() {
        let c = parse(&[
            "protocol",
            "--n",
            "3",
            "--alpha-mod",
            "0.1",
            "--priors",
            "0.5,0.25,0.25",
        ])
        .unwrap();
        assert_eq!(c.priors, vec![0.5, 0.25, 0.25]);
    }
}
