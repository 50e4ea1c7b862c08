use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use icdlab::ICDParams;

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "icdlab",
    version,
    about = "Concurrence and best separable approximations of ICD states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region, concurrence, PT spectrum and closed-form decomposition of one point.
    Analyze {
        #[command(flatten)]
        point: PointArgs,
        /// Also run the optimality verifier.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Barycentric grid over the simplex for a list of angles.
    Sweep {
        /// Grid resolution n: p_k = i_k / n.
        #[arg(long)]
        grid: usize,
        /// Comma-separated angles in radians.
        #[arg(long, value_delimiter = ',', required = true)]
        theta_list: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Closed form, verifier and numeric oracle side by side.
    Verify {
        #[command(flatten)]
        point: PointArgs,
        /// Decomposition JSON to verify instead of the closed form.
        #[arg(long, conflicts_with_all = ["p", "theta", "theta_degrees"])]
        decomposition: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Invariant battery over random samples.
    Selftest {
        /// Samples per suite.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Weights p1,p2,p3,p4.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub p: Option<Vec<f64>>,
    /// Angle in radians.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "theta_degrees")]
    pub theta: Option<f64>,
    /// Angle in degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_degrees: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, env = "ICDLAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Candidate evaluations for the numeric oracle.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Analyze,
    Sweep,
    Verify,
    Selftest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub resolution: usize,
    pub thetas: Vec<f64>,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: Option<ICDParams>,
    pub grid: Option<Grid>,
    pub seed: u64,
    pub budget: u64,
    pub format: Format,
    pub output_path: Option<PathBuf>,
    pub verify: bool,
    pub samples: usize,
    pub decomposition: Option<PathBuf>,
}

impl PointArgs {
    fn params(&self) -> Result<Option<ICDParams>, CliError> {
        let theta = match (self.theta, self.theta_degrees) {
            (Some(t), _) => Some(t),
            (None, Some(d)) => Some(d.to_radians()),
            (None, None) => None,
        };
        match (&self.p, theta) {
            (None, None) => Ok(None),
            (Some(p), Some(theta)) => {
                let p: [f64; 4] = p
                    .as_slice()
                    .try_into()
                    .map_err(|_| CliError::Input(format!("--p needs 4 values, got {}", p.len())))?;
                Ok(Some(ICDParams::new(p, theta)?))
            }
            (Some(_), None) => Err(CliError::Input(
                "--theta or --theta-degrees is required".into(),
            )),
            (None, Some(_)) => Err(CliError::Input("--p is required".into())),
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let base = |command, common: CommonArgs, default: Format| RunConfig {
            command,
            params: None,
            grid: None,
            seed: common.seed,
            budget: common.budget,
            format: common.format.unwrap_or(default),
            output_path: common.out,
            verify: false,
            samples: 0,
            decomposition: None,
        };
        let config = match cli.command {
            Command::Analyze {
                point,
                verify,
                common,
            } => {
                let params = point.params()?;
                if params.is_none() {
                    return Err(CliError::Input("analyze needs --p and --theta".into()));
                }
                RunConfig {
                    params,
                    verify,
                    ..base(CommandKind::Analyze, common, Format::Json)
                }
            }
            Command::Sweep {
                grid,
                theta_list,
                common,
            } => {
                if grid == 0 {
                    return Err(CliError::Input("--grid must be at least 1".into()));
                }
                for &t in &theta_list {
                    // validates the angle with a dummy point
                    ICDParams::new([1.0, 0.0, 0.0, 0.0], t)?;
                }
                RunConfig {
                    grid: Some(Grid {
                        resolution: grid,
                        thetas: theta_list,
                    }),
                    ..base(CommandKind::Sweep, common, Format::Csv)
                }
            }
            Command::Verify {
                point,
                decomposition,
                common,
            } => {
                let params = point.params()?;
                if params.is_none() && decomposition.is_none() {
                    return Err(CliError::Input(
                        "verify needs --p and --theta or --decomposition".into(),
                    ));
                }
                RunConfig {
                    params,
                    decomposition,
                    ..base(CommandKind::Verify, common, Format::Json)
                }
            }
            Command::Selftest { samples, common } => RunConfig {
                samples: samples.max(1),
                ..base(CommandKind::Selftest, common, Format::Json)
            },
        };
        Ok(config)
    }
}
