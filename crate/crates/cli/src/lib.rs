//! Library side of the `icdlab` command-line tool.

pub mod config;
pub mod error;
pub mod report;
pub mod selftest;

use std::fs;

use icdlab::lsd::LSDecomposition;

pub use config::{Cli, CommandKind, Format, Grid, RunConfig};
pub use error::CliError;

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load_decomposition(path: &std::path::Path) -> Result<LSDecomposition, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    // either a bare decomposition or an analyze report that carries one
    let inner = match value.get("decomposition") {
        Some(d) => d.clone(),
        None => value,
    };
    Ok(serde_json::from_value(inner)?)
}

/// Runs one command and returns the rendered output. Verification failures
/// are returned as `CliError::Verification` carrying the rendered report.
pub fn run(config: &RunConfig) -> Result<String, CliError> {
    match config.command {
        CommandKind::Analyze => {
            let params = config.params.as_ref().expect("validated");
            let r = report::analyze(params, config.verify)?;
            Ok(match config.format {
                Format::Json => json(&r),
                Format::Csv => report::csv(&[report::sweep_row(params)?]),
            })
        }
        CommandKind::Sweep => {
            let grid = config.grid.as_ref().expect("validated");
            let rows = report::sweep(grid.resolution, &grid.thetas)?;
            Ok(match config.format {
                Format::Json => json(&rows),
                Format::Csv => report::csv(&rows),
            })
        }
        CommandKind::Verify => {
            let r = match (&config.decomposition, &config.params) {
                (Some(path), _) => {
                    report::verify(&load_decomposition(path)?, config.budget, config.seed)
                }
                (None, Some(params)) => report::verify_point(params, config.budget, config.seed)?,
                (None, None) => unreachable!("validated"),
            };
            let text = json(&r);
            if r.passed {
                Ok(text)
            } else {
                Err(CliError::Verification(text))
            }
        }
        CommandKind::Selftest => {
            let r = selftest::run(config.samples, config.seed);
            let text = match config.format {
                Format::Json => json(&r),
                Format::Csv => selftest::csv(&r),
            };
            if r.passed {
                Ok(text)
            } else {
                Err(CliError::Verification(text))
            }
        }
    }
}
