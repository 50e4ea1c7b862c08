use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use icdlab_cli::{run, Cli, CliError, RunConfig};

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output_path {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let config = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("icdlab: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let result = run(&config).and_then(|text| emit(&config, &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(text)) => {
            if let Err(e) = emit(&config, &text) {
                eprintln!("icdlab: {e}");
            }
            eprintln!("icdlab: verification failed");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("icdlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
