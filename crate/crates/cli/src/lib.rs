//! Configuration-driven front end for the `qudit-bell` simulator.
//!
//! Every subcommand resolves a configuration from an optional key=value file
//! and the command-line flags (flags win), evaluates its cells, and writes a
//! CSV or JSON table to `--out` or standard output.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;


use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use args::{Cli, Command, CommonArgs};
use commands::Outcome;
use config::{ConfigError, ConfigOverrides, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            _ => EXIT_CHECK_FAILED,
        }
    }
}

/// File values first, then flags on top.
pub fn gather_overrides(args: &CommonArgs) -> Result<ConfigOverrides, ConfigError> {
    let flags = args.to_overrides()?;
    let base = match &args.config {
        Some(path) => config::load_config_file(path)?,
        None => ConfigOverrides::default(),
    };
    Ok(base.merge(flags))
}

fn write_table(
    outcome: &Outcome,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            outcome.table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            outcome.table.write(format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

/// Runs one invocation and returns its exit status.
pub fn execute(command: &Command) -> Result<i32, CliError> {
    let o = gather_overrides(command.args())?;
    let format = o.format.unwrap_or_default();
    let outcome = match command {
        Command::BellSweep(_) => commands::cmd_bell_sweep(&config::resolve(&o)?)?,
        Command::ThresholdSweep(_) => commands::cmd_threshold_sweep(&config::resolve(&o)?)?,
        Command::FitCheck(_) => commands::cmd_fit_check(config::resolve_fit_d_max(&o)?)?,
        Command::VerifyMeasurement(_) => {
            commands::cmd_verify_measurement(&config::resolve_verify(&o)?)?
        }
    };
    write_table(&outcome, format, o.out.as_deref())?;
    Ok(if outcome.success {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

pub fn run(cli: Cli) -> i32 {
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
