//! Command-line surface. Flag values stay as text here and go through the
//! same parser as config-file values, so both report errors identically.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, ConfigOverrides};

#[derive(Debug, Parser)]
#[command(name = "qudit-bell", version, about = "Noisy qudit Bell-test sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// I_d and Zohren-Gill values over (d, noise, p, policy).
    BellSweep(CommonArgs),
    /// Minimum channel strength p that still violates the inequality.
    ThresholdSweep(CommonArgs),
    /// Noiseless I_d against 2.97(1 - 1/(10d)) for d = 2..=d_max.
    FitCheck(CommonArgs),
    /// Random resonator states through the qubit readout circuit.
    VerifyMeasurement(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::BellSweep(a)
            | Command::ThresholdSweep(a)
            | Command::FitCheck(a)
            | Command::VerifyMeasurement(a) => a,
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub d_min: Option<String>,
    #[arg(long)]
    pub d_max: Option<String>,
    /// depolarizing, dephasing or amplitude-damping; repeatable
    #[arg(long)]
    pub noise: Vec<String>,
    /// Comma-separated channel strengths in [0, 1]
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// single, linear, or a fixed count; repeatable
    #[arg(long)]
    pub iterations: Vec<String>,
    /// max, app or rev
    #[arg(long)]
    pub state: Option<String>,
    /// paper-literal or fourier-scaled
    #[arg(long)]
    pub convention: Option<String>,
    /// alice-ahead or bob-ahead reading of the CGLMP offset
    #[arg(long)]
    pub offset: Option<String>,
    /// cglmp, zg or both
    #[arg(long)]
    pub inequality: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Worker threads for sweep cells; default 1
    #[arg(long)]
    pub jobs: Option<String>,
    /// Bisection tolerance on p for threshold-sweep
    #[arg(long)]
    pub tolerance: Option<String>,
    /// Raise the d cap from 16 to 32
    #[arg(long)]
    pub extended_range: bool,
    /// Qubit count for verify-measurement
    #[arg(long)]
    pub qubits: Option<String>,
    /// Random states for verify-measurement
    #[arg(long)]
    pub trials: Option<String>,
    /// key=value file; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    /// Overrides set by flags alone; the config file is not read here.
    pub fn to_overrides(&self) -> Result<ConfigOverrides, ConfigError> {
        let mut o = ConfigOverrides::default();
        let scalars = [
            ("d_min", &self.d_min),
            ("d_max", &self.d_max),
            ("p", &self.p),
            ("state", &self.state),
            ("convention", &self.convention),
            ("offset", &self.offset),
            ("inequality", &self.inequality),
            ("format", &self.format),
            ("seed", &self.seed),
            ("jobs", &self.jobs),
            ("tolerance", &self.tolerance),
            ("qubits", &self.qubits),
            ("trials", &self.trials),
        ];
        for (key, value) in scalars {
            if let Some(v) = value {
                o.set(key, v)?;
            }
        }
        if !self.noise.is_empty() {
            o.set("noise", &self.noise.join(","))?;
        }
        if !self.iterations.is_empty() {
            o.set("iterations", &self.iterations.join(","))?;
        }
        if let Some(path) = &self.out {
            o.out = Some(path.clone());
        }
        if self.extended_range {
            o.extended_range = Some(true);
        }
        Ok(o)
    }
}
