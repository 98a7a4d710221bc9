use std::process::ExitCode;

use clap::Parser;
use qudit_bell_cli::args::Cli;

fn main() -> ExitCode {
    let code = qudit_bell_cli::run(Cli::parse());
    ExitCode::from(code as u8)
}
