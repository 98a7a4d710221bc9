#![no_main]

use libfuzzer_sys::fuzz_target;
use qudit_bell_cli::args::Cli;
use qudit_bell_cli::config;

use clap::Parser;

// NUL-separated tokens form an argv. The first token is also fed to each
// list parser on its own.
fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let tokens: Vec<&str> = text.split('\0').collect();

    if let Ok(ps) = config::parse_p_list(tokens[0]) {
        assert!(!ps.is_empty());
        assert!(ps.iter().all(|p| (0.0..=1.0).contains(p)));
    }
    if let Ok(kinds) = config::parse_noise_list(tokens[0]) {
        assert!(!kinds.is_empty());
    }
    if let Ok(policies) = config::parse_policy_list(tokens[0]) {
        assert!(!policies.is_empty());
    }
    let _ = config::parse_state(tokens[0]);

    let argv = std::iter::once("qudit-bell").chain(tokens.iter().copied());
    if let Ok(cli) = Cli::try_parse_from(argv) {
        let _ = cli.command.args().to_overrides();
    }
});
