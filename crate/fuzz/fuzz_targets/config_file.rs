#![no_main]

use libfuzzer_sys::fuzz_target;
use qudit_bell_cli::config::{self, ConfigOverrides};

// Arbitrary text through the key=value parser and every resolver. Nothing may
// panic, and whatever resolves must satisfy the documented bounds.
fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let Ok(parsed) = config::parse_config_text(&text) else {
        return;
    };
    assert_eq!(parsed.clone().merge(ConfigOverrides::default()), parsed);
    assert_eq!(ConfigOverrides::default().merge(parsed.clone()), parsed);

    if let Ok(c) = config::resolve(&parsed) {
        assert!(2 <= c.d_min && c.d_min <= c.d_max && c.d_max <= config::EXTENDED_D_CAP);
        if parsed.extended_range != Some(true) {
            assert!(c.d_max <= config::DEFAULT_D_CAP);
        }
        assert!(!c.noise.is_empty() && !c.p.is_empty() && !c.iterations.is_empty());
        assert!(c.p.iter().all(|p| (0.0..=1.0).contains(p)));
        assert!(c.jobs >= 1 && c.tolerance > 0.0);
    }
    if let Ok(d_max) = config::resolve_fit_d_max(&parsed) {
        assert!((2..=16).contains(&d_max));
    }
    if let Ok(v) = config::resolve_verify(&parsed) {
        assert!((1..=5).contains(&v.qubits) && v.trials >= 1);
    }
});
