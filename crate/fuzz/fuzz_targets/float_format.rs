#![no_main]

use libfuzzer_sys::fuzz_target;
use qudit_bell_cli::output::{format_float, round_sig};

// The CSV text of a value must parse back to exactly its rounded form, and
// rounding twice changes nothing.
fuzz_target!(|data: &[u8]| {
    let Ok(bytes) = <[u8; 8]>::try_from(data.get(..8).unwrap_or(&[])) else {
        return;
    };
    let x = f64::from_le_bytes(bytes);
    if !x.is_finite() {
        return;
    }
    let r = round_sig(x);
    assert_eq!(round_sig(r), r);
    let text = format_float(x);
    assert!(!text.contains(['e', 'E', ',']));
    let back: f64 = text.parse().expect("formatted float parses");
    assert!(back == r || (r == 0.0 && back == 0.0));
});
