#![no_main]

use libfuzzer_sys::fuzz_target;
use ocsvm_rules_cli::artifacts::parse_model;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_model(s) else { return };
    // A validated model must evaluate without panicking.
    let x = vec![0.5; m.model.dim()];
    let _ = m.model.decision_function(&x);
});
