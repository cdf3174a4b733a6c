#![no_main]

use libfuzzer_sys::fuzz_target;
use ocsvm_rules::dataset::CategoricalState;
use ocsvm_rules::rules::{explain_point, prune_rules};
use ocsvm_rules_cli::artifacts::parse_rules;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(r) = parse_rules(s) else { return };
    let _ = r.to_text();
    let pruned = prune_rules(&r.rule_set);
    assert!(pruned.len() <= r.rule_set.len());
    let x = vec![0.0; r.rule_set.numerical.len()];
    let _ = explain_point(&x, &CategoricalState::default(), &r.rule_set);
});
