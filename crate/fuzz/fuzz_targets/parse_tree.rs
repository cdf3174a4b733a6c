#![no_main]

use libfuzzer_sys::fuzz_target;
use ocsvm_rules::surrogate::tree_to_rules;
use ocsvm_rules_cli::artifacts::parse_tree;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(t) = parse_tree(s) else { return };
    let _ = tree_to_rules(&t.tree);
});
