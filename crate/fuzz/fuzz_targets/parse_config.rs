#![no_main]

use libfuzzer_sys::fuzz_target;
use ocsvm_rules_cli::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = RunConfig::from_json(s, ".") {
            // A config that validated once must keep validating.
            cfg.validate().unwrap();
            let _ = cfg.extraction_config();
            let _ = cfg.load_schema();
        }
    }
});
