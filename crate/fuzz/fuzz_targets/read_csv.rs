#![no_main]

use libfuzzer_sys::fuzz_target;
use ocsvm_rules::dataset::{read_csv, Schema};

fuzz_target!(|data: &[u8]| {
    // One mixed schema and one purely numerical schema over the same bytes.
    for schema in [Schema::new(["x", "y"], ["c"]), Schema::new(["a"], [])] {
        if let Ok(d) = read_csv(data, &schema) {
            assert!(d.rows() > 0);
            assert_eq!(d.columns().len(), schema.numerical.len() + schema.categorical.len());
            for n in &schema.numerical {
                assert!(d.numerical(n).unwrap().iter().all(|v| v.is_finite()));
            }
        }
    }
});
