//! Arbitrary text through the JSON reader; an accepted report must survive
//! conversion to CSV and back.

#![no_main]

use kappa_infimum::report::read_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(report) = read_json(s) {
        let csv = report.to_csv().unwrap();
        assert!(kappa_infimum::report::read_csv(&csv).is_ok());
    }
});
