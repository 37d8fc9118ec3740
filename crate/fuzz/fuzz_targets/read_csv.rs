//! Arbitrary text through the CSV reader; accepted records must re-evaluate
//! without panicking.

#![no_main]

use kappa_infimum::report::{read_csv, recheck_records};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(records) = read_csv(s) {
        let _ = recheck_records(&records);
    }
});
