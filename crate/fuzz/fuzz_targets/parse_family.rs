#![no_main]

use kappa_infimum::FamilyId;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(f) = s.parse::<FamilyId>() {
        assert_eq!(f.as_str().parse::<FamilyId>().unwrap(), f);
    }
});
