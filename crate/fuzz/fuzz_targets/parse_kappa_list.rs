#![no_main]

use kappa_infimum::report::parse_kappa_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(kappas) = parse_kappa_list(s) {
        assert!(!kappas.is_empty());
        assert!(kappas
            .iter()
            .all(|k| k.value().is_finite() && k.value() > 0.0));
    }
});
