#![no_main]

use kappa_infimum::GridSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(grid) = s.parse::<GridSpec>() {
        let (lo, hi) = grid.bounds();
        assert!(lo < hi);
        // endpoints only; full iteration could be millions of points
        for x in [grid.point(0), grid.point(grid.len() - 1)] {
            assert!(x.is_finite());
        }
    }
});
