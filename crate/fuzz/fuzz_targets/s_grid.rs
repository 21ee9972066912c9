#![no_main]

use kleinian::groupfile::{parse_s_grid, MAX_GRID_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_s_grid(text) {
        assert!(!grid.is_empty() && grid.len() <= MAX_GRID_POINTS + 1);
        assert!(grid.iter().all(|s| s.is_finite()));
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }
});
