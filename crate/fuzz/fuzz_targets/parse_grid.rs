#![no_main]

use libfuzzer_sys::fuzz_target;
use tausum::io::{parse_grid, MAX_GRID_LEN};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(xs) = parse_grid(s) {
            assert!(xs.len() <= MAX_GRID_LEN);
        }
    }
});
