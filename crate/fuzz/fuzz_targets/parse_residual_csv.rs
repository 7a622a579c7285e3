#![no_main]

use libfuzzer_sys::fuzz_target;
use tausum::io::{parse_residual_csv, write_residual_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(rows) = parse_residual_csv(s) else {
        return;
    };
    let mut out = Vec::new();
    write_residual_csv(&mut out, &rows).unwrap();
    let again = parse_residual_csv(std::str::from_utf8(&out).unwrap()).unwrap();
    assert_eq!(rows, again);
});
