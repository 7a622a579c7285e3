#![no_main]

use libfuzzer_sys::fuzz_target;
use tausum::diophantine::{CountMethod, Counter};
use tausum::expsum::BoundKind;
use tausum::{TailMode, TsumMethod};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = s.parse::<TsumMethod>() {
        assert_eq!(m.to_string().parse::<TsumMethod>().unwrap(), m);
    }
    if let Ok(m) = s.parse::<TailMode>() {
        assert_eq!(m.to_string().parse::<TailMode>().unwrap(), m);
    }
    if let Ok(k) = s.parse::<BoundKind>() {
        assert_eq!(k.to_string().parse::<BoundKind>().unwrap(), k);
    }
    if let Ok(m) = s.parse::<CountMethod>() {
        assert_eq!(m.to_string().parse::<CountMethod>().unwrap(), m);
    }
    let _ = s.parse::<Counter>();
});
