//! Fuzzes the weighted planar point parser: no panics; accepted rows carry
//! strictly positive weights.

#![no_main]

use libfuzzer_sys::fuzz_target;
use num::Signed;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(points) = equipart::io::parse_weighted2(text) {
        for p in &points {
            assert!(p.weight.is_positive());
        }
    }
});
