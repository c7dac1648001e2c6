//! Fuzzes the plane-triple parser: no panics; accepted triples have nonzero
//! normals and round-trip through the plain-text plane format.

#![no_main]

use libfuzzer_sys::fuzz_target;
use num::Zero;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(planes) = equipart::io::parse_planes3(text) {
        for plane in &planes {
            assert!(!plane.normal.iter().all(|c| c.is_zero()));
        }
        let formatted = equipart::io::format_planes3(&planes);
        let reparsed = equipart::io::parse_planes3(&formatted).expect("own output parses");
        assert_eq!(planes, reparsed);
    }
});
