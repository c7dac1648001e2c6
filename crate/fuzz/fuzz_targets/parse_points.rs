//! Fuzzes the 3D point file parser: must never panic, and accepted inputs
//! must survive a format/parse round trip.
//!
//! Run with: cargo +nightly fuzz run parse_points

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(points) = equipart::io::parse_points3(text) {
        let formatted = equipart::io::format_points3(&points);
        let reparsed = equipart::io::parse_points3(&formatted).expect("own output parses");
        assert_eq!(points, reparsed);
    }
});
