//! Fuzzes the number parser (decimal literals and num/den rationals): no
//! panics; accepted values round-trip exactly through their text form.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = equipart::io::parse_scalar(text) {
        let s = equipart::scalar::scalar_string(&q);
        let back = equipart::io::parse_scalar(&s).expect("own output parses");
        assert_eq!(q, back);
    }
    let _ = equipart::io::parse_direction3(text);
    let _ = equipart::io::parse_direction2(text);
});
