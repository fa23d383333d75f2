#![no_main]

use libfuzzer_sys::fuzz_target;
use pompeiu_cli::{parse_wavenumber, Wavenumber};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    match parse_wavenumber(text) {
        Ok(Wavenumber::Value(k)) => assert!(k.is_finite() && k > 0.0),
        Ok(Wavenumber::Auto) => assert_eq!(text.trim(), "auto"),
        Err(_) => {}
    }
});
