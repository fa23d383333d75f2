#![no_main]

use libfuzzer_sys::fuzz_target;
use pompeiu_cli::{parse_index_range, MAX_INDICES};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = parse_index_range(text) {
        assert!(!v.is_empty() && v.len() <= MAX_INDICES);
        // Rendering the expansion item by item parses back to itself.
        let flat: Vec<String> = v.iter().map(usize::to_string).collect();
        assert_eq!(parse_index_range(&flat.join(",")).unwrap(), v);
    }
});
