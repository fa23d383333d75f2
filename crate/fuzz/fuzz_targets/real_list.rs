#![no_main]

use libfuzzer_sys::fuzz_target;
use pompeiu_cli::{parse_real_list, MAX_REALS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = parse_real_list(text) {
        assert!(!v.is_empty() && v.len() <= MAX_REALS);
        assert!(v.iter().all(|x| x.is_finite()));
        let shortest: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        assert_eq!(parse_real_list(&shortest.join(",")).unwrap(), v);
    }
});
