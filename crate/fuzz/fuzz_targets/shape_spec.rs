#![no_main]

use libfuzzer_sys::fuzz_target;
use pompeiu_core::shapes::StarShape;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(shape) = StarShape::from_json(text) else {
        return;
    };
    // Accepted shapes are certified star-shaped and survive a roundtrip.
    assert!(shape.lower_bound() > 0.0);
    assert!(shape.mean_radius().is_finite());
    let again = StarShape::from_json(&shape.to_json()).expect("roundtrip");
    assert_eq!(again, shape);
});
