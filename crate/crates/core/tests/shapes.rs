use std::f64::consts::PI;

use pompeiu_core::shapes::{polygon_area, RigidMotion, ShapeSpec, StarShape};
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = StarShape> {
    (
        0.5f64..2.0,
        prop::collection::vec(-1.0f64..1.0, 0..6),
        prop::collection::vec(-1.0f64..1.0, 0..6),
    )
        .prop_map(|(r, a, b)| {
            let total: f64 = a.iter().chain(&b).map(|c| c.abs()).sum();
            let scale = if total > 0.0 { 0.8 * r / total } else { 0.0 };
            let a = a.iter().map(|c| c * scale * 0.5).collect();
            let b = b.iter().map(|c| c * scale * 0.5).collect();
            StarShape::new(r, a, b).unwrap()
        })
}

fn motion_strategy() -> impl Strategy<Value = RigidMotion> {
    (-PI..PI, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(r, x, y)| RigidMotion::new(r, [x, y]))
}

#[test]
fn rejects_nonpositive_bound() {
    let err = StarShape::new(1.0, vec![0.6], vec![0.5]).unwrap_err();
    assert!(err.to_string().contains("c1"));
    assert!(StarShape::new(0.0, vec![], vec![]).is_err());
    assert!(StarShape::new(1.0, vec![f64::NAN], vec![]).is_err());
}

#[test]
fn json_rejects_unknown_fields() {
    assert!(StarShape::from_json(r#"{"mean_radius": 1.0, "tan": [0.1]}"#).is_err());
    assert!(StarShape::from_json(r#"{"cos": [0.1]}"#).is_err());
    let s = StarShape::from_json(r#"{"mean_radius": 2.0}"#).unwrap();
    assert!(s.is_disc());
}

#[test]
fn load_reports_missing_path() {
    let err = StarShape::load("/nonexistent/shape.json").unwrap_err();
    assert!(err.to_string().contains("/nonexistent/shape.json"));
    assert!(err.is_validation());
}

proptest! {
    #[test]
    fn derivatives_match_differences(shape in shape_strategy(), phi in -PI..PI) {
        let h = 1e-5;
        for d in 0..3u32 {
            let fd = (shape.eval(phi + h, d).unwrap() - shape.eval(phi - h, d).unwrap()) / (2.0 * h);
            let exact = shape.eval(phi, d + 1).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()) * 36.0);
        }
    }

    #[test]
    fn area_closed_form(shape in shape_strategy()) {
        let r = shape.mean_radius();
        let energy: f64 = shape.cos_coeffs().iter().chain(shape.sin_coeffs()).map(|c| c * c).sum();
        let exact = PI * (r * r + 0.5 * energy);
        prop_assert!((shape.area() - exact).abs() <= 1e-13 * exact);
    }

    #[test]
    fn area_is_motion_invariant(shape in shape_strategy(), m in motion_strategy()) {
        let poly = shape.boundary_polygon(4096);
        let moved: Vec<[f64; 2]> = poly.iter().map(|&p| m.apply(p)).collect();
        let a0 = polygon_area(&poly);
        prop_assert!((polygon_area(&moved) - a0).abs() <= 1e-11 * a0);
        prop_assert!((a0 - shape.area()).abs() <= 1e-4 * a0);
    }

    #[test]
    fn motion_inverse_roundtrip(m in motion_strategy(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let back = m.inverse().apply(m.apply([x, y]));
        prop_assert!((back[0] - x).abs() < 1e-12 && (back[1] - y).abs() < 1e-12);
    }

    #[test]
    fn compose_applies_right_first(a in motion_strategy(), b in motion_strategy(), x in -5.0f64..5.0) {
        let p = a.compose(&b).apply([x, 1.0]);
        let q = a.apply(b.apply([x, 1.0]));
        prop_assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
    }

    #[test]
    fn rotated_shifts_origin(shape in shape_strategy(), tau in -PI..PI, phi in -PI..PI) {
        let g = shape.rotated(tau);
        prop_assert!((g.radius(phi) - shape.radius(phi + tau)).abs() < 1e-13);
        prop_assert!((g.mean_radius() - shape.mean_radius()).abs() == 0.0);
    }

    #[test]
    fn json_roundtrip(shape in shape_strategy()) {
        let back = StarShape::from_json(&shape.to_json()).unwrap();
        prop_assert_eq!(back, shape.clone());
        let spec: ShapeSpec = serde_json::from_str(&shape.to_json()).unwrap();
        prop_assert_eq!(StarShape::from_spec(&spec).unwrap(), shape);
    }

    #[test]
    fn bounds_enclose_radius(shape in shape_strategy(), phi in -PI..PI) {
        let f = shape.radius(phi);
        prop_assert!(f >= shape.lower_bound() - 1e-15 && f <= shape.upper_bound() + 1e-15);
        prop_assert!(shape.lower_bound() > 0.0);
    }
}
