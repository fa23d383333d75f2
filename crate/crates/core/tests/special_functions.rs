// Reference digits are kept as printed by mpmath.
#![allow(clippy::excessive_precision)]

use pompeiu_core::special::{
    bessel_j, bessel_j1_zero, bessel_j_all, bessel_j_prime, gamma_three_halves, j1_zero_table,
};
use proptest::prelude::*;

// (order, argument, value) computed with mpmath at 30 digits.
const REFERENCE: &[(u32, f64, f64)] = &[
    (0, 0.5, 0.93846980724081290423),
    (0, 2.0, 0.22389077914123566805),
    (0, 10.0, -0.2459357644513483352),
    (1, 1.0, 0.44005058574493351596),
    (1, 5.0, -0.32757913759146522204),
    (2, 3.0, 0.48609126058589107691),
    (5, 7.5, 0.28347390516255045867),
    (10, 1.0, 2.630615123687453207e-10),
    (0, 100.0, 0.019985850304223122424),
    (1, 1000.0, 0.0047283119070895239176),
    (3, 2500.5, 0.013351965765610172176),
    (20, 10.0, 0.000011513369247813397783),
    (32, 10.0, 4.1122714910257672141e-14),
    (40, 30.0, 0.00036120236088965853089),
    (40, 12.5, 3.1985013987128431838e-17),
    (0, 9999.0, -0.00076458748603919629508),
];

#[test]
fn matches_reference_values() {
    for &(n, x, expect) in REFERENCE {
        let got = bessel_j(n, x).unwrap();
        assert!(
            (got - expect).abs() <= 1e-13 * expect.abs(),
            "J_{n}({x}) = {got}, expected {expect}"
        );
    }
}

#[test]
fn j1_zeros_match_reference() {
    let reference = [
        (1, 3.8317059702075123156),
        (2, 7.0155866698156187535),
        (3, 10.173468135062722077),
        (10, 32.189679910974403627),
        (50, 157.86265540193029781),
    ];
    for (m, z) in reference {
        let got = bessel_j1_zero(m).unwrap();
        assert!((got.value - z).abs() <= 4.0 * f64::EPSILON * z, "zero {m}: {}", got.value);
        assert!(got.residual() <= 1e-12);
    }
}

#[test]
fn zeros_interlace_with_j0() {
    // J_0 changes sign exactly once between consecutive J_1 zeros.
    let table = j1_zero_table();
    for w in table.windows(2) {
        let a = bessel_j(0, w[0].value).unwrap();
        let b = bessel_j(0, w[1].value).unwrap();
        assert!(a * b < 0.0);
    }
}

#[test]
fn gamma_three_halves_value() {
    assert!((gamma_three_halves() - 0.886226925452758013649).abs() <= f64::EPSILON);
}

proptest! {
    #[test]
    fn three_term_recurrence(n in 1u32..30, x in 0.1f64..200.0) {
        let j = bessel_j_all(n as usize + 1, x);
        let lhs = j[n as usize - 1] + j[n as usize + 1];
        let rhs = 2.0 * n as f64 / x * j[n as usize];
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn j0_prime_is_minus_j1(x in -500.0f64..500.0) {
        let d = bessel_j_prime(0, x).unwrap();
        let j1 = bessel_j(1, x).unwrap();
        prop_assert!((d + j1).abs() <= 1e-15);
    }

    #[test]
    fn derivative_matches_difference(n in 0u32..8, x in 0.5f64..40.0) {
        let h = 1e-5;
        let fd = (bessel_j(n, x + h).unwrap() - bessel_j(n, x - h).unwrap()) / (2.0 * h);
        prop_assert!((bessel_j_prime(n, x).unwrap() - fd).abs() <= 1e-9);
    }

    #[test]
    fn neumann_sum_rule(x in 0.0f64..1000.0) {
        // J_0 + 2 Σ J_{2k} = 1 and J_0² + 2 Σ J_k² = 1.
        let top = x as usize + 60;
        let j = bessel_j_all(top, x);
        let sq: f64 = j[0] * j[0] + 2.0 * j[1..].iter().map(|v| v * v).sum::<f64>();
        prop_assert!((sq - 1.0).abs() <= 1e-12);
    }
}
