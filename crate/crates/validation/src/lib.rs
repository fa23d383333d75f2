//! Reference implementations that share no code with `pompeiu-core`, used as
//! oracles by the acceptance suite.

/// `J_n(x)` by its power series `Σ (-x²/4)^k (x/2)^n / (k! (n+k)!)`.
///
/// Cancellation costs about `x / ln 10` digits, so this is meant for
/// `|x| <= 12`.
pub fn series_j(n: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if k > 5 && term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}
