//! Quadrature for the two integral shapes that occur throughout the crate:
//! smooth 2π-periodic integrands (trapezoidal rule, spectrally accurate)
//! and exponentially decaying integrands on `[0, ∞)` (truncated composite
//! Gauss–Legendre).
//!
//! Both rules refine by doubling and report `|I_2N - I_N|` as the error
//! estimate. Sums are accumulated serially in node order, so results are
//! bit-reproducible.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Node count of the coarsest periodic rule; the first returned value uses
/// twice as many nodes.
pub const PERIODIC_BASE_NODES: usize = 32;
/// Hard cap on the periodic node count.
pub const PERIODIC_MAX_NODES: usize = 1 << 20;
/// Smallest accepted absolute tolerance.
pub const MIN_TOL: f64 = 1e-14;

const PANEL_POINTS: usize = 16;
const HALFLINE_BASE_PANELS: usize = 4;
const HALFLINE_MAX_PANELS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub nodes_used: usize,
    /// Discrete L1 norm of the integrand on the final grid.
    pub l1_norm: f64,
}

impl QuadratureResult {
    /// Error estimate divided by the integrand's L1 norm (0 for a null integrand).
    pub fn relative_error(&self) -> f64 {
        if self.l1_norm > 0.0 {
            self.error_estimate / self.l1_norm
        } else {
            0.0
        }
    }
}

/// How the periodic rule decides it has converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `|I_2N - I_N| <= tol`.
    Absolute(f64),
    /// `|I_2N - I_N| <= tol * (2π/N) Σ|g|`, i.e. relative to the discrete
    /// L1 norm of the integrand. Used where the integrand's magnitude is
    /// unknown in advance or large.
    RelativeToL1(f64),
}

impl Tolerance {
    fn value(self) -> f64 {
        match self {
            Tolerance::Absolute(t) | Tolerance::RelativeToL1(t) => t,
        }
    }
}

/// Periodic trapezoidal rule on `[-π, π)` with absolute tolerance `tol`.
pub fn periodic_integral<G>(g: G, tol: f64) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Complex64,
{
    periodic_integral_with(g, Tolerance::Absolute(tol))
}

/// Periodic trapezoidal rule with an explicit tolerance mode.
pub fn periodic_integral_with<G>(g: G, tol: Tolerance) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Complex64,
{
    let t = tol.value();
    if !(t.is_finite() && t >= MIN_TOL) {
        return Err(Error::invalid(format!(
            "quadrature tolerance must be >= {MIN_TOL:e}, got {t:e}"
        )));
    }
    let mut n = PERIODIC_BASE_NODES;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for i in 0..n {
        let v = g(-PI + 2.0 * PI * i as f64 / n as f64);
        sum += v;
        abs_sum += v.norm();
    }
    let mut prev = sum * (2.0 * PI / n as f64);
    loop {
        // Midpoints of the current grid.
        let mut mid = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let v = g(-PI + 2.0 * PI * (i as f64 + 0.5) / n as f64);
            mid += v;
            abs_sum += v.norm();
        }
        sum += mid;
        n *= 2;
        let h = 2.0 * PI / n as f64;
        let cur = sum * h;
        let est = (cur - prev).norm();
        let limit = match tol {
            Tolerance::Absolute(t) => t,
            Tolerance::RelativeToL1(t) => t * abs_sum * h,
        };
        if est <= limit {
            return Ok(QuadratureResult {
                value: cur,
                error_estimate: est,
                nodes_used: n,
                l1_norm: abs_sum * h,
            });
        }
        if n >= PERIODIC_MAX_NODES {
            return Err(Error::NonConvergence {
                nodes: n,
                estimate: est,
                tol: limit,
            });
        }
        prev = cur;
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_POINTS))
}

/// Composite 16-point Gauss–Legendre on `[lo, hi]` with `panels` equal panels.
pub fn composite_gauss<G>(g: &G, lo: f64, hi: f64, panels: usize) -> Complex64
where
    G: Fn(f64) -> Complex64,
{
    composite_gauss_with_l1(g, lo, hi, panels).0
}

fn composite_gauss_with_l1<G>(g: &G, lo: f64, hi: f64, panels: usize) -> (Complex64, f64)
where
    G: Fn(f64) -> Complex64,
{
    let (x, w) = panel_rule();
    let width = (hi - lo) / panels as f64;
    let half = 0.5 * width;
    let mut total = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * width;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut abs_acc = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            let v = g(mid + half * xi);
            acc += v * *wi;
            abs_acc += v.norm() * *wi;
        }
        total += acc * half;
        l1 += abs_acc * half;
    }
    (total, l1)
}

/// `∫_0^∞ g(s) ds` for `|g(s)| <= C exp(-decay_rate * s)`.
///
/// The integral is truncated at `s_max = ln(C'/tol) / decay_rate`, where
/// `C'` is the largest `|g|` sampled on `[0, 1/decay_rate]`, and `[0, s_max]`
/// is integrated by composite Gauss–Legendre with panel doubling.
pub fn halfline_integral<G>(g: G, decay_rate: f64, tol: f64) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Complex64,
{
    if !(decay_rate.is_finite() && decay_rate > 0.0) {
        return Err(Error::invalid(format!(
            "decay_rate must be positive, got {decay_rate}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol:e}")));
    }
    let s_max = truncation_point(&g, decay_rate, tol);
    halfline_on(&g, s_max, tol)
}

pub(crate) fn truncation_point<G>(g: &G, decay_rate: f64, tol: f64) -> f64
where
    G: Fn(f64) -> Complex64,
{
    let scale = (0..=8)
        .map(|i| g(i as f64 / (8.0 * decay_rate)).norm())
        .fold(0.0, f64::max);
    let logs = (scale / tol).ln().max(1.0);
    let mut s_max = (logs + 1.0) / decay_rate;
    // Polynomial prefactors make C' an underestimate; extend until the
    // tail bound |g(s_max)| / rate is below tol.
    for _ in 0..64 {
        if g(s_max).norm() / decay_rate <= 0.1 * tol {
            break;
        }
        s_max += 2.0 / decay_rate;
    }
    s_max
}

pub(crate) fn halfline_on<G>(g: &G, s_max: f64, tol: f64) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Complex64,
{
    let mut panels = HALFLINE_BASE_PANELS;
    let mut prev = composite_gauss(g, 0.0, s_max, panels);
    loop {
        panels *= 2;
        let (cur, l1) = composite_gauss_with_l1(g, 0.0, s_max, panels);
        let est = (cur - prev).norm();
        if est <= tol {
            return Ok(QuadratureResult {
                value: cur,
                error_estimate: est,
                nodes_used: panels * PANEL_POINTS,
                l1_norm: l1,
            });
        }
        if panels >= HALFLINE_MAX_PANELS {
            return Err(Error::NonConvergence {
                nodes: panels * PANEL_POINTS,
                estimate: est,
                tol,
            });
        }
        prev = cur;
    }
}
