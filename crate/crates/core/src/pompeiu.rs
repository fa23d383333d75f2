//! The integral functionals of the Pompeiu problem for a star-shaped
//! domain `D` with boundary `r = f(phi)`:
//!
//! * the indicator transform `∫_D exp(i k α·x) dx` on real directions and
//!   on the complex quadric `α_1² + α_2² = 1`;
//! * the integral of `exp(i k β·x)` over a rigidly moved copy of `D`;
//! * the boundary moment `∫ f' f exp(i k f cos(phi - θ)) dphi` for complex
//!   `θ`, and its parametrisation by `s` along `(cos θ, sin θ) = (is, √(s²+1))`;
//! * the Laplace-weighted double integral in `(phi, s)` and the moment
//!   sequence `I_j = ∫ f' f a^j e^{ib} dphi`, `a = k f cos phi`,
//!   `b = k f sin phi`, together with a least-squares extraction of the
//!   leading moments from the weighted integral.
//!
//! All φ-integrals use the periodic trapezoidal rule with a tolerance
//! relative to the integrand's L1 norm.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{
    gauss_legendre, halfline_integral, periodic_integral_with, QuadratureResult,
    Tolerance,
};
use crate::report::{Cell, Table};
use crate::shapes::{RigidMotion, StarShape};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Moment indices above this use the log-scaled path.
pub const DIRECT_MOMENT_MAX: usize = 20;
/// Largest supported moment index.
pub const MOMENT_MAX: usize = 2000;
/// Extra monomials fitted beyond `j_max` to absorb the remainder of the
/// weighted-integral expansion.
pub const EXTRACTION_EXTRA_TERMS: usize = 4;

/// Wavenumber and quadrature tolerance shared by the functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PompeiuParams {
    k: f64,
    tol: f64,
}

impl PompeiuParams {
    pub const DEFAULT_TOL: f64 = 1e-13;

    pub fn new(k: f64, tol: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!("wavenumber k must be positive, got {k}")));
        }
        if !(1e-14..=1e-6).contains(&tol) {
            return Err(Error::invalid(format!(
                "tolerance must lie in [1e-14, 1e-6], got {tol:e}"
            )));
        }
        Ok(PompeiuParams { k, tol })
    }

    pub fn with_k(k: f64) -> Result<Self> {
        Self::new(k, Self::DEFAULT_TOL)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn rule(&self) -> Tolerance {
        Tolerance::RelativeToL1(self.tol)
    }
}

/// A point `(α_1, α_2)` of the quadric `α_1² + α_2² = 1` in `C²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDirection {
    alpha1: Complex64,
    alpha2: Complex64,
}

impl ComplexDirection {
    pub const VARIETY_TOL: f64 = 1e-12;

    pub fn new(alpha1: Complex64, alpha2: Complex64) -> Result<Self> {
        let d = ComplexDirection { alpha1, alpha2 };
        let res = d.variety_residual();
        if !(res <= Self::VARIETY_TOL) {
            return Err(Error::invalid(format!(
                "direction violates alpha1^2 + alpha2^2 = 1 by {res:e}"
            )));
        }
        Ok(d)
    }

    /// The real unit vector `(cos θ, sin θ)`.
    pub fn real(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        ComplexDirection {
            alpha1: Complex64::new(c, 0.0),
            alpha2: Complex64::new(s, 0.0),
        }
    }

    /// `(cos θ, sin θ)` for complex `θ`.
    pub fn from_complex_angle(theta: Complex64) -> Result<Self> {
        Self::new(theta.cos(), theta.sin())
    }

    /// The branch `(i s, +√(s² + 1))` used for the complexified boundary
    /// moment.
    pub fn complexified(s: f64) -> Self {
        ComplexDirection {
            alpha1: Complex64::new(0.0, s),
            alpha2: Complex64::new((s * s + 1.0).sqrt(), 0.0),
        }
    }

    pub fn alpha1(&self) -> Complex64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> Complex64 {
        self.alpha2
    }

    pub fn variety_residual(&self) -> f64 {
        (self.alpha1 * self.alpha1 + self.alpha2 * self.alpha2 - 1.0).norm()
    }

    pub fn is_real(&self) -> bool {
        self.alpha1.im == 0.0 && self.alpha2.im == 0.0
    }

    pub fn negated(&self) -> Self {
        ComplexDirection {
            alpha1: -self.alpha1,
            alpha2: -self.alpha2,
        }
    }
}

/// `n` equally spaced real directions starting at angle 0.
pub fn real_directions(n: usize) -> Vec<ComplexDirection> {
    (0..n)
        .map(|i| ComplexDirection::real(2.0 * PI * i as f64 / n as f64))
        .collect()
}

/// `∫_0^F ρ exp(i c ρ) dρ`.
///
/// Closed form `(e^{z}(1 - z) - 1) / c²` with `z = i c F`; the power series
/// `F² Σ z^n / (n! (n+2))` is used for `|z| < 1`, where the closed form
/// cancels.
pub fn radial_moment(c: Complex64, radius: f64) -> Complex64 {
    let z = I * c * radius;
    if z.norm() < 1.0 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.5, 0.0);
        for n in 1..40 {
            term *= z / n as f64;
            let t = term / (n as f64 + 2.0);
            sum += t;
            if t.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum * radius * radius
    } else {
        (z.exp() * (1.0 - z) - 1.0) / (c * c)
    }
}

/// `∫_D exp(i k α·x) dx` as a φ-integral with the radial integral in
/// closed form.
pub fn indicator_transform(
    shape: &StarShape,
    params: &PompeiuParams,
    dir: &ComplexDirection,
) -> Result<QuadratureResult> {
    let k = params.k;
    periodic_integral_with(
        |phi| {
            let (s, c) = phi.sin_cos();
            let cc = (dir.alpha1 * c + dir.alpha2 * s) * k;
            radial_moment(cc, shape.radius(phi))
        },
        params.rule(),
    )
}

/// Indicator transform over a list of directions, in input order.
pub fn direction_sweep(
    shape: &StarShape,
    params: &PompeiuParams,
    dirs: &[ComplexDirection],
) -> Result<Vec<QuadratureResult>> {
    dirs.par_iter()
        .map(|d| indicator_transform(shape, params, d))
        .collect()
}

/// CSV layout for a direction sweep.
pub fn direction_table(dirs: &[ComplexDirection], values: &[QuadratureResult]) -> Table {
    let mut t = Table::new(&[
        "re_alpha1",
        "im_alpha1",
        "re_alpha2",
        "im_alpha2",
        "re_value",
        "im_value",
        "error_estimate",
    ]);
    for (d, v) in dirs.iter().zip(values) {
        t.push(vec![
            Cell::from(d.alpha1.re),
            Cell::from(d.alpha1.im),
            Cell::from(d.alpha2.re),
            Cell::from(d.alpha2.im),
            Cell::from(v.value.re),
            Cell::from(v.value.im),
            Cell::from(v.error_estimate),
        ]);
    }
    t
}

/// `∫_{σ(D)} exp(i k β·x) dx` for a unit vector `β` and rigid motion `σ`.
///
/// Evaluated by the change of variables `x = R y + t`, which gives
/// `e^{i k β·t}` times the indicator transform at `R^T β`, and independently
/// by polar quadrature of the moved domain about `t` with Gauss–Legendre in
/// the radius. The two must agree to `10·tol` relative to the domain area.
pub fn pompeiu_integral(
    shape: &StarShape,
    params: &PompeiuParams,
    beta: [f64; 2],
    motion: &RigidMotion,
) -> Result<Complex64> {
    let norm = beta[0].hypot(beta[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("beta must be a unit vector, |beta| = {norm}")));
    }
    let k = params.k;
    let t = motion.translation;
    let phase = Complex64::from_polar(1.0, k * (beta[0] * t[0] + beta[1] * t[1]));

    let back = motion.rotate_back(beta);
    let dir = ComplexDirection {
        alpha1: Complex64::new(back[0], 0.0),
        alpha2: Complex64::new(back[1], 0.0),
    };
    let by_change_of_variables = phase * indicator_transform(shape, params, &dir)?.value;

    let direct = phase * moved_domain_quadrature(shape, params, beta, motion.rotation)?;

    let scale = shape.upper_bound().powi(2) * PI;
    let gap = (by_change_of_variables - direct).norm();
    if gap > 10.0 * params.tol * scale.max(1.0) {
        return Err(Error::Consistency(format!(
            "change-of-variables and direct quadrature differ by {gap:e}"
        )));
    }
    Ok(by_change_of_variables)
}

/// `∫_{ρ(D)} exp(i k β·x) dx` for the domain rotated by `rotation`, whose
/// boundary is `r = f(ψ - rotation)`; radial integral by Gauss–Legendre.
fn moved_domain_quadrature(
    shape: &StarShape,
    params: &PompeiuParams,
    beta: [f64; 2],
    rotation: f64,
) -> Result<Complex64> {
    let (x, w) = gauss_legendre(16);
    let k = params.k;
    let res = periodic_integral_with(
        |psi| {
            let (s, c) = psi.sin_cos();
            let radius = shape.radius(psi - rotation);
            let cc = k * (beta[0] * c + beta[1] * s);
            // One 16-point panel per ~4 radians of phase keeps GL exact to rounding.
            let panels = ((cc.abs() * radius) / 4.0).ceil().max(1.0) as usize;
            let width = radius / panels as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..panels {
                let mid = (p as f64 + 0.5) * width;
                for (xi, wi) in x.iter().zip(&w) {
                    let rho = mid + 0.5 * width * xi;
                    acc += Complex64::from_polar(rho * wi, cc * rho);
                }
            }
            acc * (0.5 * width)
        },
        params.rule(),
    )?;
    Ok(res.value)
}

/// `∫ f'(φ) f(φ) exp(i k f(φ) cos(φ - θ)) dφ` for complex `θ`.
pub fn boundary_moment(
    shape: &StarShape,
    params: &PompeiuParams,
    theta: Complex64,
) -> Result<QuadratureResult> {
    let k = params.k;
    periodic_integral_with(
        |phi| {
            let (f, df) = shape.radius_and_slope(phi);
            if df == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let arg = (Complex64::new(phi, 0.0) - theta).cos();
            (I * k * f * arg).exp() * (df * f)
        },
        params.rule(),
    )
}

/// The boundary moment along `(cos θ, sin θ) = (i s, √(s²+1))`:
/// `∫ f' f exp(-s k f cos φ + i k √(s²+1) f sin φ) dφ`.
pub fn complexified_boundary_moment(
    shape: &StarShape,
    params: &PompeiuParams,
    s: f64,
) -> Result<QuadratureResult> {
    let k = params.k;
    let root = (s * s + 1.0).sqrt();
    periodic_integral_with(
        |phi| {
            let (f, df) = shape.radius_and_slope(phi);
            if df == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let (sn, cs) = phi.sin_cos();
            Complex64::new(-s * k * f * cs, k * root * f * sn).exp() * (df * f)
        },
        params.rule(),
    )
}

/// `∫_0^∞ exp(-s (a + A) + i √(s²+1) b) ds`, requiring `A > |a|`.
///
/// `tol` is relative to the leading magnitude `1 / (a + A)`.
pub fn inner_s_integral(a: f64, b: f64, big_a: f64, tol: f64) -> Result<QuadratureResult> {
    if !(big_a > a.abs()) {
        return Err(Error::invalid(format!(
            "A = {big_a} must exceed |a| = {} for the s-integral to converge",
            a.abs()
        )));
    }
    let rate = a + big_a;
    halfline_integral(
        |s| Complex64::new(-s * rate, (s * s + 1.0).sqrt() * b).exp(),
        rate,
        tol / rate,
    )
}

/// `max_φ |f(φ) cos φ|` by dense sampling and a Newton polish.
pub fn max_abs_projection(shape: &StarShape) -> f64 {
    const SAMPLES: usize = 4096;
    let h = |phi: f64| shape.radius(phi) * phi.cos();
    let mut best_phi = 0.0;
    let mut best = 0.0;
    for i in 0..SAMPLES {
        let phi = -PI + 2.0 * PI * i as f64 / SAMPLES as f64;
        let v = h(phi).abs();
        if v > best {
            best = v;
            best_phi = phi;
        }
    }
    // Newton on h' = f' cos - f sin, with h'' = f'' cos - 2 f' sin - f cos.
    let mut phi = best_phi;
    for _ in 0..30 {
        let jet = shape.jet(phi);
        let (s, c) = phi.sin_cos();
        let d1 = jet[1] * c - jet[0] * s;
        let d2 = jet[2] * c - 2.0 * jet[1] * s - jet[0] * c;
        if d2 == 0.0 {
            break;
        }
        let step = d1 / d2;
        phi -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    if (phi - best_phi).abs() < 2.0 * PI / SAMPLES as f64 {
        best = best.max(h(phi).abs());
    }
    best
}

/// `A_0 = max_φ |a(φ)|` with `a = k f cos φ`.
pub fn weight_threshold(shape: &StarShape, params: &PompeiuParams) -> f64 {
    params.k * max_abs_projection(shape)
}

/// `∫ f' f · inner_s_integral(a(φ), b(φ), A) dφ`.
pub fn laplace_weighted(
    shape: &StarShape,
    params: &PompeiuParams,
    big_a: f64,
) -> Result<QuadratureResult> {
    let a0 = weight_threshold(shape, params);
    if !(big_a > a0) {
        return Err(Error::invalid(format!(
            "A = {big_a} must exceed A_0 = max|a| = {a0}"
        )));
    }
    let k = params.k;
    let inner_tol = params.tol * 1e-2;
    let failure = std::cell::Cell::new(None);
    let res = periodic_integral_with(
        |phi| {
            let (f, df) = shape.radius_and_slope(phi);
            if df == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let (sn, cs) = phi.sin_cos();
            match inner_s_integral(k * f * cs, k * f * sn, big_a, inner_tol) {
                Ok(r) => r.value * (df * f),
                Err(e) => {
                    failure.set(Some(e.to_string()));
                    Complex64::new(f64::NAN, f64::NAN)
                }
            }
        },
        params.rule(),
    );
    if let Some(msg) = failure.take() {
        return Err(Error::Consistency(format!("inner s-integral failed: {msg}")));
    }
    res
}

/// Which evaluation path a moment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentPath {
    /// `∫ f' f a^j e^{ib}` as written; overflows for large `j`.
    Direct,
    /// `∫ f' f (a / A_0)^j e^{ib}` with `log_scale = j ln A_0`.
    Scaled,
}

/// One moment `I_j`, stored as `scaled_value · exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub j: usize,
    pub log_scale: f64,
    pub scaled_value: Complex64,
    /// Quadrature error estimate divided by the integrand's L1 norm.
    pub error_estimate: f64,
    /// Absolute quadrature error estimate, in the units of `scaled_value`.
    pub abs_error: f64,
}

impl MomentReport {
    /// `I_j` itself; may overflow for large `j`.
    pub fn value(&self) -> Complex64 {
        self.scaled_value * self.log_scale.exp()
    }

    /// `ln |I_j|`.
    pub fn ln_abs(&self) -> f64 {
        self.log_scale + self.scaled_value.norm().ln()
    }
}

/// `I_j = ∫ f' f a^j e^{ib} dφ`, direct for `j <= 20`, log-scaled above.
pub fn moment(shape: &StarShape, params: &PompeiuParams, j: usize) -> Result<MomentReport> {
    let path = if j <= DIRECT_MOMENT_MAX {
        MomentPath::Direct
    } else {
        MomentPath::Scaled
    };
    moment_with(shape, params, j, 0.0, path)
}

/// `I_j` for the geometric domain `shape` expressed in a frame whose
/// angular origin is shifted by `origin`: `a = k f(φ) cos(φ + origin)`,
/// `b = k f(φ) sin(φ + origin)`. With `origin = 0` this is [`moment`].
///
/// For any `τ`, `moment_with(&shape.rotated(τ), .., τ, ..)` equals
/// `moment_with(&shape, .., 0.0, ..)` up to quadrature error.
pub fn moment_with(
    shape: &StarShape,
    params: &PompeiuParams,
    j: usize,
    origin: f64,
    path: MomentPath,
) -> Result<MomentReport> {
    if j > MOMENT_MAX {
        return Err(Error::invalid(format!("moment index must be <= {MOMENT_MAX}, got {j}")));
    }
    let k = params.k;
    let (log_scale, norm) = match path {
        MomentPath::Direct => (0.0, 1.0),
        MomentPath::Scaled => {
            let a0 = weight_threshold(shape, params);
            (j as f64 * a0.ln(), a0)
        }
    };
    let res = periodic_integral_with(
        |phi| {
            let (f, df) = shape.radius_and_slope(phi);
            if df == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let (sn, cs) = (phi + origin).sin_cos();
            let a = k * f * cs / norm;
            Complex64::from_polar(df * f * a.powi(j as i32), k * f * sn)
        },
        params.rule(),
    )?;
    Ok(MomentReport {
        j,
        log_scale,
        scaled_value: res.value,
        error_estimate: res.relative_error(),
        abs_error: res.error_estimate,
    })
}

/// Moments for a list of indices, in input order.
pub fn moment_sweep(
    shape: &StarShape,
    params: &PompeiuParams,
    js: &[usize],
) -> Result<Vec<MomentReport>> {
    js.par_iter().map(|&j| moment(shape, params, j)).collect()
}

/// CSV layout for a moment table.
pub fn moment_table(reports: &[MomentReport]) -> Table {
    let mut t = Table::new(&["j", "log_scale", "re", "im", "error_estimate"]);
    for r in reports {
        t.push(vec![
            Cell::from(r.j),
            Cell::from(r.log_scale),
            Cell::from(r.scaled_value.re),
            Cell::from(r.scaled_value.im),
            Cell::from(r.error_estimate),
        ]);
    }
    t
}

/// Moments recovered from the weighted integral `W(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedMoments {
    /// `I_0 ..= I_{j_max}`.
    pub moments: Vec<Complex64>,
    /// Fitted coefficients of `A^{-1-l}` for every fitted term, including
    /// the extra terms; the first `j_max + 1` equal `(-1)^l I_l`.
    pub coefficients: Vec<Complex64>,
    /// `(A, W(A))` samples used in the fit.
    pub samples: Vec<(f64, Complex64)>,
    /// `max_i |W(A_i) - model(A_i)|`.
    pub residual: f64,
}

/// Fits `W(A) = Σ_l c_l A^{-1-l}` on `a_grid` and returns `I_l = (-1)^l c_l`
/// for `l <= j_max`.
///
/// `EXTRACTION_EXTRA_TERMS` further monomials are fitted and discarded:
/// the s-integral contributes `i b e^{ib} / (a+A)^3` and higher terms, so
/// only the coefficients of `A^{-1}` and `A^{-2}` are pure moments, and an
/// unmodelled `A^{-3}` term would bias them. Rows are weighted by `A` so
/// every sample counts with its relative accuracy.
pub fn extract_moments(
    shape: &StarShape,
    params: &PompeiuParams,
    j_max: usize,
    a_grid: &[f64],
) -> Result<ExtractedMoments> {
    let terms = j_max + 1 + EXTRACTION_EXTRA_TERMS;
    if a_grid.len() < terms + 2 {
        return Err(Error::invalid(format!(
            "A-grid needs at least {} points for j_max = {j_max}, got {}",
            terms + 2,
            a_grid.len()
        )));
    }
    let a0 = weight_threshold(shape, params);
    let lo = a_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = a_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > a0) {
        return Err(Error::invalid(format!(
            "every A must exceed A_0 = max|a| = {a0}; smallest is {lo}"
        )));
    }
    if hi < 100.0 * lo {
        return Err(Error::invalid(format!(
            "A-grid must span two decades, got [{lo}, {hi}]"
        )));
    }
    let values: Vec<Complex64> = a_grid
        .par_iter()
        .map(|&a| laplace_weighted(shape, params, a).map(|r| r.value))
        .collect::<Result<_>>()?;

    // Scaled monomials x^l with x = lo/A after weighting rows by A/lo.
    let rows = a_grid.len();
    let design = DMatrix::from_fn(rows, terms, |i, l| (lo / a_grid[i]).powi(l as i32));
    let weighted: Vec<Complex64> = values
        .iter()
        .zip(a_grid)
        .map(|(w, a)| w * (a / lo))
        .collect();
    let svd = design.svd(true, true);
    let solve = |part: fn(&Complex64) -> f64| -> Result<DVector<f64>> {
        let rhs = DVector::from_iterator(rows, weighted.iter().map(part));
        svd.solve(&rhs, 1e-14)
            .map_err(|e| Error::Consistency(format!("least-squares solve failed: {e}")))
    };
    let re = solve(|z| z.re)?;
    let im = solve(|z| z.im)?;

    let coefficients: Vec<Complex64> = (0..terms)
        .map(|l| Complex64::new(re[l], im[l]) * lo.powi(l as i32 + 1))
        .collect();
    let model = |a: f64| -> Complex64 {
        coefficients
            .iter()
            .enumerate()
            .map(|(l, c)| c * a.powi(-(l as i32) - 1))
            .sum()
    };
    let residual = a_grid
        .iter()
        .zip(&values)
        .map(|(&a, w)| (w - model(a)).norm())
        .fold(0.0, f64::max);
    let max_w = values.iter().map(|w| w.norm()).fold(0.0, f64::max);
    if residual > 1e-3 * max_w {
        return Err(Error::IllConditioned {
            residual,
            limit: 1e-3 * max_w,
        });
    }
    let moments = coefficients
        .iter()
        .take(j_max + 1)
        .enumerate()
        .map(|(l, c)| if l % 2 == 0 { *c } else { -c })
        .collect();
    Ok(ExtractedMoments {
        moments,
        coefficients,
        samples: a_grid.iter().cloned().zip(values).collect(),
        residual,
    })
}

/// `n` logarithmically spaced values on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l, h) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `∫_0^∞ e^{-A s} (boundary moment at s) ds`, the weighted integral with
/// the s-integral outermost. Independent check of [`laplace_weighted`].
pub fn laplace_weighted_s_outer(
    shape: &StarShape,
    params: &PompeiuParams,
    big_a: f64,
) -> Result<Complex64> {
    let a0 = weight_threshold(shape, params);
    if !(big_a > a0) {
        return Err(Error::invalid(format!("A = {big_a} must exceed A_0 = {a0}")));
    }
    let rate = big_a - a0;
    let g = |s: f64| {
        complexified_boundary_moment(shape, params, s)
            .map(|r| r.value * (-big_a * s).exp())
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let tol = params.tol * shape.upper_bound().powi(2);
    let res = halfline_integral(g, rate, tol)?;
    if !res.value.is_finite() {
        return Err(Error::Consistency("inner φ-quadrature failed".into()));
    }
    Ok(res.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite_gauss;
    use crate::special::bessel_j;

    fn bump() -> StarShape {
        StarShape::new(1.0, vec![0.2], vec![]).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PompeiuParams::new(0.0, 1e-12).is_err());
        assert!(PompeiuParams::new(f64::NAN, 1e-12).is_err());
        assert!(PompeiuParams::new(1.0, 1e-3).is_err());
        assert!(PompeiuParams::new(1.0, 1e-15).is_err());
        assert!(PompeiuParams::new(1.0, 1e-10).is_ok());
    }

    #[test]
    fn direction_on_variety() {
        assert!(ComplexDirection::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
        for s in [0.1, 0.5, 2.0, 30.0] {
            assert!(ComplexDirection::complexified(s).variety_residual() <= 1e-13);
        }
        let theta = Complex64::new(0.3, -1.2);
        let d = ComplexDirection::from_complex_angle(theta).unwrap();
        assert!(!d.is_real());
        assert!(ComplexDirection::real(0.4).is_real());
    }

    #[test]
    fn radial_moment_both_branches_match_quadrature() {
        for c in [0.3, 0.999, 1.001, 4.0] {
            let c = Complex64::new(c, 0.0);
            let g = |r: f64| Complex64::from_polar(r, c.re * r);
            let q = composite_gauss(&g, 0.0, 1.0, 8);
            assert!((radial_moment(c, 1.0) - q).norm() < 1e-15);
        }
        let c = Complex64::new(0.2, 0.7);
        let g = |r: f64| (I * c * r).exp() * r;
        let q = composite_gauss(&g, 0.0, 1.3, 8);
        assert!((radial_moment(c, 1.3) - q).norm() < 1e-14);
    }

    #[test]
    fn disc_transform_closed_form() {
        let disc = StarShape::disc(1.0).unwrap();
        let p = PompeiuParams::with_k(2.0).unwrap();
        let v = indicator_transform(&disc, &p, &ComplexDirection::real(0.3)).unwrap();
        let expect = 2.0 * PI * bessel_j(1, 2.0).unwrap() / 2.0;
        assert!((v.value - expect).norm() <= 1e-12 * expect.abs());
    }

    #[test]
    fn opposite_directions_conjugate() {
        let shape = StarShape::new(1.0, vec![0.1, 0.05], vec![0.0, 0.07]).unwrap();
        let p = PompeiuParams::with_k(3.0).unwrap();
        let d = ComplexDirection::real(0.9);
        let a = indicator_transform(&shape, &p, &d).unwrap().value;
        let b = indicator_transform(&shape, &p, &d.negated()).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn pompeiu_integral_checks_beta() {
        let p = PompeiuParams::with_k(2.0).unwrap();
        assert!(pompeiu_integral(&bump(), &p, [1.0, 1.0], &RigidMotion::IDENTITY).is_err());
        let m = RigidMotion::new(0.4, [0.3, -0.2]);
        assert!(pompeiu_integral(&bump(), &p, [0.6, 0.8], &m).is_ok());
    }

    #[test]
    fn inner_integral_at_zero_b() {
        let r = inner_s_integral(0.5, 0.0, 10.0, 1e-13).unwrap();
        assert!((r.value - Complex64::new(1.0 / 10.5, 0.0)).norm() < 1e-14);
        assert!(inner_s_integral(0.5, 0.0, 0.4, 1e-13).is_err());
    }

    #[test]
    fn disc_moments_vanish() {
        let disc = StarShape::disc(1.0).unwrap();
        let p = PompeiuParams::with_k(3.0).unwrap();
        for j in [0, 3, 40] {
            assert_eq!(moment(&disc, &p, j).unwrap().scaled_value, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn moment_paths_agree() {
        let p = PompeiuParams::with_k(3.0).unwrap();
        let d = moment_with(&bump(), &p, 12, 0.0, MomentPath::Direct).unwrap();
        let s = moment_with(&bump(), &p, 12, 0.0, MomentPath::Scaled).unwrap();
        assert!((d.value() - s.value()).norm() <= 1e-12 * d.value().norm());
        assert!(moment(&bump(), &p, MOMENT_MAX + 1).is_err());
    }

    #[test]
    fn moment_origin_shift() {
        let shape = StarShape::new(1.0, vec![0.1, 0.05], vec![0.03]).unwrap();
        let p = PompeiuParams::with_k(2.0).unwrap();
        let tau = 0.8;
        for path in [MomentPath::Direct, MomentPath::Scaled] {
            let a = moment_with(&shape, &p, 6, 0.0, path).unwrap().value();
            let b = moment_with(&shape.rotated(tau), &p, 6, tau, path).unwrap().value();
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn weighted_integral_needs_large_a() {
        let p = PompeiuParams::with_k(3.0).unwrap();
        let a0 = weight_threshold(&bump(), &p);
        assert!((a0 - 3.6).abs() < 1e-12);
        assert!(laplace_weighted(&bump(), &p, a0 * 0.9).is_err());
    }

    #[test]
    fn extraction_grid_validation() {
        let p = PompeiuParams::with_k(3.0).unwrap();
        assert!(extract_moments(&bump(), &p, 1, &log_grid(1e2, 1e4, 5)).is_err());
        assert!(extract_moments(&bump(), &p, 1, &log_grid(1e2, 5e2, 12)).is_err());
        assert!(extract_moments(&bump(), &p, 1, &log_grid(1.0, 1e4, 12)).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e2, 1e4, 5);
        assert_eq!(g.len(), 5);
        assert!((g[0] - 1e2).abs() < 1e-10 && (g[4] - 1e4).abs() < 1e-8);
        assert!((g[2] - 1e3).abs() < 1e-9);
    }

    #[test]
    fn tables_have_fixed_columns() {
        let p = PompeiuParams::with_k(3.0).unwrap();
        let dirs = real_directions(4);
        let vals = direction_sweep(&bump(), &p, &dirs).unwrap();
        assert_eq!(direction_table(&dirs, &vals).rows().len(), 4);
        let ms = moment_sweep(&bump(), &p, &[0, 1, 2]).unwrap();
        let t = moment_table(&ms);
        assert_eq!(t.columns(), ["j", "log_scale", "re", "im", "error_estimate"]);
    }
}
