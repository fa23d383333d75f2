//! Laplace-method asymptotics of the even moments `I_{2m}`.
//!
//! With `a = k f cos φ`, `a^{2m} = e^{mΨ}` where `Ψ = ln(k² f² cos² φ)`,
//! so for large `m` the moment is dominated by the global maxima of `Ψ`.
//! Stationary points solve `f'/f - tan φ = 0`.
//!
//! Two predictions are produced for each non-degenerate maximiser:
//!
//! * [`predict_moment`] evaluates the closed-form leading term
//!   `e^{mΨ(0)} Γ(3/2) (mγ)^{-3/2} (i k f(0)² f''(0) + f(0) f'''(0)/2)` after
//!   shifting the angular origin to the stationary point;
//! * [`laplace_expansion`] is an independent second-order Laplace
//!   expansion of `∫ g e^{mΨ}` with `g = f' f e^{ib}` about the stationary
//!   point in the original frame, including the `Ψ'''` and `Ψ''''`
//!   corrections.
//!
//! [`compare_asymptotics`] confronts both with the directly computed
//! moments and reports the ratios, so constant-factor disagreements are
//! visible rather than absorbed.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pompeiu::{moment, MomentReport, PompeiuParams};
use crate::report::{Cell, Table};
use crate::shapes::StarShape;
use crate::special::gamma_three_halves;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Half-width of the excluded neighbourhoods of `±π/2` in the scan.
pub const GUARD_BAND: f64 = 1e-6;
/// Grid points per open half-period in the stationary-point scan.
const SCAN_POINTS: usize = 4096;
/// `|Ψ''|` below this marks a stationary point as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Relative gap in `Ψ` within which two maxima count as equally global.
const GLOBAL_TOL: f64 = 1e-10;

fn check_cos(phi: f64) -> Result<f64> {
    let c = phi.cos();
    if c.abs() <= 1e-12 {
        return Err(Error::invalid(format!(
            "psi is undefined at phi = {phi} (cos phi = {c:e})"
        )));
    }
    Ok(c)
}

/// `Ψ(φ) = ln(k² f(φ)² cos² φ)`.
pub fn psi(shape: &StarShape, params: &PompeiuParams, phi: f64) -> Result<f64> {
    let c = check_cos(phi)?;
    let a = params.k() * shape.radius(phi) * c;
    Ok((a * a).ln())
}

/// `[Ψ, Ψ', Ψ'']` from the closed forms
/// `Ψ' = 2f'/f - 2 tan φ`, `Ψ'' = 2(f''/f - (f'/f)²) - 2/cos² φ`.
pub fn psi_derivatives(shape: &StarShape, params: &PompeiuParams, phi: f64) -> Result<[f64; 3]> {
    let c = check_cos(phi)?;
    let jet = shape.jet(phi);
    let (f, f1, f2) = (jet[0], jet[1], jet[2]);
    let a = params.k() * f * c;
    let r = f1 / f;
    let sec2 = 1.0 / (c * c);
    Ok([
        (a * a).ln(),
        2.0 * r - 2.0 * phi.tan(),
        2.0 * (f2 / f - r * r) - 2.0 * sec2,
    ])
}

/// `[Ψ''', Ψ'''']`.
fn psi_higher(shape: &StarShape, phi: f64) -> [f64; 2] {
    let jet = shape.jet(phi);
    let (f, f1, f2, f3, f4) = (jet[0], jet[1], jet[2], jet[3], jet[4]);
    let (r1, r2, r3, r4) = (f1 / f, f2 / f, f3 / f, f4 / f);
    let l3 = r3 - 3.0 * r1 * r2 + 2.0 * r1.powi(3);
    let l4 = r4 - 4.0 * r1 * r3 - 3.0 * r2 * r2 + 12.0 * r1 * r1 * r2 - 6.0 * r1.powi(4);
    let (t, c) = (phi.tan(), phi.cos());
    let sec2 = 1.0 / (c * c);
    // (ln cos)''' = -2 sec² tan, (ln cos)'''' = -4 sec² tan² - 2 sec⁴.
    let c3 = -2.0 * sec2 * t;
    let c4 = -4.0 * sec2 * t * t - 2.0 * sec2 * sec2;
    [2.0 * l3 + 2.0 * c3, 2.0 * l4 + 2.0 * c4]
}

/// A stationary point of `Ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub phi: f64,
    pub psi_value: f64,
    /// `|Ψ''(φ*)|`.
    pub gamma: f64,
    /// Signed `Ψ''(φ*)`; negative at maxima.
    pub curvature: f64,
    pub f0: f64,
    pub f2: f64,
    pub f3: f64,
    pub degenerate: bool,
}

impl PhasePoint {
    pub fn is_maximum(&self) -> bool {
        self.curvature < 0.0
    }

    /// `|f'/f - tan φ|` at the point.
    pub fn residual(&self, shape: &StarShape) -> f64 {
        let (f, df) = shape.radius_and_slope(self.phi);
        (df / f - self.phi.tan()).abs()
    }
}

/// All stationary points of `Ψ` on one period, sorted by descending `Ψ`.
///
/// Each open half-period `(c - π/2, c + π/2)`, `c ∈ {0, π}`, minus a guard
/// band at its ends, is scanned for sign changes of `Ψ'`; brackets are
/// bisected and polished by Newton.
pub fn stationary_points(shape: &StarShape, params: &PompeiuParams) -> Vec<PhasePoint> {
    let dpsi = |phi: f64| {
        let (f, df) = shape.radius_and_slope(phi);
        df / f - phi.tan()
    };
    let mut roots: Vec<f64> = Vec::new();
    for centre in [0.0, PI] {
        let lo = centre - FRAC_PI_2 + GUARD_BAND;
        let hi = centre + FRAC_PI_2 - GUARD_BAND;
        let h = (hi - lo) / SCAN_POINTS as f64;
        let mut x0 = lo;
        let mut y0 = dpsi(x0);
        for i in 1..=SCAN_POINTS {
            let x1 = lo + h * i as f64;
            let y1 = dpsi(x1);
            if y0 == 0.0 {
                roots.push(x0);
            } else if y0 * y1 < 0.0 {
                roots.push(refine_root(&dpsi, shape, x0, x1));
            }
            x0 = x1;
            y0 = y1;
        }
        if y0 == 0.0 {
            roots.push(x0);
        }
    }
    let mut points: Vec<PhasePoint> = Vec::new();
    for root in roots {
        let phi = wrap_angle(root);
        if points.iter().any(|p| angle_gap(p.phi, phi) < 1e-9) {
            continue;
        }
        points.push(phase_point(shape, params, phi));
    }
    points.sort_by(|a, b| b.psi_value.total_cmp(&a.psi_value).then(a.phi.total_cmp(&b.phi)));
    points
}

fn wrap_angle(phi: f64) -> f64 {
    let mut p = phi;
    while p > PI {
        p -= 2.0 * PI;
    }
    while p <= -PI {
        p += 2.0 * PI;
    }
    p
}

fn angle_gap(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

fn refine_root<F: Fn(f64) -> f64>(g: &F, shape: &StarShape, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    // Newton on f'/f - tan φ, derivative f''/f - (f'/f)² - sec² φ.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..20 {
        let jet = shape.jet(x);
        let r = jet[1] / jet[0];
        let c = x.cos();
        let val = r - x.tan();
        let d = jet[2] / jet[0] - r * r - 1.0 / (c * c);
        if d == 0.0 || val.abs() <= 1e-15 {
            break;
        }
        let next = x - val / d;
        if !(next > lo - 1e-9 && next < hi + 1e-9) {
            break;
        }
        x = next;
    }
    x
}

fn phase_point(shape: &StarShape, params: &PompeiuParams, phi: f64) -> PhasePoint {
    let jet = shape.jet(phi);
    let d = psi_derivatives(shape, params, phi).expect("stationary points avoid ±π/2");
    PhasePoint {
        phi,
        psi_value: d[0],
        gamma: d[2].abs(),
        curvature: d[2],
        f0: jet[0],
        f2: jet[2],
        f3: jet[3],
        degenerate: d[2].abs() < DEGENERACY_TOL,
    }
}

/// The maxima whose `Ψ` equals the global maximum (degenerate ones included).
pub fn global_maximizers(points: &[PhasePoint]) -> Vec<PhasePoint> {
    let top = points
        .iter()
        .filter(|p| p.is_maximum())
        .map(|p| p.psi_value)
        .fold(f64::NEG_INFINITY, f64::max);
    points
        .iter()
        .filter(|p| p.is_maximum() && (p.psi_value - top).abs() <= GLOBAL_TOL * top.abs().max(1.0))
        .cloned()
        .collect()
}

/// A leading-order prediction `I_{2m} ≈ amplitude · exp(log_main)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPrediction {
    pub m: usize,
    pub log_main: f64,
    pub amplitude: Complex64,
    pub origin_shift: f64,
}

impl AsymptoticPrediction {
    pub fn ln_abs(&self) -> f64 {
        self.log_main + self.amplitude.norm().ln()
    }
}

/// The closed-form leading term at `point`, after moving the angular
/// origin to `point.phi` (an exact coefficient rotation):
/// `Γ(3/2) / (mγ)^{3/2} · (i k f(0)² f''(0) + f(0) f'''(0) / 2)`.
pub fn predict_moment(
    shape: &StarShape,
    params: &PompeiuParams,
    m: usize,
    point: &PhasePoint,
) -> Result<AsymptoticPrediction> {
    if point.degenerate {
        return Err(Error::Degenerate {
            phi: point.phi,
            curvature: point.curvature,
        });
    }
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    let shifted = shape.rotated(point.phi);
    let jet = shifted.jet(0.0);
    let (f0, f2, f3) = (jet[0], jet[2], jet[3]);
    let k = params.k();
    let mg = m as f64 * point.gamma;
    let amplitude = Complex64::new(f0 * f3 / 2.0, k * f0 * f0 * f2) * (gamma_three_halves() / mg.powf(1.5));
    Ok(AsymptoticPrediction {
        m,
        log_main: m as f64 * point.psi_value,
        amplitude,
        origin_shift: point.phi,
    })
}

/// Second-order Laplace expansion of `∫ f' f e^{ib} e^{mΨ} dφ` about
/// `point`, in the original frame.
///
/// With `Ψ = Ψ* - γt²/2 + c₃t³ + c₄t⁴ + …` and `g = f' f e^{ib} = g₀ + g₁t + g₂t² + …`:
///
/// ```text
/// I ≈ e^{mΨ*} √(2π/(mγ)) [ g₀ + (1/m)( g₀(3c₄/γ² + 15c₃²/(2γ³)) + 3g₁c₃/γ² + g₂/γ ) ]
/// ```
pub fn laplace_expansion(
    shape: &StarShape,
    params: &PompeiuParams,
    m: usize,
    point: &PhasePoint,
) -> Result<AsymptoticPrediction> {
    if point.degenerate {
        return Err(Error::Degenerate {
            phi: point.phi,
            curvature: point.curvature,
        });
    }
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    let k = params.k();
    let phi = point.phi;
    let g = amplitude_jet(shape, k, phi);
    let [p3, p4] = psi_higher(shape, phi);
    let gamma = point.gamma;
    let (c3, c4) = (p3 / 6.0, p4 / 24.0);
    let mf = m as f64;
    let correction = g[0] * (3.0 * c4 / (gamma * gamma) + 15.0 * c3 * c3 / (2.0 * gamma.powi(3)))
        + g[1] * (3.0 * c3 / (gamma * gamma))
        + g[2] / gamma;
    let amplitude = (g[0] + correction / mf) * (2.0 * PI / (mf * gamma)).sqrt();
    Ok(AsymptoticPrediction {
        m,
        log_main: mf * point.psi_value,
        amplitude,
        origin_shift: 0.0,
    })
}

/// Taylor coefficients `[g₀, g₁, g₂]` of `g = f' f e^{ib}` at `phi`.
pub fn amplitude_jet(shape: &StarShape, k: f64, phi: f64) -> [Complex64; 3] {
    let jet = shape.jet(phi);
    let (f, f1, f2, f3) = (jet[0], jet[1], jet[2], jet[3]);
    let (s, c) = phi.sin_cos();
    let u0 = f1 * f;
    let u1 = f2 * f + f1 * f1;
    let u2 = f3 * f + 3.0 * f1 * f2;
    let b0 = k * f * s;
    let b1 = k * (f1 * s + f * c);
    let b2 = k * (f2 * s + 2.0 * f1 * c - f * s);
    let e0 = Complex64::from_polar(1.0, b0);
    let e1 = I * b1 * e0;
    let e2 = (I * b2 - b1 * b1) * e0;
    let g0 = e0 * u0;
    let g1 = e0 * u1 + e1 * u0;
    let g2 = e0 * u2 + e1 * (2.0 * u1) + e2 * u0;
    [g0, g1, g2 * 0.5]
}

/// One row of the confrontation table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub m: usize,
    pub direct: MomentReport,
    pub predicted: Complex64,
    pub rederived: Complex64,
    /// `I_{2m}` divided by the closed-form prediction.
    pub ratio: Complex64,
    /// `I_{2m}` divided by the re-derived Laplace expansion.
    pub ratio_rederived: Complex64,
    /// Direct error estimate above 1% of the value.
    pub error_flag: bool,
}

/// Output of [`compare_asymptotics`].
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticComparison {
    pub maximizers: Vec<PhasePoint>,
    pub rows: Vec<ComparisonRow>,
    /// `|ratio|` at the last m over `|ratio|` at the first, minus one.
    pub ratio_trend: f64,
    /// Summed closed-form amplitude over the summed re-derived amplitude at
    /// the largest `m`. With `f'(φ*) = 0` and `Ψ'''(φ*) = 0` this is
    /// `Γ(3/2) / √(2π) = 1/(2√2)`, the Gaussian normalisation alone.
    pub predicted_over_rederived: Complex64,
}

/// Direct log-scaled `I_{2m}` against the summed predictions over all
/// global maximisers, for each `m` in `m_list`.
pub fn compare_asymptotics(
    shape: &StarShape,
    params: &PompeiuParams,
    m_list: &[usize],
) -> Result<AsymptoticComparison> {
    if shape.is_disc() {
        return Err(Error::invalid(
            "a disc has identically vanishing moments; ratios are undefined",
        ));
    }
    if m_list.is_empty() || m_list.contains(&0) {
        return Err(Error::invalid("m_list must be non-empty with m >= 1"));
    }
    let points = stationary_points(shape, params);
    let maximizers = global_maximizers(&points);
    let usable: Vec<PhasePoint> = maximizers.iter().filter(|p| !p.degenerate).cloned().collect();
    if usable.is_empty() {
        let p = maximizers.first().or(points.first()).cloned();
        return Err(match p {
            Some(p) => Error::Degenerate {
                phi: p.phi,
                curvature: p.curvature,
            },
            None => Error::invalid("no stationary points found"),
        });
    }

    let rows: Vec<ComparisonRow> = m_list
        .par_iter()
        .map(|&m| comparison_row(shape, params, m, &usable))
        .collect::<Result<_>>()?;

    let first = rows.first().map(|r| r.ratio.norm()).unwrap_or(f64::NAN);
    let last = rows.last().map(|r| r.ratio.norm()).unwrap_or(f64::NAN);
    let big_m = *m_list.iter().max().unwrap_or(&1);
    let mut closed = Complex64::new(0.0, 0.0);
    let mut rederived = Complex64::new(0.0, 0.0);
    for p in &usable {
        let a = predict_moment(shape, params, big_m, p)?;
        let b = laplace_expansion(shape, params, big_m, p)?;
        closed += a.amplitude;
        rederived += b.amplitude;
    }
    Ok(AsymptoticComparison {
        maximizers: usable,
        ratio_trend: last / first - 1.0,
        predicted_over_rederived: closed / rederived,
        rows,
    })
}

fn comparison_row(
    shape: &StarShape,
    params: &PompeiuParams,
    m: usize,
    maximizers: &[PhasePoint],
) -> Result<ComparisonRow> {
    let direct = moment(shape, params, 2 * m)?;
    let mut predicted = Complex64::new(0.0, 0.0);
    let mut rederived = Complex64::new(0.0, 0.0);
    for p in maximizers {
        let a = predict_moment(shape, params, m, p)?;
        let b = laplace_expansion(shape, params, m, p)?;
        // Every maximiser shares log_main; rescale onto the moment's log_scale.
        predicted += a.amplitude * (a.log_main - direct.log_scale).exp();
        rederived += b.amplitude * (b.log_main - direct.log_scale).exp();
    }
    let value = direct.scaled_value;
    let error_flag = direct.abs_error > 0.01 * value.norm();
    Ok(ComparisonRow {
        m,
        direct,
        predicted,
        rederived,
        ratio: value / predicted,
        ratio_rederived: value / rederived,
        error_flag,
    })
}

/// CSV layout: `m, log_abs_direct, log_abs_predicted, re_ratio, im_ratio,
/// re_ratio_rederived, im_ratio_rederived, error_flag`.
pub fn comparison_table(cmp: &AsymptoticComparison) -> Table {
    let mut t = Table::new(&[
        "m",
        "log_abs_direct",
        "log_abs_predicted",
        "re_ratio",
        "im_ratio",
        "re_ratio_rederived",
        "im_ratio_rederived",
        "error_flag",
    ]);
    for r in &cmp.rows {
        t.push(vec![
            Cell::from(r.m),
            Cell::from(r.direct.ln_abs()),
            Cell::from(r.direct.log_scale + r.predicted.norm().ln()),
            Cell::from(r.ratio.re),
            Cell::from(r.ratio.im),
            Cell::from(r.ratio_rederived.re),
            Cell::from(r.ratio_rederived.im),
            Cell::from(r.error_flag),
        ]);
    }
    t.note("ratio_trend", format!("{:?}", cmp.ratio_trend));
    t.note(
        "closed_form_over_rederived",
        format!("{:?}{:+?}i", cmp.predicted_over_rederived.re, cmp.predicted_over_rederived.im),
    );
    t.note(
        "maximizers",
        cmp.maximizers
            .iter()
            .map(|p| format!("{:?}", p.phi))
            .collect::<Vec<_>>()
            .join(" "),
    );
    t
}
