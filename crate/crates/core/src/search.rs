//! Minimisation of the Pompeiu defect over shape coefficients and
//! wavenumber.
//!
//! The defect is the direction average of `|∫_D e^{ikα·x} dx|²`. It
//! vanishes for the disc at `kR` equal to a zero of `J_1`; the search
//! starts from a perturbed shape and records where a derivative-free
//! simplex method takes it.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pompeiu::{indicator_transform, ComplexDirection, PompeiuParams};
use crate::report::{Cell, Table};
use crate::shapes::StarShape;

/// Direction nodes on the half period `[0, π)`; `|F(θ + π)| = |F(θ)|` for
/// real shapes, so this is a 128-node rule on the full circle.
pub const DIRECTION_NODES: usize = 64;
/// Cap on the direction nodes per half period.
pub const MAX_DIRECTION_NODES: usize = 4096;
pub const MAX_ORDER: usize = 6;
pub const MAX_BUDGET: usize = 100_000;
/// Simplex diameter below which a run counts as converged.
pub const DIAMETER_TOL: f64 = 1e-8;
/// Initial simplex step scale for each of the three runs.
pub const RESTART_SCALES: [f64; 3] = [1.0, 1e-2, 1e-4];
/// Initial simplex step for shape coefficients and for `k`.
pub const COEFF_STEP: f64 = 0.05;
pub const K_STEP: f64 = 0.1;

/// `(1/2π) ∫ |F(θ)|² dθ` with `F` the indicator transform at the real
/// direction `θ`.
pub fn direction_defect(shape: &StarShape, params: &PompeiuParams) -> Result<f64> {
    let sample = |n: usize| -> Result<Vec<f64>> {
        let vals: Vec<Result<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let dir = ComplexDirection::real(PI * i as f64 / n as f64);
                indicator_transform(shape, params, &dir).map(|q| q.value.norm_sqr())
            })
            .collect();
        vals.into_iter().collect()
    };
    let mut n = DIRECTION_NODES;
    let mut vals = sample(n)?;
    loop {
        let coarse: f64 = vals.iter().step_by(2).sum::<f64>() / (n / 2) as f64;
        let fine: f64 = vals.iter().sum::<f64>() / n as f64;
        let floor = (params.tol() * shape.area()).powi(2);
        let estimate = (fine - coarse).abs();
        if estimate <= 1e-10 * fine + floor {
            return Ok(fine);
        }
        if n >= MAX_DIRECTION_NODES {
            return Err(Error::NonConvergence {
                nodes: 2 * n,
                estimate,
                tol: 1e-10 * fine + floor,
            });
        }
        let odd: Vec<f64> = {
            let n2 = 2 * n;
            let v: Vec<Result<f64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let dir = ComplexDirection::real(PI * (2 * i + 1) as f64 / n2 as f64);
                    indicator_transform(shape, params, &dir).map(|q| q.value.norm_sqr())
                })
                .collect();
            v.into_iter().collect::<Result<_>>()?
        };
        vals = vals
            .iter()
            .zip(&odd)
            .flat_map(|(&e, &o)| [e, o])
            .collect();
        n *= 2;
    }
}

/// One row of the optimisation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub defect: f64,
    pub k: f64,
    /// `a_1..a_M` followed by `b_1..b_M`.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub shape: StarShape,
    pub k: f64,
    pub defect: f64,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    pub budget_exhausted: bool,
    pub evaluations: usize,
}

impl DefectReport {
    pub fn max_abs_coeff(&self) -> f64 {
        self.shape
            .cos_coeffs()
            .iter()
            .chain(self.shape.sin_coeffs())
            .fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Outcome of a Nelder–Mead minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// `(iteration, best value, best point)` after every iteration.
    pub history: Vec<(usize, f64, Vec<f64>)>,
}

/// Nelder–Mead with the standard coefficients, an axis-aligned initial
/// simplex of the given step sizes and restarts at the best point with
/// steps scaled by [`RESTART_SCALES`]. Stops when the simplex diameter
/// drops below [`DIAMETER_TOL`] in the last run or the evaluation budget
/// is spent.
pub fn nelder_mead<F>(objective: F, x0: &[f64], steps: &[f64], budget: usize) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = objective(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let mut best_x = x0.to_vec();
    let mut best_v = eval(x0, &mut evals);
    let mut history = vec![(0, best_v, best_x.clone())];
    let mut iteration = 0;
    let mut converged = false;

    'runs: for &scale in &RESTART_SCALES {
        converged = false;
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(best_x.clone(), best_v)];
        for i in 0..dim {
            if evals >= budget {
                break 'runs;
            }
            let mut x = best_x.clone();
            x[i] += steps[i] * scale;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 < best_v {
                best_v = simplex[0].1;
                best_x = simplex[0].0.clone();
            }
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(0.0, f64::max);
            if diameter < DIAMETER_TOL {
                converged = true;
                continue 'runs;
            }
            if evals >= budget {
                break 'runs;
            }
            iteration += 1;

            let worst = simplex[dim].clone();
            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / dim as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(1.0);
            let vr = eval(&xr, &mut evals);
            if vr < simplex[0].1 {
                let xe = along(2.0);
                let ve = eval(&xe, &mut evals);
                simplex[dim] = if ve < vr { (xe, ve) } else { (xr, vr) };
            } else if vr < simplex[dim - 1].1 {
                simplex[dim] = (xr, vr);
            } else {
                let (xc, vc) = if vr < worst.1 {
                    let xc = along(0.5);
                    let vc = eval(&xc, &mut evals);
                    (xc, vc)
                } else {
                    let xc = along(-0.5);
                    let vc = eval(&xc, &mut evals);
                    (xc, vc)
                };
                if vc < worst.1.min(vr) {
                    simplex[dim] = (xc, vc);
                } else {
                    let x_best = simplex[0].0.clone();
                    for (x, v) in simplex.iter_mut().skip(1) {
                        for (xi, bi) in x.iter_mut().zip(&x_best) {
                            *xi = bi + 0.5 * (*xi - bi);
                        }
                        *v = eval(x, &mut evals);
                    }
                }
            }
            let current = simplex
                .iter()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty simplex");
            if current.1 < best_v {
                best_v = current.1;
                best_x = current.0.clone();
            }
            history.push((iteration, best_v, best_x.clone()));
        }
    }
    SimplexResult {
        x: best_x,
        value: best_v,
        evaluations: evals,
        converged,
        history,
    }
}

fn check_budget(budget: usize) -> Result<()> {
    if budget == 0 || budget > MAX_BUDGET {
        return Err(Error::invalid(format!(
            "budget must be in 1..={MAX_BUDGET}, got {budget}"
        )));
    }
    Ok(())
}

fn defect_or_inf(shape: &StarShape, k: f64) -> f64 {
    if !(k > 0.0 && k.is_finite()) {
        return f64::INFINITY;
    }
    PompeiuParams::with_k(k)
        .and_then(|p| direction_defect(shape, &p))
        .unwrap_or(f64::INFINITY)
}

/// Search coordinates `(a_2..a_M, b_3..b_M, k)`.
///
/// The first harmonic is, to first order, a translation of the domain and
/// leaves the defect unchanged, so `a_1 = b_1 = 0` is held fixed;
/// `b_2 = 0` removes the rotation.
fn unpack(mean_radius: f64, order: usize, x: &[f64]) -> Result<(StarShape, f64)> {
    let mut a = vec![0.0];
    let mut b = vec![0.0];
    if order >= 2 {
        a.extend_from_slice(&x[..order - 1]);
        b.push(0.0);
        b.extend_from_slice(&x[order - 1..2 * order - 3]);
    }
    Ok((StarShape::new(mean_radius, a, b)?, x[x.len() - 1]))
}

fn search_dim(order: usize) -> usize {
    if order >= 2 { 2 * order - 2 } else { 1 }
}

fn full_coeffs(order: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * order];
    if order >= 2 {
        out[1..order].copy_from_slice(&x[..order - 1]);
        out[order + 2..].copy_from_slice(&x[order - 1..2 * order - 3]);
    }
    out
}

/// Minimises the direction defect over the shape coefficients and `k` at
/// fixed mean radius.
///
/// The first harmonic of `initial` is dropped (it only moves the domain)
/// and the shape is rotated so that `b_2 = 0`.
pub fn minimize_defect(
    initial: &StarShape,
    k_init: f64,
    max_order: usize,
    budget: usize,
) -> Result<DefectReport> {
    if max_order == 0 || max_order > MAX_ORDER {
        return Err(Error::invalid(format!(
            "max_order must be in 1..={MAX_ORDER}, got {max_order}"
        )));
    }
    if initial.order() > max_order {
        return Err(Error::invalid(format!(
            "initial shape has order {} > max_order {max_order}",
            initial.order()
        )));
    }
    if !(k_init > 0.0 && k_init.is_finite()) {
        return Err(Error::invalid(format!("k_init must be positive, got {k_init}")));
    }
    check_budget(budget)?;

    let order = max_order;
    let mut start = initial.clone();
    if let (Some(&a2), Some(&b2)) = (start.cos_coeffs().get(1), start.sin_coeffs().get(1)) {
        if b2 != 0.0 {
            start = start.rotated(0.5 * b2.atan2(a2));
        }
    }
    let r = start.mean_radius();
    let dim = search_dim(order);
    let mut x0 = vec![0.0; dim];
    for (i, &a) in start.cos_coeffs().iter().enumerate().skip(1) {
        x0[i - 1] = a;
    }
    for (i, &b) in start.sin_coeffs().iter().enumerate().skip(2) {
        x0[order + i - 3] = b;
    }
    x0[dim - 1] = k_init;
    let mut steps = vec![COEFF_STEP * r; dim];
    steps[dim - 1] = K_STEP / r;

    let objective = |x: &[f64]| match unpack(r, order, x) {
        Ok((shape, k)) => defect_or_inf(&shape, k),
        Err(_) => f64::INFINITY,
    };
    let result = nelder_mead(objective, &x0, &steps, budget);
    let (shape, k) = unpack(r, order, &result.x)?;
    let trace = result
        .history
        .iter()
        .map(|(it, v, x)| TraceEntry {
            iteration: *it,
            defect: *v,
            k: x[dim - 1],
            coeffs: full_coeffs(order, x),
        })
        .collect();
    Ok(DefectReport {
        shape,
        k,
        defect: result.value,
        trace,
        converged: result.converged,
        budget_exhausted: !result.converged && result.evaluations >= budget,
        evaluations: result.evaluations,
    })
}

/// Minimises the direction defect over `k` alone for a fixed shape.
pub fn minimize_k(shape: &StarShape, k_init: f64, budget: usize) -> Result<DefectReport> {
    if !(k_init > 0.0 && k_init.is_finite()) {
        return Err(Error::invalid(format!("k_init must be positive, got {k_init}")));
    }
    check_budget(budget)?;
    let step = K_STEP / shape.mean_radius();
    let result = nelder_mead(|x| defect_or_inf(shape, x[0]), &[k_init], &[step], budget);
    let coeffs: Vec<f64> = shape
        .cos_coeffs()
        .iter()
        .chain(shape.sin_coeffs())
        .copied()
        .collect();
    let trace = result
        .history
        .iter()
        .map(|(it, v, x)| TraceEntry {
            iteration: *it,
            defect: *v,
            k: x[0],
            coeffs: coeffs.clone(),
        })
        .collect();
    Ok(DefectReport {
        shape: shape.clone(),
        k: result.x[0],
        defect: result.value,
        trace,
        converged: result.converged,
        budget_exhausted: !result.converged && result.evaluations >= budget,
        evaluations: result.evaluations,
    })
}

/// Trace as a table: `iteration, defect, k, a_1..a_M, b_1..b_M`.
pub fn trace_table(report: &DefectReport) -> Table {
    let width = report.trace.first().map_or(0, |t| t.coeffs.len());
    let order = width / 2;
    let mut cols = vec!["iteration".to_string(), "defect".into(), "k".into()];
    cols.extend((1..=order).map(|m| format!("a_{m}")));
    cols.extend((1..=order).map(|m| format!("b_{m}")));
    let mut t = Table::new(&cols);
    for e in &report.trace {
        let mut row = vec![Cell::from(e.iteration), Cell::from(e.defect), Cell::from(e.k)];
        row.extend(e.coeffs.iter().map(|&c| Cell::from(c)));
        t.push(row);
    }
    t.note("final_defect", crate::report::format_real(report.defect));
    t.note("final_k", crate::report::format_real(report.k));
    t.note("converged", report.converged.to_string());
    t.note("budget_exhausted", report.budget_exhausted.to_string());
    t.note("evaluations", report.evaluations.to_string());
    t
}
