//! Maps a [`RunConfig`] onto the library operations and renders the report.

use std::f64::consts::PI;
use std::io::Write as _;

use pompeiu_core::asymptotics::{compare_asymptotics, comparison_table};
use pompeiu_core::bvp::{defect_scan, defect_table, trefftz_defect};
use pompeiu_core::pompeiu::{
    direction_sweep, direction_table, extract_moments, log_grid, moment_sweep, moment_table,
    pompeiu_integral, real_directions, weight_threshold, PompeiuParams,
};
use pompeiu_core::report::{format_real, Cell, Table};
use pompeiu_core::search::{minimize_defect, minimize_k, trace_table};
use pompeiu_core::shapes::{RigidMotion, StarShape};
use pompeiu_core::special::bessel_j1_zero;
use pompeiu_core::{Error, Result};

use crate::config::{Command, Format, RunConfig};
use crate::parse::Wavenumber;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Golden angle; spreads the generated motions without a random source.
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Extra A-grid points beyond the fitted terms when `--a-count` is absent.
const EXTRACT_SPARE_POINTS: usize = 11;

/// A rendered report. `complete` is false when the run finished but did not
/// converge; the report is still written and the exit status is 3.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub complete: bool,
    pub diagnostics: Vec<String>,
}

/// Runs the experiment, writes the report and returns the exit status.
/// Every failure is explained on stderr.
pub fn run(config: &RunConfig) -> i32 {
    let report = match render(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERICAL };
        }
    };
    if let Err(e) = emit(config, &report.text) {
        eprintln!("error: {e}");
        return EXIT_VALIDATION;
    }
    if report.complete {
        EXIT_OK
    } else {
        for d in &report.diagnostics {
            eprintln!("not converged: {d}");
        }
        EXIT_NUMERICAL
    }
}

fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

/// Computes the report without touching the output path.
pub fn render(config: &RunConfig) -> Result<Report> {
    let shape = StarShape::load(&config.shape_path)?;
    let k = resolve_k(config.k, &shape)?;
    let mut header = vec![
        ("command".to_string(), config.command.name().to_string()),
        ("shape_path".into(), config.shape_path.display().to_string()),
        ("mean_radius".into(), format_real(shape.mean_radius())),
        ("cos".into(), list(shape.cos_coeffs())),
        ("sin".into(), list(shape.sin_coeffs())),
    ];
    if !matches!(config.command, Command::Scan { .. }) {
        let source = match config.k {
            Wavenumber::Auto => "auto",
            Wavenumber::Value(_) => "explicit",
        };
        header.push(("k".into(), format_real(k)));
        header.push(("k_source".into(), source.into()));
    }
    header.push(("tol".into(), format_real(config.tol)));
    header.push(("format".into(), config.format.name().into()));
    let params = PompeiuParams::new(k, config.tol)?;

    let mut complete = true;
    let mut diagnostics = Vec::new();
    let table = match &config.command {
        Command::Ft { dirs } => {
            header.push(("dirs".into(), dirs.to_string()));
            if *dirs == 0 {
                return Err(Error::InvalidInput("--dirs must be at least 1".into()));
            }
            let d = real_directions(*dirs);
            let values = direction_sweep(&shape, &params, &d)?;
            let mut t = direction_table(&d, &values);
            let max = values.iter().map(|v| v.value.norm()).fold(0.0, f64::max);
            t.note("max_abs_value", format_real(max));
            t
        }
        Command::Pompeiu { motions, beta_angle } => {
            header.push(("motions".into(), motions.to_string()));
            header.push(("beta_angle".into(), format_real(*beta_angle)));
            if *motions == 0 || !beta_angle.is_finite() {
                return Err(Error::InvalidInput(
                    "--motions must be at least 1 and --beta-angle finite".into(),
                ));
            }
            motion_table(&shape, &params, *motions, *beta_angle)?
        }
        Command::Moments { js } => {
            header.push(("j".into(), index_list(js)));
            let reports = moment_sweep(&shape, &params, js)?;
            let mut t = moment_table(&reports);
            let worst = reports.iter().map(|r| r.error_estimate).fold(0.0, f64::max);
            t.note("max_error_estimate", format_real(worst));
            t
        }
        Command::Extract {
            j_max,
            a_min,
            a_max,
            a_count,
        } => {
            let a0 = weight_threshold(&shape, &params);
            let lo = a_min.unwrap_or_else(|| (30.0 * a0).max(100.0));
            let hi = a_max.unwrap_or(100.0 * lo);
            let n = a_count.unwrap_or(j_max + 1 + EXTRACT_SPARE_POINTS + 4);
            header.push(("j_max".into(), j_max.to_string()));
            header.push(("a_min".into(), format_real(lo)));
            header.push(("a_max".into(), format_real(hi)));
            header.push(("a_count".into(), n.to_string()));
            if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && n > 0) {
                return Err(Error::InvalidInput(
                    "A-grid needs finite positive bounds and at least one point".into(),
                ));
            }
            let ex = extract_moments(&shape, &params, *j_max, &log_grid(lo, hi, n))?;
            let mut t = Table::new(&["j", "re", "im"]);
            for (j, m) in ex.moments.iter().enumerate() {
                t.push(vec![Cell::from(j), Cell::from(m.re), Cell::from(m.im)]);
            }
            t.note("a0", format_real(a0));
            t.note("fit_residual", format_real(ex.residual));
            t
        }
        Command::Asympt { ms } => {
            header.push(("m".into(), index_list(ms)));
            let cmp = compare_asymptotics(&shape, &params, ms)?;
            let mut t = comparison_table(&cmp);
            t.note("maximizers", cmp.maximizers.len().to_string());
            t.note("ratio_trend", format_real(cmp.ratio_trend));
            t.note("re_predicted_over_rederived", format_real(cmp.predicted_over_rederived.re));
            t.note("im_predicted_over_rederived", format_real(cmp.predicted_over_rederived.im));
            let flagged: Vec<usize> = cmp.rows.iter().filter(|r| r.error_flag).map(|r| r.m).collect();
            if !flagged.is_empty() {
                complete = false;
                diagnostics.push(format!(
                    "direct error estimate above 1% of the value at m = {}",
                    index_list(&flagged)
                ));
            }
            t
        }
        Command::Bvp { order, colloc } => {
            let n = colloc.unwrap_or_else(|| default_colloc(*order));
            header.push(("order".into(), order.to_string()));
            header.push(("colloc".into(), n.to_string()));
            let sol = trefftz_defect(&shape, k, *order, n)?;
            let mut t = Table::new(&["n", "re", "im"]);
            for n in -(sol.order() as i64)..=sol.order() as i64 {
                let c = sol.coeff(n);
                t.push(vec![Cell::from(n), Cell::from(c.re), Cell::from(c.im)]);
            }
            t.note("boundary_residual", format_real(sol.boundary_residual));
            t.note("neumann_defect", format_real(sol.neumann_defect));
            t.note("rank", sol.rank.to_string());
            t.note("condition", format_real(sol.condition));
            t
        }
        Command::Scan { ks, order, colloc } => {
            let n = colloc.unwrap_or_else(|| default_colloc(*order));
            header.push(("ks".into(), list(ks)));
            header.push(("order".into(), order.to_string()));
            header.push(("colloc".into(), n.to_string()));
            defect_table(&defect_scan(&shape, ks, *order, n)?)
        }
        Command::Search {
            order,
            budget,
            k_only,
        } => {
            header.push(("order".into(), order.to_string()));
            header.push(("budget".into(), budget.to_string()));
            header.push(("k_only".into(), k_only.to_string()));
            let report = if *k_only {
                minimize_k(&shape, k, *budget)?
            } else {
                minimize_defect(&shape, k, *order, *budget)?
            };
            let mut t = trace_table(&report);
            t.note("final_cos", list(report.shape.cos_coeffs()));
            t.note("final_sin", list(report.shape.sin_coeffs()));
            if !report.converged {
                complete = false;
                diagnostics.push(format!(
                    "simplex did not contract below tolerance after {} evaluations, defect {}",
                    report.evaluations,
                    format_real(report.defect)
                ));
            }
            t
        }
    };

    let text = match config.format {
        Format::Csv => table.to_csv(&header),
        Format::Json => table.to_json(&header),
    };
    Ok(Report {
        text,
        complete,
        diagnostics,
    })
}

/// `"auto"` resolves to the first `J_1` zero over the mean radius.
pub fn resolve_k(k: Wavenumber, shape: &StarShape) -> Result<f64> {
    match k {
        Wavenumber::Value(v) => Ok(v),
        Wavenumber::Auto => Ok(bessel_j1_zero(1)?.value / shape.mean_radius()),
    }
}

fn default_colloc(order: usize) -> usize {
    (4 * order + 16).max(6 * order)
}

fn motion_table(
    shape: &StarShape,
    params: &PompeiuParams,
    motions: usize,
    beta_angle: f64,
) -> Result<Table> {
    let beta = [beta_angle.cos(), beta_angle.sin()];
    let r = shape.mean_radius();
    let mut t = Table::new(&["motion", "rotation", "tx", "ty", "re_value", "im_value"]);
    let mut max: f64 = 0.0;
    for i in 0..motions {
        let rotation = (i as f64 * GOLDEN_ANGLE).rem_euclid(2.0 * PI);
        let rho = r * (i % 5) as f64 / 5.0;
        let dir = 2.0 * rotation + 1.0;
        let translation = [rho * dir.cos(), rho * dir.sin()];
        let v = pompeiu_integral(shape, params, beta, &RigidMotion::new(rotation, translation))?;
        max = max.max(v.norm());
        t.push(vec![
            Cell::from(i),
            Cell::from(rotation),
            Cell::from(translation[0]),
            Cell::from(translation[1]),
            Cell::from(v.re),
            Cell::from(v.im),
        ]);
    }
    t.note("max_abs_value", format_real(max));
    Ok(t)
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| format_real(x)).collect();
    format!("[{}]", items.join(" "))
}

fn index_list(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(usize::to_string).collect();
    items.join(" ")
}
