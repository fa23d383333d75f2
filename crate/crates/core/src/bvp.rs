//! The overdetermined Helmholtz problem `(∇² + k²)u = 1` in `D` with
//! `u = u_N = 0` on the boundary.
//!
//! On the disc everything is closed form. For general star shapes the
//! Dirichlet problem is fitted by a Fourier–Bessel (Trefftz) expansion
//! `u = -1/k² + Σ c_n J_|n|(kr) e^{inφ}` and the size of the resulting
//! normal derivative is reported as the Neumann defect. A small defect is
//! numerical evidence that the overdetermined problem is solvable, not a
//! proof of it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{Cell, Table};
use crate::shapes::StarShape;
use crate::special::{bessel_j1_zero, bessel_j_all, MAX_ARGUMENT};
use crate::Complex64;

/// Smallest admissible `|J_0(kR)|` for the closed-form disc solution.
pub const J0_FLOOR: f64 = 1e-8;
/// Relative singular-value cutoff of the Trefftz least-squares solve.
pub const SVD_CUTOFF: f64 = 1e-12;
/// Boundary residual above which the Dirichlet fit is declared failed.
pub const DIRICHLET_LIMIT: f64 = 1e-6;
/// Rank deficiency tolerated before the fit is rejected.
pub const MAX_RANK_DEFICIENCY: usize = 2;

/// `u(r) = (1 - J_0(kr)/J_0(kR)) / k²` on the disc of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSolution {
    pub radius: f64,
    pub k: f64,
    j0_boundary: f64,
    /// `|u_r(R)| = |J_1(kR)| / (k |J_0(kR)|)`.
    pub neumann_defect: f64,
}

impl RadialSolution {
    pub fn value(&self, r: f64) -> f64 {
        let j0 = bessel_j_all(0, self.k * r)[0];
        (1.0 - j0 / self.j0_boundary) / (self.k * self.k)
    }

    /// `u_r(r) = J_1(kr) / (k J_0(kR))`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        let j = bessel_j_all(1, self.k * r);
        j[1] / (self.k * self.j0_boundary)
    }

    pub fn boundary_value(&self) -> f64 {
        self.value(self.radius)
    }
}

/// Closed-form solution of the overdetermined problem on the disc together
/// with its Neumann defect.
pub fn disc_overdetermined(radius: f64, k: f64) -> Result<RadialSolution> {
    if !(radius > 0.0 && radius.is_finite()) || !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!(
            "radius and k must be positive, got R = {radius}, k = {k}"
        )));
    }
    if k * radius > MAX_ARGUMENT {
        return Err(Error::invalid(format!("kR = {} is out of range", k * radius)));
    }
    let j = bessel_j_all(1, k * radius);
    if j[0].abs() <= J0_FLOOR {
        return Err(Error::invalid(format!(
            "kR = {} is too close to a zero of J0 (|J0| = {:e})",
            k * radius,
            j[0].abs()
        )));
    }
    Ok(RadialSolution {
        radius,
        k,
        j0_boundary: j[0],
        neumann_defect: (j[1] / (k * j[0])).abs(),
    })
}

/// Max of `|u'' + u'/r + k²u - 1|` over `radii`, with derivatives by
/// centred differences of step `h`.
pub fn radial_pde_residual<U>(u: U, k: f64, radii: &[f64], h: f64) -> f64
where
    U: Fn(f64) -> f64,
{
    radii
        .iter()
        .map(|&r| {
            let (um, u0, up) = (u(r - h), u(r), u(r + h));
            let d1 = (up - um) / (2.0 * h);
            let d2 = (up - 2.0 * u0 + um) / (h * h);
            (d2 + d1 / r + k * k * u0 - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Finite-difference check of the Helmholtz equation for the disc solution
/// on 64 interior radii in `[R/20, 19R/20]`.
pub fn residual_check(solution: &RadialSolution, grid_step: f64) -> Result<f64> {
    let r_max = solution.radius;
    if !(grid_step > 0.0) || grid_step > 1e-2 * r_max {
        return Err(Error::invalid(format!(
            "grid step must be in (0, {}], got {grid_step}",
            1e-2 * r_max
        )));
    }
    let radii: Vec<f64> = (0..64)
        .map(|i| r_max * (0.05 + 0.9 * i as f64 / 63.0))
        .collect();
    Ok(radial_pde_residual(|r| solution.value(r), solution.k, &radii, grid_step))
}

/// Neumann eigenfunction `J_0(kr)` of the disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannMode {
    pub k: f64,
    /// `J_0(kR)`, the constant boundary value.
    pub boundary_value: f64,
    /// `-k J_1(kR)`.
    pub normal_derivative: f64,
}

/// `k = j_{1,mode} / R`, so that `u = J_0(kr)` has `u_r(R) = 0` and a
/// nonzero constant boundary value.
pub fn neumann_eigen_disc(radius: f64, mode: usize) -> Result<NeumannMode> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let zero = bessel_j1_zero(mode)?;
    let k = zero.value / radius;
    let j = bessel_j_all(1, zero.value);
    Ok(NeumannMode {
        k,
        boundary_value: j[0],
        normal_derivative: -k * j[1],
    })
}

/// Least-squares Trefftz fit of the Dirichlet problem and its Neumann defect.
#[derive(Debug, Clone, PartialEq)]
pub struct TrefftzSolution {
    pub k: f64,
    /// `c_{-N}, ..., c_N`.
    pub coeffs: Vec<Complex64>,
    /// Discrete `L²(S)` norm of `u + 1/k²` on the boundary.
    pub boundary_residual: f64,
    /// Discrete `L²(S)` norm of `∂u/∂N` on the boundary.
    pub neumann_defect: f64,
    pub rank: usize,
    /// Ratio of extreme singular values of the column-scaled system.
    pub condition: f64,
}

impl TrefftzSolution {
    pub fn order(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    /// `c_n` for `-N <= n <= N`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs[(n + self.order() as i64) as usize]
    }
}

struct Node {
    phi: f64,
    f: f64,
    df: f64,
    weight: f64,
    bessel: Vec<f64>,
    bessel_prime: Vec<f64>,
}

fn nodes(shape: &StarShape, k: f64, order: usize, count: usize) -> Vec<Node> {
    let dphi = 2.0 * PI / count as f64;
    (0..count)
        .map(|j| {
            let phi = dphi * j as f64;
            let (f, df) = shape.radius_and_slope(phi);
            let all = bessel_j_all(order + 1, k * f);
            let bessel_prime = (0..=order)
                .map(|n| if n == 0 { -all[1] } else { 0.5 * (all[n - 1] - all[n + 1]) })
                .collect();
            Node {
                phi,
                f,
                df,
                weight: ((f * f + df * df).sqrt() * dphi).sqrt(),
                bessel: all[..=order].to_vec(),
                bessel_prime,
            }
        })
        .collect()
}

fn column_scale(n: usize, k: f64, r_max: f64) -> f64 {
    let half = 0.5 * k * r_max;
    let mut s = 1.0;
    for i in 1..=n {
        s *= half / i as f64;
    }
    s.min(1.0)
}

fn check_trefftz_input(shape: &StarShape, k: f64, order: usize, n_colloc: usize) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!("k must be positive, got {k}")));
    }
    if k * shape.upper_bound() > MAX_ARGUMENT {
        return Err(Error::invalid("k times the shape radius is out of range"));
    }
    if order == 0 {
        return Err(Error::invalid("expansion order N must be at least 1"));
    }
    if n_colloc < 4 * order + 16 {
        return Err(Error::invalid(format!(
            "need at least 4N + 16 = {} collocation nodes, got {n_colloc}",
            4 * order + 16
        )));
    }
    Ok(())
}

/// The Trefftz fit without the acceptance checks on rank and residual.
pub fn trefftz_fit(
    shape: &StarShape,
    k: f64,
    order: usize,
    n_colloc: usize,
) -> Result<TrefftzSolution> {
    check_trefftz_input(shape, k, order, n_colloc)?;
    let pts = nodes(shape, k, order, n_colloc);
    let cols = 2 * order + 1;
    let scale: Vec<f64> = (0..cols)
        .map(|c| column_scale((c as i64 - order as i64).unsigned_abs() as usize, k, shape.upper_bound()))
        .collect();
    let basis = |node: &Node, c: usize| -> Complex64 {
        let n = c as i64 - order as i64;
        Complex64::from_polar(node.bessel[n.unsigned_abs() as usize], n as f64 * node.phi)
    };
    let a = DMatrix::from_fn(n_colloc, cols, |i, c| basis(&pts[i], c) * (pts[i].weight / scale[c]));
    let b = DVector::from_fn(n_colloc, |i, _| Complex64::new(-pts[i].weight / (k * k), 0.0));

    let svd = a.svd(true, true);
    let sigma = &svd.singular_values;
    let s_max = sigma.max();
    let s_min = sigma.min();
    let rank = sigma.iter().filter(|&&s| s > SVD_CUTOFF * s_max).count();
    let scaled = svd
        .solve(&b, SVD_CUTOFF * s_max)
        .map_err(|e| Error::Consistency(format!("least-squares solve failed: {e}")))?;
    let coeffs: Vec<Complex64> = scaled.iter().zip(&scale).map(|(c, s)| c / *s).collect();

    let mut res2 = 0.0;
    let mut neu2 = 0.0;
    for node in &pts {
        let mut u = Complex64::new(1.0 / (k * k), 0.0);
        let mut ur = Complex64::new(0.0, 0.0);
        let mut uphi = Complex64::new(0.0, 0.0);
        for (c, coef) in coeffs.iter().enumerate() {
            let n = c as i64 - order as i64;
            let m = n.unsigned_abs() as usize;
            let e = Complex64::from_polar(1.0, n as f64 * node.phi);
            u += coef * e * node.bessel[m];
            ur += coef * e * (k * node.bessel_prime[m]);
            uphi += coef * e * Complex64::new(0.0, n as f64 * node.bessel[m]);
        }
        let un = (ur * node.f - uphi * (node.df / node.f)) / (node.f * node.f + node.df * node.df).sqrt();
        let w2 = node.weight * node.weight;
        res2 += u.norm_sqr() * w2;
        neu2 += un.norm_sqr() * w2;
    }
    Ok(TrefftzSolution {
        k,
        coeffs,
        boundary_residual: res2.sqrt(),
        neumann_defect: neu2.sqrt(),
        rank,
        condition: if s_min > 0.0 { s_max / s_min } else { f64::INFINITY },
    })
}

/// Trefftz fit with `N` modes on `n_colloc` equispaced boundary nodes.
///
/// Fails with [`Error::RankDeficient`] when more than two singular values
/// fall below the cutoff, and with [`Error::DirichletFitFailed`] when the
/// boundary residual exceeds [`DIRICHLET_LIMIT`].
pub fn trefftz_defect(
    shape: &StarShape,
    k: f64,
    order: usize,
    n_colloc: usize,
) -> Result<TrefftzSolution> {
    let sol = trefftz_fit(shape, k, order, n_colloc)?;
    let cols = sol.coeffs.len();
    if cols - sol.rank > MAX_RANK_DEFICIENCY {
        return Err(Error::RankDeficient {
            rank: sol.rank,
            cols,
        });
    }
    if !(sol.boundary_residual <= DIRICHLET_LIMIT) {
        return Err(Error::DirichletFitFailed {
            residual: sol.boundary_residual,
        });
    }
    Ok(sol)
}

/// [`trefftz_fit`] over a list of wavenumbers, in input order.
pub fn defect_scan(
    shape: &StarShape,
    ks: &[f64],
    order: usize,
    n_colloc: usize,
) -> Result<Vec<TrefftzSolution>> {
    ks.par_iter()
        .map(|&k| trefftz_fit(shape, k, order, n_colloc))
        .collect()
}

pub fn defect_table(scan: &[TrefftzSolution]) -> Table {
    let mut t = Table::new(&["k", "boundary_residual", "neumann_defect", "condition"]);
    for s in scan {
        t.push(vec![
            Cell::from(s.k),
            Cell::from(s.boundary_residual),
            Cell::from(s.neumann_defect),
            Cell::from(s.condition),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_j;

    fn first_zero() -> f64 {
        bessel_j1_zero(1).unwrap().value
    }

    #[test]
    fn disc_closed_form_at_zero() {
        let sol = disc_overdetermined(1.0, first_zero()).unwrap();
        assert_eq!(sol.boundary_value(), 0.0);
        assert!(sol.neumann_defect <= 1e-10);
    }

    #[test]
    fn disc_closed_form_off_zero() {
        let sol = disc_overdetermined(1.0, 2.0).unwrap();
        let expect = bessel_j(1, 2.0).unwrap() / (2.0 * bessel_j(0, 2.0).unwrap());
        assert!((sol.neumann_defect - expect.abs()).abs() < 1e-15);
        assert!(sol.neumann_defect > 0.1);
        let u0 = (1.0 - 1.0 / bessel_j(0, 2.0).unwrap()) / 4.0;
        assert!((sol.value(0.0) - u0).abs() < 1e-15);
    }

    #[test]
    fn rejects_j0_zero() {
        assert!(disc_overdetermined(1.0, 2.404825557695773).is_err());
        assert!(disc_overdetermined(-1.0, 2.0).is_err());
    }

    #[test]
    fn residual_is_second_order() {
        let sol = disc_overdetermined(1.0, first_zero()).unwrap();
        let r1 = residual_check(&sol, 1e-3).unwrap();
        let r2 = residual_check(&sol, 5e-4).unwrap();
        assert!(r1 <= 1e-5);
        let ratio = r1 / r2;
        assert!((ratio - 4.0).abs() < 1.2, "ratio {ratio}");
        assert!(residual_check(&sol, 0.1).is_err());
    }

    #[test]
    fn particular_solution_has_zero_residual() {
        let k = 3.0;
        let radii = [0.2, 0.5, 0.9];
        assert!(radial_pde_residual(|_| 1.0 / (k * k), k, &radii, 1e-3) < 1e-15);
    }

    #[test]
    fn neumann_mode() {
        let m = neumann_eigen_disc(1.0, 1).unwrap();
        assert!(m.normal_derivative.abs() <= 1e-11);
        assert!(m.boundary_value.abs() > 0.3);
        let m2 = neumann_eigen_disc(2.0, 1).unwrap();
        assert!((m2.k - m.k / 2.0).abs() < 1e-15);
        assert!(neumann_eigen_disc(1.0, 0).is_err());
    }

    #[test]
    fn trefftz_disc_at_zero() {
        let disc = StarShape::disc(1.0).unwrap();
        let sol = trefftz_defect(&disc, first_zero(), 8, 64).unwrap();
        assert!(sol.boundary_residual <= 1e-10);
        assert!(sol.neumann_defect <= 1e-8);
        for n in 1..=8 {
            assert!(sol.coeff(n).norm() < 1e-10);
            assert!(sol.coeff(-n).norm() < 1e-10);
        }
    }

    #[test]
    fn trefftz_disc_off_zero_matches_closed_form() {
        let disc = StarShape::disc(1.0).unwrap();
        let sol = trefftz_defect(&disc, 2.0, 8, 64).unwrap();
        let closed = disc_overdetermined(1.0, 2.0).unwrap();
        assert!(sol.boundary_residual <= 1e-10);
        let expect = closed.neumann_defect * (2.0 * PI).sqrt();
        assert!((sol.neumann_defect - expect).abs() <= 1e-6);
    }

    #[test]
    fn trefftz_input_checks() {
        let disc = StarShape::disc(1.0).unwrap();
        assert!(trefftz_defect(&disc, 2.0, 8, 40).is_err());
        assert!(trefftz_defect(&disc, -2.0, 8, 64).is_err());
        assert!(trefftz_defect(&disc, 2.0, 0, 64).is_err());
    }

    #[test]
    fn even_shape_has_symmetric_coefficients() {
        let shape = StarShape::new(1.0, vec![0.3], vec![]).unwrap();
        let k = 3.0;
        let sol = trefftz_defect(&shape, k, 16, 96).unwrap();
        let jmax = bessel_j_all(16, k * shape.upper_bound());
        for n in 1..=16i64 {
            let d = (sol.coeff(n) - sol.coeff(-n)).norm();
            assert!(d * jmax[n as usize] < 1e-10, "n = {n}: {d:e}");
        }
    }

    #[test]
    fn scan_table_layout() {
        let shape = StarShape::new(1.0, vec![0.0, 0.2], vec![]).unwrap();
        let scan = defect_scan(&shape, &[3.5, 3.6], 12, 96).unwrap();
        let t = defect_table(&scan);
        assert_eq!(t.columns(), ["k", "boundary_residual", "neumann_defect", "condition"]);
        assert_eq!(t.rows().len(), 2);
    }
}
