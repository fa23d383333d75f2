//! Bessel functions of the first kind, zeros of `J_1`, and `Γ(3/2)`.
//!
//! `J_n` is computed by Miller's backward recurrence normalised with
//! `J_0 + 2 Σ J_{2k} = 1`, which is stable for every order and argument in
//! the supported range and yields all orders `0..=n` in one sweep.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported `|x|`.
pub const MAX_ARGUMENT: f64 = 1e4;
/// Largest tabulated zero index.
pub const MAX_ZERO_INDEX: usize = 50;
/// Residual bound every [`BesselZero`] satisfies.
pub const ZERO_RESIDUAL: f64 = 1e-12;

const RESCALE: f64 = 1e250;

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::invalid(format!(
            "Bessel argument must satisfy |x| <= {MAX_ARGUMENT:e}, got {x}"
        )));
    }
    Ok(())
}

/// `J_n(x)`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    check_argument(x)?;
    Ok(bessel_j_all(n as usize, x)[n as usize])
}

/// `[J_0(x), ..., J_nmax(x)]`. The caller guarantees `|x| <= MAX_ARGUMENT`.
pub fn bessel_j_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    // Start well above the turning point; J_nu(x) decays like an Airy tail
    // over a width ~ x^(1/3) once nu > x.
    let top = nmax.max(ax as usize) + 30 + (15.0 * ax.cbrt()).ceil() as usize;
    let top = top + (top % 2);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=top).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        let idx = k - 1;
        if idx <= nmax {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            norm /= RESCALE;
            for v in out.iter_mut().skip(idx) {
                *v /= RESCALE;
            }
        }
    }
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_n'(x)` from `J_n' = (J_{n-1} - J_{n+1}) / 2`, with `J_0' = -J_1`.
pub fn bessel_j_prime(n: u32, x: f64) -> Result<f64> {
    check_argument(x)?;
    let all = bessel_j_all(n as usize + 1, x);
    let n = n as usize;
    Ok(if n == 0 {
        -all[1]
    } else {
        0.5 * (all[n - 1] - all[n + 1])
    })
}

/// A positive zero of `J_order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselZero {
    pub order: u32,
    pub index: usize,
    pub value: f64,
}

impl BesselZero {
    pub fn residual(&self) -> f64 {
        bessel_j_all(self.order as usize, self.value)[self.order as usize].abs()
    }
}

/// The `m`-th positive zero of `J_1`, `1 <= m <= 50`.
pub fn bessel_j1_zero(m: usize) -> Result<BesselZero> {
    if m == 0 || m > MAX_ZERO_INDEX {
        return Err(Error::invalid(format!(
            "J1 zero index must be in 1..={MAX_ZERO_INDEX}, got {m}"
        )));
    }
    Ok(j1_zero_table()[m - 1])
}

/// All tabulated `J_1` zeros, validated on first use.
pub fn j1_zero_table() -> &'static [BesselZero] {
    static TABLE: OnceLock<Vec<BesselZero>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let table: Vec<BesselZero> = (1..=MAX_ZERO_INDEX).map(find_j1_zero).collect();
        for (i, z) in table.iter().enumerate() {
            assert!(
                z.residual() <= ZERO_RESIDUAL,
                "J1 zero {} failed residual check: {:e}",
                z.index,
                z.residual()
            );
            if i > 0 {
                assert!(z.value > table[i - 1].value);
            }
        }
        table
    })
}

fn j1(x: f64) -> f64 {
    bessel_j_all(1, x)[1]
}

fn find_j1_zero(m: usize) -> BesselZero {
    let mf = m as f64;
    let mut lo = (mf - 0.25) * PI;
    let mut hi = (mf + 0.75) * PI;
    let mut flo = j1(lo);
    // Bisection to a narrow bracket, then Newton with J1' = J0 - J1/x.
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let fm = j1(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..20 {
        let j = bessel_j_all(1, x);
        let d = j[0] - j[1] / x;
        let step = j[1] / d;
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    BesselZero {
        order: 1,
        index: m,
        value: x,
    }
}

/// `Γ(3/2) = √π / 2`.
pub fn gamma_three_halves() -> f64 {
    0.5 * PI.sqrt()
}

/// CSV dump of the `J_1` zero table: `order,index,value,residual`.
pub fn zero_table_csv(count: usize) -> String {
    let mut out = String::from("order,index,value,residual\n");
    for z in j1_zero_table().iter().take(count) {
        let _ = writeln!(out, "{},{},{},{:e}", z.order, z.index, z.value, z.residual());
    }
    out
}
