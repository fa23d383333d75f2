//! Star-shaped planar domains and rigid motions of the plane.
//!
//! A domain is described by its boundary in polar coordinates about an
//! interior origin, `r = f(phi)`, where `f` is a trigonometric polynomial
//!
//! ```text
//! f(phi) = R + sum_{m=1}^{M} (a_m cos(m phi) + b_m sin(m phi)).
//! ```
//!
//! All derivatives are evaluated term by term, so they are exact up to
//! rounding. Positivity is certified at construction by the coefficient
//! bound `R - sum_m (|a_m| + |b_m|) > 0`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::periodic_integral;

/// On-disk shape description: `{"mean_radius": r, "cos": [...], "sin": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub mean_radius: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

/// A star-shaped domain with a truncated Fourier radius function.
#[derive(Debug, Clone, PartialEq)]
pub struct StarShape {
    mean_radius: f64,
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

impl StarShape {
    /// Builds a shape, padding the shorter coefficient list with zeros.
    ///
    /// Fails when a value is not finite or when the certified lower bound
    /// `c1 = R - sum(|a_m| + |b_m|)` is not positive.
    pub fn new(mean_radius: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        if !mean_radius.is_finite() || mean_radius <= 0.0 {
            return Err(Error::InvalidShape(format!(
                "mean_radius must be positive and finite, got {mean_radius}"
            )));
        }
        if let Some(bad) = cos_coeffs.iter().chain(&sin_coeffs).find(|c| !c.is_finite()) {
            return Err(Error::InvalidShape(format!("non-finite coefficient {bad}")));
        }
        let order = cos_coeffs.len().max(sin_coeffs.len());
        let mut cos_coeffs = cos_coeffs;
        let mut sin_coeffs = sin_coeffs;
        cos_coeffs.resize(order, 0.0);
        sin_coeffs.resize(order, 0.0);
        let shape = StarShape {
            mean_radius,
            cos_coeffs,
            sin_coeffs,
        };
        let c1 = shape.lower_bound();
        if c1 <= 0.0 {
            return Err(Error::InvalidShape(format!(
                "positivity bound c1 = mean_radius - sum(|a_m| + |b_m|) = {c1} is not positive"
            )));
        }
        Ok(shape)
    }

    pub fn disc(radius: f64) -> Result<Self> {
        Self::new(radius, Vec::new(), Vec::new())
    }

    pub fn from_spec(spec: &ShapeSpec) -> Result<Self> {
        Self::new(spec.mean_radius, spec.cos.clone(), spec.sin.clone())
    }

    pub fn to_spec(&self) -> ShapeSpec {
        ShapeSpec {
            mean_radius: self.mean_radius,
            cos: self.cos_coeffs.clone(),
            sin: self.sin_coeffs.clone(),
        }
    }

    /// Parses and validates a shape spec document.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ShapeSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        // ShapeSpec only holds finite f64s, serialization cannot fail.
        serde_json::to_string_pretty(&self.to_spec()).expect("finite shape spec")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn mean_radius(&self) -> f64 {
        self.mean_radius
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    /// Number of harmonics `M`.
    pub fn order(&self) -> usize {
        self.cos_coeffs.len()
    }

    fn coeff_sum(&self) -> f64 {
        self.cos_coeffs
            .iter()
            .chain(&self.sin_coeffs)
            .map(|c| c.abs())
            .sum()
    }

    /// Certified lower bound `c1 <= f`.
    pub fn lower_bound(&self) -> f64 {
        self.mean_radius - self.coeff_sum()
    }

    /// Certified upper bound `f <= c2`.
    pub fn upper_bound(&self) -> f64 {
        self.mean_radius + self.coeff_sum()
    }

    /// `true` when every harmonic vanishes.
    pub fn is_disc(&self) -> bool {
        self.cos_coeffs.iter().chain(&self.sin_coeffs).all(|&c| c == 0.0)
    }

    /// `f^(deriv)(phi)` for `deriv` in `0..=3`.
    pub fn eval(&self, phi: f64, deriv: u32) -> Result<f64> {
        if deriv > 3 {
            return Err(Error::invalid(format!(
                "derivative order must be in 0..=3, got {deriv}"
            )));
        }
        Ok(self.derivative(phi, deriv))
    }

    /// `f(phi)`.
    pub fn radius(&self, phi: f64) -> f64 {
        self.derivative(phi, 0)
    }

    /// Any-order derivative by term-wise differentiation.
    pub(crate) fn derivative(&self, phi: f64, deriv: u32) -> f64 {
        let mut acc = if deriv == 0 { self.mean_radius } else { 0.0 };
        for (idx, (&a, &b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let m = (idx + 1) as f64;
            let (s, c) = (m * phi).sin_cos();
            let scale = m.powi(deriv as i32);
            // d^n/dphi^n of (a cos + b sin) cycles with period 4.
            let term = match deriv % 4 {
                0 => a * c + b * s,
                1 => -a * s + b * c,
                2 => -a * c - b * s,
                _ => a * s - b * c,
            };
            acc += scale * term;
        }
        acc
    }

    /// `[f, f', f'', f''', f'''']` at `phi`, sharing one set of sin/cos evaluations.
    pub fn jet(&self, phi: f64) -> [f64; 5] {
        let mut out = [self.mean_radius, 0.0, 0.0, 0.0, 0.0];
        for (idx, (&a, &b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let m = (idx + 1) as f64;
            let (s, c) = (m * phi).sin_cos();
            let p = a * c + b * s;
            let q = -a * s + b * c;
            let m2 = m * m;
            out[0] += p;
            out[1] += m * q;
            out[2] -= m2 * p;
            out[3] -= m2 * m * q;
            out[4] += m2 * m2 * p;
        }
        out
    }

    /// `(f, f')` at `phi`.
    pub fn radius_and_slope(&self, phi: f64) -> (f64, f64) {
        let mut f = self.mean_radius;
        let mut df = 0.0;
        for (idx, (&a, &b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let m = (idx + 1) as f64;
            let (s, c) = (m * phi).sin_cos();
            f += a * c + b * s;
            df += m * (-a * s + b * c);
        }
        (f, df)
    }

    /// Area `(1/2) * int f^2 dphi`.
    pub fn area(&self) -> f64 {
        let res = periodic_integral(
            |phi| {
                let f = self.radius(phi);
                Complex64::new(0.5 * f * f, 0.0)
            },
            1e-13 * self.upper_bound().powi(2),
        )
        // f^2 is a trigonometric polynomial of degree 2M; the rule is exact
        // once the node count exceeds 2M, which the node cap dwarfs.
        .expect("trigonometric polynomial integrates exactly");
        res.value.re
    }

    /// The same geometric domain described from an angular origin shifted
    /// by `tau`: the returned shape satisfies `g(phi) = f(phi + tau)`.
    pub fn rotated(&self, tau: f64) -> StarShape {
        let mut cos_coeffs = Vec::with_capacity(self.order());
        let mut sin_coeffs = Vec::with_capacity(self.order());
        for (idx, (&a, &b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let m = (idx + 1) as f64;
            let (s, c) = (m * tau).sin_cos();
            cos_coeffs.push(a * c + b * s);
            sin_coeffs.push(-a * s + b * c);
        }
        StarShape {
            mean_radius: self.mean_radius,
            cos_coeffs,
            sin_coeffs,
        }
    }

    /// Boundary polygon with `n` vertices at equally spaced angles.
    pub fn boundary_polygon(&self, n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .map(|i| {
                let phi = -PI + 2.0 * PI * i as f64 / n as f64;
                let r = self.radius(phi);
                [r * phi.cos(), r * phi.sin()]
            })
            .collect()
    }
}

/// Shoelace area of a closed polygon.
pub fn polygon_area(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let p = points[i];
            let q = points[(i + 1) % n];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    0.5 * twice
}

/// A rotation by `rotation` radians about the origin followed by a
/// translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: f64,
    pub translation: [f64; 2],
}

impl RigidMotion {
    pub const IDENTITY: RigidMotion = RigidMotion {
        rotation: 0.0,
        translation: [0.0, 0.0],
    };

    pub fn new(rotation: f64, translation: [f64; 2]) -> Self {
        RigidMotion {
            rotation,
            translation,
        }
    }

    pub fn translation(t: [f64; 2]) -> Self {
        Self::new(0.0, t)
    }

    pub fn rotation(angle: f64) -> Self {
        Self::new(angle, [0.0, 0.0])
    }

    /// Rotates `x` then translates.
    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let r = self.rotate(x);
        [r[0] + self.translation[0], r[1] + self.translation[1]]
    }

    /// The linear part alone.
    pub fn rotate(&self, x: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.rotation.sin_cos();
        [c * x[0] - s * x[1], s * x[0] + c * x[1]]
    }

    /// The transpose of the linear part.
    pub fn rotate_back(&self, x: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.rotation.sin_cos();
        [c * x[0] + s * x[1], -s * x[0] + c * x[1]]
    }

    pub fn inverse(&self) -> RigidMotion {
        let t = self.rotate_back(self.translation);
        RigidMotion {
            rotation: -self.rotation,
            translation: [-t[0], -t[1]],
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        let t = self.apply(other.translation);
        RigidMotion {
            rotation: self.rotation + other.rotation,
            translation: t,
        }
    }
}
