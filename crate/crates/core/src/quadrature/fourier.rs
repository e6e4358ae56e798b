use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Number of angles used to check `r(θ) > 0`.
pub const POSITIVITY_CHECK_POINTS: usize = 4096;

/// Star-shaped planar domain `r(θ) = r0 (1 + Σ a_k cos kθ + b_k sin kθ)`.
///
/// Serialized as the flat JSON list `[r0, K, a_1..a_K, b_1..b_K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierShape {
    base_radius: f64,
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

impl FourierShape {
    /// Builds a shape, padding the shorter coefficient list with zeros.
    pub fn new(base_radius: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        if !(base_radius.is_finite() && base_radius > 0.0) {
            return Err(Error::param(format!(
                "base radius must be positive, got {base_radius}"
            )));
        }
        let k = cos_coeffs.len().max(sin_coeffs.len());
        let mut a = cos_coeffs;
        let mut b = sin_coeffs;
        a.resize(k, 0.0);
        b.resize(k, 0.0);
        if a.iter().chain(&b).any(|c| !c.is_finite()) {
            return Err(Error::param("Fourier coefficients must be finite"));
        }
        let shape = FourierShape {
            base_radius,
            cos_coeffs: a,
            sin_coeffs: b,
        };
        shape.check_positive()?;
        Ok(shape)
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(radius, Vec::new(), Vec::new())
    }

    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    pub fn modes(&self) -> usize {
        self.cos_coeffs.len()
    }

    /// Relative radius profile `1 + Σ a_k cos kθ + b_k sin kθ`.
    fn profile(&self, theta: f64) -> f64 {
        let mut v = 1.0;
        for (k, (a, b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let (s, c) = ((k + 1) as f64 * theta).sin_cos();
            v += a * c + b * s;
        }
        v
    }

    fn profile_derivative(&self, theta: f64) -> f64 {
        let mut v = 0.0;
        for (k, (a, b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * theta).sin_cos();
            v += kf * (b * c - a * s);
        }
        v
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.base_radius * self.profile(theta)
    }

    pub fn radius_derivative(&self, theta: f64) -> f64 {
        self.base_radius * self.profile_derivative(theta)
    }

    /// Upper bound on `max_θ r(θ)`.
    pub fn max_radius_bound(&self) -> f64 {
        let s: f64 = self
            .cos_coeffs
            .iter()
            .chain(&self.sin_coeffs)
            .map(|c| c.abs())
            .sum();
        self.base_radius * (1.0 + s)
    }

    fn check_positive(&self) -> Result<()> {
        let n = POSITIVITY_CHECK_POINTS;
        for j in 0..n {
            let theta = 2.0 * PI * j as f64 / n as f64;
            if self.profile(theta) <= 0.0 {
                return Err(Error::param(format!(
                    "radius is not positive at theta={theta:.6}"
                )));
            }
        }
        Ok(())
    }

    /// Enclosed area `∫ r²/2 dθ = π r0² (1 + ½ Σ (a_k² + b_k²))`.
    pub fn area(&self) -> f64 {
        PI * self.base_radius * self.base_radius * self.area_factor()
    }

    fn area_factor(&self) -> f64 {
        let sq: f64 = self
            .cos_coeffs
            .iter()
            .chain(&self.sin_coeffs)
            .map(|c| c * c)
            .sum();
        1.0 + 0.5 * sq
    }

    /// Same coefficients, base radius chosen so that the area equals `area`.
    pub fn with_area(&self, area: f64) -> Result<Self> {
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::param(format!("area must be positive, got {area}")));
        }
        Ok(FourierShape {
            base_radius: (area / (PI * self.area_factor())).sqrt(),
            ..self.clone()
        })
    }

    /// Dilation by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(
            self.base_radius * t,
            self.cos_coeffs.clone(),
            self.sin_coeffs.clone(),
        )
    }

    /// Centre of mass `(1/3A) ∫ r³ (cos θ, sin θ) dθ`.
    ///
    /// The integrand is a trigonometric polynomial of degree `3K+1`, so the
    /// trapezoid rule below is exact up to rounding.
    pub fn centroid(&self) -> [f64; 2] {
        let n = 6 * self.modes() + 8;
        let dt = 2.0 * PI / n as f64;
        let (mut cx, mut cy) = (0.0, 0.0);
        for j in 0..n {
            let t = j as f64 * dt;
            let r3 = self.radius(t).powi(3);
            let (s, c) = t.sin_cos();
            cx += r3 * c;
            cy += r3 * s;
        }
        let scale = dt / (3.0 * self.area());
        [cx * scale, cy * scale]
    }

    /// Boundary samples `(θ, r(θ))` at `n` equispaced angles.
    pub fn boundary(&self, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                (t, self.radius(t))
            })
            .collect()
    }
}

/// Arc length `∫_0^{2π} sqrt(r² + r'²) dθ` by the periodic trapezoid rule.
pub fn perimeter_fourier(shape: &FourierShape, nodes: usize) -> Result<f64> {
    if nodes < 64 {
        return Err(Error::param("perimeter quadrature needs at least 64 nodes"));
    }
    let dt = 2.0 * PI / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|j| {
            let t = j as f64 * dt;
            let r = shape.radius(t);
            let dr = shape.radius_derivative(t);
            (r * r + dr * dr).sqrt()
        })
        .sum();
    Ok(sum * dt)
}

impl Serialize for FourierShape {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut flat = Vec::with_capacity(2 + 2 * self.modes());
        flat.push(self.base_radius);
        flat.push(self.modes() as f64);
        flat.extend_from_slice(&self.cos_coeffs);
        flat.extend_from_slice(&self.sin_coeffs);
        flat.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FourierShape {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let flat = Vec::<f64>::deserialize(deserializer)?;
        if flat.len() < 2 {
            return Err(D::Error::custom("expected [r0, K, a_1..a_K, b_1..b_K]"));
        }
        let k = flat[1];
        if !(k >= 0.0 && k.fract() == 0.0) {
            return Err(D::Error::custom(format!(
                "mode count must be an integer, got {k}"
            )));
        }
        let k = k as usize;
        if flat.len() != 2 + 2 * k {
            return Err(D::Error::custom(format!(
                "expected {} numbers for K={k}, got {}",
                2 + 2 * k,
                flat.len()
            )));
        }
        FourierShape::new(flat[0], flat[2..2 + k].to_vec(), flat[2 + k..].to_vec()).map_err(D::Error::custom)
    }
}
