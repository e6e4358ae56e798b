//! Problem parameters, energy bookkeeping and the dilation law.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ambient dimension `N` and Riesz exponent `λ` of the problem.
///
/// Validated once at construction: `N ≥ 2` and `0 < λ < N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszParams {
    dimension: usize,
    exponent: f64,
}

impl RieszParams {
    pub fn new(dimension: usize, exponent: f64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::param(format!(
                "dimension must be at least 2, got {dimension}"
            )));
        }
        if !(exponent.is_finite() && exponent > 0.0 && exponent < dimension as f64) {
            return Err(Error::param(format!(
                "lambda must be in (0,N): got lambda={exponent}, N={dimension}"
            )));
        }
        Ok(RieszParams { dimension, exponent })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    fn n(&self) -> f64 {
        self.dimension as f64
    }

    /// `(N-1)/N`, the mass exponent of the perimeter term.
    pub fn perimeter_exp(&self) -> f64 {
        (self.n() - 1.0) / self.n()
    }

    /// `(2N-λ)/N`, the mass exponent of the Riesz term.
    pub fn riesz_exp(&self) -> f64 {
        (2.0 * self.n() - self.exponent) / self.n()
    }

    /// `(N+1-λ)/N`, the gap between the two mass exponents. Always positive.
    pub fn gap_exp(&self) -> f64 {
        (self.n() + 1.0 - self.exponent) / self.n()
    }
}

/// A strictly positive mass (volume).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Mass(pub(crate) f64);

impl Mass {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Mass(value))
        } else {
            Err(Error::param(format!("mass must be positive, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Perimeter and Riesz contributions of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub perimeter: f64,
    pub riesz: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(perimeter: f64, riesz: f64) -> Self {
        EnergyBreakdown {
            perimeter,
            riesz,
            total: perimeter + riesz,
        }
    }
}

/// Volume of the unit ball in `R^n`.
///
/// Uses the exact two-step recursion `ω_n = 2π/n · ω_{n-2}` from `ω_0 = 1`,
/// `ω_1 = 2`, which avoids evaluating the Gamma function.
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::param("unit ball volume needs dimension >= 1"));
    }
    Ok(ball_volume_unchecked(n))
}

pub(crate) fn ball_volume_unchecked(n: usize) -> f64 {
    let (mut k, mut v) = if n.is_multiple_of(2) { (0, 1.0) } else { (1, 2.0) };
    while k < n {
        k += 2;
        v *= 2.0 * PI / k as f64;
    }
    v
}

/// Surface area of the unit sphere `S^{n-1} ⊂ R^n` for any `n ≥ 1`
/// (`n = 1` gives the two-point sphere, measure 2).
pub(crate) fn sphere_area_unchecked(n: usize) -> f64 {
    n as f64 * ball_volume_unchecked(n)
}

/// Perimeter of the unit ball, `N · ω_N`.
pub fn unit_sphere_area(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("unit sphere area needs dimension >= 2"));
    }
    Ok(sphere_area_unchecked(n))
}

/// Energy of the dilate `m^{1/N} U` of a unit-volume configuration `U`.
///
/// The perimeter scales like `m^{(N-1)/N}` and the Riesz term like
/// `m^{(2N-λ)/N}`; no quadrature is involved.
pub fn energy_scale(unit: &EnergyBreakdown, params: &RieszParams, m: Mass) -> EnergyBreakdown {
    let m = m.value();
    EnergyBreakdown::new(
        unit.perimeter * m.powf(params.perimeter_exp()),
        unit.riesz * m.powf(params.riesz_exp()),
    )
}
