//! Configurations of equal balls at infinite separation, and the
//! nonexistence diagnostics built on the distance moment.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::analytic::{ball_energy, BallConstants};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, integrate_gl};
use crate::params::{sphere_area_unchecked, Mass, RieszParams};
use crate::quadrature::{moment_integral, GridShape};

/// `k` balls of mass `m/k` each, pairwise infinitely far apart.
///
/// Interaction terms vanish in the limit, so the energy is `k·E_ball(m/k)`.
pub fn split_energy(params: &RieszParams, constants: &BallConstants, m: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("split needs at least one component"));
    }
    let piece = Mass::new(m / k as f64)?;
    Ok(k as f64 * ball_energy(params, piece, constants).total)
}

/// Energies of the equal `k`-ball splits for `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub params: RieszParams,
    pub m: f64,
    pub energies_by_k: Vec<(usize, f64)>,
    /// Smallest `k` attaining the minimum.
    pub best_k: usize,
    pub best_total: f64,
}

pub fn best_split(
    params: &RieszParams,
    constants: &BallConstants,
    m: f64,
    k_max: usize,
) -> Result<SplitReport> {
    if k_max == 0 {
        return Err(Error::param("k_max must be at least 1"));
    }
    let energies_by_k = (1..=k_max)
        .map(|k| Ok((k, split_energy(params, constants, m, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let (best_k, best_total) =
        energies_by_k.iter().copied().fold(
            (0, f64::INFINITY),
            |best, (k, e)| if e < best.1 { (k, e) } else { best },
        );
    Ok(SplitReport {
        params: *params,
        m,
        energies_by_k,
        best_k,
        best_total,
    })
}

/// `c_N = |S^{N-1}|^{-1} ∫_{S^{N-1}} (ν·e)_+ dσ(ν)`, by Gauss-Legendre
/// quadrature of `|S^{N-2}| ∫_0^{π/2} cos θ sin^{N-2} θ dθ`.
pub fn angular_constant(n: usize, quad_nodes: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param(format!("angular constant needs N >= 2, got {n}")));
    }
    if quad_nodes == 0 {
        return Err(Error::param("quadrature needs at least one node"));
    }
    let rule = gauss_legendre(quad_nodes);
    let polar = integrate_gl(|t| t.cos() * t.sin().powi(n as i32 - 2), 0.0, FRAC_PI_2, &rule);
    Ok(sphere_area_unchecked(n - 1) * polar / sphere_area_unchecked(n))
}

/// Closed form of [`angular_constant`], `Γ(N/2) / (2√π Γ((N+1)/2))`.
///
/// Evaluated with integer factorials so that odd `N` gives an exact
/// rational (`c_3 = 1/4`) and even `N` a rational over `π`.
pub fn angular_constant_closed(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param(format!("angular constant needs N >= 2, got {n}")));
    }
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let double_fact = |k: usize| (1..=k).rev().step_by(2).map(|i| i as f64).product::<f64>();
    Ok(if n % 2 == 1 {
        double_fact(n - 2) / (2f64.powi((n as i32 + 1) / 2) * fact((n - 1) / 2))
    } else {
        fact(n / 2 - 1) * 2f64.powi(n as i32 / 2) / (2.0 * PI * double_fact(n - 1))
    })
}

/// Outcome of the distance-moment test a minimizer must pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditionReport {
    /// `∬_{Ω×Ω} |x-y|^{1-λ}`.
    pub moment: f64,
    pub measure: f64,
    pub c_n: f64,
    /// `2·measure / c_N`.
    pub bound: f64,
    pub satisfied: bool,
    /// `bound - moment`; negative certifies that `Ω` is not a minimizer.
    pub margin: f64,
}

/// Checks `(c_N/2)·∬|x-y|^{1-λ} ≤ |Ω|`.
///
/// A violation proves the shape is not a minimizer. Satisfying it proves
/// nothing.
pub fn necessary_condition(g: &GridShape, params: &RieszParams) -> Result<NecessaryConditionReport> {
    if g.dim() != params.dimension() {
        return Err(Error::param(format!(
            "shape has dimension {}, parameters have N={}",
            g.dim(),
            params.dimension()
        )));
    }
    let moment = moment_integral(g, 1.0 - params.exponent())?;
    let measure = g.measure();
    let c_n = angular_constant_closed(params.dimension())?;
    let bound = 2.0 * measure / c_n;
    let margin = bound - moment;
    Ok(NecessaryConditionReport {
        moment,
        measure,
        c_n,
        bound,
        satisfied: margin >= 0.0,
        margin,
    })
}

/// Largest mass a minimizer can have, for `0 < λ ≤ 1`.
///
/// `λ = 1` gives `2/c_N`. For `λ < 1` the ball has the smallest distance
/// moment at its volume, which yields
/// `m = ω_N (2ω_N / (c_N·M_1))^{N/(N+1-λ)}` with `M_1` the moment of the
/// unit ball (`ball_moment_unit`).
pub fn nonexistence_mass_bound(
    params: &RieszParams,
    constants: &BallConstants,
    ball_moment_unit: f64,
) -> Result<f64> {
    let lambda = params.exponent();
    if lambda > 1.0 {
        return Err(Error::Unsupported(
            "no computable bound for 1<lambda<=2: the structure-lemma constant is not explicit".into(),
        ));
    }
    let c_n = angular_constant_closed(params.dimension())?;
    if lambda == 1.0 {
        return Ok(2.0 / c_n);
    }
    if !(ball_moment_unit.is_finite() && ball_moment_unit > 0.0) {
        return Err(Error::param(format!(
            "unit-ball moment must be positive, got {ball_moment_unit}"
        )));
    }
    let w = constants.volume;
    Ok(w * (2.0 * w / (c_n * ball_moment_unit)).powf(1.0 / params.gap_exp()))
}
