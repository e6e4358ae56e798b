//! Ball constants and the explicit mass thresholds built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{self, batched_mean, Estimate, RadialSampler};
use crate::numerics::tanh_sinh;
use crate::params::{ball_volume_unchecked, sphere_area_unchecked, EnergyBreakdown, Mass, RieszParams};

/// How the Riesz self-energy of the unit ball was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RieszSelfMethod {
    /// Supplied by the caller from a known closed form.
    Analytic,
    RadialQuadrature,
    MonteCarlo,
}

/// Default node budget for the radial quadrature (`2n+1` nodes).
pub const DEFAULT_RADIAL_NODES: u64 = 400;

/// Volume, perimeter and Riesz self-energy of the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallConstants {
    pub volume: f64,
    pub surface: f64,
    pub riesz_self: f64,
    pub riesz_self_method: RieszSelfMethod,
    pub riesz_self_stderr: f64,
}

impl BallConstants {
    /// Constants with `D(B_1)` from the deterministic radial quadrature.
    pub fn radial(params: &RieszParams) -> Self {
        Self::compute(params, RieszSelfMethod::RadialQuadrature, DEFAULT_RADIAL_NODES, 0)
            .expect("radial quadrature with a positive budget cannot fail")
    }

    pub fn compute(params: &RieszParams, method: RieszSelfMethod, budget: u64, seed: u64) -> Result<Self> {
        let est = ball_riesz_self_energy(params, method, budget, seed)?;
        Self::from_riesz_self(params, est.value, method, est.stderr)
    }

    /// Constants with a caller-supplied `D(B_1)`.
    pub fn from_riesz_self(
        params: &RieszParams,
        riesz_self: f64,
        method: RieszSelfMethod,
        stderr: f64,
    ) -> Result<Self> {
        if !(riesz_self.is_finite() && riesz_self > 0.0) {
            return Err(Error::param(format!(
                "ball self-energy must be positive, got {riesz_self}"
            )));
        }
        let n = params.dimension();
        Ok(BallConstants {
            volume: ball_volume_unchecked(n),
            surface: sphere_area_unchecked(n),
            riesz_self,
            riesz_self_method: method,
            riesz_self_stderr: stderr.max(0.0),
        })
    }

    /// Same constants with `D(B_1)` multiplied by `factor`.
    pub fn with_riesz_scaled(&self, factor: f64) -> Self {
        BallConstants {
            riesz_self: self.riesz_self * factor,
            riesz_self_stderr: self.riesz_self_stderr * factor,
            ..*self
        }
    }
}

/// `|B_1 ∩ (B_1 + r e)|` for unit balls in `R^n`, `0 ≤ r ≤ 2`.
pub(crate) fn lens_volume(n: usize, r: f64) -> f64 {
    if r >= 2.0 {
        return 0.0;
    }
    let x = (0.5 * r).acos();
    2.0 * ball_volume_unchecked(n - 1) * sine_power_integral(n, x)
}

/// `∫_0^x sin^n φ dφ` by the reduction formula.
fn sine_power_integral(n: usize, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let (mut k, mut acc) = if n.is_multiple_of(2) { (0, x) } else { (1, 1.0 - c) };
    while k < n {
        k += 2;
        let kf = k as f64;
        acc = -s.powi(k as i32 - 1) * c / kf + (kf - 1.0) / kf * acc;
    }
    acc
}

/// Estimate of `D(B_1) = ½∬_{B_1×B_1} |x-y|^{-λ}`.
///
/// `RadialQuadrature` integrates the pair-distance law of two uniform points
/// in the ball, `|S^{N-1}| r^{N-1} |B_1 ∩ (B_1+re)|`, against `r^{-λ}` after
/// the substitution `r = 2t^{1/(N-λ)}` that absorbs the singularity; `budget`
/// sets the tanh-sinh node count. `MonteCarlo` averages over `budget` pairs
/// from the seeded stream.
pub fn ball_riesz_self_energy(
    params: &RieszParams,
    method: RieszSelfMethod,
    budget: u64,
    seed: u64,
) -> Result<Estimate> {
    if budget == 0 {
        return Err(Error::param("budget must be positive"));
    }
    let n = params.dimension();
    let lambda = params.exponent();
    let est = match method {
        RieszSelfMethod::Analytic => {
            return Err(Error::Unsupported(
                "no closed form is used for the ball self-energy; pick radial or mc".into(),
            ))
        }
        RieszSelfMethod::RadialQuadrature => Estimate {
            value: 0.5 * radial_moment(n, -lambda, (budget / 2).max(1) as usize),
            stderr: 0.0,
        },
        RieszSelfMethod::MonteCarlo => ball_riesz_mc(n, lambda, budget, seed),
    };
    if !est.value.is_finite() {
        return Err(Error::Numeric(format!(
            "ball self-energy estimate is not finite for N={n}, lambda={lambda}"
        )));
    }
    Ok(est)
}

/// `∬_{B_1×B_1} |x-y|^p` by the substitution `r = 2t^{1/(N+p)}` in the
/// pair-distance law; `p > -N`.
fn radial_moment(n: usize, p: f64, half_nodes: usize) -> f64 {
    let q = n as f64 + p;
    let beta = 1.0 / q;
    let integral = tanh_sinh(|t| lens_volume(n, 2.0 * t.powf(beta)), 0.0, 1.0, half_nodes);
    sphere_area_unchecked(n) * 2f64.powf(q) * beta * integral
}

/// `∬_{B_1×B_1} |x-y|^p` for the unit ball in `R^n`, `n ≥ 2`, `p > -n`,
/// by the same radial quadrature as the self-energy (`2·nodes+1` points).
pub fn ball_distance_moment(n: usize, p: f64, nodes: usize) -> Result<f64> {
    if n < 2 || !(p.is_finite() && p > -(n as f64)) || nodes == 0 {
        return Err(Error::param(format!(
            "ball moment needs N >= 2, p > -N and nodes > 0: got N={n}, p={p}"
        )));
    }
    Ok(radial_moment(n, p, nodes))
}

/// Monte Carlo estimate of `∬_{B_1×B_1} |x-y|^p` from uniform pairs;
/// requires `2p > -n` so the estimator has finite variance.
pub fn ball_distance_moment_mc(n: usize, p: f64, samples: u64, seed: u64) -> Result<Estimate> {
    if n < 2 || !(p.is_finite() && 2.0 * p > -(n as f64)) || samples < 2 {
        return Err(Error::param(format!(
            "uniform-pair moment needs N >= 2, 2p > -N and samples >= 2: got N={n}, p={p}"
        )));
    }
    let vol = ball_volume_unchecked(n);
    let est = batched_mean(samples, seed, |rng| {
        let mut x = [0.0; 16];
        let mut y = [0.0; 16];
        mc::random_in_ball(rng, &mut x[..n]);
        mc::random_in_ball(rng, &mut y[..n]);
        let d2: f64 = x[..n].iter().zip(&y[..n]).map(|(a, b)| (a - b) * (a - b)).sum();
        d2.powf(0.5 * p)
    });
    Ok(est.scaled(vol * vol))
}

fn ball_riesz_mc(n: usize, lambda: f64, samples: u64, seed: u64) -> Estimate {
    let vol = ball_volume_unchecked(n);
    let est = if 2.0 * lambda < n as f64 {
        // finite variance: plain uniform pairs
        batched_mean(samples, seed, |rng| {
            let mut x = [0.0; 16];
            let mut y = [0.0; 16];
            mc::random_in_ball(rng, &mut x[..n]);
            mc::random_in_ball(rng, &mut y[..n]);
            let d2: f64 = x[..n].iter().zip(&y[..n]).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.powf(-0.5 * lambda)
        })
    } else {
        // |x-y|^{-λ} has infinite variance here; sample the displacement
        // with density ∝ |z|^{-λ} instead, leaving a bounded weight
        let radial = RadialSampler::new(n, lambda, 2.0);
        let est = batched_mean(samples, seed, |rng| {
            let mut x = [0.0; 16];
            let mut dir = [0.0; 16];
            mc::random_in_ball(rng, &mut x[..n]);
            mc::random_direction(rng, &mut dir[..n]);
            let rho = radial.radius(rng);
            let d2: f64 = x[..n]
                .iter()
                .zip(&dir[..n])
                .map(|(a, w)| (a + rho * w).powi(2))
                .sum();
            if d2 < 1.0 {
                1.0
            } else {
                0.0
            }
        });
        Estimate {
            value: est.value * radial.weight / vol,
            stderr: est.stderr * radial.weight / vol,
        }
    };
    let scale = 0.5 * vol * vol;
    Estimate {
        value: est.value * scale,
        stderr: est.stderr * scale,
    }
}

/// Energy of the ball of volume `m`.
pub fn ball_energy(params: &RieszParams, m: Mass, constants: &BallConstants) -> EnergyBreakdown {
    let ratio = m.value() / constants.volume;
    EnergyBreakdown::new(
        ratio.powf(params.perimeter_exp()) * constants.surface,
        ratio.powf(params.riesz_exp()) * constants.riesz_self,
    )
}

/// `(2^{1/N}-1)/(1-2^{(λ-N)/N})`: the value of the split ratio `f` at `s = 1/2`.
pub fn half_split_ratio(params: &RieszParams) -> f64 {
    let n = params.dimension() as f64;
    (2f64.powf(1.0 / n) - 1.0) / (1.0 - 2f64.powf((params.exponent() - n) / n))
}

/// Critical mass where one ball and two half-mass balls at infinite distance
/// have equal energy, from its closed form.
pub fn critical_mass(params: &RieszParams, constants: &BallConstants) -> f64 {
    let base = half_split_ratio(params) * constants.surface / constants.riesz_self;
    base.powf(1.0 / params.gap_exp()) * constants.volume
}

/// Energy of one ball of mass `m` minus that of two balls of mass `m/2`.
fn two_ball_excess(params: &RieszParams, constants: &BallConstants, m: f64) -> f64 {
    let one = ball_energy(params, Mass(m), constants).total;
    let two = 2.0 * ball_energy(params, Mass(0.5 * m), constants).total;
    one - two
}

/// The same critical mass located by bisection on the one-ball/two-ball
/// energy difference, independent of the closed form.
pub fn crossing_mass(params: &RieszParams, constants: &BallConstants) -> Result<f64> {
    let excess = |m: f64| two_ball_excess(params, constants, m);
    let start = constants.volume;
    let (mut lo, mut hi) = (start, start);
    if excess(start) < 0.0 {
        while excess(hi) < 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Internal("crossing bracket diverged upward".into()));
            }
        }
        lo = 0.5 * hi;
    } else {
        while excess(lo) >= 0.0 {
            lo *= 0.5;
            if lo < f64::MIN_POSITIVE {
                return Err(Error::Internal("crossing bracket collapsed to zero".into()));
            }
        }
        hi = 2.0 * lo;
    }
    if !(excess(lo) < 0.0 && excess(hi) >= 0.0) {
        return Err(Error::Internal(
            "crossing bracket does not straddle a root".into(),
        ));
    }
    // bisect down to floating-point resolution of the bracket
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `m_*(1-δ)^{-N/(N+1-λ)}`: the enlarged binding range obtained when the ball
/// energy bound holds with `D(B_1)` replaced by `(1-δ)D(B_1)`.
pub fn conditional_threshold(params: &RieszParams, constants: &BallConstants, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("delta must be in (0,1), got {delta}")));
    }
    Ok(critical_mass(params, constants) * (1.0 - delta).powf(-1.0 / params.gap_exp()))
}
