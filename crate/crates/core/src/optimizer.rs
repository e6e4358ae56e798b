//! Volume-constrained pattern search over planar star-shaped domains.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{EnergyBreakdown, Mass, RieszParams};
use crate::quadrature::{total_energy, FourierShape};

/// Relative decrease below which a proposal counts as no improvement.
pub const NOISE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeOptions {
    /// Cell size as a fraction of the current base radius `r0`.
    pub h: f64,
    /// Perimeter quadrature nodes.
    pub nodes: usize,
    /// Budget of energy evaluations.
    pub max_iter: usize,
    pub step_init: f64,
    pub step_min: f64,
    /// Seeds the coordinate order of each sweep.
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            h: 0.01,
            nodes: 1024,
            max_iter: 10_000,
            step_init: 0.1,
            step_min: 1e-4,
            seed: 0,
        }
    }
}

impl OptimizeOptions {
    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h < 1.0) {
            return Err(Error::param(format!(
                "relative cell size must be in (0,1), got {}",
                self.h
            )));
        }
        if !(self.step_min > 0.0 && self.step_init >= self.step_min) {
            return Err(Error::param("need 0 < step_min <= step_init"));
        }
        if self.nodes < 64 {
            return Err(Error::param("perimeter quadrature needs at least 64 nodes"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub shape: FourierShape,
    pub energy: EnergyBreakdown,
    /// Energy evaluations spent.
    pub iterations: usize,
    /// The step fell below `step_min` before the budget ran out.
    pub converged: bool,
    /// `(iteration, total)` at the start and after every accepted step.
    pub history: Vec<(usize, f64)>,
}

/// Energy of the shape with the given profile coefficients, rescaled to mass `m`.
///
/// `None` when the profile is not positive.
fn evaluate(
    params: &RieszParams,
    m: f64,
    modes: usize,
    x: &[f64],
    opts: &OptimizeOptions,
) -> Result<Option<(FourierShape, EnergyBreakdown)>> {
    let Ok(unit) = FourierShape::new(1.0, x[..modes].to_vec(), x[modes..].to_vec()) else {
        return Ok(None);
    };
    let shape = unit.with_area(m)?;
    let e = total_energy(&shape, params, opts.h * shape.base_radius(), opts.nodes)?;
    Ok(Some((shape, e)))
}

/// Pattern search from the disk of mass `m` over `modes` Fourier modes.
pub fn optimize_shape(
    params: &RieszParams,
    m: f64,
    modes: usize,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult> {
    Mass::new(m)?;
    optimize_from(params, m, &FourierShape::disk(1.0)?, modes, opts)
}

/// Pattern search from `start`, padded with zero coefficients to `modes`.
///
/// Each proposal moves one coefficient by `±step` and rescales `r0` so the
/// area is exactly `m`. A proposal is accepted only if it lowers the total
/// by more than [`NOISE_FLOOR`] relative. A sweep over all coefficients in a
/// seeded random order without acceptance halves the step.
pub fn optimize_from(
    params: &RieszParams,
    m: f64,
    start: &FourierShape,
    modes: usize,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult> {
    Mass::new(m)?;
    opts.validate()?;
    if modes == 0 {
        return Err(Error::param("need at least one Fourier mode"));
    }
    if start.modes() > modes {
        return Err(Error::param(format!(
            "start shape has {} modes, more than the {modes} optimized",
            start.modes()
        )));
    }
    let mut x = vec![0.0; 2 * modes];
    x[..start.modes()].copy_from_slice(start.cos_coeffs());
    x[modes..modes + start.modes()].copy_from_slice(start.sin_coeffs());

    let (mut shape, mut energy) = evaluate(params, m, modes, &x, opts)?
        .ok_or_else(|| Error::param("start shape is not star-shaped"))?;
    let mut iterations = 0;
    let mut history = vec![(0, energy.total)];
    let mut step = opts.step_init;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..x.len()).collect();

    'search: while step >= opts.step_min {
        order.shuffle(&mut rng);
        let mut improved = false;
        for &i in &order {
            for sign in [1.0, -1.0] {
                if iterations >= opts.max_iter {
                    break 'search;
                }
                iterations += 1;
                let mut trial = x.clone();
                trial[i] += sign * step;
                if let Some((s, e)) = evaluate(params, m, modes, &trial, opts)? {
                    if e.total < energy.total - NOISE_FLOOR * energy.total.abs() {
                        x = trial;
                        shape = s;
                        energy = e;
                        history.push((iterations, e.total));
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(OptimizationResult {
        shape,
        energy,
        iterations,
        converged: step < opts.step_min,
        history,
    })
}

/// One point of a perturbation curve; `total` is `None` when infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub amplitude: f64,
    pub total: Option<f64>,
}

/// Energies of `r0(ε)(1 + ε cos kθ)` at area `m` for each `ε`.
pub fn perturbation_curve(
    params: &RieszParams,
    m: f64,
    mode: usize,
    amplitudes: &[f64],
    opts: &OptimizeOptions,
) -> Result<Vec<CurvePoint>> {
    Mass::new(m)?;
    opts.validate()?;
    if mode < 2 {
        return Err(Error::param(
            "mode must be at least 2; mode 1 is a translation to first order",
        ));
    }
    amplitudes
        .iter()
        .map(|&eps| {
            let mut x = vec![0.0; 2 * mode];
            x[mode - 1] = eps;
            let total = evaluate(params, m, mode, &x, opts)?.map(|(_, e)| e.total);
            Ok(CurvePoint {
                amplitude: eps,
                total,
            })
        })
        .collect()
}
