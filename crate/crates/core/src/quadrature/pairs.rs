//! Pair sums over the cells of a [`GridShape`].
//!
//! Every double integral here depends on the cell set only through the
//! number of ordered cell pairs at each lattice offset. Those counts are
//! computed exactly from the runs, grouped by squared lattice distance
//! `k = |Δ|²`, and then summed in increasing `k`. Integer counts make the
//! result independent of thread count, translations and lattice
//! reflections, bit for bit.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{batched_mean, random_direction, Estimate, RadialSampler};
use crate::numerics::{gauss_legendre, integrate_gl, tanh_sinh};
use crate::quadrature::cell::{cell_distance_cdf, cell_self_integral};
use crate::quadrature::grid::GridShape;

/// Number of ordered pairs of distinct cells at each squared lattice distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDistanceCounts {
    cells: u64,
    counts: Vec<u64>,
}

impl PairDistanceCounts {
    /// Number of cells (the count at `k = 0`).
    pub fn cells(&self) -> u64 {
        self.cells
    }

    /// Ordered pairs at squared distance `k`, for `k ≥ 1`.
    pub fn count(&self, k: usize) -> u64 {
        if k == 0 {
            0
        } else {
            self.counts.get(k).copied().unwrap_or(0)
        }
    }

    /// Largest squared distance with a nonzero count (0 for a single cell).
    pub fn max_k(&self) -> usize {
        self.counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    /// `(k, count)` for every occupied squared distance `k ≥ 1`, increasing.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k, c))
    }

    /// `Σ_{k≥1} count_k · k^{p/2}`.
    fn power_sum(&self, p: f64) -> f64 {
        self.iter()
            .map(|(k, c)| c as f64 * (k as f64).powf(0.5 * p))
            .sum()
    }
}

/// Ordered pair counts by squared lattice distance.
///
/// For each offset of the leading indices, the counts along the last axis
/// are the convolution of two boxcars per run pair; they are accumulated as
/// four second-difference impulses and recovered by two prefix sums.
pub fn pair_distance_counts(g: &GridShape) -> PairDistanceCounts {
    let d = g.dim();
    let bounds = g.index_bounds();
    let spans: Vec<i64> = bounds.iter().map(|(lo, hi)| hi - lo).collect();
    let kmax: i64 = spans.iter().map(|s| s * s).sum();
    let sx = spans[d - 1];

    let mut rows: HashMap<[i64; 2], Vec<(i64, i64)>> = HashMap::new();
    for r in g.runs() {
        rows.entry(r.prefix).or_default().push((r.start, r.end));
    }
    let mut row_keys: Vec<[i64; 2]> = rows.keys().copied().collect();
    row_keys.sort_unstable();

    let mut offsets: Vec<[i64; 2]> = Vec::new();
    let s0 = spans[0];
    let s1 = if d == 3 { spans[1] } else { 0 };
    for a in -s0..=s0 {
        for b in -s1..=s1 {
            offsets.push([a, b]);
        }
    }

    let width = (2 * sx + 3) as usize;
    let counts = offsets
        .par_iter()
        .fold(
            || (vec![0u64; kmax as usize + 1], vec![0i64; width]),
            |(mut acc, mut slice), q| {
                slice.iter_mut().for_each(|v| *v = 0);
                let mut any = false;
                for p1 in &row_keys {
                    let p2 = [p1[0] + q[0], p1[1] + q[1]];
                    let Some(second) = rows.get(&p2) else { continue };
                    any = true;
                    for &(s1, e1) in &rows[p1] {
                        for &(s2, e2) in second {
                            let base = s2 - e1 + sx;
                            let l1 = e1 - s1 + 1;
                            let l2 = e2 - s2 + 1;
                            slice[base as usize] += 1;
                            slice[(base + l1) as usize] -= 1;
                            slice[(base + l2) as usize] -= 1;
                            slice[(base + l1 + l2) as usize] += 1;
                        }
                    }
                }
                if any {
                    let q2 = q[0] * q[0] + q[1] * q[1];
                    let (mut first, mut value) = (0i64, 0i64);
                    for (i, v) in slice.iter().enumerate() {
                        first += v;
                        value += first;
                        if value > 0 {
                            let dx = i as i64 - sx;
                            acc[(q2 + dx * dx) as usize] += value as u64;
                        }
                    }
                }
                (acc, slice)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || vec![0u64; kmax as usize + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let cells = g.cell_count();
    debug_assert_eq!(counts[0], cells);
    PairDistanceCounts { cells, counts }
}

/// `D = ½ ∬_{Ω×Ω} |x-y|^{-λ}` on the cell union.
///
/// Distinct cells are treated as point masses at their centres; each cell
/// paired with itself contributes the exact `h^{2N-λ} γ(N, λ)`.
pub fn riesz_energy_grid(g: &GridShape, lambda: f64) -> Result<f64> {
    let n = g.dim() as f64;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    if lambda >= n {
        return Err(Error::param(format!(
            "lambda must be in (0,N): self-interaction diverges for lambda={lambda}, N={}",
            g.dim()
        )));
    }
    Ok(0.5 * kernel_sum(g, -lambda)?)
}

/// `∬_{Ω×Ω} |x-y|^p` on the cell union, without the factor ½.
pub fn moment_integral(g: &GridShape, p: f64) -> Result<f64> {
    if !(p.is_finite() && p > -(g.dim() as f64)) {
        return Err(Error::param(format!(
            "moment exponent must exceed -N: got p={p}, N={}",
            g.dim()
        )));
    }
    if p == 0.0 {
        let m = g.measure();
        return Ok(m * m);
    }
    kernel_sum(g, p)
}

fn kernel_sum(g: &GridShape, p: f64) -> Result<f64> {
    let h = g.cell_size();
    let n = g.dim() as i32;
    let gamma = cell_self_integral(g.dim(), -p)?;
    let counts = pair_distance_counts(g);
    let pairs = counts.power_sum(p) + counts.cells() as f64 * gamma;
    Ok(h.powi(2 * n) * h.powf(p) * pairs)
}

/// Monte Carlo estimate of `½ ∬_{Ω×Ω} |x-y|^{-λ}` on the cell union.
///
/// For `2λ < N` both points are uniform in `Ω`. Otherwise the plain
/// estimator has infinite variance, so `y = x + ρω` is drawn with `ρ`
/// distributed like `ρ^{N-1-λ}` on `[0, diam]` and weighted by `1_Ω(y)`.
/// Streams are split per batch from `seed`; repeat runs are bit-identical.
pub fn riesz_energy_mc(g: &GridShape, lambda: f64, samples: u64, seed: u64) -> Result<Estimate> {
    let n = g.dim();
    if !(lambda.is_finite() && lambda > 0.0 && lambda < n as f64) {
        return Err(Error::param(format!(
            "lambda must be in (0,N): got lambda={lambda}, N={n}"
        )));
    }
    if samples < 10_000 {
        return Err(Error::param("Monte Carlo needs at least 10^4 samples"));
    }
    let sampler = CellSampler::new(g);
    let vol = g.measure();
    let est = if 2.0 * lambda < n as f64 {
        batched_mean(samples, seed, |rng| {
            let x = sampler.point(rng);
            let y = sampler.point(rng);
            let d2: f64 = x[..n].iter().zip(&y[..n]).map(|(a, b)| (a - b).powi(2)).sum();
            d2.powf(-0.5 * lambda)
        })
        .scaled(0.5 * vol * vol)
    } else {
        let radial = RadialSampler::new(n, lambda, g.diameter_bound());
        batched_mean(samples, seed, |rng| {
            let mut x = sampler.point(rng);
            let mut dir = [0.0; 3];
            random_direction(rng, &mut dir[..n]);
            let rho = radial.radius(rng);
            for k in 0..n {
                x[k] += rho * dir[k];
            }
            if g.contains(&x[..n]) {
                1.0
            } else {
                0.0
            }
        })
        .scaled(0.5 * vol * radial.weight)
    };
    Ok(est)
}

struct CellSampler<'a> {
    g: &'a GridShape,
    cumulative: Vec<u64>,
}

impl<'a> CellSampler<'a> {
    fn new(g: &'a GridShape) -> Self {
        let mut total = 0;
        let cumulative = g
            .runs()
            .iter()
            .map(|r| {
                total += r.len() as u64;
                total
            })
            .collect();
        CellSampler { g, cumulative }
    }

    fn point<R: rand::Rng>(&self, rng: &mut R) -> [f64; 3] {
        let total = *self.cumulative.last().expect("nonempty shape");
        let pick = rng.random_range(0..total);
        let idx = self.cumulative.partition_point(|&c| c <= pick);
        let run = &self.g.runs()[idx];
        let before = if idx == 0 { 0 } else { self.cumulative[idx - 1] };
        let x = run.start + (pick - before) as i64;
        let d = self.g.dim();
        let h = self.g.cell_size();
        let origin = self.g.origin();
        let mut out = [0.0; 3];
        for k in 0..d {
            let i = if k == d - 1 { x } else { run.prefix[k] };
            let u: f64 = rng.random();
            out[k] = origin[k] + h * (i as f64 + u);
        }
        out
    }
}

/// Direct and layer-cake evaluations of `∬_{Ω×Ω} |x-y|^{1-λ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerCakeReport {
    pub direct: f64,
    pub layered: f64,
    pub rel_err: f64,
}

/// Compares [`moment_integral`] at `p = 1-λ` with
/// `(λ-1) ∫_0^∞ R^{-λ} Φ(R) dR`, `Φ(R) = |{(x,y) ∈ Ω² : |x-y| < R}|`.
///
/// `Φ` is assembled from the pair counts (steps at `h√k`) and the exact
/// self-pair distance law of a cell. The `R`-integral is split into panels
/// at every jump and kink of `Φ` up to the diameter; each panel uses
/// `nodes` Gauss-Legendre points, the panel at the origin uses tanh-sinh.
/// Beyond the diameter `Φ` is constant and the tail is added exactly.
pub fn layer_cake_check(g: &GridShape, lambda: f64, nodes: usize) -> Result<LayerCakeReport> {
    if !(lambda > 1.0 && lambda <= 2.0) {
        return Err(Error::param(format!(
            "layer-cake check needs lambda in (1,2], got {lambda}"
        )));
    }
    if nodes < 2 {
        return Err(Error::param("layer-cake check needs at least 2 nodes per panel"));
    }
    let direct = moment_integral(g, 1.0 - lambda)?;

    let h = g.cell_size();
    let dim = g.dim();
    let unit_pair = h.powi(2 * dim as i32);
    let counts = pair_distance_counts(g);

    let mut knots: Vec<f64> = (1..=dim).map(|j| (j as f64).sqrt()).collect();
    knots.extend(counts.iter().map(|(k, _)| (k as f64).sqrt()));
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let top = *knots.last().expect("at least one kink");

    let rule = gauss_legendre(nodes);
    // Φ(R) in lattice units; the pair part is constant on each panel
    let mut below = 0.0;
    let mut pairs = counts.iter().peekable();
    let mut lower = 0.0;
    let mut integral = 0.0;
    for &upper in &knots {
        while let Some(&(k, c)) = pairs.peek() {
            if (k as f64).sqrt() <= lower {
                below += c as f64;
                pairs.next();
            } else {
                break;
            }
        }
        let phi = |r: f64| (below + counts.cells() as f64 * cell_distance_cdf(dim, r)) * r.powf(-lambda);
        integral += if lower == 0.0 {
            tanh_sinh(phi, lower, upper, nodes)
        } else {
            integrate_gl(phi, lower, upper, &rule)
        };
        lower = upper;
    }
    let total_pairs = counts.cells() as f64 + counts.iter().map(|(_, c)| c as f64).sum::<f64>();
    // ∫_top^∞ Φ_∞ R^{-λ} dR
    integral += total_pairs * top.powf(1.0 - lambda) / (lambda - 1.0);
    let layered = (lambda - 1.0) * integral * unit_pair * h.powf(1.0 - lambda);
    let rel_err = (direct - layered).abs() / direct.abs();
    Ok(LayerCakeReport {
        direct,
        layered,
        rel_err,
    })
}
