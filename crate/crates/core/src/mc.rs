//! Seeded, thread-count independent Monte Carlo plumbing.
//!
//! Samples are split into fixed batches. Batch `i` draws from a ChaCha8
//! generator seeded with the run seed and switched to stream `i`, so each
//! batch is reproducible on its own; batch statistics are merged in batch
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::params::ball_volume_unchecked;

pub(crate) const BATCH: u64 = 1 << 16;

/// Mean of `sample` over `n` draws, with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// The estimate of `factor` times the same quantity.
    pub fn scaled(self, factor: f64) -> Estimate {
        Estimate {
            value: self.value * factor,
            stderr: self.stderr * factor.abs(),
        }
    }
}

#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }
}

pub(crate) fn batched_mean<F>(samples: u64, seed: u64, sample: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let batches = samples.div_ceil(BATCH);
    let per_batch: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH.min(samples - b * BATCH);
            let mut m = Moments {
                n: 0.0,
                mean: 0.0,
                m2: 0.0,
            };
            for _ in 0..count {
                let x = sample(&mut rng);
                m.n += 1.0;
                let d = x - m.mean;
                m.mean += d / m.n;
                m.m2 += d * (x - m.mean);
            }
            m
        })
        .collect();
    let total = per_batch.into_iter().fold(
        Moments {
            n: 0.0,
            mean: 0.0,
            m2: 0.0,
        },
        Moments::merge,
    );
    let var = if total.n > 1.0 {
        total.m2 / (total.n - 1.0)
    } else {
        0.0
    };
    Estimate {
        value: total.mean,
        stderr: (var / total.n).sqrt(),
    }
}

/// Uniform direction on the unit sphere of `R^out.len()`.
pub(crate) fn random_direction<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
            norm2 += *x * *x;
        }
        if norm2 > 1e-300 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// Uniform point in the unit ball of `R^out.len()`.
pub(crate) fn random_in_ball<R: Rng>(rng: &mut R, out: &mut [f64]) {
    random_direction(rng, out);
    let n = out.len() as f64;
    let r = rng.random::<f64>().powf(1.0 / n);
    out.iter_mut().for_each(|x| *x *= r);
}

/// Volume-normalised radial sampler: draws `ρ ∈ [0, reach]` with density
/// proportional to `ρ^{N-1-λ}`, so that
/// `∫_{|z|<reach} g(z) |z|^{-λ} dz = weight · E[g(ρ ω)]`.
pub(crate) struct RadialSampler {
    inv_power: f64,
    reach: f64,
    pub weight: f64,
}

impl RadialSampler {
    pub fn new(n: usize, kernel_exp: f64, reach: f64) -> Self {
        let p = n as f64 - kernel_exp;
        let sphere = n as f64 * ball_volume_unchecked(n);
        RadialSampler {
            inv_power: 1.0 / p,
            reach,
            weight: sphere * reach.powf(p) / p,
        }
    }

    pub fn radius<R: Rng>(&self, rng: &mut R) -> f64 {
        self.reach * rng.random::<f64>().powf(self.inv_power)
    }
}
