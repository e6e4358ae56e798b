//! Integrals over a pair of points in the same unit cell `[0,1]^N`.
//!
//! The difference `z = x - y` of two independent uniform points in the cell
//! has density `w(z) = Π (1 - |z_i|)_+`. Both the kernel integral
//! `γ(N, q) = ∬ |x-y|^{-q}` and the distance law are integrals against `w`.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::mc::{batched_mean, random_direction, Estimate};
use crate::numerics::tanh_sinh;
use crate::params::sphere_area_unchecked;

const CACHE_FILE: &str = "cell_integrals.tsv";
const GAMMA_NODES: usize = 120;

/// Environment variable naming the directory of the persisted cache.
pub const CACHE_DIR_ENV: &str = "DROPKIT_CACHE_DIR";

type Key = (usize, u64);

fn memo() -> &'static Mutex<HashMap<Key, f64>> {
    static MEMO: OnceLock<Mutex<HashMap<Key, f64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(load_cache_file().unwrap_or_default()))
}

fn cache_path() -> PathBuf {
    let dir = std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("dropkit-cache"));
    dir.join(CACHE_FILE)
}

fn load_cache_file() -> Option<HashMap<Key, f64>> {
    let text = std::fs::read_to_string(cache_path()).ok()?;
    let mut map = HashMap::new();
    for line in text.lines() {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            continue;
        }
        let parsed = (
            f[0].parse::<usize>(),
            u64::from_str_radix(f[1], 16),
            u64::from_str_radix(f[2], 16),
        );
        if let (Ok(n), Ok(q), Ok(v)) = parsed {
            map.insert((n, q), f64::from_bits(v));
        }
    }
    Some(map)
}

fn append_cache_file(key: Key, value: f64) {
    let path = cache_path();
    if let Some(dir) = path.parent() {
        let _ = std::fs::create_dir_all(dir);
    }
    // one short line per append; readers skip malformed lines
    if let Ok(mut f) = std::fs::OpenOptions::new().create(true).append(true).open(&path) {
        let _ = writeln!(f, "{}\t{:016x}\t{:016x}", key.0, key.1, value.to_bits());
    }
}

/// `γ(N, q) = ∬_{[0,1]^N × [0,1]^N} |x-y|^{-q} dx dy` for `q < N`.
///
/// Integrated deterministically against the distance law of the cell,
/// `γ = N^{-q/2} + q ∫_0^{√N} r^{-q-1} F(r) dr`, with the integral split at
/// the kinks `r = √j`. Values are memoised and appended to
/// `$DROPKIT_CACHE_DIR/cell_integrals.tsv` (default: a `dropkit-cache`
/// directory under the system temp dir). `q = 0` returns exactly 1.
pub fn cell_self_integral(dim: usize, q: f64) -> Result<f64> {
    if !(1..=3).contains(&dim) {
        return Err(Error::param(format!("cell dimension {dim} out of range")));
    }
    if !(q.is_finite() && q < dim as f64) {
        return Err(Error::param(format!(
            "kernel |z|^-{q} is not integrable over a cell in dimension {dim}"
        )));
    }
    if q == 0.0 {
        return Ok(1.0);
    }
    let key = (dim, q.to_bits());
    if let Some(v) = memo().lock().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let top = (dim as f64).sqrt();
    let mut knots: Vec<f64> = (0..=dim).map(|j| (j as f64).sqrt()).collect();
    knots.dedup();
    let integral: f64 = knots
        .windows(2)
        .map(|w| {
            tanh_sinh(
                |r| r.powf(-q - 1.0) * cell_distance_cdf(dim, r),
                w[0],
                w[1],
                GAMMA_NODES,
            )
        })
        .sum();
    let value = top.powf(-q) + q * integral;
    memo().lock().expect("cache lock").insert(key, value);
    append_cache_file(key, value);
    Ok(value)
}

/// Monte Carlo estimate of `γ(N, q)`, used as an independent oracle.
///
/// In polar coordinates about `z = 0` the radial integral of
/// `ρ^{N-1-q} Π(1 - ρ|ω_i|)` is a polynomial integral done exactly, so only
/// the direction `ω` is sampled.
pub fn cell_self_integral_mc(dim: usize, q: f64, samples: u64, seed: u64) -> Result<Estimate> {
    if !(1..=16).contains(&dim) {
        return Err(Error::param(format!("cell dimension {dim} out of range")));
    }
    if !(q.is_finite() && q < dim as f64) || samples < 2 {
        return Err(Error::param("need q < N and at least two samples"));
    }
    let p = dim as f64 - q;
    let sphere = sphere_area_unchecked(dim);
    let est = batched_mean(samples, seed, |rng| {
        let mut w = [0.0; 16];
        let dir = &mut w[..dim];
        random_direction(rng, dir);
        let mut amax: f64 = 0.0;
        for a in dir.iter_mut() {
            *a = a.abs();
            amax = amax.max(*a);
        }
        // coefficients of Π (1 - a_i ρ)
        let mut coef = [0.0; 17];
        coef[0] = 1.0;
        for (i, &a) in dir.iter().enumerate() {
            for k in (1..=i + 1).rev() {
                coef[k] -= a * coef[k - 1];
            }
        }
        let reach = 1.0 / amax;
        let mut power = reach.powf(p);
        let mut acc = 0.0;
        for (k, c) in coef[..=dim].iter().enumerate() {
            acc += c * power / (p + k as f64);
            power *= reach;
        }
        acc
    });
    Ok(Estimate {
        value: sphere * est.value,
        stderr: sphere * est.stderr,
    })
}

const CDF_NODES: usize = 30;

/// `P(|X - Y| < r)` for independent uniform points in the unit cube `[0,1]^N`.
///
/// Computed from `G_n(s) = ∫_0^{min(1,√s)} (1-z) G_{n-1}(s - z²) dz`,
/// `G_0 = 1`, as `2^N G_N(r²)`; each level is integrated in the angle
/// `z = √s sin φ`, split where the inner argument crosses an integer.
pub fn cell_distance_cdf(dim: usize, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if r * r >= dim as f64 {
        return 1.0;
    }
    2f64.powi(dim as i32) * cube_mass(dim, r * r)
}

fn cube_mass(n: usize, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    if s >= n as f64 {
        return 0.5f64.powi(n as i32);
    }
    if n == 1 {
        let t = s.sqrt().min(1.0);
        return t - 0.5 * t * t;
    }
    let root = s.sqrt();
    let phi_max = if s <= 1.0 { FRAC_PI_2 } else { (1.0 / root).asin() };
    // inner argument s cos²φ crosses j at φ_j = acos(√(j/s))
    let mut cuts = vec![0.0];
    for j in 1..n {
        let jf = j as f64;
        if jf < s {
            let phi = (jf / s).sqrt().acos();
            if phi > 0.0 && phi < phi_max {
                cuts.push(phi);
            }
        }
    }
    cuts.push(phi_max);
    cuts.sort_by(f64::total_cmp);
    let integrand = |phi: f64| {
        let (sn, cs) = phi.sin_cos();
        let z = root * sn;
        (1.0 - z) * cube_mass(n - 1, s * cs * cs) * root * cs
    };
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| tanh_sinh(integrand, w[0], w[1], CDF_NODES))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `Γ(k/2)` for positive integers `k`.
    fn gamma_half(k: usize) -> f64 {
        let (mut j, mut v) = if k.is_multiple_of(2) {
            (2, 1.0)
        } else {
            (1, std::f64::consts::PI.sqrt())
        };
        while j < k {
            v *= j as f64 / 2.0;
            j += 2;
        }
        v
    }

    /// For `r ≤ 1` the ball of radius `r` stays inside `[-1,1]^N`, and
    /// expanding `Π(1 - |z_i|)` gives moments of the ball in closed form.
    fn small_r_cdf(n: usize, r: f64) -> f64 {
        let mut binom = 1.0;
        let mut total = 0.0;
        for k in 0..=n {
            let j =
                2.0 * std::f64::consts::PI.powf((n - k) as f64 / 2.0) / (gamma_half(n + k) * (n + k) as f64);
            total += if k % 2 == 0 { 1.0 } else { -1.0 } * binom * j * r.powi((n + k) as i32);
            binom *= (n - k) as f64 / (k + 1) as f64;
        }
        total
    }

    #[test]
    fn square_cdf_polynomial() {
        for r in [0.1, 0.5, 0.9, 1.0] {
            let exact = std::f64::consts::PI * r * r - 8.0 / 3.0 * r.powi(3) + 0.5 * r.powi(4);
            assert!((cell_distance_cdf(2, r) - exact).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn cube_cdf_matches_moment_expansion() {
        for r in [0.2, 0.6, 0.95] {
            let v = cell_distance_cdf(3, r);
            assert!((v - small_r_cdf(3, r)).abs() < 1e-11, "r={r}: {v}");
        }
    }

    #[test]
    fn cdf_is_monotone_and_saturates() {
        for n in [2, 3] {
            let mut prev = 0.0;
            for i in 1..=200 {
                let r = i as f64 * (n as f64).sqrt() / 200.0;
                let v = cell_distance_cdf(n, r);
                assert!(v >= prev - 1e-13, "n={n} r={r}");
                prev = v;
            }
            assert!((prev - 1.0).abs() < 1e-12);
            let near = cell_distance_cdf(n, (n as f64).sqrt() * (1.0 - 1e-9));
            assert!((near - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn self_integral_closed_forms() {
        assert_eq!(cell_self_integral(3, 0.0).unwrap(), 1.0);
        assert!(cell_self_integral(2, 2.0).is_err());
        // E|z|^2 = N/6
        for n in [2, 3] {
            let v = cell_self_integral(n, -2.0).unwrap();
            assert!((v - n as f64 / 6.0).abs() < 1e-12, "n={n}: {v}");
        }
        // mean distance in the unit square and the unit cube
        let sq = (2.0 + 2f64.sqrt() + 5.0 * (1.0 + 2f64.sqrt()).ln()) / 15.0;
        assert!((cell_self_integral(2, -1.0).unwrap() - sq).abs() < 1e-11);
        let robbins = 0.661_707_182_267_176_2;
        assert!((cell_self_integral(3, -1.0).unwrap() - robbins).abs() < 1e-10);
    }

    #[test]
    fn self_integral_against_directional_mc() {
        for (n, q) in [(2usize, 1.0f64), (3, 1.0), (2, 1.5), (3, 2.5), (2, -0.5)] {
            let g = cell_self_integral(n, q).unwrap();
            let mc = cell_self_integral_mc(n, q, 1_000_000, 11).unwrap();
            assert!(
                (g - mc.value).abs() < 5.0 * mc.stderr,
                "n={n} q={q}: {g} vs {} ± {}",
                mc.value,
                mc.stderr
            );
        }
        let e = cell_self_integral_mc(3, 0.0, 200_000, 5).unwrap();
        assert!((e.value - 1.0).abs() < 5.0 * e.stderr);
    }
}
