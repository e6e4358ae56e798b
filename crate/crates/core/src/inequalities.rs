//! The scalar inequalities behind strict binding and ball uniqueness.
//!
//! Everything here is closed-form arithmetic on ball constants; the scans
//! evaluate the formulas on endpoint-free grids `s_i = i/(G+1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::analytic::{ball_energy, critical_mass, half_split_ratio, BallConstants};
use crate::error::{Error, Result};
use crate::params::{Mass, RieszParams};

/// Absolute tolerance for closed-form inequality assertions.
pub const TOL_G: f64 = 1e-12;

/// Smallest `s` used when evaluating `h` near zero.
const S_FLOOR: f64 = 1e-300;

/// Endpoint-free grid `i/(G+1)`, `i = 1..=G`, symmetric about 1/2.
pub fn open_grid(size: usize) -> Vec<f64> {
    let d = (size + 1) as f64;
    (1..=size).map(|i| i as f64 / d).collect()
}

fn check_open_unit(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("s must be in (0,1), got {s}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::param(format!("alpha must be in (0,2), got {alpha}")))
    }
}

/// `s^b + (1-s)^b - 1` with `b = (2N-λ)/N`; strictly negative on (0,1).
fn riesz_split_defect(params: &RieszParams, s: f64) -> f64 {
    let b = params.riesz_exp();
    s.powf(b) + (1.0 - s).powf(b) - 1.0
}

/// Split ratio
/// `f(s) = (s^a + (1-s)^a - 1) / (1 - s^b - (1-s)^b)`,
/// `a = (N-1)/N`, `b = (2N-λ)/N`.
pub fn f_of_s(params: &RieszParams, s: f64) -> Result<f64> {
    check_open_unit(s)?;
    let a = params.perimeter_exp();
    let num = s.powf(a) + (1.0 - s).powf(a) - 1.0;
    let den = -riesz_split_defect(params, s);
    if den <= 0.0 {
        return Err(Error::Internal(format!(
            "split ratio denominator {den} is not positive at s={s}"
        )));
    }
    Ok(num / den)
}

/// Result of scanning `f` for its minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FMinCertificate {
    pub min_value: f64,
    pub argmin: f64,
    pub closed_form: f64,
    pub matches_closed_form: bool,
}

/// Scans `f` on the open grid and compares its minimum with `f(1/2)`.
/// An odd `grid_size` places `s = 1/2` on the grid.
pub fn f_min_certify(params: &RieszParams, grid_size: usize) -> Result<FMinCertificate> {
    if grid_size < 3 {
        return Err(Error::param("grid_size must be at least 3"));
    }
    let grid = open_grid(grid_size);
    let values = grid
        .par_iter()
        .map(|&s| f_of_s(params, s))
        .collect::<Result<Vec<_>>>()?;
    let (idx, &min_value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let argmin = grid[idx];
    let closed_form = half_split_ratio(params);
    let cell = 1.0 / (grid_size + 1) as f64;
    let matches_closed_form =
        (min_value - closed_form).abs() <= 1e-10 && (argmin - 0.5).abs() <= cell * (1.0 + 1e-9);
    Ok(FMinCertificate {
        min_value,
        argmin,
        closed_form,
        matches_closed_form,
    })
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `g(s) = s^α + (1-s)^α - 1 + (2^{1-α}-1)/log 2 · (s log s + (1-s) log(1-s))`.
///
/// The entropy terms use `0 log 0 = 0`, so `s = 0` and `s = 1` are accepted.
pub fn g_alpha(alpha: f64, s: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::param(format!("s must be in [0,1], got {s}")));
    }
    let c = (2f64.powf(1.0 - alpha) - 1.0) / LN_2;
    let t = 1.0 - s;
    Ok(s.powf(alpha) + t.powf(alpha) - 1.0 + c * (xlogx(s) + xlogx(t)))
}

/// `h(s) = s(1-s) g''(s)` in closed form,
/// `α(α-1)(s^{α-1} + (1-s)^{α-1} - s^α - (1-s)^α) + (2^{1-α}-1)/log 2`,
/// for `s ∈ (0, 1/2]`. For `α < 1` the value diverges to `-∞` as `s → 0`;
/// `s` is floored at `1e-300` so the result stays finite.
pub fn h_alpha(alpha: f64, s: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Err(Error::param("h is not examined at alpha = 1"));
    }
    if !(s > 0.0 && s <= 0.5) {
        return Err(Error::param(format!("s must be in (0,1/2], got {s}")));
    }
    let s = s.max(S_FLOOR);
    let t = 1.0 - s;
    let c = (2f64.powf(1.0 - alpha) - 1.0) / LN_2;
    let v =
        alpha * (alpha - 1.0) * (s.powf(alpha - 1.0) + t.powf(alpha - 1.0) - s.powf(alpha) - t.powf(alpha))
            + c;
    Ok(if v.is_finite() { v } else { -f64::MAX })
}

/// Outcome of checking `g ≥ 0` together with the shape of `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaGReport {
    pub alpha: f64,
    pub s_grid: Vec<f64>,
    pub g_values: Vec<f64>,
    pub min_g: f64,
    /// Estimated sign change `s₁` of `h` on (0,1/2); `None` at `α = 1`.
    pub h_sign_change: Option<f64>,
    pub h_increasing: bool,
    pub h_sign_changes: usize,
    pub passed: bool,
}

/// Checks `g(s) ≥ -TOL_G` on the open grid, that `h` is increasing on
/// (0,1/2] and that `h` changes sign exactly once there.
pub fn lemma_g_verify(alpha: f64, grid_size: usize) -> Result<LemmaGReport> {
    if grid_size < 100 {
        return Err(Error::param("grid_size must be at least 100"));
    }
    lemma_g_scan(alpha, grid_size)
}

/// [`lemma_g_verify`] on grids down to 10 points, for quick looks.
/// Sign-change location and monotonicity are unreliable on coarse grids.
pub fn lemma_g_scan(alpha: f64, grid_size: usize) -> Result<LemmaGReport> {
    check_alpha(alpha)?;
    if grid_size < 10 {
        return Err(Error::param("grid_size must be at least 10"));
    }
    let s_grid = open_grid(grid_size);
    let g_values = s_grid
        .par_iter()
        .map(|&s| g_alpha(alpha, s))
        .collect::<Result<Vec<_>>>()?;
    let min_g = g_values.iter().copied().fold(f64::INFINITY, f64::min);
    let g_ok = min_g >= -TOL_G;

    if alpha == 1.0 {
        return Ok(LemmaGReport {
            alpha,
            s_grid,
            g_values,
            min_g,
            h_sign_change: None,
            h_increasing: true,
            h_sign_changes: 0,
            passed: g_ok,
        });
    }

    let hs = h_grid(grid_size);
    let h = hs
        .par_iter()
        .map(|&s| h_alpha(alpha, s))
        .collect::<Result<Vec<_>>>()?;
    let h_increasing = h.windows(2).all(|w| w[1] - w[0] > -TOL_G);
    let flips: Vec<usize> = (1..h.len())
        .filter(|&i| (h[i - 1] < 0.0) != (h[i] < 0.0))
        .collect();
    let h_sign_change = flips.first().map(|&i| {
        // linear interpolation between the bracketing grid points
        let (s0, s1, h0, h1) = (hs[i - 1], hs[i], h[i - 1], h[i]);
        if h1 != h0 {
            s0 - h0 * (s1 - s0) / (h1 - h0)
        } else {
            0.5 * (s0 + s1)
        }
    });
    let passed = g_ok && h_increasing && flips.len() == 1;
    Ok(LemmaGReport {
        alpha,
        s_grid,
        g_values,
        min_g,
        h_sign_change,
        h_increasing,
        h_sign_changes: flips.len(),
        passed,
    })
}

/// Grid `i/(2G)`, `i = 1..=G`, on (0,1/2] including 1/2.
fn h_grid(size: usize) -> Vec<f64> {
    let d = 2.0 * size as f64;
    (1..=size).map(|i| i as f64 / d).collect()
}

/// Lower bound on `E(m₁)`, `m₁ = s m`, from dilating a competitor of mass
/// `m₁` up to mass `m`:
/// `s^{(2N-λ)/N} E_m + (1 - s^{(N+1-λ)/N}) s^{(N-1)/N} (m/|B_1|)^{(N-1)/N} Per B_1`.
///
/// `e_m` is supplied by the caller (the ball energy, or a weakened variant).
pub fn binding_lower_bound(
    params: &RieszParams,
    m: f64,
    s: f64,
    e_m: f64,
    constants: &BallConstants,
) -> Result<f64> {
    check_open_unit(s)?;
    Mass::new(m)?;
    let iso = (m / constants.volume).powf(params.perimeter_exp()) * constants.surface;
    Ok(s.powf(params.riesz_exp()) * e_m
        + (1.0 - s.powf(params.gap_exp())) * s.powf(params.perimeter_exp()) * iso)
}

/// Certified lower bound on `E(sm) + E((1-s)m) - E(m)`:
/// `(s^b + (1-s)^b - 1) (m/|B_1|)^a Per B_1 · (D(B_1)/Per B_1 · (m/|B_1|)^{gap} - f(s))`.
pub fn binding_deficit_lower(params: &RieszParams, constants: &BallConstants, m: f64, s: f64) -> Result<f64> {
    Mass::new(m)?;
    let f = f_of_s(params, s)?;
    let ratio = m / constants.volume;
    let iso = ratio.powf(params.perimeter_exp()) * constants.surface;
    let load = constants.riesz_self / constants.surface * ratio.powf(params.gap_exp());
    Ok(riesz_split_defect(params, s) * iso * (load - f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingVerdict {
    StrictBindingCertified,
    Inconclusive,
}

/// Deficit lower bound evaluated across all splits `s` of one mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BindingReport {
    pub params: RieszParams,
    pub m: f64,
    pub s_grid: Vec<f64>,
    pub deficit_lb: Vec<f64>,
    pub min_deficit: f64,
    pub argmin_s: f64,
    pub verdict: BindingVerdict,
}

pub fn binding_scan(
    params: &RieszParams,
    constants: &BallConstants,
    m: f64,
    grid_size: usize,
) -> Result<BindingReport> {
    if grid_size < 100 {
        return Err(Error::param("grid_size must be at least 100"));
    }
    Mass::new(m)?;
    let s_grid = open_grid(grid_size);
    let deficit_lb = s_grid
        .par_iter()
        .map(|&s| binding_deficit_lower(params, constants, m, s))
        .collect::<Result<Vec<_>>>()?;
    let (idx, &min_deficit) = deficit_lb
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let verdict = if min_deficit > 0.0 {
        BindingVerdict::StrictBindingCertified
    } else {
        BindingVerdict::Inconclusive
    };
    Ok(BindingReport {
        params: *params,
        m,
        argmin_s: s_grid[idx],
        s_grid,
        deficit_lb,
        min_deficit,
        verdict,
    })
}

/// Ball energy at `m < m_*` minus the chained lower bound obtained by
/// dilating a mass-`m` set to the critical mass, assuming the ball is optimal
/// there. The two agree identically, so the result is zero up to rounding.
pub fn uniqueness_gap(params: &RieszParams, constants: &BallConstants, m: f64) -> Result<f64> {
    let m_star = critical_mass(params, constants);
    let mass = Mass::new(m)?;
    if m >= m_star {
        return Err(Error::param(format!(
            "uniqueness gap needs m < m* = {m_star}, got {m}"
        )));
    }
    let s = m / m_star;
    let e_star = ball_energy(params, Mass(m_star), constants).total;
    let bound = binding_lower_bound(params, m_star, s, e_star, constants)?;
    Ok(ball_energy(params, mass, constants).total - bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, l: f64) -> RieszParams {
        RieszParams::new(n, l).unwrap()
    }

    #[test]
    fn f_at_half_closed_forms() {
        let v = f_of_s(&p(3, 1.0), 0.5).unwrap();
        let expected = (2f64.cbrt() - 1.0) / (1.0 - 2f64.powf(-2.0 / 3.0));
        assert!((v - expected).abs() < 1e-14);
        assert!((v - 0.70242).abs() < 1e-5);
        let v = f_of_s(&p(2, 1.0), 0.5).unwrap();
        let expected = (2f64.sqrt() - 1.0) / (1.0 - 0.5f64.sqrt());
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn f_rejects_endpoints() {
        assert!(f_of_s(&p(3, 1.0), 0.0).is_err());
        assert!(f_of_s(&p(3, 1.0), 1.0).is_err());
    }

    #[test]
    fn f_min_scan_matches_half() {
        let c = f_min_certify(&p(3, 1.0), 10_001).unwrap();
        assert!(c.matches_closed_form);
        assert_eq!(c.argmin, 0.5);
        assert!((c.min_value - 0.70242).abs() < 1e-5);
        // even grid: 1/2 is not a node, but the argmin is one cell away
        let c = f_min_certify(&p(2, 1.9), 10_000).unwrap();
        assert!((c.argmin - 0.5).abs() <= 1.0 / 10_001.0 + 1e-15);
    }

    #[test]
    fn g_special_values() {
        for alpha in [0.1, 0.5, 1.0, 1.5, 1.99] {
            assert!(g_alpha(alpha, 0.5).unwrap().abs() < 1e-15);
            assert_eq!(g_alpha(alpha, 0.0).unwrap(), 0.0);
            assert!(g_alpha(alpha, 1e-300).unwrap().abs() < 1e-12);
        }
        for s in [0.1, 0.3, 0.77] {
            assert_eq!(g_alpha(1.0, s).unwrap(), 0.0);
        }
        assert!(g_alpha(2.0, 0.5).is_err());
        assert!(g_alpha(0.0, 0.5).is_err());
    }

    #[test]
    fn h_special_values() {
        let v = h_alpha(0.5, 0.5).unwrap();
        let expected = -0.25 * 2f64.sqrt() + (2f64.sqrt() - 1.0) / LN_2;
        assert!((v - expected).abs() < 1e-14);
        assert!((v - 0.2440).abs() < 1e-4);
        let v = h_alpha(1.5, 1e-200).unwrap();
        assert!((v - (0.5f64.sqrt() - 1.0) / LN_2).abs() < 1e-12);
        assert!((v + 0.42256).abs() < 1e-5);
        let v = h_alpha(0.5, 1e-300).unwrap();
        assert!(v.is_finite() && v < -1e100);
        assert!(h_alpha(1.0, 0.25).is_err());
        assert!(h_alpha(0.5, 0.75).is_err());
    }

    #[test]
    fn lemma_g_reports() {
        let r = lemma_g_verify(0.5, 100_000).unwrap();
        assert!(r.passed, "{:?}", (r.min_g, r.h_sign_changes));
        assert!(r.min_g >= -1e-12);
        let s1 = r.h_sign_change.unwrap();
        assert!(s1 > 0.0 && s1 < 0.5);
        assert!(lemma_g_verify(1.5, 100_000).unwrap().passed);
        let r = lemma_g_verify(1.0, 1000).unwrap();
        assert!(r.passed);
        assert_eq!(r.min_g, 0.0);
        assert!(lemma_g_verify(0.5, 10).is_err());
        assert!(lemma_g_scan(0.5, 10).unwrap().passed);
        assert!(lemma_g_scan(0.5, 9).is_err());
    }

    #[test]
    fn binding_lower_bound_limits() {
        let pr = p(3, 1.0);
        let c = BallConstants::radial(&pr);
        let e = ball_energy(&pr, Mass::new(2.0).unwrap(), &c).total;
        let v = binding_lower_bound(&pr, 2.0, 1.0 - 1e-12, e, &c).unwrap();
        assert!((v - e).abs() < 1e-9);
        assert!(binding_lower_bound(&pr, 2.0, 1.0, e, &c).is_err());
    }

    #[test]
    fn deficit_zero_at_critical_mass() {
        let pr = p(3, 1.0);
        let c = BallConstants::radial(&pr);
        let ms = critical_mass(&pr, &c);
        assert!(binding_deficit_lower(&pr, &c, ms, 0.5).unwrap().abs() < 1e-10);
    }

    #[test]
    fn binding_scan_verdicts() {
        let pr = p(3, 1.0);
        let c = BallConstants::radial(&pr);
        let r = binding_scan(&pr, &c, 3.0, 1000).unwrap();
        assert_eq!(r.verdict, BindingVerdict::StrictBindingCertified);
        let r = binding_scan(&pr, &c, 3.6, 1000).unwrap();
        assert_eq!(r.verdict, BindingVerdict::Inconclusive);
        assert!((r.argmin_s - 0.5).abs() < 2e-3);
    }

    #[test]
    fn uniqueness_gap_rows() {
        let pr = p(3, 1.0);
        let c = BallConstants::radial(&pr);
        assert!(uniqueness_gap(&pr, &c, 2.0).unwrap().abs() < 1e-10);
        assert!(uniqueness_gap(&pr, &c, 4.0).is_err());
        let pr = p(2, 1.5);
        let c = BallConstants::radial(&pr);
        let m = 0.5 * critical_mass(&pr, &c);
        assert!(uniqueness_gap(&pr, &c, m).unwrap().abs() < 1e-10);
        let pr = p(5, 3.0);
        let c = BallConstants::radial(&pr);
        let m = 0.99 * critical_mass(&pr, &c);
        assert!(uniqueness_gap(&pr, &c, m).unwrap().abs() < 1e-9);
    }
}
