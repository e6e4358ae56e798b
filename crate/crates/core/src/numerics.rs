//! Small deterministic quadrature rules shared by the other modules.

use std::f64::consts::{FRAC_PI_2, PI};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with an `n`-point Gauss-Legendre rule.
pub fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Double-exponential (tanh-sinh) quadrature on `[a, b]` using `2n+1` nodes.
///
/// Tolerates integrable endpoint singularities. `f` receives the abscissa and
/// is never evaluated exactly at an endpoint; abscissae close to an endpoint
/// are built from the complementary distance so they do not round onto it.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    const T_MAX: f64 = 4.0;
    let n = n.max(1);
    let step = T_MAX / n as f64;
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in -(n as i64)..=(n as i64) {
        let t = k as f64 * step;
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if w == 0.0 || !w.is_finite() {
            continue;
        }
        // distance of the abscissa from the nearer endpoint, in units of `half`
        let comp = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let x = if t < 0.0 {
            a + half * comp
        } else if t > 0.0 {
            b - half * comp
        } else {
            a + half
        };
        if x <= a || x >= b {
            continue;
        }
        sum += w * f(x);
    }
    sum * step * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(6);
        let v = integrate_gl(|x| x.powi(11) + 3.0 * x.powi(4), -1.0, 2.0, &rule);
        let exact = (2f64.powi(12) - 1.0) / 12.0 + 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-11 * exact);
        let wsum: f64 = rule.1.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_order_has_center_node() {
        let (x, _) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-16);
        assert!(x.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 60);
        assert!((v - 2.0).abs() < 1e-10, "{v}");
        // ∫_0^1 sqrt(1-x^2) dx = π/4
        let v = tanh_sinh(|x| (1.0 - x * x).sqrt(), 0.0, 1.0, 60);
        assert!((v - PI / 4.0).abs() < 1e-13, "{v}");
    }
}
