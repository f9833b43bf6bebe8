//! Gaussian quadrature rules built from the crate's own orthogonal
//! polynomials, plus composite helpers for finite and semi-infinite radial
//! integrals.

use crate::specfun::assoc_laguerre;
use crate::{Error, Result};

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 512 {
        return Err(Error::invalid_argument(format!(
            "Gauss-Legendre order must be in 1..=512, got {n}"
        )));
    }
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre_and_deriv(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, z);
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        xs[i] = -z;
        xs[n - 1 - i] = z;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    Ok((xs, ws))
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of an n-point Gauss-Laguerre rule for
/// `integral_0^inf exp(-x) f(x) dx`.
pub fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 128 {
        return Err(Error::invalid_argument(format!(
            "Gauss-Laguerre order must be in 1..=128, got {n}"
        )));
    }
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n {
        // Stepping initial guesses, then Newton on L_n.
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = i as f64 - 1.0;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - xs[i - 2])
            }
        };
        for _ in 0..100 {
            let p = assoc_laguerre(n as u32, 0.0, z)?;
            let pm = assoc_laguerre(n as u32 - 1, 0.0, z)?;
            let dp = nf * (p - pm) / z;
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-15 * z.max(1.0) {
                break;
            }
        }
        let lnp1 = assoc_laguerre(n as u32 + 1, 0.0, z)?;
        xs[i] = z;
        ws[i] = z / ((nf + 1.0) * (nf + 1.0) * lnp1 * lnp1);
    }
    Ok((xs, ws))
}

/// Integrates `f` over [a, b] with a single n-point Gauss-Legendre panel.
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Result<f64> {
    let (xs, ws) = gauss_legendre(n)?;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        acc += w * f(mid + half * x);
    }
    Ok(acc * half)
}

/// Composite Gauss-Legendre: [a, b] split into `panels` equal panels with an
/// n-point rule on each.
pub fn integrate_composite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    n: usize,
) -> Result<f64> {
    if panels == 0 {
        return Err(Error::invalid_argument("panel count must be positive"));
    }
    let (xs, ws) = gauss_legendre(n)?;
    let step = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + step * p as f64;
        let mid = lo + 0.5 * step;
        let half = 0.5 * step;
        for (x, w) in xs.iter().zip(&ws) {
            acc += w * f(mid + half * x);
        }
    }
    Ok(acc * 0.5 * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_integrates_cosine() {
        let s = integrate_gl(|x| x.cos(), 0.0, 1.0, 16).unwrap();
        assert_relative_eq!(s, 1.0_f64.sin(), epsilon = 1e-14);
    }

    #[test]
    fn legendre_rule_exact_on_high_degree_polynomial() {
        // 12-point rule is exact through degree 23.
        let s = integrate_gl(|x| x.powi(23) + 3.0 * x.powi(10), -1.0, 1.0, 12).unwrap();
        assert_relative_eq!(s, 6.0 / 11.0, epsilon = 1e-13);
    }

    #[test]
    fn laguerre_rule_reproduces_factorials() {
        let (xs, ws) = gauss_laguerre(32).unwrap();
        for k in [1u32, 3, 5, 8] {
            let s: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(k as i32)).sum();
            assert_relative_eq!(s, crate::specfun::factorial(k), max_relative = 1e-12);
        }
    }

    #[test]
    fn composite_matches_semi_infinite_decay() {
        // integral_0^inf r^2 exp(-2r) dr = 1/4, truncated far out.
        let s = integrate_composite(|r| r * r * (-2.0 * r).exp(), 0.0, 40.0, 20, 20).unwrap();
        assert_relative_eq!(s, 0.25, epsilon = 1e-13);
    }
}
