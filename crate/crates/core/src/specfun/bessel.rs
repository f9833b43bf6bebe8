//! Cylinder Bessel functions of integer order.
//!
//! J_m uses the ascending power series below x = 14 and Miller's downward
//! recurrence (normalized by J_0 + 2 J_2 + 2 J_4 + ... = 1) above it. I_m is
//! an all-positive series, stable everywhere we need it. K_m splits at x = 2:
//! the textbook K_0/K_1 series plus upward recurrence below, and a
//! trapezoidal evaluation of K_m(x) = integral_0^inf exp(-x cosh t)
//! cosh(m t) dt above. The series/asymptotic pairing alone cannot reach
//! 1e-10 in the mid range (the series loses exp(2x) digits to cancellation
//! while the asymptotic tail bottoms out near exp(-2x)), so the integral,
//! which converges geometrically for analytic integrands, covers x > 2.

use crate::specfun::{find_root, RootBracket};
use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.5772156649015329;

fn check_finite(x: f64, what: &str) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::invalid_argument(format!("{what} must be finite, got {x}")));
    }
    Ok(())
}

/// Bessel function of the first kind J_m(x) for integer order m >= 0, x >= 0.
pub fn bessel_j(m: u32, x: f64) -> Result<f64> {
    check_finite(x, "bessel_j argument")?;
    if x < 0.0 {
        return Err(Error::invalid_argument(format!(
            "bessel_j defined here for x >= 0, got {x}"
        )));
    }
    if m > 200 {
        return Err(Error::invalid_argument(format!(
            "bessel_j order capped at 200, got {m}"
        )));
    }
    if x == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    if x < 14.0 {
        bessel_j_series(m, x)
    } else {
        Ok(bessel_j_miller(m, x))
    }
}

fn bessel_j_series(m: u32, x: f64) -> Result<f64> {
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=m {
        term *= half / f64::from(j);
    }
    let mut sum = term;
    let mut peak: f64 = term.abs();
    for k in 0..500u32 {
        term *= -(half * half) / (f64::from(k + 1) * f64::from(m + k + 1));
        sum += term;
        peak = peak.max(term.abs());
        if term.abs() < 1e-18 * peak.max(f64::MIN_POSITIVE) && k as f64 > half {
            return Ok(sum);
        }
    }
    Err(Error::solver_failure(format!(
        "bessel_j series failed to terminate for m = {m}, x = {x}"
    )))
}

fn bessel_j_miller(m: u32, x: f64) -> f64 {
    // Start high enough above both the order and the argument that the
    // minimal solution has decayed by far more than the 16 digits we keep.
    let pivot = f64::from(m).max(x.ceil());
    let mut start = (pivot + (50.0 * pivot).sqrt() + 12.0) as u32;
    if start % 2 == 1 {
        start += 1;
    }
    let mut fkp1 = 0.0_f64;
    let mut fk = 1e-250_f64; // arbitrary seed scale at index `start`
    let mut even_sum = 2.0 * fk; // start is even
    let mut target = if m == start { fk } else { 0.0 };
    let mut k = start;
    while k > 0 {
        let fkm1 = 2.0 * f64::from(k) / x * fk - fkp1;
        fkp1 = fk;
        fk = fkm1;
        k -= 1;
        if fk.abs() > 1e250 {
            fk *= 1e-250;
            fkp1 *= 1e-250;
            even_sum *= 1e-250;
            target *= 1e-250;
        }
        if k > 0 && k % 2 == 0 {
            even_sum += 2.0 * fk;
        }
        if k == m {
            target = fk;
        }
    }
    // Normalization identity: J_0 + 2 J_2 + 2 J_4 + ... = 1.
    target / (fk + even_sum)
}

/// First derivative J_m'(x) from the standard ladder relation.
pub fn bessel_j_prime(m: u32, x: f64) -> Result<f64> {
    if m == 0 {
        Ok(-bessel_j(1, x)?)
    } else {
        Ok(0.5 * (bessel_j(m - 1, x)? - bessel_j(m + 1, x)?))
    }
}

/// Modified Bessel function I_m(x): all-positive ascending series.
pub fn bessel_i(m: u32, x: f64) -> Result<f64> {
    check_finite(x, "bessel_i argument")?;
    if x < 0.0 {
        return Err(Error::invalid_argument(format!(
            "bessel_i defined here for x >= 0, got {x}"
        )));
    }
    if x > 200.0 {
        return Err(Error::invalid_argument(format!(
            "bessel_i argument capped at 200 to stay in f64 range, got {x}"
        )));
    }
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=m {
        term *= half / f64::from(j);
    }
    let mut sum = term;
    for k in 0..600u32 {
        term *= half * half / (f64::from(k + 1) * f64::from(m + k + 1));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    Ok(sum)
}

/// Modified Bessel function of the second kind K_m(x), x > 0.
pub fn bessel_k(m: u32, x: f64) -> Result<f64> {
    check_finite(x, "bessel_k argument")?;
    if x <= 0.0 {
        return Err(Error::invalid_argument(format!(
            "bessel_k requires x > 0, got {x}"
        )));
    }
    if m > 60 {
        return Err(Error::invalid_argument(format!(
            "bessel_k order capped at 60, got {m}"
        )));
    }
    if x <= 2.0 {
        bessel_k_small(m, x)
    } else {
        Ok(bessel_k_integral_scaled(m, x) * (-x).exp())
    }
}

/// Exponentially scaled variant exp(x) K_m(x). Stays in f64 range for
/// arbitrarily large x where K_m itself underflows, so ratios of K values
/// (logarithmic derivatives) remain computable.
pub fn bessel_k_scaled(m: u32, x: f64) -> Result<f64> {
    check_finite(x, "bessel_k_scaled argument")?;
    if x <= 0.0 {
        return Err(Error::invalid_argument(format!(
            "bessel_k_scaled requires x > 0, got {x}"
        )));
    }
    if m > 60 {
        return Err(Error::invalid_argument(format!(
            "bessel_k_scaled order capped at 60, got {m}"
        )));
    }
    if x <= 2.0 {
        Ok(bessel_k_small(m, x)? * x.exp())
    } else {
        Ok(bessel_k_integral_scaled(m, x))
    }
}

/// K_0 and K_1 by their ascending series, then upward recurrence (stable:
/// K grows with order).
fn bessel_k_small(m: u32, x: f64) -> Result<f64> {
    let half = 0.5 * x;
    let q = half * half;
    let lnh = half.ln();

    // K_0 = -(ln(x/2) + gamma) I_0 + sum_{k>=1} H_k q^k / (k!)^2
    let mut term = 1.0;
    let mut hk = 0.0;
    let mut sum0 = 0.0;
    // K_1 = 1/x + (ln(x/2) + gamma) I_1
    //       - (x/4) sum_{k>=0} (H_k + H_{k+1}) q^k / (k! (k+1)!)
    let mut term1 = 1.0;
    let mut sum1 = (0.0 + 1.0) * term1; // k = 0: H_0 + H_1 = 1
    for k in 1..60u32 {
        let kf = f64::from(k);
        term *= q / (kf * kf);
        hk += 1.0 / kf;
        sum0 += hk * term;
        term1 *= q / (kf * (kf + 1.0));
        let hk1 = hk + 1.0 / (kf + 1.0);
        sum1 += (hk + hk1) * term1;
        if term.abs() < 1e-18 && term1.abs() < 1e-18 {
            break;
        }
    }
    let k0 = -(lnh + EULER_GAMMA) * bessel_i(0, x)? + sum0;
    let k1 = 1.0 / x + (lnh + EULER_GAMMA) * bessel_i(1, x)? - 0.25 * x * sum1;
    Ok(match m {
        0 => k0,
        1 => k1,
        _ => {
            let mut km1 = k0;
            let mut k = k1;
            for j in 1..m {
                let next = km1 + 2.0 * f64::from(j) / x * k;
                km1 = k;
                k = next;
            }
            k
        }
    })
}

/// Trapezoidal evaluation of exp(x) K_m(x) = integral_0^inf
/// exp(-x (cosh t - 1)) cosh(m t) dt. The integrand is analytic and decays
/// double-exponentially, so the trapezoid rule converges geometrically in
/// 1/h; the step shrinks like 1/sqrt(x) because the integrand narrows the
/// same way.
fn bessel_k_integral_scaled(m: u32, x: f64) -> f64 {
    let h = 0.05 / (x / 50.0).max(1.0).sqrt();
    let mf = f64::from(m);
    // Endpoint t = 0 carries weight 1/2.
    let mut acc = 0.5;
    let mut prev = f64::INFINITY;
    let mut t = h;
    loop {
        // exp(-x (cosh t - 1)) cosh(m t), assembled in log space to dodge
        // overflow when m t is large before the cosh decay takes over.
        let expo = -x * (t.cosh() - 1.0) + mf * t;
        let term = if expo < -745.0 {
            0.0
        } else {
            expo.exp() * 0.5 * (1.0 + (-2.0 * mf * t).exp())
        };
        acc += term;
        // Terminate once past the interior maximum and negligibly small.
        if term < prev && term < acc * 1e-18 {
            break;
        }
        prev = term;
        t += h;
        if t > 60.0 {
            break;
        }
    }
    acc * h
}

/// First derivative K_m'(x) = -(K_{m-1} + K_{m+1})/2, with K_{-1} = K_1.
pub fn bessel_k_prime(m: u32, x: f64) -> Result<f64> {
    let lower = if m == 0 { bessel_k(1, x)? } else { bessel_k(m - 1, x)? };
    Ok(-0.5 * (lower + bessel_k(m + 1, x)?))
}

/// a-th positive zero of J_m (a = 1 is the first), by sign-change scan and
/// bracketed bisection.
pub fn bessel_zero(m: u32, a: u32) -> Result<f64> {
    if a == 0 {
        return Err(Error::invalid_argument(
            "bessel_zero index a starts at 1 (x = 0 is not counted)",
        ));
    }
    if m > 60 || a > 60 {
        return Err(Error::invalid_argument(format!(
            "bessel_zero supports m, a <= 60, got m = {m}, a = {a}"
        )));
    }
    // Zeros of J_m sit above m and are spaced by more than 2; a 0.5 step scan
    // cannot skip one. Start slightly above zero where J_m is positive.
    let step = 0.5;
    let mut x0 = 0.25;
    let mut f0 = bessel_j(m, x0)?;
    let mut found = 0u32;
    let limit = f64::from(m) + f64::from(a) * std::f64::consts::PI + 15.0;
    while x0 < limit {
        let x1 = x0 + step;
        let f1 = bessel_j(m, x1)?;
        if f0 == 0.0 {
            found += 1;
            if found == a {
                return Ok(x0);
            }
        } else if f0.signum() != f1.signum() {
            found += 1;
            if found == a {
                return find_root(
                    |x| bessel_j(m, x).unwrap_or(f64::NAN),
                    RootBracket::new(x0, x1)?,
                    1e-13,
                );
            }
        }
        x0 = x1;
        f0 = f1;
    }
    Err(Error::solver_failure(format!(
        "bessel_zero scan exhausted before finding zero {a} of J_{m}"
    )))
}
