use crate::{Error, Result};

/// A sign-changing interval handed to [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid_argument(format!(
                "root bracket requires finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(RootBracket { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bracketed scalar root finder: secant steps when they stay safely interior,
/// with a bisection step interleaved every other iteration so the bracket
/// width provably halves at least once per two iterations. Fully
/// deterministic: identical inputs give bitwise-identical results.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: RootBracket, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid_argument(format!(
            "root tolerance must be positive, got {tol}"
        )));
    }
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::invalid_argument(format!(
            "bracket endpoints do not straddle a sign change: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }

    for iter in 0..256 {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            // Bracket exhausted at floating-point resolution.
            break;
        }
        let mut x = mid;
        if iter % 2 == 0 && fhi != flo {
            let secant = (lo * fhi - hi * flo) / (fhi - flo);
            let margin = 0.01 * (hi - lo);
            if secant > lo + margin && secant < hi - margin {
                x = secant;
            }
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    Ok(0.5 * (lo + hi))
}
