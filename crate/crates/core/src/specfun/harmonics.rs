use nalgebra::Complex;

use crate::specfun::assoc_legendre;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Spherical harmonic Y_l^m(theta, phi) with the Condon-Shortley phase
/// included, i.e. Y_l^m = (-1)^m N P_l^m(cos theta) e^{i m phi} for m >= 0
/// and Y_l^{-m} = (-1)^m conj(Y_l^m).
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<C64> {
    if m.unsigned_abs() > l {
        return Err(Error::invalid_argument(format!(
            "spherical_harmonic requires |m| <= l, got l = {l}, m = {m}"
        )));
    }
    let ma = m.unsigned_abs();
    // (2l+1)/(4 pi) * (l-|m|)!/(l+|m|)! with the factorial ratio as a product.
    let mut ratio = 1.0;
    for k in (l - ma + 1)..=(l + ma) {
        ratio /= f64::from(k);
    }
    let norm = ((2.0 * f64::from(l) + 1.0) / (4.0 * std::f64::consts::PI) * ratio).sqrt();
    let p = assoc_legendre(l, ma, theta.cos())?;
    let phase = C64::from_polar(1.0, f64::from(ma) * phi);
    let cs = if ma % 2 == 0 { 1.0 } else { -1.0 };
    let y_pos = cs * norm * p * phase;
    if m >= 0 {
        Ok(y_pos)
    } else {
        Ok(cs * y_pos.conj())
    }
}
