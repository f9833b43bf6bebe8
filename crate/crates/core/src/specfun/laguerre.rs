use crate::{Error, Result};

/// Associated Laguerre polynomial L_k^a(x) by the stable three-term upward
/// recurrence.
pub fn assoc_laguerre(k: u32, a: f64, x: f64) -> Result<f64> {
    if !a.is_finite() || !x.is_finite() {
        return Err(Error::invalid_argument(format!(
            "assoc_laguerre needs finite a and x, got a = {a}, x = {x}"
        )));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let mut lm1 = 1.0;
    let mut l = 1.0 + a - x;
    for i in 1..k {
        let i = f64::from(i);
        let lp1 = ((2.0 * i + 1.0 + a - x) * l - (i + a) * lm1) / (i + 1.0);
        lm1 = l;
        l = lp1;
    }
    Ok(l)
}
