use crate::{Error, Result};

/// Associated Legendre function P_l^m(u) for 0 <= m <= l, |u| <= 1, WITHOUT
/// the Condon-Shortley phase; callers that want (-1)^m apply it themselves.
pub fn assoc_legendre(l: u32, m: u32, u: f64) -> Result<f64> {
    if m > l {
        return Err(Error::invalid_argument(format!(
            "assoc_legendre requires m <= l, got l = {l}, m = {m}"
        )));
    }
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::invalid_argument(format!(
            "assoc_legendre argument must lie in [-1, 1], got {u}"
        )));
    }
    // Seed P_m^m = (2m-1)!! (1-u^2)^{m/2}, then climb in degree.
    let mut pmm = 1.0;
    if m > 0 {
        let somx2 = ((1.0 - u) * (1.0 + u)).sqrt();
        let mut odd = 1.0;
        for _ in 0..m {
            pmm *= odd * somx2;
            odd += 2.0;
        }
    }
    if l == m {
        return Ok(pmm);
    }
    let mf = f64::from(m);
    let mut pm1 = pmm;
    let mut p = u * (2.0 * mf + 1.0) * pmm;
    for ll in (m + 2)..=l {
        let lf = f64::from(ll);
        let next = (u * (2.0 * lf - 1.0) * p - (lf + mf - 1.0) * pm1) / (lf - mf);
        pm1 = p;
        p = next;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_order_closed_forms_without_phase() {
        for &u in &[-0.9_f64, -0.3, 0.0, 0.4, 0.99] {
            let s = (1.0 - u * u).sqrt();
            assert_relative_eq!(assoc_legendre(0, 0, u).unwrap(), 1.0);
            assert_relative_eq!(assoc_legendre(1, 0, u).unwrap(), u);
            // No Condon-Shortley sign here: P_1^1 = +sqrt(1-u^2).
            assert_relative_eq!(assoc_legendre(1, 1, u).unwrap(), s, epsilon = 1e-14);
            assert_relative_eq!(
                assoc_legendre(2, 1, u).unwrap(),
                3.0 * u * s,
                epsilon = 1e-13
            );
            assert_relative_eq!(
                assoc_legendre(2, 0, u).unwrap(),
                0.5 * (3.0 * u * u - 1.0),
                epsilon = 1e-13
            );
        }
    }

    /// Rodrigues-route oracle: P_l^m(u) = (1-u^2)^{m/2} / (2^l l!) *
    /// d^{l+m}/du^{l+m} (u^2-1)^l. The derivative of the degree-2l
    /// polynomial comes from an iterated symmetric difference whose h^2
    /// error term is removed by one Richardson step; every surviving error
    /// term then carries a vanishing derivative, leaving only rounding.
    fn rodrigues_fd(l: u32, m: u32, u: f64) -> f64 {
        fn poly(l: u32, u: f64) -> f64 {
            (u * u - 1.0).powi(l as i32)
        }
        // p+1 points centered on u, differenced p times: estimates the p-th
        // derivative at u with even-order error terms only.
        fn iter_diff(l: u32, u: f64, p: u32, h: f64) -> f64 {
            let mut vals: Vec<f64> = (0..=p)
                .map(|k| poly(l, u + h * (f64::from(k) - f64::from(p) / 2.0)))
                .collect();
            for _ in 0..p {
                vals = vals.windows(2).map(|w| (w[1] - w[0]) / h).collect();
            }
            vals[0]
        }
        let p = l + m;
        let coarse = iter_diff(l, u, p, 0.5);
        let fine = iter_diff(l, u, p, 0.25);
        let deriv = (4.0 * fine - coarse) / 3.0;
        let norm = 2.0_f64.powi(l as i32) * crate::specfun::factorial(l);
        (1.0 - u * u).powf(f64::from(m) / 2.0) * deriv / norm
    }

    #[test]
    fn matches_rodrigues_finite_difference() {
        for &u in &[-0.7, -0.2, 0.5, 0.8] {
            let got = assoc_legendre(3, 2, u).unwrap();
            let want = rodrigues_fd(3, 2, u);
            assert_relative_eq!(got, want, epsilon = 1e-9, max_relative = 1e-9);
            let got = assoc_legendre(4, 1, u).unwrap();
            let want = rodrigues_fd(4, 1, u);
            assert_relative_eq!(got, want, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(assoc_legendre(1, 2, 0.0).is_err());
        assert!(assoc_legendre(2, 0, 1.5).is_err());
    }
}
