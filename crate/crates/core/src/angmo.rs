//! Angular-momentum coupling: basis labels, Clebsch-Gordan coefficients in
//! the Condon-Shortley convention, and generator matrices over a coupled
//! basis.
//!
//! Coefficients come from the closed-form alternating sum over exact small
//! factorials, which is reliable for the modest momenta this crate handles
//! (total angular momentum up to 30).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::specfun::factorial;
use crate::{Error, HalfInt, Result};

/// Product-basis label |n> |l m_l> |s m_s>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UncoupledLabel {
    pub n: u32,
    pub l: u32,
    pub m_l: i32,
    pub s: HalfInt,
    pub m_s: HalfInt,
}

impl UncoupledLabel {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::basis_mismatch("principal index n starts at 1"));
        }
        if self.m_l.unsigned_abs() > self.l {
            return Err(Error::basis_mismatch(format!(
                "|m_l| <= l violated: m_l = {}, l = {}",
                self.m_l, self.l
            )));
        }
        if self.s.is_negative() || !self.s.same_parity(self.m_s) || self.m_s.abs() > self.s {
            return Err(Error::basis_mismatch(format!(
                "spin projection {} does not fit spin {}",
                self.m_s, self.s
            )));
        }
        Ok(())
    }
}

/// Coupled label |n, (l s) J M>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoupledLabel {
    pub n: u32,
    pub l: u32,
    pub s: HalfInt,
    pub j: HalfInt,
    pub m: HalfInt,
}

impl CoupledLabel {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::basis_mismatch("principal index n starts at 1"));
        }
        let l = HalfInt::from_int(self.l as i32);
        if self.s.is_negative() {
            return Err(Error::basis_mismatch(format!("negative spin {}", self.s)));
        }
        let lo = (l - self.s).abs();
        let hi = l + self.s;
        if !self.j.same_parity(hi) || self.j < lo || self.j > hi {
            return Err(Error::basis_mismatch(format!(
                "J = {} is not reachable from l = {} and s = {}",
                self.j, self.l, self.s
            )));
        }
        if !self.m.same_parity(self.j) || self.m.abs() > self.j {
            return Err(Error::basis_mismatch(format!(
                "M = {} does not fit J = {}",
                self.m, self.j
            )));
        }
        Ok(())
    }
}

fn check_pair(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.is_negative() || !j.same_parity(m) || m.abs() > j {
        return Err(Error::invalid_argument(format!(
            "projection {m} does not fit angular momentum {j}"
        )));
    }
    Ok(())
}

/// Exact factorial of a half-integer combination known to be integral.
fn fact(h: HalfInt) -> f64 {
    debug_assert!(h.is_integer() && !h.is_negative());
    factorial((h.twice() / 2) as u32)
}

/// <j1 m1, j2 m2 | j m> in the Condon-Shortley convention. Selection-rule
/// violations (m1 + m2 != m, or the triangle rule) give 0; ill-formed pairs
/// are errors.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64> {
    check_pair(j1, m1)?;
    check_pair(j2, m2)?;
    check_pair(j, m)?;
    if (j1 + j2 + j).twice() > 60 {
        return Err(Error::invalid_argument(
            "coupling coefficients are supported for j1 + j2 + j <= 30",
        ));
    }
    if m1 + m2 != m {
        return Ok(0.0);
    }
    if j < (j1 - j2).abs() || j > j1 + j2 || !j.same_parity(j1 + j2) {
        return Ok(0.0);
    }

    let prefactor = (f64::from(j.twice()) + 1.0) * fact(j1 + j2 - j) * fact(j1 - j2 + j)
        * fact(j2 - j1 + j)
        / fact(j1 + j2 + j + HalfInt::from_int(1))
        * fact(j + m)
        * fact(j - m)
        * fact(j1 - m1)
        * fact(j1 + m1)
        * fact(j2 - m2)
        * fact(j2 + m2);

    // The alternating sum runs over every k keeping all six factorial
    // arguments nonnegative; the bounds below are exactly that window.
    let int_of = |h: HalfInt| h.twice() / 2;
    let k_min = 0.max(-int_of(j - j2 + m1)).max(-int_of(j - j1 - m2));
    let k_max = int_of(j1 + j2 - j)
        .min(int_of(j1 - m1))
        .min(int_of(j2 + m2));
    let mut total = 0.0;
    for k in k_min..=k_max {
        let kk = HalfInt::from_int(k);
        let denom = factorial(k as u32)
            * fact(j1 + j2 - j - kk)
            * fact(j1 - m1 - kk)
            * fact(j2 + m2 - kk)
            * fact(j - j2 + m1 + kk)
            * fact(j - j1 - m2 + kk);
        total += if k % 2 == 0 { 1.0 } else { -1.0 } / denom;
    }
    Ok(prefactor.sqrt() * total)
}

/// A coupled basis vector together with its expansion over the product
/// basis; only selection-rule-allowed terms are listed.
#[derive(Debug, Clone)]
pub struct CoupledState {
    pub label: CoupledLabel,
    pub expansion: Vec<(UncoupledLabel, f64)>,
}

/// The coupled basis for one (n, l, s) sector: J descending from l + s to
/// |l - s|, M descending within each J, each state carrying its
/// Clebsch-Gordan expansion.
pub fn couple_basis(n: u32, l: u32, s: HalfInt) -> Result<Vec<CoupledState>> {
    let uncoupled = uncouple_basis(n, l, s)?;
    let lh = HalfInt::from_int(l as i32);
    let mut out = Vec::new();
    let mut jt = (lh + s).twice();
    while jt >= (lh - s).abs().twice() {
        let j = HalfInt::from_twice(jt);
        for m in j.ladder_desc() {
            let label = CoupledLabel { n, l, s, j, m };
            let mut expansion = Vec::new();
            for u in &uncoupled {
                if HalfInt::from_int(u.m_l) + u.m_s != m {
                    continue;
                }
                let c = clebsch_gordan(lh, HalfInt::from_int(u.m_l), s, u.m_s, j, m)?;
                expansion.push((*u, c));
            }
            out.push(CoupledState { label, expansion });
        }
        jt -= 2;
    }
    Ok(out)
}

/// All product labels for an (n, l, s) sector: m_l descending, then m_s
/// descending. Same dimension and span as [`couple_basis`].
pub fn uncouple_basis(n: u32, l: u32, s: HalfInt) -> Result<Vec<UncoupledLabel>> {
    if n == 0 {
        return Err(Error::invalid_argument("principal index n starts at 1"));
    }
    if s.is_negative() {
        return Err(Error::invalid_argument(format!("negative spin {s}")));
    }
    let mut out = Vec::new();
    for m_l in (-(l as i32)..=l as i32).rev() {
        for m_s in s.ladder_desc() {
            out.push(UncoupledLabel { n, l, m_l, s, m_s });
        }
    }
    Ok(out)
}

/// Orthogonal change of basis with U[(m_l, m_s), (J, M)] equal to the
/// coupling coefficient, rows ordered like [`uncouple_basis`] and columns
/// like [`couple_basis`].
pub fn coupling_matrix(n: u32, l: u32, s: HalfInt) -> Result<DMatrix<f64>> {
    let cols = couple_basis(n, l, s)?;
    let rows = uncouple_basis(n, l, s)?;
    let mut u = DMatrix::zeros(rows.len(), cols.len());
    for (jx, c) in cols.iter().enumerate() {
        for (lab, coeff) in &c.expansion {
            let i = rows.iter().position(|r| r == lab).expect("same sector");
            u[(i, jx)] = *coeff;
        }
    }
    Ok(u)
}

/// Rotation generators over one ordered coupled basis, units of hbar = 1.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub basis: Vec<CoupledLabel>,
    pub jx: DMatrix<Complex64>,
    pub jy: DMatrix<Complex64>,
    pub jz: DMatrix<Complex64>,
}

impl GeneratorSet {
    /// J_+ = J_x + i J_y.
    pub fn jplus(&self) -> DMatrix<Complex64> {
        &self.jx + &self.jy * Complex64::new(0.0, 1.0)
    }

    /// J_- = J_x - i J_y.
    pub fn jminus(&self) -> DMatrix<Complex64> {
        &self.jx - &self.jy * Complex64::new(0.0, 1.0)
    }
}

/// Generator matrices over `basis`: J_z is diagonal in M, the ladder
/// operators connect adjacent M within each (n, l, s, J) multiplet. The
/// basis may span several multiplets; a ladder target missing from the list
/// simply truncates that matrix element to zero.
pub fn generator_matrices(basis: &[CoupledLabel]) -> Result<GeneratorSet> {
    if basis.is_empty() {
        return Err(Error::invalid_argument("generator basis is empty"));
    }
    let d = basis.len();
    let mut jz = DMatrix::zeros(d, d);
    let mut jplus = DMatrix::<Complex64>::zeros(d, d);
    for (i, lab) in basis.iter().enumerate() {
        lab.validate()?;
        if basis[..i].contains(lab) {
            return Err(Error::invalid_argument(format!(
                "duplicate basis label (n = {}, l = {}, s = {}, J = {}, M = {})",
                lab.n, lab.l, lab.s, lab.j, lab.m
            )));
        }
        jz[(i, i)] = Complex64::new(lab.m.as_f64(), 0.0);
        let up = HalfInt::from_twice(lab.m.twice() + 2);
        if up <= lab.j {
            let target = basis.iter().position(|o| {
                o.n == lab.n && o.l == lab.l && o.s == lab.s && o.j == lab.j && o.m == up
            });
            if let Some(t) = target {
                let amp = (lab.j.casimir() - lab.m.as_f64() * up.as_f64()).sqrt();
                jplus[(t, i)] = Complex64::new(amp, 0.0);
            }
        }
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale(0.5);
    let jy = (&jplus - &jminus) * Complex64::new(0.0, -0.5);
    Ok(GeneratorSet { basis: basis.to_vec(), jx, jy, jz })
}
