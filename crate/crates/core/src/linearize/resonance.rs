//! Nonresonance tests, the divisor table `E_k` and the nonresonance function `Omega`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::LinearPart;
use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::multiindex::{IndexSpace, MultiIndex};
use crate::scalar::{Coeff, Real};

/// Divisor table and nonresonance function up to degree `Q`.
#[derive(Clone, Debug)]
pub struct ResonanceReport<R: Real> {
    pub max_degree: usize,
    /// Some `lambda^k = lambda_i` exactly, or below tolerance in float mode.
    pub resonant: bool,
    /// The resonance was detected only up to the float tolerance.
    pub numerically_resonant: bool,
    pub witness: Option<(MultiIndex, usize)>,
    /// `E_k^2 = max_i |lambda^k - lambda_i|^-2` for every nonresonant `k` with `2 <= |k| <= Q`.
    pub e_sq: BTreeMap<MultiIndex, R>,
    /// `Omega(q)^2` for `q = 2..=Q`, at position `q - 2`.
    omega_sq: Vec<R>,
}

impl<R: Real> ResonanceReport<R> {
    /// `Omega(q)^2`, for `2 <= q <= Q`.
    pub fn omega_sq(&self, q: usize) -> Option<&R> {
        q.checked_sub(2).and_then(|i| self.omega_sq.get(i))
    }

    /// `Omega(q)` in high precision; panics outside `2..=Q`.
    pub fn omega(&self, q: usize) -> HpFloat {
        self.omega_sq(q).expect("tabulated degree").to_hp().sqrt()
    }

    pub fn e_sq(&self, k: &MultiIndex) -> Option<&R> {
        self.e_sq.get(k)
    }

    /// Fails with [`Error::Resonant`] when a resonance was found.
    pub fn require_nonresonant(&self) -> Result<()> {
        match &self.witness {
            Some((k, i)) => Err(Error::Resonant { k: k.exps().to_vec(), i: *i }),
            None => Ok(()),
        }
    }

    /// `log Omega(q)` in high precision.
    pub fn omega_table(&self) -> Result<OmegaTable> {
        self.require_nonresonant()?;
        Ok(OmegaTable { ln_omega: self.omega_sq.iter().map(|w| w.to_hp().ln() / HpFloat::from(2)).collect() })
    }
}

fn hp_sqrt<R: Real>(x: &R) -> String {
    x.to_hp().sqrt().to_decimal_string()
}

#[derive(Serialize)]
struct Witness {
    k: MultiIndex,
    i: usize,
}

#[derive(Serialize)]
struct OmegaRow {
    q: usize,
    omega: String,
    omega_sq: String,
}

#[derive(Serialize)]
struct DivisorRow<'a> {
    k: &'a MultiIndex,
    e: String,
    e_sq: String,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    max_degree: usize,
    resonant: bool,
    numerically_resonant: bool,
    witness: Option<Witness>,
    omega: Vec<OmegaRow>,
    divisors: Vec<DivisorRow<'a>>,
}

impl<R: Real> Serialize for ResonanceReport<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            max_degree: self.max_degree,
            resonant: self.resonant,
            numerically_resonant: self.numerically_resonant,
            witness: self.witness.as_ref().map(|(k, i)| Witness { k: k.clone(), i: *i }),
            omega: self
                .omega_sq
                .iter()
                .enumerate()
                .map(|(j, w)| OmegaRow { q: j + 2, omega: hp_sqrt(w), omega_sq: w.to_decimal() })
                .collect(),
            divisors: self.e_sq.iter().map(|(k, e)| DivisorRow { k, e: hp_sqrt(e), e_sq: e.to_decimal() }).collect(),
        }
        .serialize(s)
    }
}

/// Tests `lambda^k != lambda_i` for `2 <= |k| <= Q` and tabulates `E_k` and `Omega`.
///
/// Resonances are returned as data. Exact coefficients use an exact zero
/// test; floats flag `|lambda^k - lambda_i| < 1e-30`.
pub fn check_nonresonance<C: Coeff>(l: &LinearPart<C>, max_degree: usize) -> Result<ResonanceReport<C::Real>> {
    if max_degree < 2 {
        return Err(Error::HorizonTooSmall { what: "nonresonance table".into(), have: max_degree, need: 2 });
    }
    let s = l.dim();
    let space = IndexSpace::new(s, max_degree)?;
    let mut powers: Vec<C> = Vec::with_capacity(space.len());
    let tol_sq = {
        let t = C::Real::tolerance();
        t.clone() * t
    };
    let mut e_sq = BTreeMap::new();
    let mut witness = None;
    let mut numerically = false;
    let mut omega_sq: Vec<C::Real> = Vec::with_capacity(max_degree - 1);
    let mut running: Option<C::Real> = None;
    for p in 0..space.len() {
        let k = space.index(p);
        let pw = match k.first_nonzero() {
            None => C::one(),
            Some(j) => {
                let parent = k.checked_sub(&MultiIndex::unit(s, j)).expect("positive exponent");
                powers[space.position(&parent).expect("parent")].clone() * l.eigenvalues()[j].clone()
            }
        };
        if k.degree() >= 2 {
            let mut worst: Option<C::Real> = None;
            let mut hit = false;
            for (i, li) in l.eigenvalues().iter().enumerate() {
                let d = (pw.clone() - li.clone()).norm_sq();
                let zero = if C::Real::EXACT { d.is_zero() } else { d < tol_sq };
                if zero {
                    if witness.is_none() {
                        witness = Some((k.clone(), i));
                        numerically = !d.is_zero();
                    }
                    hit = true;
                    continue;
                }
                let inv = <C::Real as One>::one() / d;
                if worst.as_ref().is_none_or(|w| inv > *w) {
                    worst = Some(inv);
                }
            }
            if let (false, Some(w)) = (hit, worst) {
                if running.as_ref().is_none_or(|r| w > *r) {
                    running = Some(w.clone());
                }
                e_sq.insert(k.clone(), w);
            }
        }
        powers.push(pw);
        let last = p + 1 == space.len() || space.index(p + 1).degree() != k.degree();
        if last && k.degree() >= 2 {
            omega_sq.push(running.clone().unwrap_or_else(C::Real::zero));
        }
    }
    Ok(ResonanceReport {
        max_degree,
        resonant: witness.is_some(),
        numerically_resonant: numerically,
        witness,
        e_sq,
        omega_sq,
    })
}

/// `log Omega(q)` for `q = 2..=Q`, whether measured from eigenvalues or
/// constructed directly.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaTable {
    /// Position `q - 2` holds `log Omega(q)`.
    pub ln_omega: Vec<HpFloat>,
}

impl OmegaTable {
    /// Tabulates `q -> log Omega(q)` for `q = 2..=max_q`, making it
    /// nondecreasing by a running maximum.
    pub fn from_fn(max_q: usize, f: impl Fn(usize) -> HpFloat) -> Self {
        let mut out: Vec<HpFloat> = Vec::with_capacity(max_q.saturating_sub(1));
        for q in 2..=max_q {
            let v = f(q);
            let v = match out.last() {
                Some(prev) if *prev > v => prev.clone(),
                _ => v,
            };
            out.push(v);
        }
        OmegaTable { ln_omega: out }
    }

    /// From `log Omega(q)` for `q = 2, 3, ..`, with the same running maximum.
    pub fn from_ln(values: Vec<HpFloat>) -> Self {
        let n = values.len() + 1;
        OmegaTable::from_fn(n, |q| values[q - 2].clone())
    }

    pub fn max_q(&self) -> usize {
        self.ln_omega.len() + 1
    }

    /// `log Omega(q)`.
    pub fn ln(&self, q: usize) -> Option<&HpFloat> {
        q.checked_sub(2).and_then(|i| self.ln_omega.get(i))
    }
}

impl Serialize for OmegaTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row {
            q: usize,
            ln_omega: String,
        }
        let rows: Vec<Row> = self
            .ln_omega
            .iter()
            .enumerate()
            .map(|(i, v)| Row { q: i + 2, ln_omega: v.to_decimal_string() })
            .collect();
        rows.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_complex::Complex;
    use num_rational::BigRational as Q;

    fn lp(v: &[(i64, i64)]) -> LinearPart<Q> {
        LinearPart::new(v.iter().map(|&(a, b)| ratio(a, b)).collect()).unwrap()
    }

    #[test]
    fn expanding_scalar() {
        let r = check_nonresonance(&lp(&[(2, 1)]), 6).unwrap();
        assert!(!r.resonant);
        for k in 2..=6u32 {
            let d = ratio(2i64.pow(k) - 2, 1);
            assert_eq!(r.e_sq(&MultiIndex::new(vec![k])).unwrap(), &(ratio(1, 1) / (d.clone() * d)));
        }
        for q in 2..=6 {
            assert_eq!(r.omega_sq(q).unwrap(), &ratio(1, 4));
        }
    }

    #[test]
    fn resonance_is_data() {
        let r = check_nonresonance(&lp(&[(2, 1), (4, 1)]), 3).unwrap();
        assert!(r.resonant && !r.numerically_resonant);
        assert_eq!(r.witness, Some((MultiIndex::new(vec![2, 0]), 1)));
    }

    #[test]
    fn contracting_scalar() {
        let r = check_nonresonance(&lp(&[(1, 2)]), 8).unwrap();
        assert!(!r.resonant);
        // E_k = 1/(1/2 - 2^-k) decreases toward 2, so Omega stays at E_2 = 4.
        for k in 2..=8u32 {
            let d = ratio(1, 2) - Q::new(1.into(), num_bigint::BigInt::from(2).pow(k));
            assert_eq!(r.e_sq(&MultiIndex::new(vec![k])).unwrap(), &(ratio(1, 1) / (d.clone() * d)));
            assert_eq!(r.omega_sq(k as usize).unwrap(), &ratio(16, 1));
        }
    }

    #[test]
    fn zero_eigenvalue_rejected() {
        assert!(matches!(LinearPart::new(vec![ratio(0, 1)]), Err(Error::ZeroEigenvalue(0))));
    }

    #[test]
    fn float_near_resonance() {
        let l = LinearPart::new(vec![
            Complex::new(HpFloat::from(2), HpFloat::zero()),
            Complex::new(HpFloat::from(4), HpFloat::zero()),
        ])
        .unwrap();
        let r = check_nonresonance(&l, 2).unwrap();
        assert!(r.resonant);
        assert!(matches!(r.omega_table(), Err(Error::Resonant { .. })));
    }
}
