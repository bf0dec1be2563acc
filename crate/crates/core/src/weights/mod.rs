//! Weight sequences `m = (m_n)` and their derived sequences.
//!
//! Indices start at 1; `m_0 = 1` by convention. `M_n = n! m_n`,
//! `mu_n = M_n / M_{n-1}` and `alpha_n = m_n / m_{n-1}`.

mod characteristic;
mod classify;
mod examples;
mod props;
mod regular;

pub use characteristic::{characteristic_coefficients, characteristic_term};
pub use classify::{classify_analytic_type, AnalyticTag, AnalyticTypeReport};
pub use examples::{
    asm_not_diff, asm_not_fdb, fdb_not_asm, fdb_not_log, generate_example, ExampleKind,
    ExampleOptions,
};
pub use props::{
    check_property, default_lambda_grid, implication_matrix, search_lambda, shift_duality_check,
    witness_violates, DualityReport, Property, PropertyReport, Witness, CHAIN,
};
pub use regular::{log_convex_minorant, Regularized};
pub(crate) use props::{lambda_powers, ProductTable};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::scalar::{factorial, parse_rational, Real};

/// Closed-form description of where a weight came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum Generator {
    /// `m_n = c^n`.
    Constant { c: String },
    /// `m_n = n!^(s-1)`.
    Gevrey { s: String },
    /// `m_n = (scale * log(1+n))^(-n)`.
    Logpow { scale: String },
    FdbNotLog,
    AsmNotDiff,
    AsmNotFdb { multiplier: String },
    LeftShift { base: Box<Generator> },
    Star { left: Box<Generator>, right: Box<Generator> },
    CustomTable,
}

impl Generator {
    /// Gevrey exponent `s` if this generator is a Gevrey weight (the unit
    /// weight counts as `s = 1`).
    pub fn gevrey_exponent(&self) -> Option<BigRational> {
        match self {
            Generator::Gevrey { s } => parse_rational(s),
            Generator::Constant { c } if parse_rational(c) == Some(BigRational::one()) => {
                Some(BigRational::one())
            }
            _ => None,
        }
    }
}

/// A positive sequence `m_1, ..., m_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight<R> {
    values: Vec<R>,
    pub generator: Option<Generator>,
}

impl<R: Real> Weight<R> {
    /// Validates positivity and a horizon of at least 2.
    pub fn new(values: Vec<R>, generator: Option<Generator>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::HorizonTooSmall { what: "weight".into(), have: values.len(), need: 2 });
        }
        if let Some(i) = values.iter().position(|v| *v <= R::zero()) {
            return Err(Error::InvalidWeight(format!("m_{} is not positive", i + 1)));
        }
        Ok(Weight { values, generator })
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    /// `m_n`, with `m_0 = 1`.
    pub fn m(&self, n: usize) -> R {
        if n == 0 {
            R::one()
        } else {
            self.values[n - 1].clone()
        }
    }

    /// `M_n = n! m_n`.
    pub fn big_m(&self, n: usize) -> R {
        R::from_biguint(&factorial(n as u64)) * self.m(n)
    }

    /// `mu_n = M_n / M_{n-1} = n alpha_n`.
    pub fn mu(&self, n: usize) -> R {
        crate::scalar::real_u64::<R>(n as u64) * self.alpha(n)
    }

    /// `alpha_n = m_n / m_{n-1}`.
    pub fn alpha(&self, n: usize) -> R {
        self.m(n) / self.m(n - 1)
    }

    /// `m_n = c^n` for `n = 1..=horizon`.
    pub fn constant(c: R, horizon: usize) -> Result<Self> {
        let values = (1..=horizon).map(|n| c.powu(n as u64)).collect();
        Weight::new(values, Some(Generator::Constant { c: c.to_decimal() }))
    }

    /// The unit weight `(1)`.
    pub fn unit(horizon: usize) -> Result<Self> {
        Weight::constant(R::one(), horizon)
    }

    /// `m_n = n!^(s-1)`; exact when `s` is an integer, otherwise via
    /// high-precision logarithms.
    pub fn gevrey(s: &BigRational, horizon: usize) -> Result<Self> {
        let e = s - BigRational::one();
        let values = if e.is_integer() {
            if e < BigRational::zero() {
                let p = (-e.to_integer()).try_into().unwrap_or(0u32);
                (1..=horizon)
                    .map(|n| {
                        let f = BigRational::from_integer(BigInt::from(factorial(n as u64)));
                        R::from_ratio(&(BigRational::one() / num_traits::pow(f, p as usize)))
                    })
                    .collect()
            } else {
                let p: u32 = e.to_integer().try_into().unwrap_or(0);
                (1..=horizon)
                    .map(|n| R::from_biguint(&num_traits::pow(factorial(n as u64), p as usize)))
                    .collect()
            }
        } else {
            let eh = HpFloat::from_ratio(&e);
            let mut lf = HpFloat::zero();
            (1..=horizon)
                .map(|n| {
                    lf = lf.clone() + HpFloat::from(n as i64).ln();
                    R::from_hp(&(lf.clone() * eh.clone()).exp())
                })
                .collect()
        };
        Weight::new(values, Some(Generator::Gevrey { s: crate::scalar::Real::to_decimal(s) }))
    }

    /// Builds a weight from `M_1..M_N`.
    pub fn from_big_m(big_m: Vec<R>, generator: Option<Generator>) -> Result<Self> {
        let values = big_m
            .into_iter()
            .enumerate()
            .map(|(i, v)| v / R::from_biguint(&factorial(i as u64 + 1)))
            .collect();
        Weight::new(values, generator)
    }

    /// Builds a weight from `mu_1..mu_N`.
    pub fn from_mu(mu: &[R], generator: Option<Generator>) -> Result<Self> {
        let mut acc = R::one();
        let big_m = mu
            .iter()
            .map(|x| {
                acc = acc.clone() * x.clone();
                acc.clone()
            })
            .collect();
        Weight::from_big_m(big_m, generator)
    }

    /// Left shift `m'_n = m_{n+1}`.
    pub fn left_shift(&self) -> Result<Self> {
        if self.horizon() < 3 {
            return Err(Error::HorizonTooSmall { what: "left shift".into(), have: self.horizon(), need: 3 });
        }
        let generator = self.generator.clone().map(|g| Generator::LeftShift { base: Box::new(g) });
        Weight::new(self.values[1..].to_vec(), generator)
    }

    /// Restricts to the first `n` values.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.horizon() {
            return Err(Error::HorizonTooSmall { what: "truncation".into(), have: self.horizon(), need: n });
        }
        Weight::new(self.values[..n].to_vec(), self.generator.clone())
    }

    /// Elementwise conversion to high-precision floats.
    pub fn to_hp(&self) -> Weight<HpFloat> {
        Weight { values: self.values.iter().map(Real::to_hp).collect(), generator: self.generator.clone() }
    }

    /// Elementwise conversion to another real type.
    pub fn convert<S: Real>(&self) -> Weight<S> {
        Weight {
            values: self.values.iter().map(|v| S::from_hp(&v.to_hp())).collect(),
            generator: self.generator.clone(),
        }
    }
}

/// Pointwise product `(m_k w_k)`.
pub fn star_product<R: Real>(m: &Weight<R>, w: &Weight<R>) -> Result<Weight<R>> {
    if m.horizon() != w.horizon() {
        return Err(Error::HorizonMismatch(m.horizon(), w.horizon()));
    }
    let values = m.values.iter().zip(&w.values).map(|(a, b)| a.clone() * b.clone()).collect();
    let generator = match (&m.generator, &w.generator) {
        (Some(a), Some(b)) => Some(star_generator(a, b)),
        _ => None,
    };
    Weight::new(values, generator)
}

fn star_generator(a: &Generator, b: &Generator) -> Generator {
    let one = BigRational::one();
    match (a.gevrey_exponent(), b.gevrey_exponent()) {
        (Some(s), Some(t)) => {
            let u = s + t - &one;
            if u == one {
                Generator::Constant { c: "1".into() }
            } else {
                Generator::Gevrey { s: crate::scalar::Real::to_decimal(&u) }
            }
        }
        (Some(s), None) if s == one => b.clone(),
        (None, Some(t)) if t == one => a.clone(),
        _ => Generator::Star { left: Box::new(a.clone()), right: Box::new(b.clone()) },
    }
}

/// A weight in either exact or high-precision float arithmetic.
#[derive(Clone, Debug)]
pub enum AnyWeight {
    Exact(Weight<BigRational>),
    Float(Weight<HpFloat>),
}

impl AnyWeight {
    pub fn horizon(&self) -> usize {
        match self {
            AnyWeight::Exact(w) => w.horizon(),
            AnyWeight::Float(w) => w.horizon(),
        }
    }

    pub fn generator(&self) -> Option<&Generator> {
        match self {
            AnyWeight::Exact(w) => w.generator.as_ref(),
            AnyWeight::Float(w) => w.generator.as_ref(),
        }
    }

    pub fn to_hp(&self) -> Weight<HpFloat> {
        match self {
            AnyWeight::Exact(w) => w.to_hp(),
            AnyWeight::Float(w) => w.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyWeight::Exact(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        ratio(n, 1)
    }

    #[test]
    fn derived_sequences() {
        let w = Weight::new(vec![q(1), q(2), q(6), q(24)], None).unwrap();
        assert_eq!(w.big_m(3), q(36));
        assert_eq!(w.mu(3), q(9));
        let mut prod = Q::one();
        for n in 1..=4 {
            prod *= w.mu(n);
            assert_eq!(prod, w.big_m(n));
        }
    }

    #[test]
    fn shift_examples() {
        let w = Weight::new(vec![q(1), q(2), q(6), q(24)], None).unwrap();
        let s = w.left_shift().unwrap();
        assert_eq!(s.values(), &[q(2), q(6), q(24)]);
        let g = Weight::<Q>::gevrey(&q(2), 8).unwrap().left_shift().unwrap();
        for n in 1..=7 {
            assert_eq!(g.m(n), Q::from_biguint(&factorial(n as u64 + 1)));
        }
        let ss = s.left_shift().unwrap();
        assert_eq!(ss.values(), &[q(6), q(24)]);
        assert!(ss.left_shift().is_err());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(Weight::new(vec![q(1), q(0)], None).is_err());
        assert!(Weight::new(vec![q(1)], None).is_err());
    }

    #[test]
    fn star_of_gevrey_factors() {
        let m = Weight::<HpFloat>::gevrey(&q(2), 10).unwrap();
        let w = Weight::<HpFloat>::gevrey(&ratio(3, 2), 10).unwrap();
        let p = star_product(&m, &w).unwrap();
        let direct = Weight::<HpFloat>::gevrey(&ratio(5, 2), 10).unwrap();
        for n in 1..=10 {
            let rel = ((p.m(n) - direct.m(n)) / direct.m(n)).abs();
            assert!(rel < HpFloat::parse_decimal("1e-30").unwrap());
        }
        assert_eq!(p.generator, Some(Generator::Gevrey { s: "5/2".into() }));
    }

    #[test]
    fn star_identity() {
        let m = Weight::<Q>::gevrey(&q(3), 6).unwrap();
        let one = Weight::<Q>::unit(6).unwrap();
        assert_eq!(star_product(&m, &one).unwrap().values(), m.values());
        assert!(star_product(&m, &Weight::<Q>::unit(5).unwrap()).is_err());
    }
}
