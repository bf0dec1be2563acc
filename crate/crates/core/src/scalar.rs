//! Scalar abstractions shared by every module.
//!
//! [`Real`] is an ordered field that can be exact ([`BigRational`]) or
//! approximate ([`HpFloat`], `f64`). [`Coeff`] is a coefficient field over
//! some `Real`, either the reals themselves or their complexification.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::hp::HpFloat;

/// Relative tolerance used by inexact comparisons.
pub const FLOAT_TOLERANCE: &str = "1e-30";

/// An ordered field with conversions used throughout the crate.
pub trait Real: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static + Modulus<Real = Self> {
    /// Whether arithmetic is exact, in which case comparisons use no tolerance.
    const EXACT: bool;

    fn from_ratio(q: &BigRational) -> Self;
    fn from_biguint(n: &BigUint) -> Self;
    fn to_hp(&self) -> HpFloat;
    fn from_hp(x: &HpFloat) -> Self;
    fn to_f64(&self) -> f64;
    /// Natural logarithm as `f64`; defined for positive values and robust to huge magnitudes.
    fn ln_f64(&self) -> f64;
    /// Relative comparison tolerance (zero when exact).
    fn tolerance() -> Self;
    fn to_decimal(&self) -> String;
    fn parse_str(s: &str) -> Option<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(n)))
    }

    fn powu(&self, n: u64) -> Self {
        num_traits::pow(self.clone(), n as usize)
    }

    /// `self <= other` up to the relative tolerance.
    fn le_tol(&self, other: &Self) -> bool {
        if Self::EXACT {
            return self <= other;
        }
        let mut scale = Self::one();
        for v in [self.abs(), other.abs()] {
            if v > scale {
                scale = v;
            }
        }
        self.clone() <= other.clone() + Self::tolerance() * scale
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parses `p/q`, integers and decimal or scientific notation exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let e = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut q = if e >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-e) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn from_ratio(q: &BigRational) -> Self {
        q.clone()
    }
    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }
    fn to_hp(&self) -> HpFloat {
        HpFloat::from_ratio(self)
    }
    fn from_hp(x: &HpFloat) -> Self {
        x.to_ratio()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn ln_f64(&self) -> f64 {
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }
    fn tolerance() -> Self {
        BigRational::zero()
    }
    fn to_decimal(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn parse_str(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

impl Real for HpFloat {
    const EXACT: bool = false;

    fn from_ratio(q: &BigRational) -> Self {
        HpFloat::from_ratio(q)
    }
    fn from_biguint(n: &BigUint) -> Self {
        HpFloat::from_bigint(&BigInt::from(n.clone()))
    }
    fn to_hp(&self) -> HpFloat {
        self.clone()
    }
    fn from_hp(x: &HpFloat) -> Self {
        x.clone()
    }
    fn to_f64(&self) -> f64 {
        HpFloat::to_f64(self)
    }
    fn ln_f64(&self) -> f64 {
        self.ln().to_f64()
    }
    fn tolerance() -> Self {
        HpFloat::parse_decimal(FLOAT_TOLERANCE).expect("tolerance literal")
    }
    fn to_decimal(&self) -> String {
        self.to_decimal_string()
    }
    fn parse_str(s: &str) -> Option<Self> {
        if let Some(q) = parse_rational(s) {
            return Some(HpFloat::from_ratio(&q));
        }
        HpFloat::parse_decimal(s)
    }
}

impl Real for f64 {
    const EXACT: bool = false;

    fn from_ratio(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn from_biguint(n: &BigUint) -> Self {
        n.to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_hp(&self) -> HpFloat {
        HpFloat::from_f64(*self)
    }
    fn from_hp(x: &HpFloat) -> Self {
        x.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn ln_f64(&self) -> f64 {
        self.ln()
    }
    fn tolerance() -> Self {
        1e-12
    }
    fn to_decimal(&self) -> String {
        format!("{self:?}")
    }
    fn parse_str(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

/// A coefficient field over a [`Real`] type.
pub trait Coeff: Clone + Debug + PartialEq + Num + std::ops::Neg<Output = Self> + Send + Sync + 'static {
    type Real: Real;

    fn from_real(r: Self::Real) -> Self;
    /// `|c|^2`, exact whenever the real type is.
    fn norm_sq(&self) -> Self::Real;
    /// Builds a coefficient from real and imaginary parts; `None` if the
    /// field cannot represent a nonzero imaginary part.
    fn from_parts(re: Self::Real, im: Self::Real) -> Option<Self>;
    fn parts(&self) -> (Self::Real, Self::Real);

    fn scale(&self, r: &Self::Real) -> Self {
        self.clone() * Self::from_real(r.clone())
    }
}

/// Coefficients whose modulus is representable in the real type.
pub trait Modulus: Coeff {
    fn modulus(&self) -> Self::Real;
}

macro_rules! real_coeff {
    ($t:ty) => {
        impl Coeff for $t {
            type Real = $t;
            fn from_real(r: $t) -> Self {
                r
            }
            fn norm_sq(&self) -> $t {
                self.clone() * self.clone()
            }
            fn from_parts(re: $t, im: $t) -> Option<Self> {
                if im.is_zero() {
                    Some(re)
                } else {
                    None
                }
            }
            fn parts(&self) -> ($t, $t) {
                (self.clone(), <$t>::zero())
            }
        }

        impl Modulus for $t {
            fn modulus(&self) -> $t {
                self.abs()
            }
        }

        impl Coeff for Complex<$t> {
            type Real = $t;
            fn from_real(r: $t) -> Self {
                Complex::new(r, <$t>::zero())
            }
            fn norm_sq(&self) -> $t {
                self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
            }
            fn from_parts(re: $t, im: $t) -> Option<Self> {
                Some(Complex::new(re, im))
            }
            fn parts(&self) -> ($t, $t) {
                (self.re.clone(), self.im.clone())
            }
        }
    };
}

real_coeff!(BigRational);
real_coeff!(HpFloat);
real_coeff!(f64);

impl Modulus for Complex<HpFloat> {
    fn modulus(&self) -> HpFloat {
        self.norm_sq().sqrt()
    }
}

impl Modulus for Complex<f64> {
    fn modulus(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

/// `n!` as a big unsigned integer.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Ratio of two positive integers.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Converts a `u64` into any real type.
pub fn real_u64<R: Real>(n: u64) -> R {
    R::from_biguint(&BigUint::from_u64(n).expect("u64"))
}
