//! Fixed-precision binary floating point built on `dashu-float`.
//!
//! Every value is rounded to the process-wide working precision, so mixed
//! operands never silently degrade to the precision of a small literal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use dashu_float::round::mode::HalfEven;
use dashu_float::{DBig, FBig};
use dashu_int::{IBig, Sign, UBig};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

type Inner = FBig<HalfEven, 2>;

/// Default mantissa width in bits.
pub const DEFAULT_PRECISION: usize = 128;

static PRECISION: AtomicUsize = AtomicUsize::new(DEFAULT_PRECISION);

/// Sets the working precision in bits (clamped to at least 128).
pub fn set_precision(bits: usize) {
    PRECISION.store(bits.max(DEFAULT_PRECISION), AtomicOrdering::Relaxed);
}

/// Current working precision in bits.
pub fn precision() -> usize {
    PRECISION.load(AtomicOrdering::Relaxed)
}

/// A high-precision real number.
#[derive(Clone, PartialEq)]
pub struct HpFloat(Inner);

fn round(x: Inner) -> Inner {
    let p = precision();
    if x.precision() == p {
        x
    } else {
        x.with_precision(p).value()
    }
}

fn bigint_to_ibig(n: &BigInt) -> IBig {
    let (sign, bytes) = n.to_bytes_le();
    let mag = UBig::from_le_bytes(&bytes);
    match sign {
        num_bigint::Sign::Minus => IBig::from_parts(Sign::Negative, mag),
        _ => IBig::from(mag),
    }
}

impl HpFloat {
    fn wrap(x: Inner) -> Self {
        HpFloat(round(x))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::wrap(Inner::from(bigint_to_ibig(n)))
    }

    pub fn from_ratio(q: &BigRational) -> Self {
        let n = Self::from_bigint(q.numer());
        let d = Self::from_bigint(q.denom());
        n / d
    }

    pub fn from_f64(x: f64) -> Self {
        Self::wrap(Inner::try_from(x).unwrap_or(Inner::ZERO))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    /// Exact dyadic value as a rational.
    pub fn to_ratio(&self) -> BigRational {
        let repr = self.0.repr();
        let (sign, mag) = repr.significand().clone().into_parts();
        let mut n = BigInt::from_bytes_le(num_bigint::Sign::Plus, &mag.to_le_bytes());
        if sign == Sign::Negative {
            n = -n;
        }
        let e = repr.exponent();
        let two = BigInt::from(2);
        if e >= 0 {
            BigRational::from_integer(n * num_traits::pow(two, e as usize))
        } else {
            BigRational::new(n, num_traits::pow(two, (-e) as usize))
        }
    }

    /// Natural logarithm; panics on non-positive input.
    pub fn ln(&self) -> Self {
        assert!(self.0 > Inner::ZERO, "logarithm of a non-positive number");
        Self::wrap(self.0.ln())
    }

    pub fn exp(&self) -> Self {
        Self::wrap(self.0.exp())
    }

    pub fn sqrt(&self) -> Self {
        if self.0 <= Inner::ZERO {
            return HpFloat::zero();
        }
        Self::wrap(self.0.sqrt())
    }

    /// `self^e` for positive `self`.
    pub fn powf(&self, e: &HpFloat) -> Self {
        if e.is_zero() {
            return HpFloat::one();
        }
        (self.ln() * e.clone()).exp()
    }

    pub fn powi(&self, e: i64) -> Self {
        Self::wrap(self.0.powi(IBig::from(e)))
    }

    pub fn floor(&self) -> Self {
        Self::wrap(self.0.floor())
    }

    pub fn ceil(&self) -> Self {
        -(-self.clone()).floor()
    }

    /// Decimal rendering with enough digits to round-trip the working precision.
    pub fn to_decimal_string(&self) -> String {
        if self.0 == Inner::ZERO {
            return "0".to_string();
        }
        let digits = precision() * 30103 / 100000 + 2;
        let d = self.0.clone().with_base_and_precision::<10>(digits).value();
        d.to_string()
    }

    pub fn parse_decimal(s: &str) -> Option<Self> {
        let d: DBig = s.trim().parse().ok()?;
        let b = d
            .with_base_and_precision::<2>(precision())
            .value()
            .with_rounding::<HalfEven>();
        Some(Self::wrap(b))
    }

    pub fn abs(&self) -> Self {
        Signed::abs(self)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

/// Serialized as a decimal string.
impl serde::Serialize for HpFloat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for HpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

impl fmt::Display for HpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

impl PartialOrd for HpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for HpFloat {
            type Output = HpFloat;
            fn $m(self, rhs: HpFloat) -> HpFloat {
                HpFloat::wrap(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a HpFloat> for &'a HpFloat {
            type Output = HpFloat;
            fn $m(self, rhs: &'a HpFloat) -> HpFloat {
                HpFloat::wrap(&self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Rem for HpFloat {
    type Output = HpFloat;
    fn rem(self, rhs: HpFloat) -> HpFloat {
        let q = HpFloat::wrap((&self.0 / &rhs.0).trunc());
        self - q * rhs
    }
}

impl Neg for HpFloat {
    type Output = HpFloat;
    fn neg(self) -> HpFloat {
        HpFloat(-self.0)
    }
}

impl Zero for HpFloat {
    fn zero() -> Self {
        Self::wrap(Inner::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0 == Inner::ZERO
    }
}

impl One for HpFloat {
    fn one() -> Self {
        Self::wrap(Inner::ONE)
    }
}

impl Num for HpFloat {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        HpFloat::parse_decimal(s).ok_or_else(|| format!("invalid decimal {s:?}"))
    }
}

impl Signed for HpFloat {
    fn abs(&self) -> Self {
        if self.0 < Inner::ZERO {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            HpFloat::zero()
        } else {
            self.clone() - other.clone()
        }
    }
    fn signum(&self) -> Self {
        Self::wrap(self.0.signum())
    }
    fn is_positive(&self) -> bool {
        self.0 > Inner::ZERO
    }
    fn is_negative(&self) -> bool {
        self.0 < Inner::ZERO
    }
}

impl FromPrimitive for HpFloat {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::wrap(Inner::from(n)))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::wrap(Inner::from(n)))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Inner::try_from(n).ok().map(Self::wrap)
    }
}

impl From<i64> for HpFloat {
    fn from(n: i64) -> Self {
        Self::wrap(Inner::from(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_carry_working_precision() {
        let third = HpFloat::one() / HpFloat::from(3);
        let back = third * HpFloat::from(3);
        let err = (back - HpFloat::one()).abs();
        assert!(err < HpFloat::parse_decimal("1e-35").unwrap());
    }

    #[test]
    fn ln_exp_roundtrip() {
        let x = HpFloat::parse_decimal("12.5").unwrap();
        let y = x.ln().exp();
        assert!((y - x).abs() < HpFloat::parse_decimal("1e-30").unwrap());
    }

    #[test]
    fn rational_conversion() {
        let q = BigRational::new(BigInt::from(-7), BigInt::from(4));
        assert_eq!(HpFloat::from_ratio(&q).to_f64(), -1.75);
    }

    #[test]
    fn dyadic_to_ratio_is_exact() {
        let x = HpFloat::parse_decimal("-2.375").unwrap();
        let q = x.to_ratio();
        assert_eq!(q, BigRational::new(BigInt::from(-19), BigInt::from(8)));
        let y = HpFloat::from(7).sqrt();
        assert_eq!(HpFloat::from_ratio(&y.to_ratio()), y);
    }

    #[test]
    fn decimal_roundtrip() {
        let x = HpFloat::from(2).sqrt();
        let y = HpFloat::parse_decimal(&x.to_decimal_string()).unwrap();
        assert!((x - y).abs() < HpFloat::parse_decimal("1e-36").unwrap());
    }
}
