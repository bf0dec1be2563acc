//! Weight sequences, weighted majorant series and small-divisor linearization.

pub mod error;
pub mod fixtures;
pub mod hp;
pub mod io;
pub mod linearize;
pub mod multiindex;
pub mod scalar;
pub mod series;
pub mod weights;

pub use error::{Error, Result};
pub use hp::HpFloat;
pub use multiindex::MultiIndex;
pub use scalar::{Coeff, Modulus, Real};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Exact Gaussian rational scalar.
pub type GaussianRational = num_complex::Complex<Rational>;
/// High-precision complex scalar.
pub type HpComplex = num_complex::Complex<HpFloat>;
