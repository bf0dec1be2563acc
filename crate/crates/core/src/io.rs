//! JSON schemas and serialization helpers.
//!
//! Reals are written as decimal strings (`"p/q"` for exact rationals). On
//! input, numbers may be given as JSON numbers or as strings.

use num_complex::Complex;
use num_rational::BigRational;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::multiindex::MultiIndex;
use crate::scalar::{parse_rational, Coeff, Real};
use crate::series::TruncatedSeries;
use crate::weights::{asm_not_diff, asm_not_fdb, fdb_not_asm, fdb_not_log, star_product, AnyWeight, Generator, Weight};

pub fn ser_real<R: Real, S: Serializer>(x: &R, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_decimal())
}

pub fn ser_opt_real<R: Real, S: Serializer>(x: &Option<R>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_decimal()),
        None => s.serialize_none(),
    }
}

pub fn ser_hp<S: Serializer>(x: &HpFloat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_decimal_string())
}

pub fn ser_series<C: Coeff, S: Serializer>(f: &TruncatedSeries<C>, s: S) -> std::result::Result<S::Ok, S::Error> {
    series_to_json(f).serialize(s)
}

pub fn ser_weight<R: Real, S: Serializer>(w: &Weight<R>, s: S) -> std::result::Result<S::Ok, S::Error> {
    weight_to_json(w).serialize(s)
}

/// A number given either as a JSON number or as a string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(f) => f.to_string(),
            Scalar::Text(s) => s.trim().to_string(),
        }
    }

    /// Exact value of the literal, if it is a rational literal.
    pub fn to_rational(&self) -> Option<BigRational> {
        parse_rational(&self.text())
    }

    pub fn to_real<R: Real>(&self) -> Result<R> {
        R::parse_str(&self.text()).ok_or_else(|| Error::Schema(format!("not a number: {:?}", self.text())))
    }
}

impl From<String> for Scalar {
    fn from(s: String) -> Self {
        Scalar::Text(s)
    }
}

/// A coefficient entry: `[re, im]` or a bare real.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Pair([Scalar; 2]),
    Real(Scalar),
}

impl ComplexJson {
    fn parts<R: Real>(&self) -> Result<(R, R)> {
        match self {
            ComplexJson::Pair([re, im]) => Ok((re.to_real()?, im.to_real()?)),
            ComplexJson::Real(re) => Ok((re.to_real()?, R::zero())),
        }
    }

    fn is_real(&self) -> bool {
        match self {
            ComplexJson::Real(_) => true,
            ComplexJson::Pair([_, im]) => im.to_rational().is_some_and(|q| q == BigRational::from_integer(0.into())),
        }
    }

    fn is_exact(&self) -> bool {
        match self {
            ComplexJson::Pair([re, im]) => re.to_rational().is_some() && im.to_rational().is_some(),
            ComplexJson::Real(re) => re.to_rational().is_some(),
        }
    }
}

fn complex_json<C: Coeff>(c: &C) -> ComplexJson {
    let (re, im) = c.parts();
    ComplexJson::Pair([re.to_decimal().into(), im.to_decimal().into()])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub k: Vec<u32>,
    pub v: Vec<ComplexJson>,
}

/// `{"dim_in", "dim_out", "order", "coeffs": [{"k": [..], "v": [[re, im], ..]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub order: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub has_constant: bool,
    pub coeffs: Vec<TermJson>,
}

impl SeriesJson {
    /// Whether every coefficient is a rational literal.
    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|t| t.v.iter().all(ComplexJson::is_exact))
    }

    /// Whether every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|t| t.v.iter().all(ComplexJson::is_real))
    }

    pub fn to_series<C: Coeff>(&self) -> Result<TruncatedSeries<C>> {
        let mut f = TruncatedSeries::zero(self.dim_in, self.dim_out, self.order);
        if self.has_constant || self.coeffs.iter().any(|t| t.k.iter().all(|&e| e == 0)) {
            f = f.with_constant();
        }
        for t in &self.coeffs {
            let v = t
                .v
                .iter()
                .map(|c| {
                    let (re, im) = c.parts::<C::Real>()?;
                    C::from_parts(re, im).ok_or_else(|| Error::Schema("complex coefficient in a real series".into()))
                })
                .collect::<Result<Vec<C>>>()?;
            f.add_at(MultiIndex::new(t.k.clone()), v).map_err(|e| Error::Schema(e.to_string()))?;
        }
        Ok(f)
    }
}

pub fn series_to_json<C: Coeff>(f: &TruncatedSeries<C>) -> SeriesJson {
    SeriesJson {
        dim_in: f.dim_in(),
        dim_out: f.dim_out(),
        order: f.order(),
        has_constant: f.has_constant(),
        coeffs: f
            .terms()
            .map(|(k, v)| TermJson { k: k.exps().to_vec(), v: v.iter().map(complex_json).collect() })
            .collect(),
    }
}

/// `{"generator": {"kind": .., "params": {..}} | null, "values": [..], "horizon": N}`.
///
/// `values` may be empty when a generator is given; the generator is then
/// materialized to the horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightJson {
    #[serde(default)]
    pub generator: Option<Generator>,
    #[serde(default)]
    pub values: Vec<Scalar>,
    pub horizon: usize,
}

pub fn weight_to_json<R: Real>(w: &Weight<R>) -> WeightJson {
    WeightJson {
        generator: w.generator.clone(),
        values: w.values().iter().map(|v| Scalar::Text(v.to_decimal())).collect(),
        horizon: w.horizon(),
    }
}

impl WeightJson {
    /// Exact when every value is a rational literal, otherwise high-precision.
    pub fn to_weight(&self) -> Result<AnyWeight> {
        if self.values.is_empty() {
            let g = self.generator.as_ref().ok_or_else(|| Error::Schema("weight needs values or a generator".into()))?;
            return materialize(g, self.horizon);
        }
        if self.values.len() != self.horizon {
            return Err(Error::Schema(format!("{} values for horizon {}", self.values.len(), self.horizon)));
        }
        let exact: Option<Vec<BigRational>> = self.values.iter().map(Scalar::to_rational).collect();
        match exact {
            Some(v) => Ok(AnyWeight::Exact(Weight::new(v, self.generator.clone())?)),
            None => {
                let v = self.values.iter().map(Scalar::to_real::<HpFloat>).collect::<Result<Vec<_>>>()?;
                Ok(AnyWeight::Float(Weight::new(v, self.generator.clone())?))
            }
        }
    }
}

fn param(s: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| Error::Schema(format!("generator parameter {s:?} is not rational")))
}

/// Materializes a closed-form generator to `horizon` values.
pub fn materialize(g: &Generator, horizon: usize) -> Result<AnyWeight> {
    Ok(match g {
        Generator::Constant { c } => AnyWeight::Exact(Weight::constant(param(c)?, horizon)?),
        Generator::Gevrey { s } => {
            let s = param(s)?;
            if s.is_integer() {
                AnyWeight::Exact(Weight::gevrey(&s, horizon)?)
            } else {
                AnyWeight::Float(Weight::gevrey(&s, horizon)?)
            }
        }
        Generator::Logpow { scale } => AnyWeight::Float(fdb_not_asm(horizon, &param(scale)?)?),
        Generator::FdbNotLog => AnyWeight::Exact(fdb_not_log(horizon)?),
        Generator::AsmNotDiff => AnyWeight::Exact(asm_not_diff(horizon)?),
        Generator::AsmNotFdb { multiplier } => AnyWeight::Float(asm_not_fdb(horizon, &param(multiplier)?)?),
        Generator::LeftShift { base } => match materialize(base, horizon + 1)? {
            AnyWeight::Exact(w) => AnyWeight::Exact(w.left_shift()?),
            AnyWeight::Float(w) => AnyWeight::Float(w.left_shift()?),
        },
        Generator::Star { left, right } => match (materialize(left, horizon)?, materialize(right, horizon)?) {
            (AnyWeight::Exact(a), AnyWeight::Exact(b)) => AnyWeight::Exact(star_product(&a, &b)?),
            (a, b) => AnyWeight::Float(star_product(&a.to_hp(), &b.to_hp())?),
        },
        Generator::CustomTable => return Err(Error::Schema("custom-table weights need explicit values".into())),
    })
}

/// `{"eigenvalues": [[re, im], ..], "exact": bool}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenJson {
    pub eigenvalues: Vec<ComplexJson>,
    #[serde(default = "default_true")]
    pub exact: bool,
}

fn default_true() -> bool {
    true
}

impl EigenJson {
    pub fn exact_values(&self) -> Result<Vec<Complex<BigRational>>> {
        self.eigenvalues
            .iter()
            .map(|c| {
                let (re, im) = c.parts::<BigRational>()?;
                Ok(Complex::new(re, im))
            })
            .collect()
    }

    pub fn float_values(&self) -> Result<Vec<Complex<HpFloat>>> {
        self.eigenvalues
            .iter()
            .map(|c| {
                let (re, im) = c.parts::<HpFloat>()?;
                Ok(Complex::new(re, im))
            })
            .collect()
    }

    pub fn from_values<R: Real>(values: &[Complex<R>], exact: bool) -> Self
    where
        Complex<R>: Coeff<Real = R>,
    {
        EigenJson { eigenvalues: values.iter().map(complex_json).collect(), exact }
    }
}
