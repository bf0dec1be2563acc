//! Weighted majorant series, seminorms and the composition inequality.

use serde::Serialize;

use super::{compose, TruncatedSeries};
use crate::error::{Error, Result};
use crate::io::{ser_real, ser_series};
use crate::multiindex::MultiIndex;
use crate::scalar::{Modulus, Real};
use crate::weights::{lambda_powers, ProductTable, Weight, Witness};

/// `sum_{k != 0} |f_k| / m_|k| x^k`, componentwise, from the weight `m`.
#[derive(Clone, Debug)]
pub struct MajorantSeries<R: Real> {
    pub series: TruncatedSeries<R>,
    pub weight: Weight<R>,
}

/// Builds the weighted majorant of `f`; the constant term is dropped.
pub fn majorant<C: Modulus>(f: &TruncatedSeries<C>, m: &Weight<C::Real>) -> Result<MajorantSeries<C::Real>> {
    if let Some((_, hi)) = f.degree_span() {
        if hi > m.horizon() {
            return Err(Error::HorizonTooSmall { what: "majorant".into(), have: m.horizon(), need: hi });
        }
    }
    let mut out = TruncatedSeries::zero(f.dim_in(), f.dim_out(), f.order());
    for (k, v) in f.terms().filter(|(k, _)| k.degree() > 0) {
        let mk = m.m(k.degree());
        out.set(k.clone(), v.iter().map(|c| c.modulus() / mk.clone()).collect())?;
    }
    Ok(MajorantSeries { series: out, weight: m.clone() })
}

/// `max_i sum_k c_{k,i} r^|k|` for a nonnegative series.
pub fn seminorm<R: Real>(f: &TruncatedSeries<R>, r: &R) -> R {
    let mut sums = vec![R::zero(); f.dim_out()];
    for (k, v) in f.terms() {
        let rk = r.powu(k.degree() as u64);
        for (s, c) in sums.iter_mut().zip(v) {
            *s = s.clone() + c.clone() * rk.clone();
        }
    }
    sums.into_iter().fold(R::zero(), R::max_of)
}

/// First failing tuple of `w_r m_{k_1}...m_{k_r} <= lambda^k m_k` with
/// `k = k_1 + ... + k_r <= n`.
pub fn composition_hypothesis<R: Real>(w: &Weight<R>, m: &Weight<R>, lambda: &R, n: usize) -> Result<Option<Witness<R>>> {
    if m.horizon() < n || w.horizon() < n {
        return Err(Error::HorizonTooSmall { what: "composition hypothesis".into(), have: m.horizon().min(w.horizon()), need: n });
    }
    let m = m.truncate(n)?;
    let table = ProductTable::build(&m);
    let pw = lambda_powers(lambda, n);
    for k in 1..=n {
        for r in 1..=k {
            let lhs = w.m(r) * table.value(k, r);
            let rhs = pw[k].clone() * m.m(k);
            if !lhs.le_tol(&rhs) {
                return Ok(Some(Witness { indices: table.tuple(k, r), lhs, rhs }));
            }
        }
    }
    Ok(None)
}

/// A coefficient where a claimed inequality fails.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct Violation<R: Real> {
    pub k: MultiIndex,
    pub component: usize,
    #[serde(serialize_with = "ser_real")]
    pub lhs: R,
    #[serde(serialize_with = "ser_real")]
    pub rhs: R,
}

/// Coefficientwise comparison `lhs <= rhs`.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct ComparisonReport<R: Real> {
    pub holds: bool,
    /// Number of coefficients compared.
    pub checked: usize,
    /// Number of compared coefficients where both sides agree.
    pub equalities: usize,
    pub first_violation: Option<Violation<R>>,
    #[serde(serialize_with = "ser_series")]
    pub lhs: TruncatedSeries<R>,
    #[serde(serialize_with = "ser_series")]
    pub rhs: TruncatedSeries<R>,
}

impl<R: Real> ComparisonReport<R> {
    pub(crate) fn compare(lhs: TruncatedSeries<R>, rhs: TruncatedSeries<R>) -> Self {
        let mut keys: Vec<MultiIndex> = lhs.terms().chain(rhs.terms()).map(|(k, _)| k.clone()).collect();
        keys.sort();
        keys.dedup();
        let mut checked = 0;
        let mut equalities = 0;
        let mut first_violation = None;
        for k in keys.iter().filter(|k| k.degree() > 0) {
            for i in 0..lhs.dim_out() {
                let (a, b) = (lhs.coeff(k, i), rhs.coeff(k, i));
                checked += 1;
                if a.le_tol(&b) && b.le_tol(&a) {
                    equalities += 1;
                }
                if first_violation.is_none() && !a.le_tol(&b) {
                    first_violation = Some(Violation { k: k.clone(), component: i, lhs: a, rhs: b });
                }
            }
        }
        ComparisonReport { holds: first_violation.is_none(), checked, equalities, first_violation, lhs, rhs }
    }

    /// Whether both sides agree at every compared coefficient.
    pub fn is_equality(&self) -> bool {
        self.equalities == self.checked
    }
}

fn precondition<R: Real>(w: &Weight<R>, m: &Weight<R>, lambda: &R, n: usize) -> Result<()> {
    if let Some(wit) = composition_hypothesis(w, m, lambda, n)? {
        return Err(Error::Precondition(format!(
            "w_r m_k1..m_kr <= lambda^k m_k fails at parts {:?}: {} > {}",
            wit.indices,
            wit.lhs.to_decimal(),
            wit.rhs.to_decimal()
        )));
    }
    Ok(())
}

/// Checks `M^m(g o h) <= M^w g o M^m h o lambda` coefficientwise up to `order`.
pub fn main_lemma_check<C: Modulus>(
    g: &TruncatedSeries<C>,
    h: &TruncatedSeries<C>,
    w: &Weight<C::Real>,
    m: &Weight<C::Real>,
    lambda: &C::Real,
    order: usize,
) -> Result<ComparisonReport<C::Real>> {
    for f in [g, h] {
        if f.constant_term().iter().any(|c| !num_traits::Zero::is_zero(c)) {
            return Err(Error::ConstantTerm);
        }
    }
    let n = order.min(g.order()).min(h.order());
    precondition(w, m, lambda, n)?;
    let lhs = majorant(&compose(g, h, n)?, m)?.series;
    let mg = majorant(&g.truncate(n), w)?.series;
    let pw = lambda_powers(lambda, n);
    let mh = majorant(&h.truncate(n), m)?.series.scale_by_degree(|d| pw[d].clone());
    let rhs = compose(&mg, &mh, n)?;
    Ok(ComparisonReport::compare(lhs, rhs))
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct SeminormReport<R: Real> {
    /// Truncated seminorm of `g o h` with weight `m` at radius `r`.
    #[serde(serialize_with = "ser_real")]
    pub lhs: R,
    /// Truncated seminorm of `h` with weight `m` at radius `lambda r`.
    #[serde(serialize_with = "ser_real")]
    pub rho: R,
    /// Truncated seminorm of `g` with weight `w` at radius `rho`.
    #[serde(serialize_with = "ser_real")]
    pub rhs: R,
    pub holds: bool,
}

/// Checks the seminorm form of the composition estimate.
///
/// `h` is the Taylor series at a base point `a` whose constant term is
/// `h(a)`; `g` is the Taylor series at `h(a)`. Constant terms do not enter
/// the seminorms.
pub fn composition_seminorm_bound<C: Modulus>(
    g: &TruncatedSeries<C>,
    h: &TruncatedSeries<C>,
    w: &Weight<C::Real>,
    m: &Weight<C::Real>,
    lambda: &C::Real,
    r: &C::Real,
) -> Result<SeminormReport<C::Real>> {
    let n = g.order().min(h.order());
    precondition(w, m, lambda, n)?;
    let h_hat = h.part(1, n);
    let gh = compose(&g.part(1, n), &h_hat, n)?;
    let lhs = seminorm(&majorant(&gh, m)?.series, r);
    let rho = seminorm(&majorant(&h_hat, m)?.series, &(lambda.clone() * r.clone()));
    let rhs = seminorm(&majorant(&g.part(1, n), w)?.series, &rho);
    let holds = lhs.le_tol(&rhs);
    Ok(SeminormReport { lhs, rho, rhs, holds })
}
