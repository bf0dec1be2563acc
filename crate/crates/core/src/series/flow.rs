//! Taylor coefficients of one-dimensional time-dependent flows and their majorants.
//!
//! Series in `(t, x)` use variable 0 for time and variable 1 for space.

use num_traits::One;
use serde::Serialize;

use super::majorant::ComparisonReport;
use super::{compose, TruncatedSeries};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::{Coeff, Modulus, Real};
use crate::weights::Weight;

fn idx(i: usize, j: usize) -> MultiIndex {
    MultiIndex::new(vec![i as u32, j as u32])
}

/// Solves `d/dt phi = v(t, phi)`, `phi(0, x) = x0 x` degree by degree, with
/// the time coordinate entering `v` as `t0 t`.
fn recursion<C: Coeff>(v: &TruncatedSeries<C>, order: usize, t0: C, x0: C) -> Result<TruncatedSeries<C>> {
    if v.dim_in() != 2 || v.dim_out() != 1 {
        return Err(Error::Dimension(format!(
            "flow field must map (t, x) to one component, got {} -> {}",
            v.dim_in(),
            v.dim_out()
        )));
    }
    let n = order.min(v.order() + 1);
    let mut phi = TruncatedSeries::zero(2, 1, n);
    phi.set(idx(0, 1), vec![x0])?;
    for d in 1..=n {
        let mut inner = TruncatedSeries::zero(2, 2, d - 1);
        if d > 1 {
            inner.set(idx(1, 0), vec![t0.clone(), C::zero()])?;
        }
        for (k, c) in phi.terms().filter(|(k, _)| k.degree() < d) {
            inner.add_at(k.clone(), vec![C::zero(), c[0].clone()])?;
        }
        let rhs = compose(v, &inner, d - 1)?;
        for i in 1..=d {
            let c = rhs.coeff(&idx(i - 1, d - i), 0);
            let inv = C::from_real(<C::Real as Real>::from_ratio(&crate::scalar::ratio(1, i as i64)));
            phi.set(idx(i, d - i), vec![c * inv])?;
        }
    }
    Ok(phi)
}

/// Taylor coefficients of the flow `phi(t, x)` of `d/dt phi = v(t, phi)`,
/// `phi(0, x) = x`, up to total degree `order`.
pub fn flow_coefficients<C: Coeff>(v: &TruncatedSeries<C>, order: usize) -> Result<TruncatedSeries<C>> {
    recursion(v, order, C::one(), C::one())
}

/// Coefficientwise comparison of the weighted majorant of the flow against
/// the formal solution `g` of `d/dt g = Mv o g`.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct FlowReport<R: Real> {
    pub order: usize,
    pub comparison: ComparisonReport<R>,
}

/// Majorant comparison for flows with the product weight
/// `m_(i, j) = m_time_i m_space_j` (`m_0 = 1`).
pub fn flow_majorant_check<C: Modulus>(
    v: &TruncatedSeries<C>,
    m_time: &Weight<C::Real>,
    m_space: &Weight<C::Real>,
    order: usize,
) -> Result<FlowReport<C::Real>> {
    let n = order.min(v.order() + 1);
    let horizon = m_time.horizon().min(m_space.horizon());
    if horizon < n {
        return Err(Error::HorizonTooSmall { what: "flow weights".into(), have: horizon, need: n });
    }
    let weight = |k: &MultiIndex| {
        let e = k.exps();
        let w = |m: &Weight<C::Real>, i: u32| if i == 0 { C::Real::one() } else { m.m(i as usize) };
        w(m_time, e[0]) * w(m_space, e[1])
    };
    let phi = flow_coefficients(v, n)?;
    let mut mv = TruncatedSeries::zero(2, 1, v.order()).with_constant();
    for (k, c) in v.terms() {
        mv.set(k.clone(), vec![c[0].modulus() / weight(k)])?;
    }
    let one = C::Real::one();
    let g = recursion(&mv, n, one.clone() / weight(&idx(1, 0)), one / weight(&idx(0, 1)))?;
    let mut lhs = TruncatedSeries::zero(2, 1, n);
    for (k, c) in phi.terms() {
        lhs.set(k.clone(), vec![c[0].modulus() / weight(k)])?;
    }
    Ok(FlowReport { order: n, comparison: ComparisonReport::compare(lhs, g) })
}
