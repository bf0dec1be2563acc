//! Per-coefficient table of divisors, bounds and weights, for plotting.

use std::io::Write;

use num_traits::Zero;
use serde::Serialize;

use super::AccumulationLedger;
use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::multiindex::MultiIndex;
use crate::scalar::{Coeff, Real};
use crate::series::TruncatedSeries;
use crate::weights::Weight;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    /// Exponents joined by `;`.
    pub k: String,
    pub degree: usize,
    /// Empty for `|k| = 1`.
    pub e_k: String,
    pub delta_k: String,
    /// Largest component modulus of `phi_k`.
    pub phi_k: String,
    pub sigma_delta_k: String,
    pub m_k: String,
    pub w_k: String,
}

fn key(k: &MultiIndex) -> String {
    k.exps().iter().map(u32::to_string).collect::<Vec<_>>().join(";")
}

/// One row per multi-index of the ledger with `|k| <= min(order, horizons)`.
pub fn coefficient_table<C: Coeff>(
    ledger: &AccumulationLedger<C::Real>,
    phi: &TruncatedSeries<C>,
    m: &Weight<C::Real>,
    w: &Weight<HpFloat>,
) -> Result<Vec<TableRow>> {
    if phi.dim_out() != ledger.dim {
        return Err(Error::Dimension(format!("phi has {} components, ledger {}", phi.dim_out(), ledger.dim)));
    }
    let n = ledger.order.min(phi.order()).min(m.horizon()).min(w.horizon());
    let rows = ledger
        .entries
        .iter()
        .filter(|(k, _)| k.degree() <= n)
        .map(|(k, e)| {
            let d = k.degree();
            let phi_sq = phi
                .get(k)
                .map(|v| v.iter().map(|c| c.norm_sq().to_hp()).fold(HpFloat::zero(), HpFloat::max))
                .unwrap_or_else(HpFloat::zero);
            let delta = e.delta_sq.to_hp().sqrt();
            let sigma = HpFloat::from_bigint(&ledger.sigma[d].clone().into());
            TableRow {
                k: key(k),
                degree: d,
                e_k: e.e_sq.as_ref().map(|x| x.to_hp().sqrt().to_decimal_string()).unwrap_or_default(),
                delta_k: delta.to_decimal_string(),
                phi_k: phi_sq.sqrt().to_decimal_string(),
                sigma_delta_k: (sigma * delta).to_decimal_string(),
                m_k: m.m(d).to_decimal(),
                w_k: w.m(d).to_decimal_string(),
            }
        })
        .collect();
    Ok(rows)
}

/// Writes the rows as CSV with a header line.
pub fn write_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Schema(format!("csv: {e}"));
    wr.write_record(["k", "degree", "E_k", "Delta_k", "phi_k", "sigma_Delta_k", "m_k", "w_k"]).map_err(io)?;
    for r in rows {
        wr.write_record([
            r.k.as_str(),
            &r.degree.to_string(),
            &r.e_k,
            &r.delta_k,
            &r.phi_k,
            &r.sigma_delta_k,
            &r.m_k,
            &r.w_k,
        ])
        .map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Schema(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::{accumulation_ledger, formal_linearize, LinearPart};
    use crate::scalar::ratio;
    use num_rational::BigRational as Q;

    #[test]
    fn scalar_table() {
        let l = LinearPart::new(vec![ratio(2, 1)]).unwrap();
        let g = TruncatedSeries::from_terms(1, 1, 4, [(vec![2], vec![ratio(1, 1)])]).unwrap();
        let phi = formal_linearize(&l, &g, 4).unwrap();
        let led = accumulation_ledger(&l, 4).unwrap();
        let m = Weight::<Q>::unit(4).unwrap();
        let rows = coefficient_table(&led, &phi, &m, &m.to_hp()).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1].k, "2");
        assert_eq!(rows[1].phi_k.parse::<f64>().unwrap(), 0.5);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,degree,E_k,Delta_k,phi_k,sigma_Delta_k,m_k,w_k\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
