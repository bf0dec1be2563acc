//! Formal linearization at a nonresonant fixed point and small-divisor bookkeeping.
//!
//! Small divisors are handled through squared moduli, so `E_k^2`, `Delta_k^2`
//! and the thresholds `eta^2 Omega(n)^2` are exact for Gaussian rational
//! eigenvalues.

mod domination;
mod formal;
mod ledger;
mod resonance;
mod table;

pub use domination::{
    bruno_partial_sums, classify_regularity, dominating_weight, fit_gevrey_delta, growth_exponent, ClassTag, DominationCertificate, Policy,
    RegularityClass, RegularityReport, ESCALATION_BUDGET,
};
pub use formal::{conjugacy_residual, formal_linearize};
pub use ledger::{
    accumulation_ledger, counting_lemma_check, siegel_bound_check, sigma_sequence, AccumulationLedger, CountingReport,
    LedgerEntry, SiegelReport, SiegelViolation, ledger_from_report,
};
pub use resonance::{check_nonresonance, OmegaTable, ResonanceReport};
pub use table::{coefficient_table, write_csv, TableRow};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::Coeff;
use crate::series::TruncatedSeries;

/// Eigenvalues of a diagonal linear part `Lambda = diag(lambda_1, ..., lambda_s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPart<C: Coeff> {
    eigenvalues: Vec<C>,
    eta_sq: C::Real,
}

impl<C: Coeff> LinearPart<C> {
    pub fn new(eigenvalues: Vec<C>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Dimension("no eigenvalues".into()));
        }
        if let Some(i) = eigenvalues.iter().position(Zero::is_zero) {
            return Err(Error::ZeroEigenvalue(i));
        }
        let mut worst = C::Real::zero();
        for a in &eigenvalues {
            for b in &eigenvalues {
                let q = a.norm_sq() / b.norm_sq();
                if q > worst {
                    worst = q;
                }
            }
        }
        let sixteen = <C::Real as crate::scalar::Real>::from_int(16);
        Ok(LinearPart { eigenvalues, eta_sq: sixteen * worst })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[C] {
        &self.eigenvalues
    }

    /// `eta^2 = 16 max |lambda_i / lambda_j|^2`.
    pub fn eta_sq(&self) -> &C::Real {
        &self.eta_sq
    }

    /// `lambda^k = prod lambda_i^(k_i)`.
    pub fn power(&self, k: &MultiIndex) -> C {
        let mut p = C::one();
        for (l, &e) in self.eigenvalues.iter().zip(k.exps()) {
            for _ in 0..e {
                p = p * l.clone();
            }
        }
        p
    }

    /// `x -> Lambda x` as a series.
    pub fn diagonal(&self, order: usize) -> TruncatedSeries<C> {
        TruncatedSeries::diagonal(&self.eigenvalues, order)
    }
}
