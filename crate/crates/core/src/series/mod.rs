//! Multivariate truncated power series with vector coefficients.

mod compose;
mod flow;
mod majorant;

pub use compose::{compose, inverse_series, solve_graded};
pub use flow::{flow_coefficients, flow_majorant_check, FlowReport};
pub use majorant::{
    composition_hypothesis, composition_seminorm_bound, main_lemma_check, majorant, seminorm,
    ComparisonReport, MajorantSeries, SeminormReport, Violation,
};

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::multiindex::{IndexSpace, MultiIndex};
use crate::scalar::Coeff;

/// A map `K^s -> K^s'` truncated at total degree `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    dim_in: usize,
    dim_out: usize,
    order: usize,
    coeffs: BTreeMap<MultiIndex, Vec<C>>,
    has_constant: bool,
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn zero(dim_in: usize, dim_out: usize, order: usize) -> Self {
        TruncatedSeries { dim_in, dim_out, order, coeffs: BTreeMap::new(), has_constant: false }
    }

    /// Allows a constant term.
    pub fn with_constant(mut self) -> Self {
        self.has_constant = true;
        self
    }

    /// The identity map `x -> x` in `s` variables.
    pub fn identity(s: usize, order: usize) -> Self {
        let mut f = Self::zero(s, s, order);
        for j in 0..s {
            let mut v = vec![C::zero(); s];
            v[j] = C::one();
            f.coeffs.insert(MultiIndex::unit(s, j), v);
        }
        f
    }

    /// The diagonal linear map `x -> (d_1 x_1, ..., d_s x_s)`.
    pub fn diagonal(d: &[C], order: usize) -> Self {
        let s = d.len();
        let mut f = Self::zero(s, s, order);
        for (j, dj) in d.iter().enumerate() {
            let mut v = vec![C::zero(); s];
            v[j] = dj.clone();
            f.set(MultiIndex::unit(s, j), v).expect("unit index");
        }
        f
    }

    /// Builds a series from `(exponents, coefficient vector)` pairs.
    pub fn from_terms(
        dim_in: usize,
        dim_out: usize,
        order: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Vec<C>)>,
    ) -> Result<Self> {
        let mut f = Self::zero(dim_in, dim_out, order);
        for (k, v) in terms {
            let k = MultiIndex::new(k);
            if k.degree() == 0 {
                f.has_constant = true;
            }
            f.add_at(k, v)?;
        }
        Ok(f)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn has_constant(&self) -> bool {
        self.has_constant
    }

    fn check_index(&self, k: &MultiIndex, v: &[C]) -> Result<()> {
        if k.dim() != self.dim_in {
            return Err(Error::Dimension(format!("index {:?} in a series of {} variables", k, self.dim_in)));
        }
        if v.len() != self.dim_out {
            return Err(Error::Dimension(format!("coefficient of length {} for dim_out {}", v.len(), self.dim_out)));
        }
        if k.degree() > self.order || (k.degree() == 0 && !self.has_constant) {
            return Err(Error::BadDegree(k.degree()));
        }
        Ok(())
    }

    /// Replaces the coefficient at `k`; zero vectors are not stored.
    pub fn set(&mut self, k: MultiIndex, v: Vec<C>) -> Result<()> {
        self.check_index(&k, &v)?;
        if v.iter().all(Zero::is_zero) {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, v);
        }
        Ok(())
    }

    /// Adds `v` to the coefficient at `k`.
    pub fn add_at(&mut self, k: MultiIndex, v: Vec<C>) -> Result<()> {
        self.check_index(&k, &v)?;
        let cur = match self.coeffs.get(&k) {
            Some(c) => c.iter().zip(v).map(|(a, b)| a.clone() + b).collect(),
            None => v,
        };
        self.set(k, cur)
    }

    pub fn get(&self, k: &MultiIndex) -> Option<&Vec<C>> {
        self.coeffs.get(k)
    }

    /// Component `i` of the coefficient at `k` (zero if absent).
    pub fn coeff(&self, k: &MultiIndex, i: usize) -> C {
        self.coeffs.get(k).map_or_else(C::zero, |v| v[i].clone())
    }

    /// Stored terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Vec<C>)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest and highest stored degree among nonconstant terms.
    pub fn degree_span(&self) -> Option<(usize, usize)> {
        let mut it = self.coeffs.keys().map(MultiIndex::degree).filter(|&d| d > 0);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d))))
    }

    /// Drops all terms above degree `n` and lowers the order.
    pub fn truncate(&self, n: usize) -> Self {
        let mut f = self.clone();
        f.order = n.min(self.order);
        f.coeffs.retain(|k, _| k.degree() <= n);
        f
    }

    /// Terms of degree `lo..=hi` only (the constant is dropped when `lo > 0`).
    pub fn part(&self, lo: usize, hi: usize) -> Self {
        let mut f = self.clone();
        f.coeffs.retain(|k, _| (lo..=hi).contains(&k.degree()));
        if lo > 0 {
            f.has_constant = false;
        }
        f
    }

    /// The constant term, or zero.
    pub fn constant_term(&self) -> Vec<C> {
        self.coeffs.get(&MultiIndex::zero(self.dim_in)).cloned().unwrap_or_else(|| vec![C::zero(); self.dim_out])
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::Dimension("series shapes differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        out.has_constant |= other.has_constant;
        out.coeffs.retain(|k, _| k.degree() <= out.order);
        let order = out.order;
        for (k, v) in other.terms().filter(|(k, _)| k.degree() <= order) {
            out.add_at(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            for c in v.iter_mut() {
                *c = -c.clone();
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Maps every coefficient through `f`.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        let mut out = TruncatedSeries::zero(self.dim_in, self.dim_out, self.order);
        out.has_constant = self.has_constant;
        for (k, v) in self.terms() {
            out.set(k.clone(), v.iter().map(&f).collect()).expect("same shape");
        }
        out
    }

    /// Multiplies the coefficient at `k` by `c(|k|)`.
    pub fn scale_by_degree(&self, c: impl Fn(usize) -> C) -> Self {
        let mut out = self.clone();
        for (k, v) in out.coeffs.iter_mut() {
            let f = c(k.degree());
            for x in v.iter_mut() {
                *x = x.clone() * f.clone();
            }
        }
        out
    }

    /// Dense component vectors over `space` (which must contain every stored index).
    pub(crate) fn to_dense(&self, space: &IndexSpace) -> Vec<Vec<C>> {
        let mut out = vec![vec![C::zero(); space.len()]; self.dim_out];
        for (k, v) in self.terms() {
            if let Some(p) = space.position(k) {
                for (i, c) in v.iter().enumerate() {
                    out[i][p] = c.clone();
                }
            }
        }
        out
    }

    pub(crate) fn from_dense(space: &IndexSpace, comps: &[Vec<C>], has_constant: bool) -> Self {
        let mut f = Self::zero(space.dim, comps.len(), space.order);
        f.has_constant = has_constant;
        for p in 0..space.len() {
            let k = space.index(p);
            if k.degree() == 0 && !has_constant {
                continue;
            }
            let v: Vec<C> = comps.iter().map(|c| c[p].clone()).collect();
            if v.iter().any(|c| !c.is_zero()) {
                f.coeffs.insert(k.clone(), v);
            }
        }
        f
    }
}
