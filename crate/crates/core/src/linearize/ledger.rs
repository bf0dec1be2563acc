//! The sequences `sigma_n` and `Delta_k`, decomposition trees, the counting
//! bound and the coefficient bound `|phi_k| / m_k <= sigma_|k| Delta_k`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{check_nonresonance, formal_linearize, LinearPart, ResonanceReport};
use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::multiindex::{IndexSpace, MultiIndex};
use crate::scalar::{Coeff, Real};
use crate::series::TruncatedSeries;
use crate::weights::{check_property, default_lambda_grid, Property, Weight};

/// `sigma_1 = 1`, `sigma_n = sum over compositions n_1 + ... + n_r = n with
/// r >= 2 of sigma_n1 ... sigma_nr`. Position 0 holds 0.
pub fn sigma_sequence(n: usize) -> Vec<BigUint> {
    // a[n] sums over compositions with any number r >= 1 of parts.
    let mut sigma = vec![BigUint::zero(); n + 1];
    let mut a = vec![BigUint::zero(); n + 1];
    for d in 1..=n {
        if d == 1 {
            sigma[1] = BigUint::one();
        } else {
            sigma[d] = (1..d).map(|p| &sigma[p] * &a[d - p]).sum();
        }
        a[d] = &sigma[d] + (1..d).map(|p| &sigma[p] * &a[d - p]).sum::<BigUint>();
    }
    sigma
}

/// One row of the ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry<R> {
    /// `E_k^2`, absent for `|k| = 1`.
    pub e_sq: Option<R>,
    pub delta_sq: R,
    /// The recorded decomposition `k = k_1 + ... + k_r`, nonincreasing in graded-lex order.
    pub parts: Vec<MultiIndex>,
    /// `l_0 = k, l_1, ..., l_s` with `Delta_k = E_l0 ... E_ls`.
    pub factors: Vec<MultiIndex>,
}

/// `sigma`, `Delta` and the decomposition trees up to a fixed order.
#[derive(Clone, Debug)]
pub struct AccumulationLedger<R: Real> {
    pub dim: usize,
    pub order: usize,
    pub sigma: Vec<BigUint>,
    pub entries: BTreeMap<MultiIndex, LedgerEntry<R>>,
    pub eta_sq: R,
    omega_sq: Vec<R>,
}

impl<R: Real> AccumulationLedger<R> {
    pub fn entry(&self, k: &MultiIndex) -> Option<&LedgerEntry<R>> {
        self.entries.get(k)
    }

    pub fn delta_sq(&self, k: &MultiIndex) -> Option<&R> {
        self.entries.get(k).map(|e| &e.delta_sq)
    }

    /// `Omega(q)^2` for `2 <= q <= order`.
    pub fn omega_sq(&self, q: usize) -> Option<&R> {
        q.checked_sub(2).and_then(|i| self.omega_sq.get(i))
    }

    /// Factors `E_l` of the tree for `Delta_k` with `E_l > eta Omega(n)`, with multiplicity.
    pub fn counted_factors(&self, n: usize, k: &MultiIndex) -> Option<Vec<MultiIndex>> {
        let thr = self.eta_sq.clone() * self.omega_sq(n)?.clone();
        let e = self.entry(k)?;
        Some(
            e.factors
                .iter()
                .filter(|l| self.entries[*l].e_sq.as_ref().is_some_and(|x| *x > thr))
                .cloned()
                .collect(),
        )
    }

    /// `N_n(k)`.
    pub fn counting(&self, n: usize, k: &MultiIndex) -> Option<usize> {
        self.counted_factors(n, k).map(|v| v.len())
    }
}

#[derive(Serialize)]
struct EntryJson<'a> {
    k: &'a MultiIndex,
    e: Option<String>,
    delta: String,
    delta_sq: String,
    parts: &'a [MultiIndex],
    factors: &'a [MultiIndex],
    /// `N_n(k)` for `n = 2..=order`.
    counting: Vec<usize>,
}

#[derive(Serialize)]
struct LedgerJson<'a> {
    dim: usize,
    order: usize,
    sigma: Vec<String>,
    eta: String,
    entries: Vec<EntryJson<'a>>,
}

impl<R: Real> Serialize for AccumulationLedger<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LedgerJson {
            dim: self.dim,
            order: self.order,
            sigma: self.sigma.iter().skip(1).map(|x| x.to_string()).collect(),
            eta: self.eta_sq.to_hp().sqrt().to_decimal_string(),
            entries: self
                .entries
                .iter()
                .map(|(k, e)| EntryJson {
                    k,
                    e: e.e_sq.as_ref().map(|x| x.to_hp().sqrt().to_decimal_string()),
                    delta: e.delta_sq.to_hp().sqrt().to_decimal_string(),
                    delta_sq: e.delta_sq.to_decimal(),
                    parts: &e.parts,
                    factors: &e.factors,
                    counting: (2..=self.order).map(|n| self.counting(n, k).unwrap_or(0)).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Proper nonzero sub-indices `0 < p < k` in graded-lex order.
fn sub_indices(k: &MultiIndex) -> Vec<MultiIndex> {
    let e = k.exps();
    let mut out = Vec::new();
    let mut cur = vec![0u32; e.len()];
    loop {
        let p = MultiIndex::new(cur.clone());
        if p.degree() > 0 && p.degree() < k.degree() {
            out.push(p);
        }
        let mut i = 0;
        loop {
            if i == e.len() {
                out.sort();
                return out;
            }
            if cur[i] < e[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Builds `Delta_k^2` by dynamic programming over decompositions.
///
/// `B(k)` is the best product over decompositions of `k` into `r >= 1`
/// parts, so `Delta_k = E_k max_{0 < p < k} Delta_p B(k - p)`. Among equal
/// maxima the graded-lex smallest first part wins, recursively.
fn build<R: Real>(dim: usize, order: usize, e_sq: &BTreeMap<MultiIndex, R>) -> Result<BTreeMap<MultiIndex, LedgerEntry<R>>> {
    let space = IndexSpace::new(dim, order)?;
    // best[k] = (B(k)^2, first part of the B-decomposition or None for k itself)
    let mut best: HashMap<MultiIndex, (R, Option<MultiIndex>)> = HashMap::new();
    let mut first: HashMap<MultiIndex, MultiIndex> = HashMap::new();
    let mut entries: BTreeMap<MultiIndex, LedgerEntry<R>> = BTreeMap::new();
    for k in space.iter().filter(|k| k.degree() >= 1) {
        if k.degree() == 1 {
            entries.insert(k.clone(), LedgerEntry { e_sq: None, delta_sq: R::one(), parts: vec![k.clone()], factors: vec![] });
            best.insert(k.clone(), (R::one(), None));
            continue;
        }
        let ek = e_sq.get(k).ok_or_else(|| Error::Invariant(format!("no divisor for {k:?}")))?.clone();
        let mut arg: Option<(R, MultiIndex)> = None;
        for p in sub_indices(k) {
            let q = k.checked_sub(&p).expect("sub-index");
            let v = entries[&p].delta_sq.clone() * best[&q].0.clone();
            if arg.as_ref().is_none_or(|(b, _)| v > *b) {
                arg = Some((v, p));
            }
        }
        let (inner, p) = arg.expect("degree >= 2 has a proper split");
        let delta_sq = ek.clone() * inner.clone();
        let b = if delta_sq >= inner { (delta_sq.clone(), None) } else { (inner, Some(p.clone())) };
        best.insert(k.clone(), b);
        first.insert(k.clone(), p.clone());

        let mut parts = vec![p.clone()];
        let mut rest = k.checked_sub(&p).expect("sub-index");
        while let Some(next) = best[&rest].1.clone() {
            parts.push(next.clone());
            rest = rest.checked_sub(&next).expect("sub-index");
        }
        parts.push(rest);
        parts.sort_by(|a, b| b.cmp(a));
        let mut factors = vec![k.clone()];
        for q in &parts {
            factors.extend(entries[q].factors.iter().cloned());
        }
        entries.insert(k.clone(), LedgerEntry { e_sq: Some(ek), delta_sq, parts, factors });
    }
    Ok(entries)
}

/// Ledger for the eigenvalues of `l` up to `order`.
pub fn accumulation_ledger<C: Coeff>(l: &LinearPart<C>, order: usize) -> Result<AccumulationLedger<C::Real>> {
    let report = check_nonresonance(l, order.max(2))?;
    ledger_from_report(l, &report, order)
}

/// Ledger from an existing divisor table covering `order`.
pub fn ledger_from_report<C: Coeff>(
    l: &LinearPart<C>,
    report: &ResonanceReport<C::Real>,
    order: usize,
) -> Result<AccumulationLedger<C::Real>> {
    report.require_nonresonant()?;
    if report.max_degree < order {
        return Err(Error::HorizonTooSmall { what: "divisor table".into(), have: report.max_degree, need: order });
    }
    let entries = build(l.dim(), order, &report.e_sq)?;
    for (k, e) in &entries {
        let mut prod = C::Real::one();
        for f in &e.factors {
            prod = prod * entries[f].e_sq.clone().expect("factors have degree >= 2");
        }
        if !(prod.le_tol(&e.delta_sq) && e.delta_sq.le_tol(&prod)) {
            return Err(Error::Invariant(format!("tree factors of {k:?} do not multiply to Delta")));
        }
    }
    Ok(AccumulationLedger {
        dim: l.dim(),
        order,
        sigma: sigma_sequence(order),
        entries,
        eta_sq: l.eta_sq().clone(),
        omega_sq: (2..=order).map(|q| report.omega_sq(q).expect("tabulated").clone()).collect(),
    })
}

/// Outcome of the counting bound for one `(n, k)`.
#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    pub n: usize,
    pub k: MultiIndex,
    /// `N_n(k)`.
    pub count: usize,
    /// `0` for `|k| <= n`, else `2|k|/n - 1`, as an exact fraction.
    pub bound: String,
    pub bound_holds: bool,
    /// Counted factors `E_l > eta Omega(n)`, with multiplicity.
    pub counted: Vec<MultiIndex>,
    /// Nested counted pairs `l' < l` all satisfy `|l - l'| >= n`.
    pub separation_holds: bool,
    pub separation_violation: Option<(MultiIndex, MultiIndex)>,
    pub holds: bool,
}

/// Checks `N_n(k) <= max(0, 2|k|/n - 1)` on the recorded tree of `k`, and the
/// separation of nested counted factors.
pub fn counting_lemma_check<R: Real>(ledger: &AccumulationLedger<R>, n: usize, k: &MultiIndex) -> Result<CountingReport> {
    if n < 2 || n > ledger.order {
        return Err(Error::HorizonTooSmall { what: "counting threshold".into(), have: ledger.order, need: n.max(2) });
    }
    let counted = ledger
        .counted_factors(n, k)
        .ok_or_else(|| Error::HorizonTooSmall { what: "ledger".into(), have: ledger.order, need: k.degree() })?;
    let count = counted.len();
    let d = k.degree();
    let (bound, bound_holds) = if d <= n {
        ("0".to_string(), count == 0)
    } else {
        let num = 2 * d - n;
        let g = num_integer::gcd(num, n);
        let b = if n / g == 1 { format!("{}", num / g) } else { format!("{}/{}", num / g, n / g) };
        (b, count * n <= num)
    };
    let mut separation_violation = None;
    'outer: for a in &counted {
        for b in &counted {
            if a != b && b.le_componentwise(a) && a.degree() - b.degree() < n {
                separation_violation = Some((a.clone(), b.clone()));
                break 'outer;
            }
        }
    }
    let separation_holds = separation_violation.is_none();
    Ok(CountingReport {
        n,
        k: k.clone(),
        count,
        bound,
        bound_holds,
        counted,
        separation_holds,
        separation_violation,
        holds: bound_holds && separation_holds,
    })
}

/// Coefficient where `|phi_k| > sigma_|k| Delta_k m_k`, in squared form.
#[derive(Clone, Debug, Serialize)]
pub struct SiegelViolation {
    pub k: MultiIndex,
    pub lhs_sq: String,
    pub rhs_sq: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SiegelReport {
    pub holds: bool,
    pub order: usize,
    /// Smallest grid constant `lambda` for which `m` is strictly FDB.
    pub fdb_lambda: String,
    /// `c = 1/m_1`; the bound is checked against `m'_n = c^n m_n`.
    pub scale: String,
    /// `g_hat(x)` is replaced by `g_hat(t x)/t` with `t = 2^-dilation_exponent`,
    /// the least such `t` with `max_i sum_l lambda^|l| |g_l,i| / m_|l| <= 1`.
    pub dilation_exponent: u32,
    pub checked: usize,
    /// `max_k |phi_k| / (sigma_|k| Delta_k m'_|k|)`.
    pub max_ratio: String,
    pub first_violation: Option<SiegelViolation>,
}

/// Bound on `|a + bi|` by `|a| + |b|`, exact in the real type.
fn modulus_bound<C: Coeff>(c: &C) -> C::Real {
    let (re, im) = c.parts();
    re.abs() + im.abs()
}

/// Checks `|phi_k| / m'_k <= sigma_|k| Delta_k` for `2 <= |k| <= order`, where
/// `m'_n = m_n / m_1^n` and `phi` linearizes the dilated map. With `m` strictly
/// FDB for `lambda`, `m'` satisfies `m'_r m'_k1 ... m'_kr <= (lambda / m_1)^r m'_k`,
/// and the dilation makes `sum_l lambda^|l| |g_l| / m_|l|` at most 1.
/// `|phi_k|` is the largest component modulus.
pub fn siegel_bound_check<C: Coeff>(
    ledger: &AccumulationLedger<C::Real>,
    l: &LinearPart<C>,
    m: &Weight<C::Real>,
    g_hat: &TruncatedSeries<C>,
    order: usize,
) -> Result<SiegelReport> {
    let n = order.min(ledger.order).min(g_hat.order());
    if m.horizon() < n {
        return Err(Error::HorizonTooSmall { what: "weight".into(), have: m.horizon(), need: n });
    }
    let probe = m.truncate(n.max(4).min(m.horizon()))?;
    let mut fdb = None;
    for lam in default_lambda_grid(&probe) {
        if check_property(&probe, Property::StrictFdb, Some(&lam))?.holds_to_horizon {
            fdb = Some(lam);
            break;
        }
    }
    let fdb = fdb.ok_or_else(|| Error::Precondition("weight is not strictly FDB for any grid constant".into()))?;
    let scale = C::Real::one() / m.m(1);

    // Per-degree sums lambda^d sum_{|l| = d} |g_l,i| / m_d, bounded exactly.
    let mut by_degree: Vec<Vec<C::Real>> = vec![vec![C::Real::zero(); l.dim()]; n + 1];
    for (k, v) in g_hat.terms().filter(|(k, _)| k.degree() <= n) {
        for (i, c) in v.iter().enumerate() {
            by_degree[k.degree()][i] = by_degree[k.degree()][i].clone() + fdb.powu(k.degree() as u64) * modulus_bound(c) / m.m(k.degree());
        }
    }
    let norm_at = |t: &C::Real| {
        (0..l.dim())
            .map(|i| (2..=n).fold(C::Real::zero(), |acc, d| acc + by_degree[d][i].clone() * t.powu(d as u64 - 1)))
            .fold(C::Real::zero(), C::Real::max_of)
    };
    let half = C::Real::one() / C::Real::from_int(2);
    let mut t = C::Real::one();
    let mut j = 0u32;
    while norm_at(&t) > C::Real::one() {
        t = t * half.clone();
        j += 1;
        if j > 100_000 {
            return Err(Error::Invariant("normalization did not terminate".into()));
        }
    }
    let scaled = g_hat.truncate(n).scale_by_degree(|d| C::from_real(t.powu(d.saturating_sub(1) as u64)));
    let phi = formal_linearize(l, &scaled, n)?;

    let mut checked = 0;
    let mut first_violation = None;
    let mut max_ratio = HpFloat::zero();
    for (k, e) in ledger.entries.iter().filter(|(k, _)| (2..=n).contains(&k.degree())) {
        let lhs_sq = phi
            .get(k)
            .map(|v| v.iter().map(Coeff::norm_sq).fold(C::Real::zero(), C::Real::max_of))
            .unwrap_or_else(C::Real::zero);
        let d = k.degree();
        let f = C::Real::from_biguint(&ledger.sigma[d]) * scale.powu(d as u64) * m.m(d);
        let rhs_sq = f.clone() * f * e.delta_sq.clone();
        checked += 1;
        let ratio = (lhs_sq.to_hp() / rhs_sq.to_hp()).sqrt();
        if ratio > max_ratio {
            max_ratio = ratio;
        }
        if first_violation.is_none() && !lhs_sq.le_tol(&rhs_sq) {
            first_violation =
                Some(SiegelViolation { k: k.clone(), lhs_sq: lhs_sq.to_decimal(), rhs_sq: rhs_sq.to_decimal() });
        }
    }
    Ok(SiegelReport {
        holds: first_violation.is_none(),
        order: n,
        fdb_lambda: fdb.to_decimal(),
        scale: scale.to_decimal(),
        dilation_exponent: j,
        checked,
        max_ratio: max_ratio.to_decimal_string(),
        first_violation,
    })
}
