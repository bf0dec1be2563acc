//! Property predicates on weights, tested exhaustively up to the horizon.

use num_traits::{One, Zero};
use serde::Serialize;

use super::Weight;
use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::io::{ser_opt_real, ser_real};
use crate::scalar::{real_u64, Real};

/// The predicates that can be evaluated on a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    LogConvex,
    BlockConvex,
    StronglySubmult,
    StrictFdb,
    Fdb,
    Asm,
    AlmostIncreasing,
    DiffStable,
    StronglyNonanalytic,
    AnalyticType,
}

/// The implication chain, strongest first.
pub const CHAIN: [Property; 5] =
    [Property::LogConvex, Property::BlockConvex, Property::StronglySubmult, Property::StrictFdb, Property::Fdb];

impl Property {
    pub const ALL: [Property; 10] = [
        Property::LogConvex,
        Property::BlockConvex,
        Property::StronglySubmult,
        Property::StrictFdb,
        Property::Fdb,
        Property::Asm,
        Property::AlmostIncreasing,
        Property::DiffStable,
        Property::StronglyNonanalytic,
        Property::AnalyticType,
    ];

    /// Whether the predicate takes a constant `lambda`.
    pub fn takes_lambda(self) -> bool {
        matches!(
            self,
            Property::StronglySubmult
                | Property::StrictFdb
                | Property::Fdb
                | Property::Asm
                | Property::AlmostIncreasing
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Property::LogConvex => "log_convex",
            Property::BlockConvex => "block_convex",
            Property::StronglySubmult => "strongly_submult",
            Property::StrictFdb => "strict_fdb",
            Property::Fdb => "fdb",
            Property::Asm => "asm",
            Property::AlmostIncreasing => "almost_increasing",
            Property::DiffStable => "diff_stable",
            Property::StronglyNonanalytic => "strongly_nonanalytic",
            Property::AnalyticType => "analytic_type",
        }
    }

    pub fn parse(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == s)
    }

    fn min_horizon(self) -> usize {
        match self {
            Property::Fdb | Property::StrictFdb | Property::Asm => 4,
            Property::DiffStable | Property::StronglyNonanalytic | Property::AnalyticType => 4,
            _ => 2,
        }
    }
}

/// A counterexample. The meaning of `indices` depends on the property:
/// the parts `k_1..k_r` for the Faa di Bruno type predicates, `[k, l]` for
/// pairwise ones, `[n, n+1]` for log-convexity, `[nu, n_left, n_right]` for
/// block convexity and `[n]` or `[q]` for the asymptotic heuristics.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct Witness<R: Real> {
    pub indices: Vec<usize>,
    #[serde(serialize_with = "ser_real")]
    pub lhs: R,
    #[serde(serialize_with = "ser_real")]
    pub rhs: R,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct PropertyReport<R: Real> {
    pub property: Property,
    pub holds_to_horizon: bool,
    pub horizon: usize,
    pub witness: Option<Witness<R>>,
    /// The constant for which the check was run (lambda), or the measured
    /// quantity for the heuristic predicates.
    #[serde(serialize_with = "ser_opt_real")]
    pub constant: Option<R>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl<R: Real> PropertyReport<R> {
    fn new(property: Property, horizon: usize) -> Self {
        PropertyReport { property, holds_to_horizon: true, horizon, witness: None, constant: None, note: None }
    }

    fn fail(mut self, indices: Vec<usize>, lhs: R, rhs: R) -> Self {
        self.holds_to_horizon = false;
        self.witness = Some(Witness { indices, lhs, rhs });
        self
    }
}

/// The default search set: `{1, 2, 4, 8, 16}` together with `max(1, m_1)`.
pub fn default_lambda_grid<R: Real>(w: &Weight<R>) -> Vec<R> {
    let mut grid: Vec<R> = [1i64, 2, 4, 8, 16].iter().map(|&v| R::from_int(v)).collect();
    let m1 = w.m(1).max_of(R::one());
    if !grid.contains(&m1) {
        grid.push(m1);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
    grid
}

/// Table of maximal products of `r` values summing to `k`, with the
/// first part of one maximizing tuple.
pub(crate) struct ProductTable<R> {
    best: Vec<Vec<Option<(R, usize)>>>,
}

impl<R: Real> ProductTable<R> {
    pub(crate) fn build(w: &Weight<R>) -> Self {
        let n = w.horizon();
        let mut best: Vec<Vec<Option<(R, usize)>>> = vec![vec![None; n + 1]; n + 1];
        for k in 1..=n {
            best[k][1] = Some((w.m(k), k));
            for r in 2..=k {
                let mut cur: Option<(R, usize)> = None;
                for j in 1..=k + 1 - r {
                    if let Some((rest, _)) = &best[k - j][r - 1] {
                        let v = w.m(j) * rest.clone();
                        if cur.as_ref().is_none_or(|(c, _)| v > *c) {
                            cur = Some((v, j));
                        }
                    }
                }
                best[k][r] = cur;
            }
        }
        ProductTable { best }
    }

    pub(crate) fn value(&self, k: usize, r: usize) -> R {
        self.best[k][r].as_ref().expect("reachable").0.clone()
    }

    pub(crate) fn tuple(&self, mut k: usize, mut r: usize) -> Vec<usize> {
        let mut parts = Vec::with_capacity(r);
        while r > 0 {
            let j = self.best[k][r].as_ref().expect("reachable").1;
            parts.push(j);
            k -= j;
            r -= 1;
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }
}

pub(crate) fn lambda_powers<R: Real>(lambda: &R, n: usize) -> Vec<R> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = R::one();
    for _ in 0..=n {
        out.push(acc.clone());
        acc = acc * lambda.clone();
    }
    out
}

fn log_hp<R: Real>(x: &R) -> HpFloat {
    x.to_hp().ln()
}

/// Evaluates one predicate exhaustively up to the horizon.
pub fn check_property<R: Real>(w: &Weight<R>, p: Property, lambda: Option<&R>) -> Result<PropertyReport<R>> {
    let n = w.horizon();
    if n < p.min_horizon() {
        return Err(Error::HorizonTooSmall { what: p.name().into(), have: n, need: p.min_horizon() });
    }
    let lam = if p.takes_lambda() {
        let l = lambda.ok_or_else(|| Error::Precondition(format!("{} needs lambda", p.name())))?;
        if *l <= R::zero() {
            return Err(Error::Precondition("lambda must be positive".into()));
        }
        Some(l.clone())
    } else {
        None
    };
    let mut rep = PropertyReport::new(p, n);
    rep.constant = lam.clone();
    match p {
        Property::LogConvex => {
            for k in 1..n {
                let (a, b) = (w.alpha(k), w.alpha(k + 1));
                if !a.le_tol(&b) {
                    return Ok(rep.fail(vec![k, k + 1], a, b));
                }
            }
        }
        Property::BlockConvex => {
            let mut nu = 0;
            while (1usize << nu) < n {
                let split = 1usize << nu;
                let (il, left) = argext(w, 1..=split, true);
                let (ir, right) = argext(w, split + 1..=n, false);
                if !left.le_tol(&right) {
                    return Ok(rep.fail(vec![nu, il, ir], left, right));
                }
                nu += 1;
            }
        }
        Property::StronglySubmult => {
            let lam = lam.expect("lambda");
            for k in 1..=n {
                for l in 1..=n + 1 - k {
                    let lhs = w.m(k) * w.m(l);
                    let rhs = lam.clone() * w.m(k + l - 1);
                    if !lhs.le_tol(&rhs) {
                        return Ok(rep.fail(vec![k, l], lhs, rhs));
                    }
                }
            }
        }
        Property::StrictFdb | Property::Fdb | Property::Asm => {
            let lam = lam.expect("lambda");
            let pw = lambda_powers(&lam, n);
            let table = ProductTable::build(w);
            for k in 1..=n {
                for r in 1..=k {
                    let prod = table.value(k, r);
                    let (lhs, rhs) = match p {
                        Property::StrictFdb => (w.m(r) * prod, pw[r].clone() * w.m(k)),
                        Property::Fdb => (w.m(r) * prod, pw[k].clone() * w.m(k)),
                        _ => (prod, pw[k].clone() * w.m(k)),
                    };
                    if !lhs.le_tol(&rhs) {
                        return Ok(rep.fail(table.tuple(k, r), lhs, rhs));
                    }
                }
            }
        }
        Property::AlmostIncreasing => {
            let lam = lam.expect("lambda");
            let roots: Vec<HpFloat> =
                (1..=n).map(|k| log_hp(&w.m(k)) / HpFloat::from(k as i64)).collect();
            let ll = log_hp(&lam);
            for k in 1..=n {
                for l in k..=n {
                    let ok = if R::EXACT {
                        let lhs = w.m(k).powu(l as u64);
                        let rhs = lam.powu((k * l) as u64) * w.m(l).powu(k as u64);
                        lhs <= rhs
                    } else {
                        roots[k - 1].le_tol(&(ll.clone() + roots[l - 1].clone()))
                    };
                    if !ok {
                        let lhs = R::from_hp(&roots[k - 1].exp());
                        let rhs = R::from_hp(&(ll.clone() + roots[l - 1].clone()).exp());
                        return Ok(rep.fail(vec![k, l], lhs, rhs));
                    }
                }
            }
        }
        Property::DiffStable => {
            // d_n = alpha_n^(1/n); bounded is judged by the second half never
            // exceeding the running maximum of the first half.
            let d: Vec<HpFloat> =
                (1..=n).map(|k| (log_hp(&w.alpha(k)) / HpFloat::from(k as i64)).exp()).collect();
            let half = n / 2;
            let (i1, m1) = max_at(&d[..half], 1);
            let (i2, m2) = max_at(&d[half..], half + 1);
            rep.constant = Some(R::from_hp(&m1.clone().max(m2.clone())));
            rep.note = Some(format!("max over first half at n={i1}, second half at n={i2}"));
            if !m2.le_tol(&m1) {
                return Ok(rep.fail(vec![i2], R::from_hp(&m2), R::from_hp(&m1)));
            }
        }
        Property::StronglyNonanalytic => return Ok(strongly_nonanalytic(w, rep)),
        Property::AnalyticType => {
            let r = super::classify_analytic_type(w)?;
            rep.constant = Some(R::from_hp(&r.alpha_est));
            rep.note = Some(format!("{:?} (horizon-limited)", r.tag));
            if r.tag == super::AnalyticTag::SubAnalytic {
                let (a, b) = (r.early_min.clone(), r.late_min.clone());
                return Ok(rep.fail(vec![r.late_index], R::from_hp(&b), R::from_hp(&a)));
            }
        }
    }
    Ok(rep)
}

fn argext<R: Real>(w: &Weight<R>, range: std::ops::RangeInclusive<usize>, max: bool) -> (usize, R) {
    let mut best: Option<(usize, R)> = None;
    for i in range {
        let v = w.alpha(i);
        let better = match &best {
            None => true,
            Some((_, b)) => {
                if max {
                    v > *b
                } else {
                    v < *b
                }
            }
        };
        if better {
            best = Some((i, v));
        }
    }
    best.expect("nonempty range")
}

fn max_at(v: &[HpFloat], offset: usize) -> (usize, HpFloat) {
    let mut best = (offset, v[0].clone());
    for (i, x) in v.iter().enumerate() {
        if *x > best.1 {
            best = (i + offset, x.clone());
        }
    }
    best
}

fn strongly_nonanalytic<R: Real>(w: &Weight<R>, mut rep: PropertyReport<R>) -> PropertyReport<R> {
    let n = w.horizon();
    let q_max = n / 2;
    let mu: Vec<HpFloat> = (1..=n).map(|k| w.mu(k).to_hp()).collect();
    let mut tail = vec![HpFloat::zero(); n + 2];
    for k in (1..=n).rev() {
        tail[k] = tail[k + 1].clone() + HpFloat::one() / mu[k - 1].clone();
    }
    let sq: Vec<HpFloat> =
        (1..=q_max).map(|q| mu[q - 1].clone() / HpFloat::from(q as i64) * tail[q].clone()).collect();
    let split = (q_max / 2).max(1);
    let (i1, s1) = max_at(&sq[..split], 1);
    let (i2, s2) = max_at(&sq[split..], split + 1);
    rep.constant = Some(R::from_hp(&s1.clone().max(s2.clone())));

    let ratio = mu[n - 1].clone() / mu[n - 2].clone();
    let tail_note = if ratio > HpFloat::one() {
        let bound = HpFloat::one() / (mu[n - 1].clone() * (ratio.clone() - HpFloat::one()));
        format!("geometric tail bound {}", bound.to_f64())
    } else {
        "tail-inconclusive".to_string()
    };
    // Power-law exponent of mu over the last half; exponent <= 1 means the
    // tail sum diverges.
    let lo = (n / 2).max(1);
    let expo = (mu[n - 1].ln() - mu[lo - 1].ln()).to_f64() / ((n as f64).ln() - (lo as f64).ln());
    rep.note = Some(format!("{tail_note}; tail exponent {expo:.6}; sup at q={}", if s2 > s1 { i2 } else { i1 }));
    if expo <= 1.0 + 1e-6 {
        return rep.fail(vec![lo, n], R::from_hp(&HpFloat::from_f64(expo)), R::one());
    }
    if !s2.le_tol(&s1) {
        return rep.fail(vec![i2], R::from_hp(&s2), R::from_hp(&s1));
    }
    rep
}

/// Re-evaluates the defining inequality at a witness; `true` if it is violated.
pub fn witness_violates<R: Real>(w: &Weight<R>, p: Property, lambda: Option<&R>, wit: &Witness<R>) -> bool {
    let ix = &wit.indices;
    let lam = lambda.cloned().unwrap_or_else(R::one);
    match p {
        Property::LogConvex => !w.alpha(ix[0]).le_tol(&w.alpha(ix[1])),
        Property::BlockConvex => {
            let split = 1usize << ix[0];
            ix[1] <= split && ix[2] > split && !w.alpha(ix[1]).le_tol(&w.alpha(ix[2]))
        }
        Property::StronglySubmult => {
            !(w.m(ix[0]) * w.m(ix[1])).le_tol(&(lam * w.m(ix[0] + ix[1] - 1)))
        }
        Property::StrictFdb | Property::Fdb | Property::Asm => {
            let r = ix.len();
            let k: usize = ix.iter().sum();
            let prod = ix.iter().fold(R::one(), |acc, &j| acc * w.m(j));
            match p {
                Property::StrictFdb => !(w.m(r) * prod).le_tol(&(lam.powu(r as u64) * w.m(k))),
                Property::Fdb => !(w.m(r) * prod).le_tol(&(lam.powu(k as u64) * w.m(k))),
                _ => !prod.le_tol(&(lam.powu(k as u64) * w.m(k))),
            }
        }
        Property::AlmostIncreasing => {
            let (k, l) = (ix[0], ix[1]);
            let lhs = log_hp(&w.m(k)) / HpFloat::from(k as i64);
            let rhs = log_hp(&lam) + log_hp(&w.m(l)) / HpFloat::from(l as i64);
            !lhs.le_tol(&rhs)
        }
        // Heuristic predicates: the witness records the compared statistics.
        _ => !wit.lhs.le_tol(&wit.rhs),
    }
}

/// Runs the predicate for each `lambda` in `grid` (ascending) and returns the
/// first passing report, or the failing report for the largest value.
pub fn search_lambda<R: Real>(w: &Weight<R>, p: Property, grid: &[R]) -> Result<PropertyReport<R>> {
    let mut last = None;
    for lam in grid {
        let rep = check_property(w, p, Some(lam))?;
        if rep.holds_to_horizon {
            return Ok(rep);
        }
        last = Some(rep);
    }
    last.ok_or_else(|| Error::Precondition("empty lambda grid".into()))
}

/// Evaluates all ten predicates, searching `lambda` over `grid` (or the
/// default grid), and asserts the implication chain.
pub fn implication_matrix<R: Real>(w: &Weight<R>, grid: Option<&[R]>) -> Result<Vec<PropertyReport<R>>> {
    if w.horizon() < 8 {
        return Err(Error::HorizonTooSmall { what: "implication matrix".into(), have: w.horizon(), need: 8 });
    }
    let default = default_lambda_grid(w);
    let grid = grid.unwrap_or(&default);
    let mut out = Vec::with_capacity(10);
    for p in Property::ALL {
        let rep = if p.takes_lambda() { search_lambda(w, p, grid)? } else { check_property(w, p, None)? };
        out.push(rep);
    }
    verify_chain(&out)?;
    Ok(out)
}

fn verify_chain<R: Real>(reports: &[PropertyReport<R>]) -> Result<()> {
    for pair in CHAIN.windows(2) {
        let a = reports.iter().find(|r| r.property == pair[0]).expect("present");
        let b = reports.iter().find(|r| r.property == pair[1]).expect("present");
        if a.holds_to_horizon && !b.holds_to_horizon {
            return Err(Error::ChainBroken(format!("{} holds but {} fails", pair[0].name(), pair[1].name())));
        }
        if let (true, Some(la), Some(lb)) = (a.holds_to_horizon, &a.constant, &b.constant) {
            if b.property.takes_lambda() && a.property.takes_lambda() && lb > la {
                return Err(Error::ChainBroken(format!(
                    "{} needs a larger constant than {}",
                    pair[1].name(),
                    pair[0].name()
                )));
            }
        }
    }
    Ok(())
}

/// Result of comparing `fdb(m)` with `asm` of the left shift.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct DualityReport<R: Real> {
    pub fdb: PropertyReport<R>,
    pub shifted_asm: PropertyReport<R>,
    pub agree: bool,
}

/// Checks `fdb(m)` and `asm(left_shift(m))`, each with the smallest constant
/// in `{lambda, 2 lambda, 4 lambda, 8 lambda}`.
pub fn shift_duality_check<R: Real>(w: &Weight<R>, lambda: &R) -> Result<DualityReport<R>> {
    if w.horizon() < 8 {
        return Err(Error::HorizonTooSmall { what: "shift duality".into(), have: w.horizon(), need: 8 });
    }
    let grid: Vec<R> = [1u64, 2, 4, 8].iter().map(|&c| real_u64::<R>(c) * lambda.clone()).collect();
    let fdb = search_lambda(w, Property::Fdb, &grid)?;
    let shifted_asm = search_lambda(&w.left_shift()?, Property::Asm, &grid)?;
    let agree = fdb.holds_to_horizon == shifted_asm.holds_to_horizon;
    Ok(DualityReport { fdb, shifted_asm, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational as Q;
    use num_traits::One;

    fn q(n: i64) -> Q {
        ratio(n, 1)
    }

    #[test]
    fn gevrey_two_is_log_convex() {
        let w = Weight::<Q>::gevrey(&q(2), 12).unwrap();
        let r = check_property(&w, Property::LogConvex, None).unwrap();
        assert!(r.holds_to_horizon && r.witness.is_none());
    }

    #[test]
    fn constant_weight_is_fdb() {
        let w = Weight::<Q>::unit(10).unwrap();
        let r = check_property(&w, Property::Fdb, Some(&Q::one())).unwrap();
        assert!(r.holds_to_horizon);
    }

    #[test]
    fn lambda_required() {
        let w = Weight::<Q>::unit(10).unwrap();
        assert!(check_property(&w, Property::Fdb, None).is_err());
        assert!(check_property(&w.truncate(3).unwrap(), Property::Fdb, Some(&Q::one())).is_err());
    }

    #[test]
    fn failing_witness_reevaluates() {
        // alpha drops at n = 3, so log-convexity and strong submultiplicativity fail.
        let w = Weight::new(vec![q(1), q(4), q(4), q(64), q(64), q(64), q(64), q(64)], None).unwrap();
        for p in [Property::LogConvex, Property::StronglySubmult, Property::Asm] {
            let r = check_property(&w, p, Some(&Q::one())).unwrap();
            assert!(!r.holds_to_horizon, "{p:?}");
            assert!(witness_violates(&w, p, Some(&Q::one()), r.witness.as_ref().unwrap()));
        }
    }

    #[test]
    fn fdb_dp_matches_brute_force() {
        // Brute-force maximal products over all compositions.
        let vals: Vec<Q> = [3, 1, 5, 2, 7, 4, 9, 8].iter().map(|&v| ratio(v, 3)).collect();
        let w = Weight::new(vals, None).unwrap();
        let table = ProductTable::build(&w);
        fn rec(w: &Weight<Q>, k: usize, r: usize) -> Option<Q> {
            if r == 0 {
                return if k == 0 { Some(Q::one()) } else { None };
            }
            (1..=k).filter_map(|j| rec(w, k - j, r - 1).map(|v| v * w.m(j))).max()
        }
        for k in 1..=8 {
            for r in 1..=k {
                assert_eq!(table.value(k, r), rec(&w, k, r).unwrap());
                let t = table.tuple(k, r);
                assert_eq!(t.iter().sum::<usize>(), k);
                assert_eq!(t.iter().fold(Q::one(), |a, &j| a * w.m(j)), table.value(k, r));
            }
        }
    }

    #[test]
    fn chain_on_gevrey() {
        let w = Weight::<HpFloat>::gevrey(&ratio(3, 2), 12).unwrap();
        let reps = implication_matrix(&w, None).unwrap();
        for p in CHAIN {
            assert!(reps.iter().find(|r| r.property == p).unwrap().holds_to_horizon, "{p:?}");
        }
    }

    #[test]
    fn unit_weight_matrix() {
        let w = Weight::<Q>::unit(12).unwrap();
        let reps = implication_matrix(&w, None).unwrap();
        for r in &reps[..7] {
            assert!(r.holds_to_horizon, "{:?}", r.property);
        }
        let sna = reps.iter().find(|r| r.property == Property::StronglyNonanalytic).unwrap();
        assert!(!sna.holds_to_horizon);
    }

    #[test]
    fn strongly_nonanalytic_gevrey() {
        let w = Weight::<Q>::gevrey(&q(2), 32).unwrap();
        assert!(check_property(&w, Property::StronglyNonanalytic, None).unwrap().holds_to_horizon);
    }

    #[test]
    fn duality_on_gevrey_and_unit() {
        for w in [Weight::<Q>::gevrey(&q(2), 12).unwrap(), Weight::<Q>::unit(12).unwrap()] {
            let d = shift_duality_check(&w, &Q::one()).unwrap();
            assert!(d.agree && d.fdb.holds_to_horizon);
        }
    }
}
