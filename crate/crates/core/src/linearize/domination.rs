//! Bruno partial sums, dominating weights and the resulting regularity class.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::OmegaTable;
use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::io::{ser_hp, ser_weight};
use crate::scalar::{factorial, Real};
use crate::weights::{
    check_property, classify_analytic_type, star_product, AnalyticTag, Generator, Property, PropertyReport, Weight,
};

/// Maximum number of times `classify_regularity` enlarges `w`.
pub const ESCALATION_BUDGET: usize = 4;

/// How the dominating weight is chosen.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "delta")]
pub enum Policy {
    /// Least `w` consistent with the table once `a` is fixed by the first two terms.
    Minimal,
    /// `w = (1)`; rejected when the partial sums do not level off.
    Constant,
    /// `w_n = n!^delta`.
    Gevrey(HpFloat),
    /// `Gevrey` with the exponent from [`fit_gevrey_delta`], clamped at 0.
    GevreyFit,
    /// `Constant` when accepted, else `Gevrey` with the fitted exponent when the
    /// last terms are level, else `Minimal`.
    Auto,
}

impl Policy {
    /// Parses `minimal`, `constant`, `auto`, `gevrey-fit` or `gevrey:<delta>`.
    pub fn parse(s: &str) -> Option<Policy> {
        match s {
            "minimal" => Some(Policy::Minimal),
            "constant" => Some(Policy::Constant),
            "auto" => Some(Policy::Auto),
            "gevrey-fit" => Some(Policy::GevreyFit),
            _ => {
                let d = s.strip_prefix("gevrey:").or_else(|| s.strip_prefix("gevrey="))?;
                let v = HpFloat::parse_decimal(d).or_else(|| crate::scalar::parse_rational(d).map(|q| HpFloat::from_ratio(&q)))?;
                (!v.is_negative()).then_some(Policy::Gevrey(v))
            }
        }
    }
}

/// Kind of regularity loss encoded by the certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "tag", content = "delta")]
pub enum ClassTag {
    NoLoss,
    GevreyLoss(#[serde(serialize_with = "ser_hp")] HpFloat),
    General,
}

/// A weight `w` and constant `a` with
/// `sum_{nu <= log2 n} log Omega(2^(nu+1)) / 2^nu <= a + log(w_n) / n` on the table.
#[derive(Clone, Debug, Serialize)]
pub struct DominationCertificate {
    pub policy: Policy,
    #[serde(serialize_with = "ser_weight")]
    pub weight: Weight<HpFloat>,
    #[serde(serialize_with = "ser_hp")]
    pub a: HpFloat,
    /// `B(L) = sum_{nu <= L} log Omega(2^(nu+1)) / 2^nu` for `L = 0..`.
    #[serde(serialize_with = "ser_hp_vec")]
    pub bruno_partial_sums: Vec<HpFloat>,
    /// The exponent of a Gevrey policy.
    #[serde(serialize_with = "ser_opt_hp")]
    pub gevrey_delta: Option<HpFloat>,
    /// Two-point estimate of the Gevrey exponent, see [`fit_gevrey_delta`].
    #[serde(serialize_with = "ser_opt_hp")]
    pub fitted_delta: Option<HpFloat>,
    pub max_q: usize,
    pub class_tag: ClassTag,
}

fn ser_hp_vec<S: serde::Serializer>(v: &[HpFloat], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(HpFloat::to_decimal_string))
}

fn ser_opt_hp<S: serde::Serializer>(v: &Option<HpFloat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_decimal_string()),
        None => s.serialize_none(),
    }
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// `B(0), ..., B(L)` for every `L` with `2^(L+1) <= Q`.
pub fn bruno_partial_sums(omega: &OmegaTable) -> Vec<HpFloat> {
    let mut out: Vec<HpFloat> = Vec::new();
    let mut acc = HpFloat::zero();
    let mut nu = 0usize;
    while let Some(l) = omega.ln(1usize << (nu + 1)) {
        acc = acc + l.clone() / HpFloat::from(1i64 << nu);
        out.push(acc.clone());
        nu += 1;
    }
    out
}

/// Largest `n` whose partial sum `B(floor(log2 n))` is tabulated.
fn top_index(sums: &[HpFloat]) -> usize {
    (1usize << sums.len()) - 1
}

/// `delta = (B(L) - B(ceil(L/2))) / ((L - ceil(L/2)) ln 2)`, comparing the
/// partial sums at `n = 2^L` and `n = 2^ceil(L/2)` for the largest tabulated `L`.
pub fn fit_gevrey_delta(omega: &OmegaTable) -> Option<HpFloat> {
    let sums = bruno_partial_sums(omega);
    let hi = sums.len().checked_sub(1)?;
    let lo = hi.div_ceil(2);
    if hi == lo {
        return None;
    }
    let span = HpFloat::from((hi - lo) as i64) * HpFloat::from(2).ln();
    Some((sums[hi].clone() - sums[lo].clone()) / span)
}

fn ln_factorial(n: usize) -> HpFloat {
    HpFloat::from_bigint(&factorial(n as u64).into()).ln()
}

fn certify(mut cert: DominationCertificate) -> Result<DominationCertificate> {
    let sums = &cert.bruno_partial_sums;
    for n in 2..=cert.weight.horizon() {
        let lhs = sums[floor_log2(n)].clone();
        let rhs = cert.a.clone() + cert.weight.m(n).ln() / HpFloat::from(n as i64);
        if !lhs.le_tol(&rhs) {
            return Err(Error::Invariant(format!("domination fails at |k| = {n}")));
        }
    }
    if cert.class_tag == ClassTag::General && cert.weight.values().iter().all(One::is_one) {
        cert.class_tag = ClassTag::NoLoss;
    }
    Ok(cert)
}

fn constant_policy(omega: &OmegaTable, sums: Vec<HpFloat>) -> Result<DominationCertificate> {
    let l = sums.len();
    let last = |i: usize| sums[i].clone() - if i == 0 { HpFloat::zero() } else { sums[i - 1].clone() };
    if l >= 2 {
        let (t1, t0) = (last(l - 1), last(l - 2));
        let decaying = !t1.is_positive() || (t0.is_positive() && t1 * HpFloat::from(4) <= t0 * HpFloat::from(3));
        if !decaying {
            let trace: Vec<String> = sums.iter().map(|s| s.to_f64().to_string()).collect();
            return Err(Error::Unbounded(format!("B(L) = [{}]", trace.join(", "))));
        }
    }
    let a = sums.iter().cloned().fold(HpFloat::zero(), HpFloat::max);
    let n = top_index(&sums);
    certify(DominationCertificate {
        policy: Policy::Constant,
        weight: Weight::new(vec![HpFloat::one(); n], Some(Generator::Constant { c: "1".into() }))?,
        a,
        bruno_partial_sums: sums,
        gevrey_delta: None,
        fitted_delta: fit_gevrey_delta(omega),
        max_q: omega.max_q(),
        class_tag: ClassTag::NoLoss,
    })
}

fn gevrey_policy(omega: &OmegaTable, sums: Vec<HpFloat>, delta: HpFloat) -> Result<DominationCertificate> {
    let n = top_index(&sums);
    let values: Vec<HpFloat> = (1..=n).map(|k| (ln_factorial(k) * delta.clone()).exp()).collect();
    let a = (2..=n)
        .map(|k| sums[floor_log2(k)].clone() - delta.clone() * ln_factorial(k) / HpFloat::from(k as i64))
        .fold(HpFloat::zero(), HpFloat::max);
    let s = (HpFloat::one() + delta.clone()).to_decimal_string();
    certify(DominationCertificate {
        policy: Policy::Gevrey(delta.clone()),
        weight: Weight::new(values, Some(Generator::Gevrey { s }))?,
        a,
        bruno_partial_sums: sums,
        gevrey_delta: Some(delta.clone()),
        fitted_delta: fit_gevrey_delta(omega),
        max_q: omega.max_q(),
        class_tag: if delta.is_zero() { ClassTag::NoLoss } else { ClassTag::GevreyLoss(delta) },
    })
}

fn minimal_policy(omega: &OmegaTable, sums: Vec<HpFloat>) -> Result<DominationCertificate> {
    let a = sums[1].clone();
    let n = top_index(&sums);
    let values: Vec<HpFloat> = (1..=n)
        .map(|k| {
            let excess = (sums[floor_log2(k)].clone() - a.clone()).max(HpFloat::zero());
            (excess * HpFloat::from(k as i64)).exp()
        })
        .collect();
    certify(DominationCertificate {
        policy: Policy::Minimal,
        weight: Weight::new(values, Some(Generator::CustomTable))?,
        a,
        bruno_partial_sums: sums,
        gevrey_delta: None,
        fitted_delta: fit_gevrey_delta(omega),
        max_q: omega.max_q(),
        class_tag: ClassTag::General,
    })
}

/// Builds a weight dominating `Omega` on its table. Needs `Q >= 4`.
///
/// The certificate inequality is verified at every tabulated `|k|` before
/// the certificate is returned.
pub fn dominating_weight(omega: &OmegaTable, policy: &Policy) -> Result<DominationCertificate> {
    if omega.max_q() < 4 {
        return Err(Error::HorizonTooSmall { what: "nonresonance table".into(), have: omega.max_q(), need: 4 });
    }
    let sums = bruno_partial_sums(omega);
    match policy {
        Policy::Constant => constant_policy(omega, sums),
        Policy::Gevrey(d) => gevrey_policy(omega, sums, d.clone()),
        Policy::Minimal => minimal_policy(omega, sums),
        Policy::GevreyFit => {
            let d = fit_gevrey_delta(omega)
                .ok_or_else(|| Error::HorizonTooSmall { what: "Gevrey fit".into(), have: omega.max_q(), need: 8 })?;
            gevrey_policy(omega, sums, d.max(HpFloat::zero()))
        }
        Policy::Auto => match constant_policy(omega, sums.clone()) {
            Ok(c) => Ok(c),
            Err(Error::Unbounded(_)) => {
                let l = sums.len();
                let t = |i: usize| sums[i].clone() - sums[i - 1].clone();
                let level = l >= 3 && {
                    let (a, b) = (t(l - 1), t(l - 2));
                    (a.clone() - b).abs() * HpFloat::from(10) <= a.abs()
                };
                match (level, fit_gevrey_delta(omega)) {
                    (true, Some(d)) if d.is_positive() => gevrey_policy(omega, sums, d),
                    _ => minimal_policy(omega, sums),
                }
            }
            Err(e) => Err(e),
        },
    }
}

/// Regularity class of the linearization.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum RegularityClass {
    /// `m * w` is analytic, so the linearization converges.
    Convergent,
    /// `E^m`; carries the Gevrey exponent of `m` when known.
    SameClass { gevrey: Option<String> },
    /// `G^(s + delta)`.
    Gevrey { s: String },
    /// `E^(m * w)` for the reported `w`.
    General,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub class: RegularityClass,
    pub horizon: usize,
    /// Tag of `m * w`; anything short of beyond-analytic counts as analytic.
    pub analytic_tag: AnalyticTag,
    pub log_convex: PropertyReport<HpFloat>,
    /// Skipped on the analytic branch.
    pub strongly_nonanalytic: Option<PropertyReport<HpFloat>>,
    /// Enlargements of `w` applied, in order.
    pub escalations: Vec<String>,
    #[serde(serialize_with = "ser_weight")]
    pub weight: Weight<HpFloat>,
    #[serde(serialize_with = "ser_weight")]
    pub product: Weight<HpFloat>,
}

/// Replaces `m * w` by the product of the running maximum of its ratios and
/// returns the matching enlarged `w`.
fn log_convexify(m: &Weight<HpFloat>, w: &Weight<HpFloat>) -> Result<Weight<HpFloat>> {
    let mw = star_product(m, w)?;
    let mut run = HpFloat::zero();
    let mut prod = HpFloat::one();
    let mut out = Vec::with_capacity(mw.horizon());
    for n in 1..=mw.horizon() {
        run = run.max(mw.alpha(n));
        prod = prod * run.clone();
        out.push((prod.clone() / m.m(n)).max(w.m(n)));
    }
    Weight::new(out, Some(Generator::CustomTable))
}

fn gevrey_factor(w: &Weight<HpFloat>, delta: &HpFloat) -> Result<Weight<HpFloat>> {
    let g = Weight::new((1..=w.horizon()).map(|k| (ln_factorial(k) * delta.clone()).exp()).collect(), None)?;
    let mut out = star_product(w, &g)?;
    out.generator = match &w.generator {
        Some(Generator::Gevrey { s }) => HpFloat::parse_decimal(s)
            .map(|s| Generator::Gevrey { s: (s + delta.clone()).to_decimal_string() }),
        Some(Generator::Constant { c }) if c == "1" => {
            Some(Generator::Gevrey { s: (HpFloat::one() + delta.clone()).to_decimal_string() })
        }
        _ => Some(Generator::CustomTable),
    };
    Ok(out)
}

/// Classifies `E^(m * w)` for the certificate weight `w`, enlarging `w` when
/// `m * w` is not log-convex or, off the analytic branch, not strongly
/// non-analytic.
pub fn classify_regularity<R: Real>(m: &Weight<R>, cert: &DominationCertificate) -> Result<RegularityReport> {
    let n = m.horizon().min(cert.weight.horizon());
    if n < 4 {
        return Err(Error::HorizonTooSmall { what: "regularity classification".into(), have: n, need: 4 });
    }
    let m = m.truncate(n)?.to_hp();
    let mut w = cert.weight.truncate(n)?;
    let half = HpFloat::one() / HpFloat::from(2);
    let mut escalations = Vec::new();
    loop {
        let mw = star_product(&m, &w)?;
        let analytic_tag = classify_analytic_type(&mw)?.tag;
        let analytic = analytic_tag != AnalyticTag::BeyondAnalytic;
        let log_convex = check_property(&mw, Property::LogConvex, None)?;
        let sna = if analytic { None } else { Some(check_property(&mw, Property::StronglyNonanalytic, None)?) };
        let sna_ok = sna.as_ref().is_none_or(|r| r.holds_to_horizon);
        if log_convex.holds_to_horizon && sna_ok {
            let trivial = w.values().iter().all(One::is_one);
            let m_s = m.generator.as_ref().and_then(Generator::gevrey_exponent);
            let w_delta = match &w.generator {
                Some(Generator::Gevrey { s }) => HpFloat::parse_decimal(s).map(|s| s - HpFloat::one()),
                _ => None,
            };
            let class = if analytic {
                RegularityClass::Convergent
            } else if trivial {
                RegularityClass::SameClass { gevrey: m_s.map(|s| Real::to_decimal(&s)) }
            } else if let (Some(s), Some(d)) = (m_s, w_delta) {
                RegularityClass::Gevrey { s: (HpFloat::from_ratio(&s) + d).to_decimal_string() }
            } else {
                RegularityClass::General
            };
            return Ok(RegularityReport {
                class,
                horizon: n,
                analytic_tag,
                log_convex,
                strongly_nonanalytic: sna,
                escalations,
                weight: w,
                product: mw,
            });
        }
        if escalations.len() >= ESCALATION_BUDGET {
            return Err(Error::EscalationExhausted(ESCALATION_BUDGET));
        }
        if !log_convex.holds_to_horizon {
            w = log_convexify(&m, &w)?;
            escalations.push("log-convexify".to_string());
        } else {
            w = gevrey_factor(&w, &half)?;
            escalations.push("gevrey-factor 1/2".to_string());
        }
    }
}

/// `sup_k (1/|k|) log(|phi_k| / (m_k w_k))` over `2 <= |k| <= horizon`, with
/// `|phi_k|` the largest component modulus. `None` when every such coefficient vanishes.
pub fn growth_exponent<C: crate::scalar::Coeff>(
    phi: &crate::series::TruncatedSeries<C>,
    mw: &Weight<HpFloat>,
) -> Option<HpFloat> {
    let mut best: Option<HpFloat> = None;
    for (k, v) in phi.terms().filter(|(k, _)| (2..=mw.horizon()).contains(&k.degree())) {
        let sq = v.iter().map(|c| c.norm_sq().to_hp()).fold(HpFloat::zero(), HpFloat::max);
        if sq.is_zero() {
            continue;
        }
        let d = k.degree();
        let e = (sq.ln() / HpFloat::from(2) - mw.m(d).ln()) / HpFloat::from(d as i64);
        best = Some(best.map_or(e.clone(), |b| b.max(e)));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(q: usize, f: impl Fn(usize) -> f64) -> OmegaTable {
        OmegaTable::from_fn(q, |n| HpFloat::from_f64(f(n)))
    }

    #[test]
    fn bounded_divisors_need_no_loss() {
        let om = table(64, |_| -(2f64.ln()));
        let c = dominating_weight(&om, &Policy::Constant).unwrap();
        assert_eq!(c.class_tag, ClassTag::NoLoss);
        assert!(c.a.is_zero());
        assert_eq!(c.bruno_partial_sums.len(), 6);
    }

    #[test]
    fn gevrey_growth_rejects_constant_and_fits_delta() {
        let delta = 0.5;
        let om = table(256, |q| delta * q as f64 * 2f64.ln() / 2.0);
        assert!(matches!(dominating_weight(&om, &Policy::Constant), Err(Error::Unbounded(_))));
        let d = fit_gevrey_delta(&om).unwrap().to_f64();
        assert!((d - delta).abs() < 1e-12, "{d}");
        let auto = dominating_weight(&om, &Policy::Auto).unwrap();
        assert!(matches!(auto.class_tag, ClassTag::GevreyLoss(_)));
    }

    #[test]
    fn minimal_weight_absorbs_fast_growth() {
        let om = table(64, |q| (q * q) as f64);
        let c = dominating_weight(&om, &Policy::Minimal).unwrap();
        assert_eq!(c.class_tag, ClassTag::General);
        assert_eq!(c.weight.horizon(), 63);
        assert!(c.weight.m(3).is_one());
        assert!(c.weight.m(4) > HpFloat::one());
    }

    #[test]
    fn classification_heads() {
        let om = table(64, |_| -(2f64.ln()));
        let none = dominating_weight(&om, &Policy::Constant).unwrap();
        let g2 = Weight::<num_rational::BigRational>::gevrey(&crate::scalar::ratio(2, 1), 63).unwrap();
        let r = classify_regularity(&g2, &none).unwrap();
        assert_eq!(r.class, RegularityClass::SameClass { gevrey: Some("2".into()) });
        let gl = dominating_weight(&om, &Policy::Gevrey(HpFloat::one() / HpFloat::from(2))).unwrap();
        let r = classify_regularity(&g2, &gl).unwrap();
        assert_eq!(r.class, RegularityClass::Gevrey { s: "2.5".into() });
        let unit = Weight::<num_rational::BigRational>::unit(63).unwrap();
        let r = classify_regularity(&unit, &none).unwrap();
        assert_eq!(r.class, RegularityClass::Convergent);
        assert!(r.strongly_nonanalytic.is_none());
    }

    #[test]
    fn policy_parsing() {
        assert_eq!(Policy::parse("minimal"), Some(Policy::Minimal));
        assert!(matches!(Policy::parse("gevrey:0.5"), Some(Policy::Gevrey(_))));
        assert!(matches!(Policy::parse("gevrey:1/2"), Some(Policy::Gevrey(_))));
        assert_eq!(Policy::parse("nope"), None);
    }
}
