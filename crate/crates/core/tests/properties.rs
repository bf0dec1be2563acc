use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use ultralin::fixtures::random_corpus;
use ultralin::linearize::{
    accumulation_ledger, check_nonresonance, counting_lemma_check, dominating_weight, formal_linearize, OmegaTable,
    Policy,
};
use ultralin::multiindex::MultiIndex;
use ultralin::series::{
    compose, composition_hypothesis, flow_majorant_check, inverse_series, main_lemma_check, majorant, TruncatedSeries,
};
use ultralin::weights::{
    characteristic_coefficients, check_property, implication_matrix, log_convex_minorant, star_product,
    witness_violates, Property, Weight,
};
use ultralin::{HpFloat, Real};

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn positive() -> impl Strategy<Value = Q> {
    (1i64..=40, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn weight(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Weight<Q>> {
    prop::collection::vec(positive(), len).prop_map(|v| Weight::new(v, None).unwrap())
}

/// Weights with nondecreasing `alpha_n = m_n / m_{n-1}`.
fn log_convex_weight(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Weight<Q>> {
    prop::collection::vec((0i64..=3, 1i64..=4), len).prop_map(|steps| {
        let mut alpha = q(1, 2);
        let mut m = Q::one();
        let mut values = Vec::with_capacity(steps.len());
        for (a, b) in steps {
            alpha += q(a, b);
            m *= alpha.clone();
            values.push(m.clone());
        }
        Weight::new(values, None).unwrap()
    })
}

fn coeff() -> impl Strategy<Value = Q> {
    (-2i64..=2).prop_map(|n| q(n, 1))
}

/// Series without constant term; `min_degree` 2 drops the linear part.
fn series(s: usize, order: usize, min_degree: usize, nonneg: bool) -> impl Strategy<Value = TruncatedSeries<Q>> {
    let keys: Vec<MultiIndex> = (min_degree..=order).flat_map(|d| MultiIndex::of_degree(s, d)).collect();
    let n = keys.len() * s;
    prop::collection::vec(coeff(), n).prop_map(move |c| {
        let mut f = TruncatedSeries::zero(s, s, order);
        for (i, k) in keys.iter().enumerate() {
            let v: Vec<Q> = c[i * s..(i + 1) * s].iter().map(|x| if nonneg { x.abs() } else { x.clone() }).collect();
            if v.iter().any(|x| !x.is_zero()) {
                f.set(k.clone(), v).unwrap();
            }
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grlex_is_strict_and_total(a in prop::collection::vec(0u32..4, 3), b in prop::collection::vec(0u32..4, 3)) {
        let (x, y) = (MultiIndex::new(a.clone()), MultiIndex::new(b.clone()));
        prop_assert_eq!(x.degree(), a.iter().sum::<u32>() as usize);
        let n = [x < y, x == y, x > y].iter().filter(|&&t| t).count();
        prop_assert_eq!(n, 1);
        prop_assert_eq!(x == y, a == b);
        if x.degree() < y.degree() {
            prop_assert!(x < y);
        }
    }

    #[test]
    fn increasing_mu_is_weakly_submultiplicative(steps in prop::collection::vec(positive(), 2..=12)) {
        let mut mu = Q::one();
        let mus: Vec<Q> = steps.into_iter().map(|d| { mu += d; mu.clone() }).collect();
        let w = Weight::from_mu(&mus, None).unwrap();
        let n = w.horizon();
        for k in 1..n {
            for l in 1..=n - k {
                let two = Q::from_integer(BigInt::from(2)).powu((k + l) as u64);
                prop_assert!(w.m(k) * w.m(l) <= two * w.m(k + l));
            }
        }
    }

    #[test]
    fn minorant_is_idempotent_and_below(w in weight(3..=14)) {
        let r = log_convex_minorant(&w).unwrap();
        let n = w.horizon();
        prop_assert_eq!(r.vertices.first(), Some(&1));
        prop_assert_eq!(r.vertices.last(), Some(&n));
        for k in 1..=n {
            prop_assert!(r.weight.big_m(k).le_tol(&w.big_m(k).to_hp()));
        }
        let again = log_convex_minorant(&r.weight).unwrap();
        for k in 1..=n {
            let (a, b) = (again.weight.big_m(k), r.weight.big_m(k));
            prop_assert!(a.le_tol(&b) && b.le_tol(&a), "k = {}", k);
        }
    }

    #[test]
    fn star_product_laws(a in weight(6..=6), b in weight(6..=6), c in weight(6..=6)) {
        let unit = Weight::<Q>::unit(6).unwrap();
        let (au, ab, ba) = (star_product(&a, &unit).unwrap(), star_product(&a, &b).unwrap(), star_product(&b, &a).unwrap());
        prop_assert_eq!(au.values(), a.values());
        prop_assert_eq!(ab.values(), ba.values());
        let left = star_product(&star_product(&a, &b).unwrap(), &c).unwrap();
        let right = star_product(&a, &star_product(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left.values(), right.values());
    }

    #[test]
    fn characteristic_coefficients_bound(w in log_convex_weight(6..=10)) {
        let n = w.horizon();
        let s = characteristic_coefficients(&w, n, n).unwrap();
        for k in 1..=n {
            let lower = w.m(k) / Q::from_integer(BigInt::from(2)).powu(k as u64);
            prop_assert!(lower <= s[k - 1]);
        }
    }

    #[test]
    fn failing_witnesses_reevaluate(w in weight(8..=10)) {
        let lambda = Q::one();
        for p in Property::ALL {
            if matches!(p, Property::StronglyNonanalytic | Property::AnalyticType | Property::DiffStable) {
                continue;
            }
            let lam = p.takes_lambda().then_some(&lambda);
            let r = check_property(&w, p, lam).unwrap();
            if !r.holds_to_horizon {
                let wit = r.witness.as_ref();
                prop_assert!(wit.is_some(), "{:?} has no witness", p);
                prop_assert!(witness_violates(&w, p, lam, wit.unwrap()), "{:?}", p);
            }
        }
    }

    #[test]
    fn composition_is_associative(f in series(2, 5, 1, false), g in series(2, 5, 1, false), h in series(2, 5, 1, false)) {
        let left = compose(&compose(&f, &g, 5).unwrap(), &h, 5).unwrap();
        let right = compose(&f, &compose(&g, &h, 5).unwrap(), 5).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_is_an_involution(g_hat in series(2, 6, 2, false)) {
        let g = TruncatedSeries::identity(2, 6).add(&g_hat).unwrap();
        let rho = inverse_series(&g, 6).unwrap();
        prop_assert_eq!(inverse_series(&rho, 6).unwrap(), g);
    }

    #[test]
    fn majorant_commutes_for_nonnegative_series(g in series(1, 7, 1, true), h in series(1, 7, 1, true)) {
        let unit = Weight::<Q>::unit(7).unwrap();
        let lhs = majorant(&compose(&g, &h, 7).unwrap(), &unit).unwrap().series;
        let rhs = compose(&majorant(&g, &unit).unwrap().series, &majorant(&h, &unit).unwrap().series, 7).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn main_lemma_on_random_instances(
        g in series(1, 6, 1, false),
        h in series(1, 6, 1, false),
        mk in 0usize..3,
        wk in 0usize..2,
        lam in 1i64..=2,
    ) {
        let n = 6;
        let pick = |k: usize| match k {
            0 => Weight::<Q>::unit(n).unwrap(),
            1 => Weight::gevrey(&q(2, 1), n).unwrap(),
            _ => Weight::constant(q(1, 2), n).unwrap(),
        };
        let (m, w, lambda) = (pick(mk), pick(wk), q(lam, 1));
        prop_assume!(composition_hypothesis(&w, &m, &lambda, n).unwrap().is_none());
        let r = main_lemma_check(&g, &h, &w, &m, &lambda, n).unwrap();
        prop_assert!(r.holds, "{:?}", r.first_violation);
    }
}

fn flow_field() -> impl Strategy<Value = TruncatedSeries<Q>> {
    prop::collection::vec((0u32..=2, 0u32..=2, 0i64..=2), 1..4).prop_map(|terms| {
        let t = terms.into_iter().filter(|&(i, j, _)| i + j >= 1).map(|(i, j, c)| (vec![i, j], vec![q(c, 1)]));
        TruncatedSeries::from_terms(2, 1, 4, t).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonnegative_flows_meet_the_majorant(v in flow_field()) {
        let unit = Weight::<Q>::unit(6).unwrap();
        let r = flow_majorant_check(&v, &unit, &unit, 6).unwrap();
        prop_assert!(r.comparison.holds);
        prop_assert!(r.comparison.is_equality());
    }

    #[test]
    fn implication_chain_never_breaks(w in weight(8..=9)) {
        prop_assert!(implication_matrix(&w, None).is_ok());
    }

    #[test]
    fn log_convex_weights_satisfy_the_chain(w in log_convex_weight(8..=9)) {
        let reports = implication_matrix(&w, None).unwrap();
        for p in ultralin::weights::CHAIN {
            let r = reports.iter().find(|r| r.property == p).unwrap();
            prop_assert!(r.holds_to_horizon, "{:?}", p);
        }
    }

    #[test]
    fn corpus_invariants(seed in 0u64..1000) {
        for e in random_corpus(seed, 3, 6).unwrap() {
            let res = check_nonresonance(&e.linear, 6).unwrap();
            for k in 2..6 {
                prop_assert!(res.omega_sq(k).unwrap() <= res.omega_sq(k + 1).unwrap());
            }
            let phi = formal_linearize(&e.linear, &e.g_hat, 6).unwrap();
            for (k, _) in phi.terms() {
                prop_assert!((1..=6).contains(&k.degree()));
            }
            let ledger = accumulation_ledger(&e.linear, 6).unwrap();
            for k in ledger.entries.keys() {
                for n in 2..=6 {
                    prop_assert!(counting_lemma_check(&ledger, n, k).unwrap().holds, "{} n = {} k = {:?}", e.name, n, k);
                }
            }
        }
    }

    #[test]
    fn certificates_verify_on_random_tables(steps in prop::collection::vec((0i64..=8, 1i64..=3), 3..=63), delta in 0i64..=3) {
        let mut acc = 0.0;
        let values: Vec<HpFloat> = steps.into_iter().map(|(a, b)| { acc += a as f64 / b as f64; HpFloat::from_f64(acc) }).collect();
        let table = OmegaTable::from_ln(values);
        let cert = dominating_weight(&table, &Policy::Minimal).unwrap();
        prop_assert!(cert.a >= HpFloat::zero());
        let g = dominating_weight(&table, &Policy::Gevrey(HpFloat::from_f64(delta as f64 / 2.0))).unwrap();
        prop_assert!(g.weight.horizon() >= 1);
    }
}
