//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero on any failure.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultralin::fixtures::{
    arbitrary_omega, diophantine_omega, gevrey_divisor_omega, liouville_default, poincare, random_corpus,
};
use ultralin::linearize::{
    accumulation_ledger, bruno_partial_sums, check_nonresonance, classify_regularity, conjugacy_residual,
    counting_lemma_check, dominating_weight, fit_gevrey_delta, formal_linearize,
    siegel_bound_check, sigma_sequence, ClassTag, DominationCertificate, LinearPart, OmegaTable, Policy,
    RegularityClass,
};
use ultralin::multiindex::MultiIndex;
use ultralin::series::{
    compose, composition_hypothesis, flow_coefficients, flow_majorant_check, inverse_series, main_lemma_check,
    TruncatedSeries,
};
use ultralin::weights::{
    check_property, generate_example, implication_matrix, log_convex_minorant, search_lambda, shift_duality_check,
    AnyWeight, ExampleKind, ExampleOptions, Property, Weight,
};
use ultralin::{GaussianRational, HpFloat, Real};

use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const ORDER: usize = 8;
const CORPUS_SEED: u64 = 2024;

fn corpus() -> Vec<ultralin::fixtures::CorpusEntry> {
    random_corpus(CORPUS_SEED, 25, ORDER).unwrap()
}

fn conjugacy() -> Outcome {
    let start = Instant::now();
    let mut nonzero = Vec::new();
    for e in corpus() {
        let phi = formal_linearize(&e.linear, &e.g_hat, ORDER).unwrap();
        if !conjugacy_residual(&e.linear, &e.g_hat, &phi).unwrap().is_zero() {
            nonzero.push(e.name);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        nonzero.is_empty() && secs < 60.0,
        format!("25 fixtures, N = {ORDER}, nonzero residuals {nonzero:?}, {secs:.1} s (limit 60 s)"),
    )
}

fn siegel() -> Outcome {
    let unit = Weight::<Q>::unit(ORDER).unwrap();
    let gevrey = Weight::<Q>::gevrey(&q(2, 1), ORDER).unwrap();
    let (mut checked, mut violations) = (0, Vec::new());
    let mut worst = 0.0f64;
    for (i, e) in corpus().into_iter().enumerate() {
        let m = if i % 2 == 0 { &unit } else { &gevrey };
        let ledger = accumulation_ledger(&e.linear, ORDER).unwrap();
        let r = siegel_bound_check(&ledger, &e.linear, m, &e.g_hat, ORDER).unwrap();
        checked += r.checked;
        worst = worst.max(r.max_ratio.parse::<f64>().unwrap_or(f64::INFINITY));
        if !r.holds {
            violations.push((e.name, r.first_violation.map(|v| v.k)));
        }
    }
    ensure(violations.is_empty(), format!("{checked} coefficients, worst ratio {worst:.3e}, violations {violations:?}"))
}

fn counting() -> Outcome {
    const N: usize = 10;
    let mut fixtures: Vec<(String, LinearPart<GaussianRational>)> =
        corpus().into_iter().map(|e| (e.name, e.linear)).collect();
    for s in 1..=3 {
        fixtures.push((format!("poincare-s{s}"), poincare(s).unwrap()));
    }
    fixtures.push(("liouville".into(), liouville_default().unwrap()));
    let (mut pairs, mut violations) = (0usize, Vec::new());
    let mut liouville_omega = String::new();
    for (name, l) in &fixtures {
        let ledger = accumulation_ledger(l, N).unwrap();
        if name == "liouville" {
            liouville_omega = ledger.omega_sq(N).unwrap().to_hp().sqrt().to_f64().to_string();
        }
        for k in ledger.entries.keys().filter(|k| k.degree() >= 2) {
            for n in 2..=k.degree() {
                pairs += 1;
                let r = counting_lemma_check(&ledger, n, k).unwrap();
                if !r.holds {
                    violations.push((name.clone(), n, k.clone()));
                }
            }
        }
    }
    ensure(
        violations.is_empty() && !liouville_omega.is_empty(),
        format!("{} fixtures, {pairs} (n, k) pairs, Liouville Omega(10) = {liouville_omega}, violations {violations:?}", fixtures.len()),
    )
}

fn random_series(rng: &mut ChaCha8Rng, order: usize) -> TruncatedSeries<Q> {
    let terms = (1..=order).filter_map(|d| {
        let c = rng.gen_range(-2i64..=2);
        (c != 0).then(|| (vec![d as u32], vec![q(c, 1)]))
    });
    let terms: Vec<_> = terms.collect();
    TruncatedSeries::from_terms(1, 1, order, terms).unwrap()
}

fn random_log_convex(rng: &mut ChaCha8Rng, n: usize) -> Weight<Q> {
    let mut alpha = q(rng.gen_range(1..=4), 2);
    let mut m = Q::one();
    let values = (0..n)
        .map(|_| {
            alpha += q(rng.gen_range(0..=3), rng.gen_range(1..=3));
            m *= alpha.clone();
            m.clone()
        })
        .collect();
    Weight::new(values, None).unwrap()
}

fn main_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut instances, mut tries, mut violations, mut coefficients) = (0, 0, 0, 0);
    while instances < 100 && tries < 10_000 {
        tries += 1;
        let m = match rng.gen_range(0..4) {
            0 => Weight::<Q>::unit(ORDER).unwrap(),
            1 => Weight::gevrey(&q(rng.gen_range(2..=3), 1), ORDER).unwrap(),
            2 => Weight::constant(q(1, rng.gen_range(1..=3)), ORDER).unwrap(),
            _ => random_log_convex(&mut rng, ORDER),
        };
        let w = match rng.gen_range(0..3) {
            0 => Weight::<Q>::unit(ORDER).unwrap(),
            1 => Weight::gevrey(&q(2, 1), ORDER).unwrap(),
            _ => random_log_convex(&mut rng, ORDER),
        };
        let lambda = q([1, 2, 4][rng.gen_range(0..3)], 1);
        let (g, h) = (random_series(&mut rng, ORDER), random_series(&mut rng, ORDER));
        if composition_hypothesis(&w, &m, &lambda, ORDER).unwrap().is_some() {
            continue;
        }
        instances += 1;
        let r = main_lemma_check(&g, &h, &w, &m, &lambda, ORDER).unwrap();
        coefficients += r.checked;
        if !r.holds {
            violations += 1;
        }
    }
    ensure(
        instances == 100 && violations == 0,
        format!("{instances} instances from {tries} draws, {coefficients} coefficients, {violations} violations, exact"),
    )
}

const WEIGHT_HORIZON: usize = 16;

fn weights_chain() -> Outcome {
    let n = WEIGHT_HORIZON;
    let mut fixtures: Vec<(String, AnyWeight)> = ExampleKind::ALL
        .iter()
        .map(|&k| (k.name().to_string(), generate_example(k, n, &ExampleOptions::default()).unwrap()))
        .collect();
    for (name, s) in [("gevrey-1", q(1, 1)), ("gevrey-1.5", q(3, 2)), ("gevrey-2", q(2, 1)), ("gevrey-3", q(3, 1))] {
        let w = if s.is_integer() {
            AnyWeight::Exact(Weight::gevrey(&s, n).unwrap())
        } else {
            AnyWeight::Float(Weight::gevrey(&s, n).unwrap())
        };
        fixtures.push((name.into(), w));
    }
    fixtures.push(("constant-2".into(), AnyWeight::Exact(Weight::constant(q(2, 1), n).unwrap())));
    let mut broken = Vec::new();
    let mut disagree = Vec::new();
    for (name, w) in &fixtures {
        let (chain_ok, agree) = match w {
            AnyWeight::Exact(w) => (implication_matrix(w, None).is_ok(), shift_duality_check(w, &Q::one()).unwrap().agree),
            AnyWeight::Float(w) => (implication_matrix(w, None).is_ok(), shift_duality_check(w, &HpFloat::one()).unwrap().agree),
        };
        if !chain_ok {
            broken.push(name.clone());
        }
        if !agree {
            disagree.push(name.clone());
        }
    }
    let w = match generate_example(ExampleKind::FdbNotAsm, n, &ExampleOptions::default()).unwrap() {
        AnyWeight::Float(w) => w,
        AnyWeight::Exact(w) => w.to_hp(),
    };
    let grid: Vec<HpFloat> = [1, 2, 4, 8, 16].iter().map(|&v| HpFloat::from(v)).collect();
    let strict = search_lambda(&w, Property::StrictFdb, &grid).unwrap();
    let asm = check_property(&w, Property::Asm, Some(&HpFloat::one())).unwrap();
    let separated = strict.holds_to_horizon && !asm.holds_to_horizon && asm.witness.is_some();
    ensure(
        broken.is_empty() && disagree.is_empty() && separated,
        format!(
            "{} weights at horizon {n}, chain broken {broken:?}, duality disagrees {disagree:?}, fdb-not-asm: strict_fdb {} asm {} witness {:?}",
            fixtures.len(),
            strict.holds_to_horizon,
            asm.holds_to_horizon,
            asm.witness.map(|w| w.indices)
        ),
    )
}

/// Recomputes the certificate inequality from the table alone.
fn certificate_verifies(table: &OmegaTable, cert: &DominationCertificate) -> bool {
    let mut sums = Vec::new();
    let mut acc = HpFloat::zero();
    let mut nu = 0;
    while let Some(l) = table.ln(1 << (nu + 1)) {
        acc = acc + l.clone() / HpFloat::from(1i64 << nu);
        sums.push(acc.clone());
        nu += 1;
    }
    let top = ((1usize << sums.len()) - 1).min(cert.weight.horizon());
    (2..=top).all(|n| {
        let lhs = sums[n.ilog2() as usize].clone();
        let rhs = cert.a.clone() + cert.weight.m(n).ln() / HpFloat::from(n as i64);
        lhs.le_tol(&rhs)
    })
}

fn regularity() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for s in 1..=3 {
        let l = poincare(s).unwrap();
        let table = check_nonresonance(&l, 64).unwrap().omega_table().unwrap();
        let cert = dominating_weight(&table, &Policy::Auto).unwrap();
        let unit = cert.weight.values().iter().all(|v| *v == HpFloat::one());
        let class = classify_regularity(&Weight::<Q>::unit(16).unwrap(), &cert).unwrap().class;
        let pass = cert.class_tag == ClassTag::NoLoss && unit && class == RegularityClass::Convergent;
        ok &= pass;
        notes.push(format!("poincare-s{s} {:?}", cert.class_tag));
    }
    let dio = diophantine_omega(256, &q(2, 1), &q(1, 2));
    let cert = dominating_weight(&dio, &Policy::Auto).unwrap();
    let sums = bruno_partial_sums(&dio);
    let pass = cert.class_tag == ClassTag::NoLoss && certificate_verifies(&dio, &cert);
    ok &= pass;
    notes.push(format!("diophantine {:?} B(L) up to {:.3}", cert.class_tag, sums.last().unwrap().to_f64()));

    let gev = gevrey_divisor_omega(256, &HpFloat::from_f64(0.5));
    let fit = fit_gevrey_delta(&gev).unwrap().to_f64();
    let pass = (fit - 0.5).abs() <= 0.05;
    ok &= pass;
    notes.push(format!("gevrey-divisors fitted delta {fit:.4}"));

    let arb = arbitrary_omega(256);
    let cert = dominating_weight(&arb, &Policy::Minimal).unwrap();
    let pass = certificate_verifies(&arb, &cert);
    ok &= pass;
    notes.push(format!("arbitrary a = {:.3}, w horizon {}, certificate {}", cert.a.to_f64(), cert.weight.horizon(), pass));
    ensure(ok, notes.join("; "))
}

fn oracles() -> Outcome {
    let mut notes = Vec::new();
    let sigma = sigma_sequence(12);
    let mut memo = BTreeMap::new();
    let sigma_ok = (1..=12).all(|n| sigma[n] == sigma_brute(n, &mut memo)) && sigma[12] == BigUint::from(2646723u32);
    notes.push(format!("sigma_1..12 {sigma_ok}"));

    let mut delta_ok = true;
    let sets: Vec<(Vec<GaussianRational>, usize)> = vec![
        (vec![c(q(2, 1), Q::zero())], 6),
        (vec![c(q(3, 2), q(1, 2))], 6),
        (vec![c(q(1, 2), Q::zero()), c(q(1, 3), Q::zero())], 6),
        (vec![c(q(3, 1), Q::zero()), c(q(1, 2), q(1, 1))], 6),
        (vec![c(q(1, 2), Q::zero()), c(q(1, 3), Q::zero()), c(q(1, 5), Q::zero())], 6),
    ];
    let mut indices = 0;
    for (lambda, n) in sets {
        let ledger = accumulation_ledger(&LinearPart::new(lambda.clone()).unwrap(), n).unwrap();
        let mut memo = BTreeMap::new();
        for d in 1..=n {
            for k in MultiIndex::of_degree(lambda.len(), d) {
                indices += 1;
                let best = tree_values(&lambda, &k, &mut memo).into_iter().max().unwrap();
                delta_ok &= ledger.delta_sq(&k) == Some(&best);
            }
        }
    }
    notes.push(format!("Delta on {indices} indices {delta_ok}"));

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut minorant_ok = true;
    for _ in 0..50 {
        let n = rng.gen_range(3..=20);
        let big: Vec<Q> = (0..n).map(|_| q(rng.gen_range(1..=1000), rng.gen_range(1..=50))).collect();
        let r = log_convex_minorant(&Weight::from_big_m(big.clone(), None).unwrap()).unwrap();
        let want = chord_oracle(&big.iter().map(Real::ln_f64).collect::<Vec<_>>());
        minorant_ok &= (1..=n).all(|k| (r.weight.big_m(k).ln_f64() - want[k - 1]).abs() < 1e-9);
    }
    notes.push(format!("minorant x50 {minorant_ok}"));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut inverse_ok = true;
    for i in 0..25 {
        let s = 1 + i % 2;
        let g = random_near_identity(&mut rng, s, 8);
        let rho = inverse_series(&g, 8).unwrap();
        inverse_ok &= compose(&g, &rho, 8).unwrap() == TruncatedSeries::identity(s, 8);
    }
    notes.push(format!("inverse x25 {inverse_ok}"));
    ensure(sigma_ok && delta_ok && minorant_ok && inverse_ok, notes.join("; "))
}

fn field(terms: &[((u32, u32), i64)]) -> TruncatedSeries<Q> {
    TruncatedSeries::from_terms(2, 1, 10, terms.iter().map(|&((i, j), c)| (vec![i, j], vec![q(c, 1)]))).unwrap()
}

fn flows() -> Outcome {
    const N: usize = 10;
    let unit = Weight::<Q>::unit(N).unwrap();
    let cases = [
        ("x", field(&[((0, 1), 1)]), true),
        ("x^2", field(&[((0, 2), 1)]), true),
        ("x - x^2", field(&[((0, 1), 1), ((0, 2), -1)]), false),
        ("t x^2", field(&[((1, 2), 1)]), true),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, v, nonneg) in &cases {
        let r = flow_majorant_check(v, &unit, &unit, N).unwrap();
        let pass = r.comparison.holds && (!nonneg || r.comparison.is_equality());
        ok &= pass;
        notes.push(format!("{name}: {} of {} equal", r.comparison.equalities, r.comparison.checked));
    }
    let idx = |i: u32, j: u32| MultiIndex::new(vec![i, j]);
    let exp = flow_coefficients(&cases[0].1, N).unwrap();
    let mut want = TruncatedSeries::zero(2, 1, N);
    let mut fact = Q::one();
    for i in 0..N as u32 {
        want.set(idx(i, 1), vec![Q::one() / fact.clone()]).unwrap();
        fact *= q(i as i64 + 1, 1);
    }
    let exp_ok = exp == want;
    let geo = flow_coefficients(&cases[1].1, N).unwrap();
    let mut want = TruncatedSeries::zero(2, 1, N);
    for i in 0..(N as u32).div_ceil(2) {
        want.set(idx(i, i + 1), vec![Q::one()]).unwrap();
    }
    let geo_ok = geo == want;
    notes.push(format!("x e^t {exp_ok}, x/(1 - t x) {geo_ok}"));
    ensure(ok && exp_ok && geo_ok, notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("conjugacy identity", conjugacy),
        ("accumulation bound", siegel),
        ("divisor counting", counting),
        ("composition estimate", main_lemma),
        ("weight chain and shift duality", weights_chain),
        ("regularity classification", regularity),
        ("oracle equivalences", oracles),
        ("flow majorant", flows),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {} PASS {name} [{secs:.1} s]: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} FAIL {name} [{secs:.1} s]: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
