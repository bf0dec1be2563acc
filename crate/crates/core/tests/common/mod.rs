//! Brute-force oracles shared by the oracle and acceptance targets.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ultralin::multiindex::MultiIndex;
use ultralin::series::TruncatedSeries;
use ultralin::GaussianRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn c(re: Q, im: Q) -> GaussianRational {
    Complex::new(re, im)
}

/// Sum over all ordered compositions of `n` into at least two parts.
pub fn sigma_brute(n: usize, memo: &mut BTreeMap<usize, BigUint>) -> BigUint {
    if n == 1 {
        return BigUint::one();
    }
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut total = BigUint::zero();
    // Bit i set means a cut after position i + 1.
    for mask in 1u32..(1 << (n - 1)) {
        let mut prod = BigUint::one();
        let mut start = 0;
        for i in 0..n {
            if i == n - 1 || mask & (1 << i) != 0 {
                prod *= sigma_brute(i + 1 - start, memo);
                start = i + 1;
            }
        }
        total += prod;
    }
    memo.insert(n, total.clone());
    total
}

fn pow(z: &GaussianRational, e: u32) -> GaussianRational {
    (0..e).fold(c(Q::one(), Q::zero()), |acc, _| acc * z.clone())
}

fn norm_sq(z: &GaussianRational) -> Q {
    &z.re * &z.re + &z.im * &z.im
}

/// `E_k^2 = 1 / min_i |lambda^k - lambda_i|^2`.
pub fn e_sq(lambda: &[GaussianRational], k: &MultiIndex) -> Q {
    let pk = k.exps().iter().zip(lambda).fold(c(Q::one(), Q::zero()), |acc, (&e, l)| acc * pow(l, e));
    let min = lambda.iter().map(|l| norm_sq(&(pk.clone() - l.clone()))).min().unwrap();
    Q::one() / min
}

/// Multisets of nonzero indices summing to `k`, as nonincreasing sequences.
fn decompositions(k: &MultiIndex, max: Option<&MultiIndex>, out: &mut Vec<Vec<MultiIndex>>, cur: &mut Vec<MultiIndex>) {
    if k.degree() == 0 {
        out.push(cur.clone());
        return;
    }
    for d in 1..=k.degree() {
        for p in MultiIndex::of_degree(k.dim(), d) {
            if !p.le_componentwise(k) || max.is_some_and(|m| p > *m) {
                continue;
            }
            cur.push(p.clone());
            decompositions(&k.checked_sub(&p).unwrap(), Some(&p), out, cur);
            cur.pop();
        }
    }
}

/// Values of `Delta^2` over every decomposition tree of `k`.
pub fn tree_values(lambda: &[GaussianRational], k: &MultiIndex, memo: &mut BTreeMap<MultiIndex, BTreeSet<Q>>) -> BTreeSet<Q> {
    if let Some(v) = memo.get(k) {
        return v.clone();
    }
    let mut values = BTreeSet::new();
    if k.degree() == 1 {
        values.insert(Q::one());
    } else {
        let mut decs = Vec::new();
        decompositions(k, None, &mut decs, &mut Vec::new());
        let e = e_sq(lambda, k);
        for parts in decs.into_iter().filter(|p| p.len() >= 2) {
            let mut prods = BTreeSet::from([e.clone()]);
            for p in &parts {
                let sub = tree_values(lambda, p, memo);
                prods = prods.iter().flat_map(|a| sub.iter().map(move |b| a * b)).collect();
            }
            values.extend(prods);
        }
    }
    memo.insert(k.clone(), values.clone());
    values
}

/// `min` over chords of `(n, log M_n)` through points `i <= n <= j`.
pub fn chord_oracle(logs: &[f64]) -> Vec<f64> {
    let n = logs.len();
    (0..n)
        .map(|k| {
            let mut best = logs[k];
            for i in 0..=k {
                for j in k..n {
                    if i < j {
                        let t = (k - i) as f64 / (j - i) as f64;
                        best = best.min(logs[i] + t * (logs[j] - logs[i]));
                    }
                }
            }
            best
        })
        .collect()
}

/// `id` plus random rational terms of degree 2 to 4.
pub fn random_near_identity(rng: &mut ChaCha8Rng, s: usize, order: usize) -> TruncatedSeries<Q> {
    let mut g = TruncatedSeries::identity(s, order);
    for d in 2..=4 {
        for k in MultiIndex::of_degree(s, d) {
            if rng.gen_bool(0.5) {
                let v = (0..s).map(|_| q(rng.gen_range(-2..=2), rng.gen_range(1..=3))).collect();
                g.add_at(k, v).unwrap();
            }
        }
    }
    g
}
