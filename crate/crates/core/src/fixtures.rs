//! Eigenvalue sets, nonresonance tables and random maps for the four
//! small-divisor regimes, plus a seeded random corpus.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hp::HpFloat;
use crate::linearize::{check_nonresonance, LinearPart, OmegaTable};
use crate::multiindex::MultiIndex;
use crate::scalar::{parse_rational, ratio};
use crate::series::TruncatedSeries;
use crate::GaussianRational;

const PRIMES: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn real(q: BigRational) -> GaussianRational {
    Complex::new(q, BigRational::zero())
}

/// `lambda_i = 1/p_i` for the first `s` primes: all inside the unit disc, so
/// `Omega` is bounded.
pub fn poincare(s: usize) -> Result<LinearPart<GaussianRational>> {
    assert!(s <= PRIMES.len(), "at most {} eigenvalues", PRIMES.len());
    LinearPart::new(PRIMES[..s].iter().map(|&p| real(ratio(1, p))).collect())
}

/// `Omega(q) = q^tau / gamma`.
pub fn diophantine_omega(max_q: usize, tau: &BigRational, gamma: &BigRational) -> OmegaTable {
    let (t, lg) = (HpFloat::from_ratio(tau), HpFloat::from_ratio(gamma).ln());
    OmegaTable::from_fn(max_q, |q| t.clone() * HpFloat::from(q as i64).ln() - lg.clone())
}

/// `Omega(q) = 2^(delta q / 2)`, so `log Omega(2^(nu+1)) / 2^nu = delta log 2`
/// and the partial sums grow like `delta log n`.
pub fn gevrey_divisor_omega(max_q: usize, delta: &HpFloat) -> OmegaTable {
    let c = delta.clone() * HpFloat::from(2).ln() / HpFloat::from(2);
    OmegaTable::from_fn(max_q, |q| c.clone() * HpFloat::from(q as i64))
}

/// `Omega(q) = exp(q^2)`.
pub fn arbitrary_omega(max_q: usize) -> OmegaTable {
    OmegaTable::from_fn(max_q, |q| HpFloat::from((q * q) as i64))
}

const PI_50: &str = "3.14159265358979323846264338327950288419716939937510";

/// `sin x` and `cos x` by their Taylor series, exact in rationals.
fn sin_cos(x: &BigRational, terms: usize) -> (BigRational, BigRational) {
    let (mut s, mut c) = (BigRational::zero(), BigRational::zero());
    let mut t = BigRational::one();
    for n in 0..2 * terms {
        match n % 4 {
            0 => c += &t,
            1 => s += &t,
            2 => c -= &t,
            _ => s -= &t,
        }
        t = t * x / BigRational::from_integer(BigInt::from(n as i64 + 1));
    }
    (s, c)
}

/// A point `lambda = (1 - u^2 + 2ui) / (1 + u^2)` on the unit circle whose
/// angle agrees with `2 pi p / q` to about `digits` decimal digits.
///
/// `lambda^q` then lies within roughly `10^-digits` of 1 while the lower
/// powers stay well separated, so `Omega` jumps by a huge factor at `q + 1`.
pub fn liouville(p: i64, q: i64, digits: u32) -> Result<LinearPart<GaussianRational>> {
    let pi = parse_rational(PI_50).expect("constant");
    let half = pi * ratio(p, q);
    let (s, c) = sin_cos(&half, 40);
    let u = s / (BigRational::one() + c);
    let scale = BigRational::from_integer(BigInt::from(10).pow(digits));
    let u = (u * &scale).round() / scale;
    let den = BigRational::one() + &u * &u;
    let re = (BigRational::one() - &u * &u) / &den;
    let im = (ratio(2, 1) * &u) / den;
    LinearPart::new(vec![Complex::new(re, im)])
}

/// The default near-resonant fixture: angle `2 pi 2/9`, 40 digits.
pub fn liouville_default() -> Result<LinearPart<GaussianRational>> {
    liouville(2, 9, 40)
}

/// One random nonresonant linearization problem.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub linear: LinearPart<GaussianRational>,
    pub g_hat: TruncatedSeries<GaussianRational>,
}

fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> BigRational {
    ratio(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn random_eigenvalue(rng: &mut ChaCha8Rng) -> GaussianRational {
    loop {
        let re = small_rational(rng, 6, 6);
        let im = if rng.gen_bool(0.5) { small_rational(rng, 6, 6) } else { BigRational::zero() };
        let z = Complex::new(re, im);
        let n = &z.re * &z.re + &z.im * &z.im;
        // Stay off the unit circle so the corpus has no near-resonances of its own.
        if !n.is_zero() && n != BigRational::one() {
            return z;
        }
    }
}

/// Random map with terms of degree `2..=max_degree`, each monomial present
/// with probability `density`, coefficients `a/b`, `|a| <= 2`, `1 <= b <= 3`.
pub fn random_map(
    rng: &mut ChaCha8Rng,
    s: usize,
    max_degree: usize,
    order: usize,
    density: f64,
) -> Result<TruncatedSeries<GaussianRational>> {
    let mut g = TruncatedSeries::zero(s, s, order);
    for d in 2..=max_degree.min(order) {
        for k in MultiIndex::of_degree(s, d) {
            let v: Vec<GaussianRational> = (0..s)
                .map(|_| if rng.gen_bool(density) { real(small_rational(rng, 2, 3)) } else { real(BigRational::zero()) })
                .collect();
            if v.iter().any(|c| !c.is_zero()) {
                g.set(k, v)?;
            }
        }
    }
    Ok(g)
}

/// `count` entries with `s = 1, 2, 3` in turn, eigenvalues nonresonant to
/// `order`, maps of degree at most 4. Deterministic in `seed`.
pub fn random_corpus(seed: u64, count: usize, order: usize) -> Result<Vec<CorpusEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let s = 1 + i % 3;
        let linear = loop {
            let l = LinearPart::new((0..s).map(|_| random_eigenvalue(&mut rng)).collect())?;
            if !check_nonresonance(&l, order.max(2))?.resonant {
                break l;
            }
        };
        let g_hat = random_map(&mut rng, s, 4, order, 0.4)?;
        out.push(CorpusEntry { name: format!("random-{seed}-{i:02}-s{s}"), linear, g_hat });
    }
    Ok(out)
}

/// Whether every eigenvalue lies strictly inside, or every one strictly
/// outside, the unit circle.
pub fn in_poincare_domain(l: &LinearPart<GaussianRational>) -> bool {
    let one = BigRational::one();
    let n: Vec<BigRational> = l.eigenvalues().iter().map(|z| &z.re * &z.re + &z.im * &z.im).collect();
    n.iter().all(|x| *x < one) || n.iter().all(|x| *x > one && x.is_positive())
}
