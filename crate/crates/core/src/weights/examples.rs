//! Generators for weights that separate the weight properties.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{AnyWeight, Generator, Weight};
use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::scalar::{ratio, Real};

/// Smallest horizon accepted by [`generate_example`].
pub const MIN_EXAMPLE_HORIZON: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleKind {
    AsmNotFdb,
    FdbNotLog,
    FdbNotAsm,
    AsmNotDiff,
}

impl ExampleKind {
    pub const ALL: [ExampleKind; 4] =
        [ExampleKind::AsmNotFdb, ExampleKind::FdbNotLog, ExampleKind::FdbNotAsm, ExampleKind::AsmNotDiff];

    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::AsmNotFdb => "asm-not-fdb",
            ExampleKind::FdbNotLog => "fdb-not-log",
            ExampleKind::FdbNotAsm => "fdb-not-asm",
            ExampleKind::AsmNotDiff => "asm-not-diff",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ExampleKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug)]
pub struct ExampleOptions {
    /// Growth multiplier for the block parameters of `asm-not-fdb` (>= 1).
    pub multiplier: BigRational,
    /// Scale `c` in `m_n = (c log(1+n))^(-n)` for `fdb-not-asm`.
    pub scale: BigRational,
}

impl Default for ExampleOptions {
    fn default() -> Self {
        ExampleOptions { multiplier: BigRational::one(), scale: ratio(16, 1) }
    }
}

/// Materializes one of the separating examples at horizon `n`.
pub fn generate_example(kind: ExampleKind, n: usize, opts: &ExampleOptions) -> Result<AnyWeight> {
    if n < MIN_EXAMPLE_HORIZON {
        return Err(Error::HorizonTooSmall { what: kind.name().into(), have: n, need: MIN_EXAMPLE_HORIZON });
    }
    Ok(match kind {
        ExampleKind::AsmNotFdb => AnyWeight::Float(asm_not_fdb(n, &opts.multiplier)?),
        ExampleKind::FdbNotLog => AnyWeight::Exact(fdb_not_log(n)?),
        ExampleKind::FdbNotAsm => AnyWeight::Float(fdb_not_asm(n, &opts.scale)?),
        ExampleKind::AsmNotDiff => AnyWeight::Exact(asm_not_diff(n)?),
    })
}

/// Inductive block construction of an almost increasing weight.
///
/// Starting from `mu_1 = 1`, each stage with previous end `nbar` takes
/// `lambda = 8 c m_nbar^(1/nbar)`, sets `mu_k = lambda k` until the first `n`
/// with `M_n^(1/n) >= mu_n / 4`, then `mu_k = 64 ceil(k/n) M_n^(1/n)` for
/// `n < k <= n^2`. The multiplier `c` defaults to 1.
pub fn asm_not_fdb(horizon: usize, multiplier: &BigRational) -> Result<Weight<HpFloat>> {
    if *multiplier < BigRational::one() {
        return Err(Error::Precondition("multiplier must be >= 1".into()));
    }
    let c = HpFloat::from_ratio(multiplier);
    let ln4 = HpFloat::from(4).ln();
    let eight = HpFloat::from(8);
    let sixty_four = HpFloat::from(64);
    let mut mu: Vec<HpFloat> = vec![HpFloat::one()];
    let mut ln_big_m: Vec<HpFloat> = vec![HpFloat::from(0)];
    let mut ln_fact: Vec<HpFloat> = vec![HpFloat::from(0)];
    let push = |mu: &mut Vec<HpFloat>, lm: &mut Vec<HpFloat>, lf: &mut Vec<HpFloat>, v: HpFloat| {
        let k = mu.len() + 1;
        let prev = lm.last().expect("nonempty").clone();
        lm.push(prev + v.ln());
        let fprev = lf.last().expect("nonempty").clone();
        lf.push(fprev + HpFloat::from(k as i64).ln());
        mu.push(v);
    };
    let mut nbar = 1usize;
    while mu.len() < horizon {
        let ln_m_bar = ln_big_m[nbar - 1].clone() - ln_fact[nbar - 1].clone();
        let lambda = eight.clone() * c.clone() * (ln_m_bar / HpFloat::from(nbar as i64)).exp();
        loop {
            let k = mu.len() + 1;
            push(&mut mu, &mut ln_big_m, &mut ln_fact, lambda.clone() * HpFloat::from(k as i64));
            let root = ln_big_m[k - 1].clone() / HpFloat::from(k as i64);
            let target = mu[k - 1].ln() - ln4.clone();
            if target.le_tol(&root) || mu.len() >= horizon {
                break;
            }
        }
        let n = mu.len();
        let root = (ln_big_m[n - 1].clone() / HpFloat::from(n as i64)).exp();
        for k in n + 1..=(n * n).min(horizon.max(n)) {
            let blocks = k.div_ceil(n) as i64;
            push(&mut mu, &mut ln_big_m, &mut ln_fact, sixty_four.clone() * HpFloat::from(blocks) * root.clone());
        }
        nbar = mu.len();
    }
    mu.truncate(horizon);
    Weight::from_mu(&mu, Some(Generator::AsmNotFdb { multiplier: Real::to_decimal(multiplier) }))
}

/// Block-convex weight whose successive quotients collapse right after every
/// block start: on `(2^nu, 2^(nu+1)]` the first quotient is a peak
/// `base * 2^(nu 2^nu)` and the rest equal `base`, the previous peak.
pub fn fdb_not_log(horizon: usize) -> Result<Weight<BigRational>> {
    let mut alpha: Vec<BigInt> = vec![BigInt::one(), BigInt::one()];
    let mut prev_peak = BigInt::one();
    let mut nu = 1u32;
    while alpha.len() < horizon {
        let start = 1usize << nu;
        let base = prev_peak.clone();
        let peak = &base * num_traits::pow(BigInt::from(2), (nu as usize) << nu);
        for k in start + 1..=2 * start {
            alpha.push(if k == start + 1 { peak.clone() } else { base.clone() });
        }
        prev_peak = peak;
        nu += 1;
    }
    alpha.truncate(horizon);
    let mut acc = BigInt::one();
    let values = alpha
        .into_iter()
        .map(|a| {
            acc = &acc * a;
            BigRational::from_integer(acc.clone())
        })
        .collect();
    Weight::new(values, Some(Generator::FdbNotLog))
}

/// `m_n = (c log(1+n))^(-n)`.
pub fn fdb_not_asm(horizon: usize, scale: &BigRational) -> Result<Weight<HpFloat>> {
    let c = HpFloat::from_ratio(scale);
    let values = (1..=horizon)
        .map(|n| {
            let base = c.clone() * HpFloat::from(n as i64 + 1).ln();
            HpFloat::one() / base.powi(n as i64)
        })
        .collect();
    Weight::new(values, Some(Generator::Logpow { scale: Real::to_decimal(scale) }))
}

/// Log-convex weight with `alpha_n = 2^(n(n-1))`, so `mu_n^(1/n)` is unbounded.
pub fn asm_not_diff(horizon: usize) -> Result<Weight<BigRational>> {
    let mut acc = BigInt::one();
    let values = (1..=horizon)
        .map(|n| {
            acc = &acc * num_traits::pow(BigInt::from(2), n * (n - 1));
            BigRational::from_integer(acc.clone())
        })
        .collect();
    Weight::new(values, Some(Generator::AsmNotDiff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{check_property, Property};

    #[test]
    fn fdb_not_log_alpha_pattern() {
        let w = fdb_not_log(16).unwrap();
        let alpha: Vec<BigRational> = (1..=8).map(|k| w.alpha(k)).collect();
        let want: Vec<BigRational> = [1, 1, 4, 1, 1024, 4, 4, 4].iter().map(|&v| ratio(v, 1)).collect();
        assert_eq!(alpha, want);
    }

    #[test]
    fn asm_not_diff_is_log_convex() {
        let w = asm_not_diff(16).unwrap();
        assert!(check_property(&w, Property::LogConvex, None).unwrap().holds_to_horizon);
        assert!(!check_property(&w, Property::DiffStable, None).unwrap().holds_to_horizon);
    }

    #[test]
    fn asm_not_fdb_first_blocks() {
        let w = asm_not_fdb(20, &BigRational::one()).unwrap();
        // First stage: lambda = 8, ends at n = 2, then 64 ceil(k/2) sqrt(M_2) up to 4.
        assert_eq!(w.mu(1), HpFloat::one());
        assert_eq!(w.mu(2), HpFloat::from(16));
        let root = HpFloat::from(16).sqrt();
        let want = HpFloat::from(128) * root;
        assert!(((w.mu(3) - want.clone()) / want).abs().to_f64() < 1e-30);
        let ai = check_property(&w, Property::AlmostIncreasing, Some(&HpFloat::from(8))).unwrap();
        assert!(ai.holds_to_horizon);
    }

    #[test]
    fn small_horizon_rejected() {
        assert!(generate_example(ExampleKind::FdbNotLog, 4, &ExampleOptions::default()).is_err());
    }
}
