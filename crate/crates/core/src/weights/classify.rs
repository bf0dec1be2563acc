use serde::Serialize;

use super::Weight;
use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::io::ser_hp;
use crate::scalar::Real;

/// Position of a weight relative to the analytic class, judged on a finite table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticTag {
    /// `m_n^(1/n)` decreasing toward 0.
    SubAnalytic,
    /// `m_n^(1/n)` bounded below and not growing.
    ContainsAnalytic,
    /// `m_n^(1/n)` growing.
    BeyondAnalytic,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyticTypeReport {
    #[serde(serialize_with = "ser_hp")]
    pub alpha_est: HpFloat,
    #[serde(serialize_with = "ser_hp")]
    pub big_a_est: HpFloat,
    pub tag: AnalyticTag,
    pub horizon: usize,
    pub horizon_limited: bool,
    /// Minimum of `m_n^(1/n)` on `[N/2, 3N/4]`.
    #[serde(serialize_with = "ser_hp")]
    pub early_min: HpFloat,
    /// Minimum of `m_n^(1/n)` on `(3N/4, N]`, attained at `late_index`.
    #[serde(serialize_with = "ser_hp")]
    pub late_min: HpFloat,
    pub late_index: usize,
}

/// Relative change that counts as a trend.
const TREND: f64 = 0.01;

fn root<R: Real>(x: &R, n: usize) -> HpFloat {
    (x.to_hp().ln() / HpFloat::from(n as i64)).exp()
}

fn min_on(v: &[HpFloat], lo: usize, hi: usize) -> (usize, HpFloat) {
    let mut best = (lo, v[lo - 1].clone());
    for n in lo..=hi {
        if v[n - 1] < best.1 {
            best = (n, v[n - 1].clone());
        }
    }
    best
}

/// Estimates `liminf m_n^(1/n)` and `liminf M_n^(1/n)` on the last half of
/// the table and tags the trend.
pub fn classify_analytic_type<R: Real>(w: &Weight<R>) -> Result<AnalyticTypeReport> {
    let n = w.horizon();
    if n < 4 {
        return Err(Error::HorizonTooSmall { what: "analytic type".into(), have: n, need: 4 });
    }
    let small: Vec<HpFloat> = (1..=n).map(|k| root(&w.m(k), k)).collect();
    let big: Vec<HpFloat> = (1..=n).map(|k| root(&w.big_m(k), k)).collect();
    let half = (n / 2).max(1);
    let three = (3 * n / 4).max(half + 1).min(n - 1);
    let (_, alpha_est) = min_on(&small, half, n);
    let (_, big_a_est) = min_on(&big, half, n);
    let (_, early) = min_on(&small, half, three);
    let (late_index, late) = min_on(&small, three + 1, n);
    let ratio = (late.clone() / early.clone()).to_f64();
    let tag = if ratio < 1.0 - TREND {
        AnalyticTag::SubAnalytic
    } else if ratio > 1.0 + TREND {
        AnalyticTag::BeyondAnalytic
    } else {
        AnalyticTag::ContainsAnalytic
    };
    Ok(AnalyticTypeReport {
        alpha_est,
        big_a_est,
        tag,
        horizon: n,
        horizon_limited: true,
        early_min: early,
        late_min: late,
        late_index,
    })
}
