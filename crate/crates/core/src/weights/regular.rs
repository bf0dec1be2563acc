use super::{Generator, Weight};
use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::scalar::Real;

/// The largest log-convex minorant of `n -> M_n` and the hull vertices.
#[derive(Clone, Debug)]
pub struct Regularized {
    pub weight: Weight<HpFloat>,
    /// Indices `n` where the minorant touches `M_n`.
    pub vertices: Vec<usize>,
}

/// Lower convex hull of `(n, log M_n)`, `n = 1..=N`, exponentiated back.
pub fn log_convex_minorant<R: Real>(w: &Weight<R>) -> Result<Regularized> {
    let n = w.horizon();
    if n < 3 {
        return Err(Error::HorizonTooSmall { what: "log-convex minorant".into(), have: n, need: 3 });
    }
    let big: Vec<HpFloat> = (1..=n).map(|k| w.big_m(k).to_hp()).collect();
    let logs: Vec<HpFloat> = big.iter().map(HpFloat::ln).collect();
    let mut hull: Vec<usize> = Vec::new();
    for k in 1..=n {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // a stays only if it lies strictly below the chord o..k.
            let lhs = (logs[a - 1].clone() - logs[o - 1].clone()) * HpFloat::from((k - o) as i64);
            let rhs = (logs[k - 1].clone() - logs[o - 1].clone()) * HpFloat::from((a - o) as i64);
            if rhs.le_tol(&lhs) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut reg = big.clone();
    for seg in hull.windows(2) {
        let (i, j) = (seg[0], seg[1]);
        let span = HpFloat::from((j - i) as i64);
        for k in i + 1..j {
            let t = HpFloat::from((k - i) as i64) / span.clone();
            let l = logs[i - 1].clone() + (logs[j - 1].clone() - logs[i - 1].clone()) * t;
            reg[k - 1] = l.exp();
        }
    }
    let weight = Weight::from_big_m(reg, Some(Generator::CustomTable))?;
    Ok(Regularized { weight, vertices: hull })
}
