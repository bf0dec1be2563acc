use super::Weight;
use crate::error::{Error, Result};
use crate::scalar::{factorial, Real};

/// The summand `(1/n!) 2^(-nu) mu_nu^n / T_nu` with `T_nu = mu_nu^nu / M_nu`.
pub fn characteristic_term<R: Real>(w: &Weight<R>, n: usize, nu: usize) -> R {
    let mu = w.mu(nu);
    let pow = if n >= nu {
        mu.powu((n - nu) as u64)
    } else {
        R::one() / mu.powu((nu - n) as u64)
    };
    let two_nu = R::from_int(2).powu(nu as u64);
    pow * w.big_m(nu) / two_nu / R::from_biguint(&factorial(n as u64))
}

fn check_weakly_log_convex<R: Real>(w: &Weight<R>) -> Result<()> {
    for k in 1..w.horizon() {
        if !w.mu(k).le_tol(&w.mu(k + 1)) {
            return Err(Error::NotLogConvex(k + 1, k));
        }
    }
    Ok(())
}

/// Coefficients `s_1..s_n` of the characteristic function, with the sum over
/// `nu` truncated at `terms` (at most the horizon). Asserts `s_k >= m_k / 2^k`.
pub fn characteristic_coefficients<R: Real>(w: &Weight<R>, n: usize, terms: usize) -> Result<Vec<R>> {
    if terms > w.horizon() {
        return Err(Error::HorizonTooSmall { what: "characteristic sum".into(), have: w.horizon(), need: terms });
    }
    if n > terms {
        return Err(Error::Precondition(format!("need terms >= n, got {terms} < {n}")));
    }
    check_weakly_log_convex(w)?;
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let s = (1..=terms).fold(R::zero(), |acc, nu| acc + characteristic_term(w, k, nu));
        let lower = w.m(k) / R::from_int(2).powu(k as u64);
        if !lower.le_tol(&s) {
            return Err(Error::Invariant(format!("s_{k} below m_{k}/2^{k}")));
        }
        out.push(s);
    }
    Ok(out)
}
