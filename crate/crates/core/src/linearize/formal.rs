//! The formal conjugacy `g o phi = phi o Lambda` for `g = Lambda + g_hat`.

use super::{check_nonresonance, LinearPart};
use crate::error::{Error, Result};
use crate::scalar::{Coeff, Real};
use crate::series::{compose, solve_graded, TruncatedSeries};

/// `phi = id + phi_hat` with `(lambda^k - lambda_i) phi_{k,i} = [g_hat o phi]_{k,i}`,
/// solved degree by degree up to `order` and checked against the conjugacy.
pub fn formal_linearize<C: Coeff>(l: &LinearPart<C>, g_hat: &TruncatedSeries<C>, order: usize) -> Result<TruncatedSeries<C>> {
    let s = l.dim();
    if g_hat.dim_in() != s || g_hat.dim_out() != s {
        return Err(Error::Dimension(format!("map of shape {}->{} for {} eigenvalues", g_hat.dim_in(), g_hat.dim_out(), s)));
    }
    let n = order.min(g_hat.order());
    if n >= 2 {
        check_nonresonance(l, n)?.require_nonresonant()?;
    }
    let phi = solve_graded(g_hat, n, |k, rhs| {
        let pk = l.power(k);
        Ok(rhs
            .into_iter()
            .zip(l.eigenvalues())
            .map(|(r, li)| if r.is_zero() { r } else { r / (pk.clone() - li.clone()) })
            .collect())
    })?;
    let residual = conjugacy_residual(l, g_hat, &phi)?;
    let bad = residual.terms().find(|(_, v)| {
        v.iter().any(|c| {
            if C::Real::EXACT {
                !c.is_zero()
            } else {
                let t = C::Real::tolerance();
                c.norm_sq() > t.clone() * t
            }
        })
    });
    if let Some((k, _)) = bad {
        return Err(Error::Invariant(format!("conjugacy residual nonzero at {k:?}")));
    }
    Ok(phi)
}

/// `(Lambda + g_hat) o phi - phi o Lambda`, truncated at the order of `phi`.
pub fn conjugacy_residual<C: Coeff>(
    l: &LinearPart<C>,
    g_hat: &TruncatedSeries<C>,
    phi: &TruncatedSeries<C>,
) -> Result<TruncatedSeries<C>> {
    let n = phi.order();
    let g = l.diagonal(n).add(&g_hat.truncate(n))?;
    let left = compose(&g, phi, n)?;
    let right = compose(phi, &l.diagonal(n), n)?;
    left.sub(&right)
}
