//! Composition, degree-graded fixed points and inversion.

use std::collections::BTreeMap;


use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::multiindex::{IndexSpace, MultiIndex};
use crate::scalar::Coeff;

/// Nonzero positions of a dense vector, grouped by degree.
fn support_by_degree<C: Coeff>(space: &IndexSpace, a: &[C]) -> Vec<Vec<usize>> {
    (0..=space.order)
        .map(|d| space.degree_range(d).filter(|&p| !a[p].is_zero()).collect())
        .collect()
}

/// `out[a + b] += x[a] * y[b]` over all pairs with `deg a` in `da` and `deg a + deg b = d`.
fn accumulate<C: Coeff>(
    space: &IndexSpace,
    out: &mut [C],
    x: &[C],
    xs: &[Vec<usize>],
    y: &[C],
    ys: &[Vec<usize>],
    da: std::ops::RangeInclusive<usize>,
    d: usize,
) {
    for a in da {
        if a > d {
            break;
        }
        let b = d - a;
        for &pa in &xs[a] {
            for &pb in &ys[b] {
                let p = space.position_of_code(space.code(pa) + space.code(pb));
                out[p] = out[p].clone() + x[pa].clone() * y[pb].clone();
            }
        }
    }
}

/// Truncated product of two dense scalar series.
fn mul_dense<C: Coeff>(space: &IndexSpace, x: &[C], y: &[C]) -> Vec<C> {
    let xs = support_by_degree(space, x);
    let ys = support_by_degree(space, y);
    let mut out = vec![C::zero(); space.len()];
    for d in 0..=space.order {
        accumulate(space, &mut out, x, &xs, y, &ys, 0..=d, d);
    }
    out
}

/// Multi-indices needed to build `h^l` for every `l` in `support` by
/// peeling off the first nonzero exponent, in ascending degree.
fn power_chain(support: impl Iterator<Item = MultiIndex>) -> Vec<MultiIndex> {
    let mut need: BTreeMap<MultiIndex, ()> = BTreeMap::new();
    let mut stack: Vec<MultiIndex> = support.filter(|l| l.degree() >= 2).collect();
    while let Some(l) = stack.pop() {
        if need.contains_key(&l) {
            continue;
        }
        let j = l.first_nonzero().expect("nonzero");
        let parent = l.checked_sub(&MultiIndex::unit(l.dim(), j)).expect("positive exponent");
        if parent.degree() >= 2 {
            stack.push(parent);
        }
        need.insert(l, ());
    }
    need.into_keys().collect()
}

fn peel(l: &MultiIndex) -> (MultiIndex, usize) {
    let j = l.first_nonzero().expect("nonzero");
    (l.checked_sub(&MultiIndex::unit(l.dim(), j)).expect("positive"), j)
}

/// `g o h` truncated at `min(order, g.order, h.order)`.
///
/// The coefficient of `x^k` is `sum_l g_l [h^l]_k`, where `h^l` is the
/// product of the components of `h` taken with multiplicities `l`.
pub fn compose<C: Coeff>(g: &TruncatedSeries<C>, h: &TruncatedSeries<C>, order: usize) -> Result<TruncatedSeries<C>> {
    if h.dim_out() != g.dim_in() {
        return Err(Error::Dimension(format!("inner dim_out {} != outer dim_in {}", h.dim_out(), g.dim_in())));
    }
    if h.constant_term().iter().any(|c| !c.is_zero()) {
        return Err(Error::ConstantTerm);
    }
    let n = order.min(g.order()).min(h.order());
    let space = IndexSpace::new(h.dim_in(), n)?;
    let hd = h.truncate(n).to_dense(&space);
    let chain = power_chain(g.terms().map(|(l, _)| l.clone()).filter(|l| l.degree() <= n));
    let mut powers: BTreeMap<MultiIndex, Vec<C>> = BTreeMap::new();
    for l in &chain {
        let (parent, j) = peel(l);
        let base = if parent.degree() == 1 {
            &hd[parent.first_nonzero().expect("unit")]
        } else {
            &powers[&parent]
        };
        let p = mul_dense(&space, base, &hd[j]);
        powers.insert(l.clone(), p);
    }
    let mut out = vec![vec![C::zero(); space.len()]; g.dim_out()];
    for (l, gl) in g.terms() {
        if l.degree() > n {
            continue;
        }
        if l.degree() == 0 {
            for (i, c) in gl.iter().enumerate() {
                out[i][0] = out[i][0].clone() + c.clone();
            }
            continue;
        }
        let pl = if l.degree() == 1 { &hd[l.first_nonzero().expect("unit")] } else { &powers[l] };
        for (i, c) in gl.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (p, v) in pl.iter().enumerate() {
                if !v.is_zero() {
                    out[i][p] = out[i][p].clone() + c.clone() * v.clone();
                }
            }
        }
    }
    Ok(TruncatedSeries::from_dense(&space, &out, g.has_constant()))
}

/// Solves `phi = id + sum_{|k|>=2} phi_k x^k` degree by degree, where
/// `phi_k = solve(k, [g_hat o phi]_k)`.
///
/// The right-hand side at degree `d` only involves coefficients of `phi` of
/// degree below `d`, so power products are extended one degree at a time.
pub fn solve_graded<C: Coeff>(
    g_hat: &TruncatedSeries<C>,
    order: usize,
    mut solve: impl FnMut(&MultiIndex, Vec<C>) -> Result<Vec<C>>,
) -> Result<TruncatedSeries<C>> {
    let s = g_hat.dim_in();
    if g_hat.dim_out() != s {
        return Err(Error::Dimension("map must be square".into()));
    }
    if let Some((lo, _)) = g_hat.degree_span() {
        if lo < 2 {
            return Err(Error::BadDegree(lo));
        }
    }
    if g_hat.get(&MultiIndex::zero(s)).is_some() {
        return Err(Error::BadDegree(0));
    }
    let n = order.min(g_hat.order());
    let space = IndexSpace::new(s, n)?;
    let mut phi: Vec<Vec<C>> = vec![vec![C::zero(); space.len()]; s];
    for (j, comp) in phi.iter_mut().enumerate() {
        comp[space.position(&MultiIndex::unit(s, j)).expect("unit")] = C::one();
    }
    let terms: Vec<(MultiIndex, Vec<C>)> =
        g_hat.terms().filter(|(l, _)| l.degree() <= n).map(|(l, v)| (l.clone(), v.clone())).collect();
    let chain = power_chain(terms.iter().map(|(l, _)| l.clone()));
    let mut powers: BTreeMap<MultiIndex, Vec<C>> =
        chain.iter().map(|l| (l.clone(), vec![C::zero(); space.len()])).collect();
    let mut supports: BTreeMap<MultiIndex, Vec<Vec<usize>>> =
        chain.iter().map(|l| (l.clone(), vec![Vec::new(); n + 1])).collect();
    let mut phi_support: Vec<Vec<Vec<usize>>> = (0..s)
        .map(|j| {
            let mut by = vec![Vec::new(); n + 1];
            if n >= 1 {
                by[1].push(space.position(&MultiIndex::unit(s, j)).expect("unit"));
            }
            by
        })
        .collect();

    for d in 2..=n {
        // Extend h^l to degree d; parents are complete below d.
        for l in &chain {
            if l.degree() > d {
                continue;
            }
            let (parent, j) = peel(l);
            let mut acc = std::mem::take(powers.get_mut(l).expect("allocated"));
            if parent.degree() == 1 {
                let pj = parent.first_nonzero().expect("unit");
                accumulate(&space, &mut acc, &phi[pj], &phi_support[pj], &phi[j], &phi_support[j], 1..=d - 1, d);
            } else {
                let (pv, ps) = (&powers[&parent], &supports[&parent]);
                accumulate(&space, &mut acc, pv, ps, &phi[j], &phi_support[j], parent.degree()..=d - 1, d);
            }
            let nz: Vec<usize> = space.degree_range(d).filter(|&p| !acc[p].is_zero()).collect();
            supports.get_mut(l).expect("allocated")[d] = nz;
            powers.insert(l.clone(), acc);
        }
        for p in space.degree_range(d) {
            let mut rhs = vec![C::zero(); s];
            for (l, gl) in &terms {
                if l.degree() > d {
                    continue;
                }
                let v = &powers[l][p];
                if v.is_zero() {
                    continue;
                }
                for i in 0..s {
                    if !gl[i].is_zero() {
                        rhs[i] = rhs[i].clone() + gl[i].clone() * v.clone();
                    }
                }
            }
            let sol = solve(space.index(p), rhs)?;
            for (i, c) in sol.into_iter().enumerate() {
                if !c.is_zero() {
                    phi_support[i][d].push(p);
                }
                phi[i][p] = c;
            }
        }
    }
    Ok(TruncatedSeries::from_dense(&space, &phi, false))
}

/// Inverse of `g = id + g_hat` up to `order`, verified by composition.
pub fn inverse_series<C: Coeff>(g: &TruncatedSeries<C>, order: usize) -> Result<TruncatedSeries<C>> {
    let s = g.dim_in();
    if g.dim_out() != s {
        return Err(Error::Dimension("inverse needs a square map".into()));
    }
    if g.constant_term().iter().any(|c| !c.is_zero()) {
        return Err(Error::ConstantTerm);
    }
    let n = order.min(g.order());
    if g.part(1, 1) != TruncatedSeries::identity(s, g.order()).part(1, 1) {
        return Err(Error::LinearPartNotIdentity);
    }
    let g_hat = g.part(2, n).truncate(n);
    let rho = solve_graded(&g_hat, n, |_, rhs| Ok(rhs.into_iter().map(|c| -c).collect()))?;
    let check = compose(g, &rho, n)?;
    if check.part(1, n) != TruncatedSeries::identity(s, n) {
        return Err(Error::Invariant("inverse does not compose to the identity".into()));
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational as Q;

    fn uni(order: usize, c: &[i64]) -> TruncatedSeries<Q> {
        TruncatedSeries::from_terms(
            1,
            1,
            order,
            c.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, &v)| (vec![i as u32 + 1], vec![ratio(v, 1)])),
        )
        .unwrap()
    }

    #[test]
    fn square_of_shifted() {
        let g = uni(4, &[0, 1]);
        let h = uni(4, &[1, 1]);
        assert_eq!(compose(&g, &h, 4).unwrap(), uni(4, &[0, 1, 2, 1]));
    }

    #[test]
    fn self_composition() {
        let g = uni(6, &[1, 1]);
        assert_eq!(compose(&g, &g, 6).unwrap(), uni(6, &[1, 2, 2, 1]));
    }

    #[test]
    fn catalan_inverse() {
        let g = uni(6, &[1, 1]);
        let rho = inverse_series(&g, 6).unwrap();
        assert_eq!(rho, uni(6, &[1, -1, 2, -5, 14, -42]));
    }

    #[test]
    fn identity_inverse() {
        let id = TruncatedSeries::<Q>::identity(2, 5);
        assert_eq!(inverse_series(&id, 5).unwrap(), id);
    }

    #[test]
    fn rejects_constant_inner() {
        let g = uni(3, &[1]);
        let h = TruncatedSeries::from_terms(1, 1, 3, [(vec![0], vec![ratio(1, 1)])]).unwrap();
        assert!(matches!(compose(&g, &h, 3), Err(Error::ConstantTerm)));
        assert!(matches!(inverse_series(&uni(3, &[2, 1]), 3), Err(Error::LinearPartNotIdentity)));
    }
}
