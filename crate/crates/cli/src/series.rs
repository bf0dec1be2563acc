use std::path::Path;

use num_complex::Complex;
use serde::Serialize;
use ultralin::io::{series_to_json, SeriesJson};
use ultralin::series::{compose, flow_coefficients, flow_majorant_check, main_lemma_check, ComparisonReport};
use ultralin::weights::{AnyWeight, Weight};
use ultralin::{Error, HpFloat, Modulus, Rational, Real};

use crate::output::{emit, read_series, read_weight, to_json, Failure, Outcome};
use crate::{Opts, RunInfo};

fn weight_or_unit(path: Option<&Path>, n: usize) -> Result<AnyWeight, Failure> {
    match path {
        Some(p) => read_weight(p),
        None => Ok(AnyWeight::Exact(Weight::unit(n)?)),
    }
}

fn exact(w: &AnyWeight) -> Option<&Weight<Rational>> {
    match w {
        AnyWeight::Exact(w) => Some(w),
        AnyWeight::Float(_) => None,
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
#[serde(untagged)]
enum LemmaJson<R: Real> {
    Checked(ComparisonReport<R>),
    Precondition { precondition_failed: String },
}

#[derive(Serialize)]
#[serde(bound = "")]
struct ComposeJson<R: Real> {
    run: RunInfo,
    order: usize,
    lambda: String,
    composition: SeriesJson,
    main_lemma: LemmaJson<R>,
}

fn compose_any<C: Modulus>(
    o: &Opts,
    info: &RunInfo,
    g: &SeriesJson,
    h: &SeriesJson,
    w: &Weight<C::Real>,
    m: &Weight<C::Real>,
    n: usize,
) -> Result<Outcome, Failure> {
    let g = g.to_series::<C>()?;
    let h = h.to_series::<C>()?;
    let lambda = match &o.lambda {
        Some(s) => C::Real::parse_str(s).ok_or_else(|| Failure::usage(format!("cannot parse lambda {s:?}")))?,
        None => C::Real::from_int(1),
    };
    let composition = series_to_json(&compose(&g, &h, n)?);
    let (main_lemma, holds) = match main_lemma_check(&g, &h, w, m, &lambda, n) {
        Ok(r) => {
            let holds = r.holds;
            (LemmaJson::Checked(r), holds)
        }
        Err(Error::Precondition(msg)) => (LemmaJson::Precondition { precondition_failed: msg }, false),
        Err(e) => return Err(e.into()),
    };
    let out = ComposeJson { run: info.clone(), order: n, lambda: lambda.to_decimal(), composition, main_lemma };
    emit(o.out.as_deref(), &to_json(&out)?)?;
    Ok(Outcome::checked(holds, o.strict, "composition estimate"))
}

pub fn compose_check(
    o: &Opts,
    info: &RunInfo,
    g: &Path,
    h: &Path,
    m: Option<&Path>,
    w: Option<&Path>,
) -> Result<Outcome, Failure> {
    let (g, h) = (read_series(g)?, read_series(h)?);
    let n = o.order.unwrap_or(g.order.min(h.order));
    let (m, w) = (weight_or_unit(m, n)?, weight_or_unit(w, n)?);
    let lambda_exact = o.lambda.as_deref().is_none_or(|s| Rational::parse_str(s).is_some());
    match (exact(&m), exact(&w)) {
        (Some(m), Some(w)) if g.is_exact() && h.is_exact() && g.is_real() && h.is_real() && lambda_exact => {
            compose_any::<Rational>(o, info, &g, &h, w, m, n)
        }
        _ => compose_any::<Complex<HpFloat>>(o, info, &g, &h, &w.to_hp(), &m.to_hp(), n),
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct FlowJson<R: Real> {
    run: RunInfo,
    order: usize,
    flow: SeriesJson,
    comparison: ComparisonReport<R>,
}

fn flow_any<C: Modulus>(
    o: &Opts,
    info: &RunInfo,
    v: &SeriesJson,
    mt: &Weight<C::Real>,
    ms: &Weight<C::Real>,
    n: usize,
) -> Result<Outcome, Failure> {
    let v = v.to_series::<C>()?;
    let flow = series_to_json(&flow_coefficients(&v, n)?);
    let rep = flow_majorant_check(&v, mt, ms, n)?;
    let holds = rep.comparison.holds;
    let out = FlowJson { run: info.clone(), order: rep.order, flow, comparison: rep.comparison };
    emit(o.out.as_deref(), &to_json(&out)?)?;
    Ok(Outcome::checked(holds, o.strict, "flow majorant"))
}

pub fn flow_check(
    o: &Opts,
    info: &RunInfo,
    v: &Path,
    m_time: Option<&Path>,
    m_space: Option<&Path>,
) -> Result<Outcome, Failure> {
    let v = read_series(v)?;
    let n = o.order.unwrap_or(10);
    let (mt, ms) = (weight_or_unit(m_time, n)?, weight_or_unit(m_space, n)?);
    match (exact(&mt), exact(&ms)) {
        (Some(a), Some(b)) if v.is_exact() && v.is_real() => flow_any::<Rational>(o, info, &v, a, b, n),
        _ => flow_any::<Complex<HpFloat>>(o, info, &v, &mt.to_hp(), &ms.to_hp(), n),
    }
}
