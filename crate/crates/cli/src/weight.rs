use std::path::Path;

use serde::Serialize;
use ultralin::io::{weight_to_json, WeightJson};
use ultralin::weights::{
    classify_analytic_type, implication_matrix, log_convex_minorant, shift_duality_check, star_product,
    AnalyticTypeReport, AnyWeight, DualityReport, PropertyReport, Weight,
};
use ultralin::Real;

use crate::output::{emit, read_weight, to_json, Failure, Outcome};
use crate::{Opts, RunInfo};

fn parse_real<R: Real>(s: &str) -> Result<R, Failure> {
    R::parse_str(s).ok_or_else(|| Failure::usage(format!("cannot parse {s:?} as a number")))
}

fn cut<R: Real>(w: &Weight<R>, horizon: Option<usize>) -> Result<Weight<R>, Failure> {
    match horizon {
        Some(n) => Ok(w.truncate(n)?),
        None => Ok(w.clone()),
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct ClassifyJson<R: Real> {
    run: RunInfo,
    horizon: usize,
    exact: bool,
    weight: WeightJson,
    properties: Vec<PropertyReport<R>>,
    analytic_type: AnalyticTypeReport,
    shift_duality: Option<DualityReport<R>>,
}

fn classify_any<R: Real>(o: &Opts, info: &RunInfo, w: &Weight<R>) -> Result<Outcome, Failure> {
    let w = cut(w, o.horizon)?;
    let grid = match &o.lambda {
        Some(s) => Some(vec![parse_real::<R>(s)?]),
        None => None,
    };
    let properties = implication_matrix(&w, grid.as_deref())?;
    let lambda = match &o.lambda {
        Some(s) => parse_real::<R>(s)?,
        None => R::one(),
    };
    // None when the horizon is too short for the shift.
    let shift_duality = shift_duality_check(&w, &lambda).ok();
    let holds = properties.iter().all(|r| r.holds_to_horizon);
    let report = ClassifyJson {
        run: info.clone(),
        horizon: w.horizon(),
        exact: R::EXACT,
        weight: weight_to_json(&w),
        analytic_type: classify_analytic_type(&w)?,
        properties,
        shift_duality,
    };
    emit(o.out.as_deref(), &to_json(&report)?)?;
    Ok(Outcome::checked(holds, o.strict, "weight predicates"))
}

pub fn classify(o: &Opts, info: &RunInfo, path: &Path) -> Result<Outcome, Failure> {
    match read_weight(path)? {
        AnyWeight::Exact(w) => classify_any(o, info, &w),
        AnyWeight::Float(w) => classify_any(o, info, &w),
    }
}

#[derive(Serialize)]
struct RegularizeJson {
    run: RunInfo,
    weight: WeightJson,
    /// Indices where the minorant touches the input.
    vertices: Vec<usize>,
}

pub fn regularize(o: &Opts, info: &RunInfo, path: &Path) -> Result<Outcome, Failure> {
    let r = match read_weight(path)? {
        AnyWeight::Exact(w) => log_convex_minorant(&cut(&w, o.horizon)?)?,
        AnyWeight::Float(w) => log_convex_minorant(&cut(&w, o.horizon)?)?,
    };
    let out = RegularizeJson { run: info.clone(), weight: weight_to_json(&r.weight), vertices: r.vertices };
    emit(o.out.as_deref(), &to_json(&out)?)?;
    Ok(Outcome::ok())
}

#[derive(Serialize)]
struct StarJson {
    run: RunInfo,
    weight: WeightJson,
}

pub fn star(o: &Opts, info: &RunInfo, m: &Path, w: &Path) -> Result<Outcome, Failure> {
    let (a, b) = (read_weight(m)?, read_weight(w)?);
    let n = o.horizon.unwrap_or(a.horizon().min(b.horizon()));
    let weight = match (a, b) {
        (AnyWeight::Exact(a), AnyWeight::Exact(b)) => weight_to_json(&star_product(&a.truncate(n)?, &b.truncate(n)?)?),
        (a, b) => weight_to_json(&star_product(&a.to_hp().truncate(n)?, &b.to_hp().truncate(n)?)?),
    };
    emit(o.out.as_deref(), &to_json(&StarJson { run: info.clone(), weight })?)?;
    Ok(Outcome::ok())
}
