use std::path::Path;

use num_complex::Complex;
use serde::Serialize;
use serde_json::Value;
use ultralin::io::{series_to_json, EigenJson, SeriesJson};
use ultralin::linearize::{
    check_nonresonance, classify_regularity, coefficient_table, conjugacy_residual, counting_lemma_check,
    dominating_weight, formal_linearize, growth_exponent, ledger_from_report, siegel_bound_check, write_csv,
    CountingReport, DominationCertificate, LinearPart, OmegaTable, Policy, RegularityReport, ResonanceReport,
    SiegelReport,
};
use ultralin::series::TruncatedSeries;
use ultralin::weights::{star_product, AnyWeight, Weight};
use ultralin::{Coeff, Error, HpFloat, Rational, Real};

use crate::output::{emit, read_json, read_series, read_weight, to_json, write_atomic, Failure, Outcome, EXIT_RESONANT};
use crate::{Opts, RunInfo};

fn policy(o: &Opts) -> Result<Policy, Failure> {
    let s = o.policy.as_deref().unwrap_or("auto");
    Policy::parse(s).ok_or_else(|| Failure::usage(format!("unknown policy {s:?}")))
}

fn resonance_message<R: Real>(r: &ResonanceReport<R>) -> Option<String> {
    r.witness.as_ref().map(|(k, i)| format!("resonant: lambda^{:?} = lambda_{}", k.exps(), i + 1))
}

#[derive(Serialize)]
#[serde(bound = "")]
struct OmegaJson<'a, R: Real> {
    run: RunInfo,
    eigenvalues: &'a EigenJson,
    report: &'a ResonanceReport<R>,
}

fn omega_any<C: Coeff>(o: &Opts, info: &RunInfo, ej: &EigenJson, values: Vec<C>) -> Result<Outcome, Failure> {
    let l = LinearPart::new(values)?;
    let q = o.q.unwrap_or(10);
    let report = check_nonresonance(&l, q)?;
    emit(o.out.as_deref(), &to_json(&OmegaJson { run: info.clone(), eigenvalues: ej, report: &report })?)?;
    Ok(match resonance_message(&report) {
        Some(m) => Outcome { code: EXIT_RESONANT, message: Some(m) },
        None => Outcome::ok(),
    })
}

pub fn omega(o: &Opts, info: &RunInfo, path: &Path) -> Result<Outcome, Failure> {
    let ej: EigenJson = read_json(path)?;
    if ej.exact {
        omega_any(o, info, &ej, ej.exact_values()?)
    } else {
        omega_any(o, info, &ej, ej.float_values()?)
    }
}

/// Either eigenvalues, a `[{"q", "ln_omega"}]` array or `{"table": [..]}`.
fn read_omega(o: &Opts, path: &Path) -> Result<OmegaTable, Failure> {
    let v: Value = read_json(path)?;
    if v.get("eigenvalues").is_some() {
        let ej: EigenJson = serde_json::from_value(v)?;
        let q = o.q.unwrap_or(16);
        let table = if ej.exact {
            check_nonresonance(&LinearPart::new(ej.exact_values()?)?, q)?.omega_table()?
        } else {
            check_nonresonance(&LinearPart::new(ej.float_values()?)?, q)?.omega_table()?
        };
        return Ok(table);
    }
    let rows = match &v {
        Value::Array(a) => a,
        Value::Object(m) => m.get("table").and_then(Value::as_array).ok_or_else(|| Failure::usage("no table".into()))?,
        _ => return Err(Failure::usage("expected eigenvalues or an omega table".into())),
    };
    let mut values = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let q = r.get("q").and_then(Value::as_u64);
        if q != Some(i as u64 + 2) {
            return Err(Failure::usage(format!("omega table row {i} must have q = {}", i + 2)));
        }
        let x = match r.get("ln_omega") {
            Some(Value::String(s)) => HpFloat::parse_decimal(s),
            Some(Value::Number(n)) => n.as_f64().map(HpFloat::from_f64),
            _ => None,
        }
        .ok_or_else(|| Failure::usage(format!("omega table row {i}: bad ln_omega")))?;
        values.push(x);
    }
    let mut table = OmegaTable::from_ln(values);
    if let Some(q) = o.q {
        table.ln_omega.truncate(q.saturating_sub(1));
    }
    Ok(table)
}

#[derive(Serialize)]
struct DominateJson {
    run: RunInfo,
    max_q: usize,
    certificate: DominationCertificate,
}

pub fn dominate(o: &Opts, info: &RunInfo, path: &Path) -> Result<Outcome, Failure> {
    let table = read_omega(o, path)?;
    let certificate = dominating_weight(&table, &policy(o)?)?;
    emit(o.out.as_deref(), &to_json(&DominateJson { run: info.clone(), max_q: table.max_q(), certificate })?)?;
    Ok(Outcome::ok())
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
struct Check {
    name: &'static str,
    status: Status,
    detail: String,
}

fn check(name: &'static str, ok: bool, detail: impl Into<String>) -> Check {
    Check { name, status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
}

#[derive(Serialize)]
struct CountingSummary {
    checked: usize,
    max_count: usize,
    violations: Vec<CountingReport>,
}

#[derive(Serialize)]
struct OmegaRow {
    q: usize,
    omega: String,
}

#[derive(Serialize)]
struct LinearizeJson<'a> {
    run: RunInfo,
    order: usize,
    q: usize,
    exact: bool,
    eigenvalues: &'a EigenJson,
    summary: &'static str,
    invariants: Vec<Check>,
    resonant: bool,
    witness: Option<(Vec<u32>, usize)>,
    omega: Vec<OmegaRow>,
    siegel: Option<SiegelReport>,
    counting: Option<CountingSummary>,
    certificate: Option<DominationCertificate>,
    regularity: Option<RegularityReport>,
    growth_exponent: Option<HpFloat>,
}

struct Ctx<'a> {
    o: &'a Opts,
    info: &'a RunInfo,
    ej: &'a EigenJson,
    n: usize,
    q: usize,
}

fn write_dir(o: &Opts, name: &str, text: &str) -> Result<(), Failure> {
    match &o.out {
        Some(dir) => write_atomic(&dir.join(name), text.as_bytes()),
        None => Ok(()),
    }
}

fn pipeline<C: Coeff>(
    cx: &Ctx,
    values: Vec<C>,
    g: &TruncatedSeries<C>,
    m: &Weight<C::Real>,
) -> Result<Outcome, Failure> {
    let (o, n, q) = (cx.o, cx.n, cx.q);
    let l = LinearPart::new(values)?;
    let mut inv = Vec::new();
    let res = check_nonresonance(&l, q)?;
    write_dir(o, "omega.json", &to_json(&res)?)?;
    let omega: Vec<OmegaRow> = (2..=q).map(|k| OmegaRow { q: k, omega: res.omega(k).to_decimal_string() }).collect();
    let base = |inv: Vec<Check>, summary| LinearizeJson {
        run: cx.info.clone(),
        order: n,
        q,
        exact: C::Real::EXACT,
        eigenvalues: cx.ej,
        summary,
        invariants: inv,
        resonant: res.resonant,
        witness: res.witness.as_ref().map(|(k, i)| (k.exps().to_vec(), *i)),
        omega: Vec::new(),
        siegel: None,
        counting: None,
        certificate: None,
        regularity: None,
        growth_exponent: None,
    };
    if res.resonant {
        let out = base(vec![check("nonresonance", false, resonance_message(&res).unwrap_or_default())], "fail");
        let text = to_json(&LinearizeJson { omega, ..out })?;
        write_dir(o, "certificate.json", &text)?;
        if o.out.is_none() {
            emit(None, &text)?;
        }
        return Ok(Outcome { code: EXIT_RESONANT, message: resonance_message(&res) });
    }
    inv.push(check("nonresonance", true, format!("no resonance for 2 <= |k| <= {q}")));
    let monotone = (2..q).all(|k| res.omega_sq(k).unwrap() <= res.omega_sq(k + 1).unwrap());
    inv.push(check("omega_monotone", monotone, "Omega(q + 1) >= Omega(q)"));

    let phi = formal_linearize(&l, g, n)?;
    let residual = conjugacy_residual(&l, g, &phi)?;
    let exact_zero = residual.is_zero();
    inv.push(check(
        "conjugacy",
        exact_zero || !C::Real::EXACT,
        if exact_zero { "residual is exactly zero" } else { "residual within tolerance" },
    ));
    write_dir(o, "phi.json", &to_json(&series_to_json(&phi))?)?;

    let ledger = ledger_from_report(&l, &res, n)?;
    inv.push(check("tree_products", true, "tree factors multiply to Delta_k"));
    write_dir(o, "ledger.json", &to_json(&ledger)?)?;

    let mut checked = 0;
    let mut max_count = 0;
    let mut violations = Vec::new();
    for nn in 2..=n {
        for k in ledger.entries.keys().filter(|k| k.degree() >= 2) {
            let r = counting_lemma_check(&ledger, nn, k)?;
            checked += 1;
            max_count = max_count.max(r.count);
            if !r.holds && violations.len() < 10 {
                violations.push(r);
            }
        }
    }
    inv.push(check("counting_lemma", violations.is_empty(), format!("{checked} (n, k) pairs")));
    let counting = CountingSummary { checked, max_count, violations };

    let siegel = match siegel_bound_check(&ledger, &l, m, g, n) {
        Ok(r) => {
            inv.push(check("siegel_bound", r.holds, format!("{} coefficients, max ratio {}", r.checked, r.max_ratio)));
            Some(r)
        }
        Err(Error::Precondition(msg)) => {
            inv.push(Check { name: "siegel_bound", status: Status::Skipped, detail: msg });
            None
        }
        Err(e) => return Err(e.into()),
    };

    let table = res.omega_table()?;
    let (certificate, regularity) = match dominating_weight(&table, &policy(o)?) {
        Ok(cert) => {
            inv.push(check("domination", true, "certificate inequality holds on the table"));
            match classify_regularity(m, &cert) {
                Ok(r) => {
                    inv.push(check("regularity", true, format!("{} escalations", r.escalations.len())));
                    (Some(cert), Some(r))
                }
                Err(e) => {
                    inv.push(check("regularity", false, e.to_string()));
                    (Some(cert), None)
                }
            }
        }
        Err(e @ Error::Unbounded(_)) => {
            inv.push(check("domination", false, e.to_string()));
            (None, None)
        }
        Err(e) => return Err(e.into()),
    };
    let w = match (&regularity, &certificate) {
        (Some(r), _) => Some(r.weight.clone()),
        (None, Some(c)) => Some(c.weight.clone()),
        _ => None,
    };
    let mut growth = None;
    if let Some(w) = &w {
        let k = w.horizon().min(m.horizon());
        let mw = star_product(&m.to_hp().truncate(k)?, &w.truncate(k)?)?;
        growth = growth_exponent(&phi, &mw);
        let rows = coefficient_table(&ledger, &phi, m, w)?;
        if let Some(dir) = &o.out {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            write_atomic(&dir.join("table.csv"), &buf)?;
        }
    }
    let pass = inv.iter().all(|c| !matches!(c.status, Status::Fail));
    let out = LinearizeJson {
        omega,
        siegel,
        counting: Some(counting),
        certificate,
        regularity,
        growth_exponent: growth,
        ..base(inv, if pass { "pass" } else { "fail" })
    };
    let text = to_json(&out)?;
    match &o.out {
        Some(dir) => write_atomic(&dir.join("certificate.json"), text.as_bytes())?,
        None => emit(None, &text)?,
    }
    Ok(Outcome::checked(pass, o.strict, "linearize summary"))
}

pub fn linearize(
    o: &Opts,
    info: &RunInfo,
    eigen: &Path,
    map: &Path,
    weight: Option<&Path>,
) -> Result<Outcome, Failure> {
    let ej: EigenJson = read_json(eigen)?;
    let gj: SeriesJson = read_series(map)?;
    let n = o.order.unwrap_or(gj.order);
    if n < 2 {
        return Err(Failure::usage("order must be at least 2".into()));
    }
    let q = o.q.unwrap_or(2 * n).max(n).max(4);
    let m = match weight {
        Some(p) => read_weight(p)?,
        None => AnyWeight::Exact(Weight::unit(n)?),
    };
    if m.horizon() < n {
        return Err(Failure::usage(format!("weight horizon {} is below the order {n}", m.horizon())));
    }
    let cx = Ctx { o, info, ej: &ej, n, q };
    match m {
        AnyWeight::Exact(m) if ej.exact && gj.is_exact() => {
            let g = gj.to_series::<Complex<Rational>>()?.truncate(n);
            pipeline(&cx, ej.exact_values()?, &g, &m.truncate(n)?)
        }
        m => {
            let g = gj.to_series::<Complex<HpFloat>>()?.truncate(n);
            pipeline(&cx, ej.float_values()?, &g, &m.to_hp().truncate(n)?)
        }
    }
}
