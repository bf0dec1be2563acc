use serde::Serialize;
use ultralin::fixtures::{
    arbitrary_omega, diophantine_omega, gevrey_divisor_omega, liouville_default, poincare, random_corpus,
};
use ultralin::io::{series_to_json, weight_to_json, EigenJson};
use ultralin::linearize::{LinearPart, OmegaTable};
use ultralin::scalar::ratio;
use ultralin::weights::{generate_example, AnyWeight, ExampleKind, ExampleOptions};
use ultralin::{GaussianRational, HpFloat};

use crate::output::{to_json, write_atomic, Failure, Outcome};
use crate::{Opts, RunInfo};

const KINDS: [&str; 7] = ["poincare", "diophantine", "gevrey-divisors", "liouville", "arbitrary", "weights", "corpus"];

#[derive(Serialize)]
struct Entry {
    file: String,
    kind: &'static str,
    description: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    run: RunInfo,
    kinds: Vec<&'a str>,
    files: Vec<Entry>,
}

#[derive(Serialize)]
struct TableFile<'a> {
    kind: &'static str,
    description: &'a str,
    table: &'a OmegaTable,
}

struct Writer<'a> {
    dir: &'a std::path::Path,
    files: Vec<Entry>,
}

impl Writer<'_> {
    fn put<T: Serialize>(&mut self, file: String, kind: &'static str, description: String, value: &T) -> Result<(), Failure> {
        write_atomic(&self.dir.join(&file), to_json(value)?.as_bytes())?;
        self.files.push(Entry { file, kind, description });
        Ok(())
    }

    fn eigen(&mut self, file: String, kind: &'static str, description: String, l: &LinearPart<GaussianRational>) -> Result<(), Failure> {
        self.put(file, kind, description, &EigenJson::from_values(l.eigenvalues(), true))
    }

    fn table(&mut self, file: String, kind: &'static str, description: String, table: &OmegaTable) -> Result<(), Failure> {
        let value = TableFile { kind, description: &description, table };
        let text = to_json(&value)?;
        write_atomic(&self.dir.join(&file), text.as_bytes())?;
        self.files.push(Entry { file, kind, description });
        Ok(())
    }
}

pub fn fixtures(o: &Opts, info: &RunInfo, kind: &str, delta: Option<&str>, count: usize) -> Result<Outcome, Failure> {
    let dir = o.out.as_deref().ok_or_else(|| Failure::usage("fixtures needs --out <dir>".into()))?;
    let kinds: Vec<&str> = match kind {
        "all" => KINDS.to_vec(),
        k if KINDS.contains(&k) => vec![k],
        k => return Err(Failure::usage(format!("unknown fixture kind {k:?}"))),
    };
    let q = o.q.unwrap_or(256);
    let mut w = Writer { dir, files: Vec::new() };
    for k in &kinds {
        match *k {
            "poincare" => {
                for s in 1..=3 {
                    w.eigen(format!("poincare-s{s}.json"), "poincare", format!("eigenvalues 1/p_i, s = {s}"), &poincare(s)?)?;
                }
            }
            "diophantine" => {
                let t = diophantine_omega(q, &ratio(2, 1), &ratio(1, 2));
                w.table("diophantine.json".into(), "diophantine", "Omega(q) = q^2 / (1/2)".into(), &t)?;
            }
            "gevrey-divisors" => {
                let s = delta.unwrap_or("0.5");
                let d = HpFloat::parse_decimal(s).ok_or_else(|| Failure::usage(format!("cannot parse delta {s:?}")))?;
                let t = gevrey_divisor_omega(q, &d);
                w.table("gevrey-divisors.json".into(), "gevrey-divisors", format!("log Omega(q) = {s} q log 2 / 2"), &t)?;
            }
            "liouville" => {
                let l = liouville_default()?;
                w.eigen("liouville.json".into(), "liouville", "unit-circle point close to a rational rotation".into(), &l)?;
            }
            "arbitrary" => {
                w.table("arbitrary.json".into(), "arbitrary", "log Omega(q) = q^2".into(), &arbitrary_omega(q))?;
            }
            "weights" => {
                let n = o.horizon.unwrap_or(20);
                for e in ExampleKind::ALL {
                    let json = match generate_example(e, n, &ExampleOptions::default())? {
                        AnyWeight::Exact(m) => weight_to_json(&m),
                        AnyWeight::Float(m) => weight_to_json(&m),
                    };
                    w.put(format!("weight-{}.json", e.name()), "weights", format!("{} at horizon {n}", e.name()), &json)?;
                }
            }
            "corpus" => {
                let order = o.order.unwrap_or(8);
                for e in random_corpus(o.seed, count, order)? {
                    let desc = format!("random problem, s = {}, order {order}", e.linear.dim());
                    w.eigen(format!("{}-eigen.json", e.name), "corpus", desc.clone(), &e.linear)?;
                    w.put(format!("{}-map.json", e.name), "corpus", desc, &series_to_json(&e.g_hat))?;
                }
            }
            _ => unreachable!(),
        }
    }
    let manifest = Manifest { run: info.clone(), kinds, files: w.files };
    write_atomic(&dir.join("manifest.json"), to_json(&manifest)?.as_bytes())?;
    Ok(Outcome::ok())
}
