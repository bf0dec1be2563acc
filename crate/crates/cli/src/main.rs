//! `ultralin`: batch front end for weight classification, majorant checks and
//! small-divisor linearization.
//!
//! Exit codes: 0 ok, 1 I/O or schema error, 2 predicate failure under
//! `--strict` (or a rejected constant policy), 3 resonance.

mod fixtures;
mod linearize;
mod output;
mod series;
mod weight;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use output::{Failure, Outcome};

#[derive(Parser, Debug)]
#[command(name = "ultralin", version, about = "Weight sequences, majorant series and small-divisor linearization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct Opts {
    /// Truncation order N.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Weight horizon.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Degree bound of the nonresonance table.
    #[arg(long = "Q", global = true)]
    pub q: Option<usize>,
    /// minimal | constant | gevrey:<delta> | gevrey-fit | auto.
    #[arg(long, global = true)]
    pub policy: Option<String>,
    /// Constant for the lambda-parameterized predicates and the composition estimate.
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    /// Working precision of inexact arithmetic, in bits (at least 128).
    #[arg(long, global = true, default_value_t = 128)]
    pub precision: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Exit with code 2 when a checked predicate fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Output file, or directory for `linearize` and `fixtures`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All weight predicates, the analytic type and the shift duality.
    ClassifyWeight { weight: PathBuf },
    /// Largest log-convex minorant of a weight.
    Regularize { weight: PathBuf },
    /// Pointwise product of two weights.
    Star { m: PathBuf, w: PathBuf },
    /// Full pipeline: divisors, formal linearization, ledger, bounds, domination, class.
    Linearize { eigenvalues: PathBuf, map: PathBuf, weight: Option<PathBuf> },
    /// Nonresonance check and divisor table.
    Omega { eigenvalues: PathBuf },
    /// Dominating weight for eigenvalues or a tabulated `log Omega`.
    Dominate { input: PathBuf },
    /// Writes fixture files and a manifest to `--out`.
    Fixtures {
        /// poincare | diophantine | gevrey-divisors | liouville | arbitrary | weights | corpus | all.
        #[arg(long, default_value = "all")]
        kind: String,
        /// Exponent of the gevrey-divisors table.
        #[arg(long)]
        delta: Option<String>,
        /// Number of random corpus entries.
        #[arg(long, default_value_t = 25)]
        count: usize,
    },
    /// Composition `g o h` and the weighted majorant inequality.
    ComposeCheck {
        g: PathBuf,
        h: PathBuf,
        /// Weight for `h` and the result (default unit).
        #[arg(long)]
        m: Option<PathBuf>,
        /// Weight for `g` (default unit).
        #[arg(long)]
        w: Option<PathBuf>,
    },
    /// Flow coefficients and the majorant comparison for a field `v(t, x)`.
    FlowCheck {
        v: PathBuf,
        #[arg(long)]
        m_time: Option<PathBuf>,
        #[arg(long)]
        m_space: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ClassifyWeight { .. } => "classify-weight",
            Command::Regularize { .. } => "regularize",
            Command::Star { .. } => "star",
            Command::Linearize { .. } => "linearize",
            Command::Omega { .. } => "omega",
            Command::Dominate { .. } => "dominate",
            Command::Fixtures { .. } => "fixtures",
            Command::ComposeCheck { .. } => "compose-check",
            Command::FlowCheck { .. } => "flow-check",
        }
    }
}

/// Recorded in every JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct RunInfo {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub precision: usize,
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let o = &cli.opts;
    if o.precision < 128 {
        return Err(Failure::usage(format!("precision must be at least 128 bits, got {}", o.precision)));
    }
    ultralin::hp::set_precision(o.precision);
    let info = RunInfo { command: cli.command.name(), version: env!("CARGO_PKG_VERSION"), seed: o.seed, precision: o.precision };
    match &cli.command {
        Command::ClassifyWeight { weight } => weight::classify(o, &info, weight),
        Command::Regularize { weight } => weight::regularize(o, &info, weight),
        Command::Star { m, w } => weight::star(o, &info, m, w),
        Command::Linearize { eigenvalues, map, weight } => linearize::linearize(o, &info, eigenvalues, map, weight.as_deref()),
        Command::Omega { eigenvalues } => linearize::omega(o, &info, eigenvalues),
        Command::Dominate { input } => linearize::dominate(o, &info, input),
        Command::Fixtures { kind, delta, count } => fixtures::fixtures(o, &info, kind, delta.as_deref(), *count),
        Command::ComposeCheck { g, h, m, w } => series::compose_check(o, &info, g, h, m.as_deref(), w.as_deref()),
        Command::FlowCheck { v, m_time, m_space } => series::flow_check(o, &info, v, m_time.as_deref(), m_space.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Some(msg) = &outcome.message {
                eprintln!("{msg}");
            }
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
