use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("horizon {have} too small: {what} needs at least {need}")]
    HorizonTooSmall { what: String, have: usize, need: usize },
    #[error("horizon mismatch: {0} vs {1}")]
    HorizonMismatch(usize, usize),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("weight is not weakly log-convex: mu_{0} < mu_{1}")]
    NotLogConvex(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("inner series has a constant term")]
    ConstantTerm,
    #[error("linear part is not the identity")]
    LinearPartNotIdentity,
    #[error("series has a term of degree {0} outside the admissible range")]
    BadDegree(usize),
    #[error("index space of {0} multi-indices exceeds the memory guard")]
    TooManyTerms(u128),
    #[error("zero eigenvalue at position {0}")]
    ZeroEigenvalue(usize),
    #[error("resonance: lambda^{k:?} = lambda_{i}")]
    Resonant { k: Vec<u32>, i: usize },
    #[error("implication chain broken: {0}")]
    ChainBroken(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("constant policy rejected: partial sums keep growing ({0})")]
    Unbounded(String),
    #[error("escalation budget exhausted after {0} steps")]
    EscalationExhausted(usize),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
