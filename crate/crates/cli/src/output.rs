//! Exit codes, input parsing and atomic output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use ultralin::io::{SeriesJson, WeightJson};
use ultralin::weights::AnyWeight;
use ultralin::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_PREDICATE: u8 = 2;
pub const EXIT_RESONANT: u8 = 3;

/// A command that ran to completion; `code` may still report a finding.
#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub message: Option<String>,
}

impl Outcome {
    pub fn ok() -> Self {
        Outcome { code: EXIT_OK, message: None }
    }

    /// `EXIT_PREDICATE` under `--strict` when `holds` is false.
    pub fn checked(holds: bool, strict: bool, what: &str) -> Self {
        if holds {
            Outcome::ok()
        } else if strict {
            Outcome { code: EXIT_PREDICATE, message: Some(format!("{what}: fail")) }
        } else {
            Outcome { code: EXIT_OK, message: Some(format!("{what}: fail")) }
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: EXIT_IO, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resonant { .. } => EXIT_RESONANT,
            Error::Unbounded(_) => EXIT_PREDICATE,
            _ => EXIT_IO,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: EXIT_IO, message: format!("schema: {e}") }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: schema: {e}", path.display())))
}

pub fn read_weight(path: &Path) -> Result<AnyWeight, Failure> {
    let j: WeightJson = read_json(path)?;
    j.to_weight().map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn read_series(path: &Path) -> Result<SeriesJson, Failure> {
    read_json(path)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Failure::usage(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Writes to `--out` when given, else to standard output.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
