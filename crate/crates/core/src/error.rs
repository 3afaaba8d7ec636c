use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// A single broken invariant found while checking a scenario or one of its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

impl Violation {
    pub fn new(msg: impl Into<String>) -> Self {
        Violation(msg.into())
    }

    pub fn message(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.0.as_str())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("record {index} references subpopulation {id}, but n = {n}")]
    IdOutOfRange { index: usize, id: usize, n: usize },

    #[error("records of user {user} are not strictly increasing in time")]
    UnsortedUser { user: String },

    #[error("node index {index} out of range for {n} subpopulations")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("top-k requested k = {k} with only {n} nodes")]
    TopKOutOfRange { k: usize, n: usize },

    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("seeding {requested} infected exceeds target population {available}")]
    SeedExceedsPopulation { requested: u64, available: u64 },

    #[error("r0 = {r0} needs lambda = {lambda} at gamma = {gamma}, outside [0, 1]")]
    R0OutOfRange { r0: f64, gamma: f64, lambda: f64 },

    #[error("{0}")]
    Config(String),

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("parse error in {path}, line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by bad content rather than the filesystem.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Csv { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
