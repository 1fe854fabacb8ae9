use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A probability, fraction or rate violated its domain. `field` is a path
    /// such as `sus[2].pf[0]`.
    #[error("{field} = {value} is outside its valid range {range}")]
    OutOfRange {
        field: String,
        value: f64,
        range: &'static str,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "set too large for exhaustive evaluation: {size} observers exceed the guard of {guard}"
    )]
    SetTooLarge { size: usize, guard: usize },

    #[error("infeasible assignment: SU {su} senses {count} channels but its budget is {budget}")]
    Infeasible {
        su: usize,
        count: usize,
        budget: usize,
    },

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("search space of {size} assignments exceeds the brute-force cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    #[error("parse error in {path} at line {line}, column {column} ({field}): {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },

    #[error("unsupported scenario format version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("plot rendering failed: {0}")]
    Plot(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub(crate) fn check_probability(field: impl FnOnce() -> String, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            field: field(),
            value,
            range: "[0, 1]",
        })
    }
}
