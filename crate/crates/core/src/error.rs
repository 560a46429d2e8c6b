use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the command line tool to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters supplied by the caller.
    Usage,
    /// Missing, malformed or inconsistent input data.
    Data,
    /// A fit or a linear solve could not be carried out.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("unknown label {label:?} (expected one of {expected:?})")]
    UnknownLabel { label: String, expected: Vec<String> },
    #[error("empty stream")]
    EmptyStream,
    #[error("window [{start}, {start}+{length}) out of range for a stream of {available} words")]
    WindowOutOfRange {
        start: usize,
        length: usize,
        available: usize,
    },
    #[error("category {label:?} has {count} entries, too few to split at fraction {fraction}")]
    CategoryTooSmall {
        label: String,
        count: usize,
        fraction: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient points for a power-law fit: need {needed}, have {found}")]
    InsufficientPoints { needed: usize, found: usize },
    #[error("all values are zero in the fit range")]
    AllZero,
    #[error("{region} fit failed: {source}")]
    DegenerateRegion {
        region: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error(
        "singular pooled covariance (condition number {condition:.3e} exceeds {limit:.1e}); \
         a ridge term (--ridge) regularizes it"
    )]
    SingularCovariance { condition: f64, limit: f64 },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Usage,
            Error::InsufficientPoints { .. }
            | Error::AllZero
            | Error::DegenerateRegion { .. }
            | Error::SingularCovariance { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
