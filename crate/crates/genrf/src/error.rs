//! Error type shared across the crate.

use thiserror::Error;

/// Coarse classification used by callers that map failures to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad files, bad dimensions, bad parameters.
    Input,
    /// The inputs were valid but a numerical step could not complete.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: genotype value {value:?} at subject {subject:?}, variant {variant:?} is not in {{0, 1, 2}}")]
    InvalidGenotype {
        path: String,
        subject: String,
        variant: String,
        value: String,
    },

    #[error("subject sets differ: missing {missing:?}, unexpected {extra:?}")]
    SubjectMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("duplicate subject id {0:?}")]
    DuplicateSubject(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("design matrix is rank deficient (smallest/largest singular value below {tol:e})")]
    RankDeficient { tol: f64 },

    #[error("degenerate statistic: {0}")]
    DegenerateStatistic(String),

    #[error("dependence coefficient {gamma} makes the field covariance indefinite; require gamma < {bound}")]
    NotPositiveDefinite { gamma: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("scenario file {path}: {message}")]
    Scenario { path: String, message: String },

    #[error("{excluded} of {total} replicates failed (> 1% exclusion budget): {example}")]
    TooManyExclusions {
        excluded: u64,
        total: u64,
        example: String,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DegenerateStatistic(_)
            | Error::Numerical(_)
            | Error::NotPositiveDefinite { .. }
            | Error::TooManyExclusions { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Input,
        }
    }
}
