use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node {node} is isolated (degree 0)")]
    IsolatedNode { node: usize },

    #[error("matrix is not symmetric (max |m - m^T| = {deviation:e})")]
    Asymmetric { deviation: f64 },

    #[error("matrix is singular or ill-conditioned (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("Neumann series diverges: beta * spectral radius = {product}")]
    Divergent { product: f64 },

    #[error("matrix has no positive entry")]
    NoPositiveEntry,

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerical kernels, as opposed to bad input data
    /// or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Asymmetric { .. }
                | Error::Singular { .. }
                | Error::Divergent { .. }
                | Error::NoPositiveEntry
                | Error::NonFinite(_)
        )
    }
}
