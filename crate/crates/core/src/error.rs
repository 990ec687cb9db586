use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported graph: {0}")]
    UnsupportedGraph(String),

    #[error("matrix is not diagonalizable (eigenvector condition number {condition:.3e})")]
    NonDiagonalizable { condition: f64 },

    #[error("numerical failure: {message}")]
    Numerical { message: String, residual: Option<f64> },

    #[error("problem size {size} exceeds the cap of {cap}")]
    Size { size: usize, cap: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("station {id} rejected: {reason}")]
    StationRejected { id: String, reason: String },

    #[error("stations {first} and {second} share identical coordinates")]
    AmbiguousNeighbor { first: usize, second: usize },

    #[error("node {0} has no incident edges; Gaussian normalization is undefined")]
    DegenerateNormalization(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("correctness gate failed: max deviation {max_error:.3e} exceeds {tolerance:.1e}")]
    GateFailed { max_error: f64, tolerance: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
