use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("transform `{transform}` is undefined at row {row} (value {value})")]
    DomainViolation { row: usize, transform: String, value: f64 },

    #[error("regression design is rank deficient: {0}")]
    RankDeficient(String),

    #[error("column {0} has zero sample variance")]
    DegenerateColumn(usize),

    #[error("series is degenerate: {0}")]
    DegenerateSeries(String),

    #[error("lag-0 autocovariance is singular (smallest eigenvalue {min_eigenvalue:e})")]
    SingularGamma0 { min_eigenvalue: f64 },

    #[error("numerical integration did not reach tolerance: {0}")]
    NonConvergence(String),

    #[error("insufficient sample: need more than {needed} observations, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("invalid parameter vector: {0}")]
    InvalidTheta(String),

    #[error("burn-in of {burn} leaves truncation weight {weight:e} above 1e-8")]
    BurnTooSmall { burn: usize, weight: f64 },

    #[error("optimizer failed: {0}")]
    NoConvergence(String),

    #[error("every optimizer start failed")]
    AllStartsFailed,

    #[error("degrees of freedom K^2 H - dim(theta) = {0} must be positive")]
    DfNonPositive(i64),

    #[error("jacobian does not have full column rank")]
    RankDeficientJacobian,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("moment weighting matrix is singular")]
    SingularWeighting,

    #[error("bootstrap dropped {dropped} of {total} replicates (limit 5%)")]
    RefitFailure { dropped: usize, total: usize },

    #[error("regularized orthonormalization rejected every generator")]
    AllRejected,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
