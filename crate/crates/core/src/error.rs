use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("cannot parse weight spec `{spec}`: {reason}")]
    WeightSpecParse { spec: String, reason: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("frequency {requested} exceeds the representable range (max |xi| = {limit:.3})")]
    GridOverflow { requested: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown function id `{0}`")]
    UnknownFunction(String),
    #[error("no threshold x0 could be certified below t_max = {0}")]
    NoThreshold(f64),
    #[error("insufficient dynamic range for a decay fit: {0}")]
    InsufficientRange(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
