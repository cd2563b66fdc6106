use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("index {index} out of range for {len} points")]
    Index { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("stratification failed: {0}")]
    Stratification(String),

    #[error("class coverage: {0}")]
    ClassCoverage(String),

    #[error("landmark set is single-class; cannot form pairs ({0})")]
    DiversityDegenerate(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("construction infeasible: {0}")]
    Construction(String),

    #[error("every candidate failed: {}", .0.join("; "))]
    Aggregate(Vec<String>),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
