use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum FarrError {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("penalty C = {penalty} must be strictly greater than every achievable utility (max {max_utility})")]
    PenaltyTooSmall { penalty: f64, max_utility: f64 },

    #[error("feasible set is empty")]
    EmptyFeasibleSet,

    #[error("illegal theta {0}")]
    IllegalTheta(String),

    #[error("policy does not match environment: {0}")]
    PolicyMismatch(String),

    #[error("map parse error: {0}")]
    MapParse(String),

    #[error("no transition model available: {0}")]
    ModelUnavailable(String),

    #[error("belief space intractable: {0}")]
    Intractable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing best-response estimate for theta {0}")]
    MissingBrEstimate(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl FarrError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        FarrError::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, FarrError>;
