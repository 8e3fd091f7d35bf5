use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("invalid generator config: {0}")]
    Config(String),

    #[error("OCU requires at least two supply chains, instance has {0}")]
    ChainCount(usize),

    #[error("baseline vector has {got} entries but the instance has {expected} scenarios")]
    BaselineMissing { expected: usize, got: usize },

    #[error("scenario {scenario} is infeasible, no baseline L*_s exists")]
    InfeasibleScenario { scenario: usize },

    #[error("design is infeasible: {0}")]
    InfeasibleDesign(String),

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("simplex made no progress within {iterations} iterations")]
    NumericalBreakdown { iterations: usize },

    #[error("model has {binaries} binary variables, enumeration cap is {cap}")]
    CapExceeded { binaries: usize, cap: usize },

    #[error("invalid model input: {0}")]
    InvalidModel(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
