use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point lies outside the problem domain (coordinate {index} = {value})")]
    OutOfDomain { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite fitness {0}")]
    NonFiniteFitness(f64),
    #[error("empty database")]
    EmptyDatabase,
    #[error("database too small: need {need} samples, have {have}")]
    DatabaseTooSmall { need: usize, have: usize },
    #[error("budget exhausted ({used}/{max} evaluations)")]
    BudgetExhausted { used: usize, max: usize },
    #[error("covariance matrix is not positive definite even with nugget {nugget:e}")]
    IllConditioned { nugget: f64 },
    #[error("singular interpolation system")]
    SingularSystem,
    #[error("arm {0} has not been pulled yet")]
    UnpulledArm(usize),
    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),
    #[error("unknown identifier '{0}'")]
    UnknownId(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("missing results: {0}")]
    MissingResults(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
