use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),
    #[error("unbounded truncation tail: {0}")]
    UnboundedTail(String),
    #[error("path realizes only {observed} ladder epochs, {requested} requested")]
    InsufficientLadder { requested: usize, observed: usize },
    #[error("degenerate state: {0}")]
    DegenerateState(String),
    #[error("budget exhausted: {message} (acceptance rate estimate {acceptance_rate:.3e})")]
    Budget { message: String, acceptance_rate: f64 },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
