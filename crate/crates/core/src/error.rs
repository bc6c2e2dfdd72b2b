use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("point ({x}, {y}) lies outside the window")]
    OutOfWindow { x: f64, y: f64 },

    #[error("duplicate point ({x}, {y})")]
    DuplicatePoint { x: f64, y: f64 },

    #[error("retention probability {value} at ({x}, {y}) is outside [0, 1]")]
    InvalidRetention { value: f64, x: f64, y: f64 },

    #[error("intensity {value} at ({x}, {y}) exceeds the envelope {max}")]
    EnvelopeViolation { value: f64, max: f64, x: f64, y: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("fold probabilities at ({x}, {y}) sum to {sum}, expected 1")]
    InvalidProbabilities { sum: f64, x: f64, y: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("validation point ({x}, {y}) is not a quadrature node")]
    InconsistentQuadrature { x: f64, y: f64 },

    #[error("objective is non-finite at every grid point")]
    NoFeasiblePoint,

    #[error("degenerate pattern: {0}")]
    DegeneratePattern(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("study aborted: {failed} of {total} replications failed")]
    StudyAborted { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
