use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field invariant violated: {0}")]
    Invariant(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ray angle {0} lies outside [-pi/4, pi/4]")]
    InvalidRay(f64),
    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("integration failed: {0}")]
    IntegrationFailed(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
