use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),

    #[error("grid too small: need at least {min} nodes, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("infeasible bounds: {0}")]
    Infeasible(String),

    #[error("stability region is empty")]
    EmptyRegion,

    #[error("degenerate spectral curve: every sample sits at the origin")]
    DegenerateCurve,

    #[error("time step underflow: dt = {dt:e} at t = {t}")]
    TimeStepUnderflow { dt: f64, t: f64 },

    #[error("no convergence after {steps} steps (residual {residual:e})")]
    NoConvergence { steps: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
