use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state blew up at t = {time}: component {component} = {value}")]
    BlowUp {
        time: f64,
        component: usize,
        value: f64,
    },

    #[error("no periodic orbit detected: {0}")]
    NoPeriod(String),

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (last iterate {iterate:?})")]
    NewtonNoConvergence { iterations: usize, iterate: Vec<f64> },

    #[error("singular Jacobian at iterate {iterate:?}")]
    SingularJacobian { iterate: Vec<f64> },

    #[error("gamma = {gamma} lies outside the sampled range [{min}, {max}]")]
    GammaOutOfRange { gamma: f64, min: f64, max: f64 },

    #[error("node {node} does not oscillate (degenerate phase)")]
    DegenerateNode { node: usize },

    #[error("analysis window too short: {periods:.2} periods detected, need at least {required}")]
    WindowTooShort { periods: f64, required: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
