use thiserror::Error;

/// Failures reported by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("structurally singular matrix: {0}")]
    Singular(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    LinearNonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("time step {dt:e} violates the CFL limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("time integration diverged at step {step}: {reason}")]
    Diverged { step: usize, reason: String },

    #[error("study failed: {0}")]
    Study(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("field file error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
