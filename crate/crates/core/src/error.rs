use thiserror::Error;

/// Errors produced anywhere in the reduced-order pipeline.
#[derive(Debug, Error)]
pub enum RomError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value while evaluating {what} at ({x}, {y})")]
    Evaluation { what: &'static str, x: f64, y: f64 },

    #[error("degenerate snapshot ensemble: no eigenvalue above the rank tolerance")]
    DegenerateEnsemble,

    #[error("nonlinear solve did not converge at step {step} (relative residual {residual:.3e})")]
    StepDivergence { step: usize, residual: f64 },

    #[error("trajectory blew up at step {step} (coefficient norm {norm:.3e})")]
    BlowUp { step: usize, norm: f64 },

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RomError>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(RomError::DimensionMismatch { expected, actual })
    }
}
