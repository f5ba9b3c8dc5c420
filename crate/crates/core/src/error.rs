use thiserror::Error;

/// Errors produced by the simulator, compiler, trainer and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("function is not in the span of the basis (check residual {0:.3e})")]
    OutsideBasis(f64),

    #[error(
        "fit did not converge after {iterations} iterations (best residual {best_residual:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
        /// Best parameters seen, so callers can still inspect the approximation.
        best: Option<Box<crate::compiler::CompiledCircuit>>,
    },

    #[error("loss became non-finite at epoch {0}")]
    NonFiniteLoss(usize),

    #[error("{path}, line {line}: {message}")]
    Schema {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(expected: impl ToString, got: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
