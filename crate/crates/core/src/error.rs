use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical kernels and the carrier models.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("numerical instability in {context}: worst residual {worst:.3e} exceeds {threshold:.1e}")]
    NumericalInstability {
        context: String,
        worst: f64,
        threshold: f64,
    },

    #[error("eigenvalue iteration did not converge after {iterations} steps (active window {lo}..={hi}, subdiagonal {subdiagonal:.3e})")]
    Convergence {
        iterations: usize,
        lo: usize,
        hi: usize,
        subdiagonal: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("equivalence violation: quotient-Drazin verdict {direct}, witness verdict {witness}")]
    EquivalenceViolation { direct: bool, witness: bool },

    #[error("symbol has a zero {distance:.3e} from the unit circle at {root}; winding number is ambiguous")]
    BoundaryAmbiguous { root: Complex64, distance: f64 },

    #[error("trace-commutator index did not converge: ladder {ladder:?}")]
    NoConvergence { ladder: Vec<(usize, f64)> },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by malformed input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::NotSquare { .. }
                | Error::ShapeMismatch(_)
                | Error::NonFinite { .. }
                | Error::Domain(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
