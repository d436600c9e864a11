use pws_core::{FieldError, PolyError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConvError {
    #[error("point lies on the discontinuity locus (axis {axis}) and ε = 0")]
    OnLocus { axis: usize },
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {error:e})")]
    QuadratureFailure { a: f64, b: f64, error: f64 },
    #[error("symbolic convolution requires the box mollifier")]
    UnsupportedMollifier,
    #[error("invalid mollifier: {0}")]
    InvalidMollifier(String),
    #[error("ε must be nonnegative, got {0}")]
    NegativeEpsilon(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("unsupported chart: {0}")]
    UnsupportedChart(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
