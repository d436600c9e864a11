use thiserror::Error;

use blowup::BlowupError;
use conv_reg::ConvError;
use pws_core::{FieldError, PolyError};

#[derive(Debug, Error)]
pub enum DynError {
    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("trajectory left the domain box at t = {t}")]
    Escape { t: f64 },
    #[error("no crossing of the target section within t = {max_time}")]
    NoCrossing { max_time: f64 },
    #[error("field is tangent to the section at {point:?} (|n·X|/|X| = {ratio:e})")]
    Tangency { point: Vec<f64>, ratio: f64 },
    #[error("crossing at {point:?} is not of sewing type (normal components {arriving:e}, {departing:e})")]
    SlidingDetected { point: Vec<f64>, arriving: f64, departing: f64 },
    #[error("leg {leg} leaves its orthant")]
    LeftOrthant { leg: usize },
    #[error("degenerate crossing angle (sin θ = {0:e})")]
    DegenerateAngle(f64),
    #[error("Newton did not converge after {iterations} iterations (residual {residual:e}): {reason}")]
    NoConvergence { iterations: usize, residual: f64, reason: String },
    #[error("coordinate change is not invertible")]
    SingularChange,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Conv(#[from] ConvError),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
}
