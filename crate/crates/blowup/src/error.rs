use conv_reg::ConvError;
use thiserror::Error;

use crate::verify::SmoothnessReport;

#[derive(Debug, Error)]
pub enum BlowupError {
    #[error("axis {0} is not available")]
    BadAxis(usize),
    #[error("axis {0} appears twice")]
    DuplicateAxis(usize),
    #[error("the discontinuity locus is empty")]
    EmptyLocus,
    #[error("point lies on the exceptional divisor")]
    OnDivisor,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("chart {} failed smoothness checks", .0.chart_id)]
    NotSmooth(Box<SmoothnessReport>),
    #[error(transparent)]
    Conv(#[from] ConvError),
}
