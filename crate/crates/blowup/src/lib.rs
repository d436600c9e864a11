//! Monomial blow-ups of (x, ε) space, pullbacks of regularized fields, and
//! the chart atlas that resolves a normal-crossings discontinuity locus.

pub mod chart;
pub mod error;
pub mod plan;
pub mod pullback;
pub mod verify;

pub use chart::ChartMap;
pub use error::BlowupError;
pub use plan::{smoothing_plan, PlanChart, SmoothingPlan};
pub use pullback::{divide_divisor, pullback, push_forward, ChartField, Evaluator, RegularizedEvaluator};
pub use verify::{overlap_factor, truncated_field, vertical_residual, verify_smooth, CheckResult, SmoothnessReport, VerifyConfig};
