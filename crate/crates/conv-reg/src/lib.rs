//! Regularization of piecewise-smooth fields by convolution with a
//! tensor-product mollifier: exact box-limit formulas on the core region,
//! numeric evaluation for any mollifier, and the ST comparison.

pub mod error;
pub mod mollifier;
pub mod numeric;
pub mod quad;
pub mod symbolic;

pub use error::ConvError;
pub use mollifier::{weight_functions, Mollifier, MollifierSpec, MAX_MOMENT};
pub use numeric::{convolve_callable, convolve_numeric, st_regularize, AxisGeom, Cut, RegularizedField};
pub use quad::{adaptive, adaptive_vec, AdaptiveConfig, GaussLegendre};
pub use symbolic::{box_moment, branch_weights, convolve_symbolic, CoreRegionJson, CoreRegionPoly};
