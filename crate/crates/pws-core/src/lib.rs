//! Exact representation of piecewise-polynomial vector fields on ℝⁿ whose
//! discontinuity locus is a union of coordinate hyperplanes.

pub mod error;
pub mod field;
pub mod poly;

pub use error::{FieldError, PolyError};
pub use field::{
    default_vars, BranchField, BranchFn, CallableField, FieldJson, NormalCrossingsLocus, PiecewiseField, SignVector,
};
pub use poly::{
    format_rational, int, parse_rational, rat, rational_from_f64, rational_to_f64, var_list, MultiPoly, PolyF64,
    Rational, VarList,
};
