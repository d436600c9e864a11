use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("malformed rational '{0}'")]
    BadRational(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("integration bound depends on the integration variable '{0}'")]
    BoundDependsOnVariable(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("point lies on the discontinuity locus (axis {axis})")]
    OnLocus { axis: usize },
    #[error("axis {0} is not an active axis")]
    BadAxis(usize),
    #[error("invalid field: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
