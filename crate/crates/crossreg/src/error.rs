use thiserror::Error;

#[derive(Debug, Error)]
pub enum CrossError {
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("nothing to render: {0}")]
    EmptyPortrait(String),
    #[error("{what} lies outside the domain box")]
    OutsideDomain { what: String },
    #[error("format {format} is not available for {report}")]
    UnsupportedFormat { format: String, report: String },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Poly(#[from] pws_core::PolyError),
    #[error(transparent)]
    Field(#[from] pws_core::FieldError),
    #[error(transparent)]
    Conv(#[from] conv_reg::ConvError),
    #[error(transparent)]
    Blowup(#[from] blowup::BlowupError),
    #[error(transparent)]
    Dyn(#[from] dynamics::DynError),
}
