pub mod config;
pub mod error;
pub mod lambda;
pub mod param;
pub mod planar;
pub mod scenario;
pub mod portrait;
pub mod smooth;
pub mod spatial;
pub mod table;

pub use error::CrossError;
pub use param::Param;
