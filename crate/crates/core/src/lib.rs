pub mod artin_schreier;
pub mod carlitz;
pub mod error;
pub mod field;
pub mod hyperdiff;
mod poly;
pub mod place;
pub mod polylog;
pub mod series;
pub mod session;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
pub use field::{artin_schreier_residue, frobenius, lucas_binomial, FFElement, FieldCtx, FqConfig, Level};
pub use series::{LocalSeries, SeriesJson, Valuation};
pub use place::PlaceCtx;
