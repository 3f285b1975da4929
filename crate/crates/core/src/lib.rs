pub mod analysis;
pub mod error;
pub mod montecarlo;
pub mod pathloss;
pub mod specfun;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
pub use pathloss::{PathLossModel, Variant};
