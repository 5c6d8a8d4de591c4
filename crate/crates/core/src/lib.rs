pub mod bilinear;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod lab;
pub mod ledger;
pub mod sigma_class;
pub mod spectral;

pub use error::{Error, Result};
