pub mod cli;
pub mod error;
pub mod jet;
pub mod kappa;
pub mod mollifier;
pub mod optimizer;
pub mod poly;
pub mod quadrature;
pub mod terms;
pub mod verify;

pub use error::{Error, Result};
