pub mod analytic;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod harness;
pub mod linalg;
pub mod majorana;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
