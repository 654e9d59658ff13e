//! Prime-factor statistics of ideals in the rationals and quadratic fields,
//! with the Gaussian-lattice sieve and ergodic averaging operators built on
//! top of them.

pub mod acceptance;
pub mod ergodic;
pub mod error;
pub mod field;
pub mod ideals;
pub mod lattice;
pub mod sieve;
pub mod stats;

pub use error::{Error, Result};
