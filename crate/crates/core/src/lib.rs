pub mod error;
pub mod numeric;
pub mod primes;
pub mod quadrature;
pub mod function_model;
pub mod sieve;
pub mod limit_law;
pub mod functionals;
pub mod harness;

pub use error::{Error, Result};
