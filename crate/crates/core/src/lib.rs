//! Finite models of `SL₂(ℤ/q₁ℤ) × SL₂(ℤ/q₂ℤ) × SL₂(ℤ/q₃ℤ)`: Cayley graphs and
//! their spectra, exact random-walk measures, product-set growth and the
//! approximate-homomorphism dichotomy.

pub mod cayley;
pub mod error;
pub mod modarith;
pub mod oracle;
pub mod genset;
pub mod glue;
pub mod growth;
pub mod sl2;
pub mod spectral;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
