//! Moduli of graded modules over graded algebras via Maurer-Cartan loci.
//!
//! Exact arithmetic throughout: the rationals or a prime field.

pub mod derived;
pub mod dgla;
pub mod error;
pub mod fixtures;
pub mod galgebra;
pub mod hilbert;
pub mod linalg;
pub mod stability;

pub use error::{Error, Result};
