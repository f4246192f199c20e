//! Exact linear algebra over the rationals and prime fields.

mod matrix;
mod scalar;
mod subspace;

pub use matrix::Matrix;
pub use scalar::{parse_scalar, Field, Scalar};
pub use subspace::{gaussian_binomial, subspace_count, SubspacesContaining};

/// Reduced row echelon form and pivot columns of `m`.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    m.rref()
}

/// Canonical (reduced echelon) basis of the right null space of `m`.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    m.kernel_basis()
}
