//! Exact sparse linear algebra over Q and F_p.

pub mod matrix;
pub mod reduce;
pub mod scalar;

pub use matrix::{SVec, SparseMatrix};
pub use reduce::{quotient_basis, rank, reduce, solve, Echelon, Reduction};
pub use scalar::{Field, Scalar};
