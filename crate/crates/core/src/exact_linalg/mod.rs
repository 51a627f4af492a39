//! Exact integer and rational matrix algebra: Hermite normal form, Bareiss
//! determinants, exact inverses, integral LLL and short-vector enumeration.

pub mod det;
pub mod enumerate;
pub mod hnf;
pub mod lll;
pub mod matrix;

pub use det::{det_exact, det_int, invert};
pub use enumerate::{enumerate_coset, enumerate_short, Hit, LinearConstraint, ShortVectors};
pub use hnf::{hnf, kernel, solve_integer};
pub use lll::{lll_reduce, LllResult};
pub use matrix::{GramForm, IntMatrix, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    Singular,
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("LLL parameter {0} outside (1/4, 1)")]
    BadDelta(String),
    #[error("integer overflow in machine-word enumeration")]
    Overflow,
}
