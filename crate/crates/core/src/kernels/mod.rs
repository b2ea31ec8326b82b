//! Scalar and small-matrix numerical kernels.
//!
//! Root finders for real polynomials and for the conjugate-coupled pivot
//! equations met during the decomposition, a damped 2-D Newton iteration,
//! semi-definite Cholesky, Hermitian Jacobi eigenvalues, and numerical rank.

mod matrix;
mod newton;
mod pivot;
mod roots;

pub use matrix::{cholesky_psd, column_rank, hermitian_eigenvalues};
pub use newton::{newton_2d, Newton2d, NEWTON_MAX_ITER};
pub use pivot::{
    solve_pivot_cubic, solve_pivot_linear, solve_pivot_quadratic, PivotCubic, PivotQuadratic, DEDUP_RADIUS,
    RANDOM_STARTS,
};
pub use roots::{poly_roots, solve_real_cubic, solve_real_quadratic, RootSet};
