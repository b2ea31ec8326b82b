//! Triangular (Cholesky-like) decomposition of third-order Hermitian tensors.
//!
//! A third-order Hermitian tensor `S` is factored as `S = g(L)`, where `L` is a
//! lower triangular sub-Hermitian tensor and `g` is the cubic power
//! `a_ijk = Σ_{r,s,t} l_irs · conj(l_jrt) · l_kst`. The crate also carries the
//! multilinear machinery needed to state and check that factorization: dense
//! cubic tensors, structural predicates, independent-entry counting, slice
//! definiteness tests, lower triangular tensor eigenpairs, and the classical
//! positive tensors (Cauchy, Hilbert, Lehmer, completely positive).
//!
//! Indices are 0-based in the API and 1-based in messages and serialized
//! reports.

pub mod counting;
pub mod decomposition;
pub mod error;
pub mod format;
pub mod generators;
pub mod kernels;
pub mod multilinear;
pub mod spectra;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use tensor::{CubicTensor, HermitianTensor3, SliceMatrix, TensorClass, TriFactor3};

/// Default tolerance used wherever an operation takes a `tol` parameter.
pub const DEFAULT_TOL: f64 = 1e-10;
