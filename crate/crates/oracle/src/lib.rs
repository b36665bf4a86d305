//! Reference numerics kept deliberately separate from the `anlab` code paths.
//!
//! Everything here is slow, simple, and written without reference to the
//! closed forms it is used to check: adaptive Gauss–Kronrod quadrature, a
//! cyclic Jacobi eigensolver for real symmetric matrices (complex Hermitian
//! matrices go through the real 2n×2n embedding), and the two-sample
//! Kolmogorov–Smirnov test.

pub mod eig;
pub mod ks;
pub mod quad;

pub use eig::{hermitian_eigenvalues, jacobi_eigenvalues};
pub use ks::{ks_critical_value, ks_two_sample};
pub use quad::{integrate, integrate_to_infinity};
