//! Linear algebra used by the eigensolvers and the reconstruction.
//!
//! Everything here is small and self-contained: dense helpers for systems of
//! a few dozen unknowns, a profile (skyline) Cholesky factorization for the
//! grid operators, block inverse iteration for their lowest eigenpairs and a
//! bisection solver for symmetric tridiagonal matrices.

pub mod dense;
pub mod skyline;
pub mod subspace;
pub mod tridiag;

pub use dense::DenseMatrix;
pub use skyline::{SkylineCholesky, SparseSym};
pub use subspace::{lowest_eigenpairs, lowest_generalized_eigenpairs, EigenOptions, Eigenpairs};

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub(crate) fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}
