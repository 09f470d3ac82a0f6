//! Boundary eigen-data of convex planar bodies and reconstruction of a body
//! from that data.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only numerics:
//!
//! - [`support`]: support functions as truncated Fourier series, Minkowski
//!   arithmetic, the difference-pair space and boundary integrals of
//!   functions of the outward normal.
//! - [`spectral_1d`]: the interval problem `-u'' + c/x^2 u = λu`, endpoint
//!   s-values and the interval identities.
//! - [`spectral_2d`]: Dirichlet eigenpairs of `-Δ + c/|x|^2` on a convex body,
//!   boundary gradient traces, s-functions and the boundary identities.
//! - [`plate`]: the clamped plate `Δ²u = λu`, its s-functions and the
//!   boundary identity with constant 4.
//! - [`inverse`]: basis of basic bodies, the quadratic system for the
//!   support-function coefficients and its solver.
//!
//! File formats and the command line live in the `ispd` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

mod error;
mod fit;
pub mod grid;
pub mod linalg;
pub mod sfunction;

pub mod inverse;
pub mod plate;
pub mod spectral_1d;
pub mod spectral_2d;
pub mod support;

pub use error::{Error, Result};
pub use grid::GridGeometry;

pub use sfunction::{OperatorKind, SFunction};
pub use support::{BodyPair, ConvexBody, Direction, SupportFn};

/// Default number of uniformly spaced normal directions used for boundary
/// quadrature.
pub const DEFAULT_NTHETA: usize = 512;

/// Default absolute tolerance on `h + h''` below which a body is rejected
/// as non-convex.
pub const DEFAULT_EPS_CONV: f64 = 1e-9;
