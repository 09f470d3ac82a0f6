//! Boundary eigen-data indexed by outward-normal direction.

use alloc::vec::Vec;

use crate::support::{uniform_angles, ConvexBody};
use crate::{Error, Result};

/// Which eigenproblem produced an s-function. Fixes the constant on the right
/// of the boundary relation `∮ σ P ds = rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `-Δu + qu = λu`, `u = 0` on the boundary; `σ = |∇u|²/λ`.
    Membrane,
    /// `Δ²u = λu`, `u = ∂u/∂n = 0` on the boundary; `σ = |Δu|²/λ`.
    Plate,
}

impl OperatorKind {
    #[inline]
    pub fn rhs(self) -> f64 {
        match self {
            OperatorKind::Membrane => 2.0,
            OperatorKind::Plate => 4.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Membrane => "membrane",
            OperatorKind::Plate => "plate",
        }
    }
}

/// Samples `σ_j(θ)` of the s-function with index `j` at the boundary point
/// whose outward normal is `θ`, on a uniform grid `θ_i = 2π i / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SFunction {
    pub j: usize,
    pub sigma: Vec<f64>,
}

impl SFunction {
    pub fn new(j: usize, sigma: Vec<f64>) -> Self {
        SFunction { j, sigma }
    }

    pub fn constant(j: usize, value: f64, n: usize) -> Self {
        SFunction {
            j,
            sigma: alloc::vec![value; n],
        }
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.sigma.len()
    }

    pub fn thetas(&self) -> Vec<f64> {
        uniform_angles(self.sigma.len())
    }

    pub fn scaled(&self, t: f64) -> SFunction {
        SFunction {
            j: self.j,
            sigma: self.sigma.iter().map(|v| v * t).collect(),
        }
    }

    pub(crate) fn check_grid(&self, body: &ConvexBody) -> Result<()> {
        if self.sigma.len() != body.n_theta() {
            return Err(Error::DataDirectionMismatch {
                expected: body.n_theta(),
                got: self.sigma.len(),
            });
        }
        Ok(())
    }
}

/// `∮_{S_D} σ(n) P_D(n) ds - rhs`: residual of the boundary relation linking
/// s-functions and the support function.
pub fn boundary_relation_residual(body: &ConvexBody, s: &SFunction, rhs: f64) -> Result<f64> {
    s.check_grid(body)?;
    let h = body.support();
    let f: Vec<f64> = body
        .thetas()
        .into_iter()
        .zip(&s.sigma)
        .map(|(t, sig)| sig * h.eval(t))
        .collect();
    Ok(body.boundary_integral_sampled(&f)? - rhs)
}
