//! Lowest eigenpairs of a sparse symmetric positive definite matrix by block
//! inverse iteration with Rayleigh–Ritz projection.
//!
//! Each sweep applies `A⁻¹` (through a profile Cholesky factor) to a block of
//! `count + guard` vectors, re-orthonormalizes, and diagonalizes the projected
//! matrix. The `j`-th Ritz vector converges like `(λ_j / λ_{p+1})^k`, so a
//! guard block of a few extra vectors keeps clustered and repeated
//! eigenvalues converging at the same rate as simple ones.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::{axpy, dot, norm2, DenseMatrix, SkylineCholesky, SparseSym};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Relative residual `‖A x - λ x‖ / (λ ‖x‖)` required of every returned pair.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra vectors carried beyond the requested count.
    pub guard: usize,
    /// Seed for the starting block.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-8,
            max_iter: 400,
            guard: 6,
            seed: 0x5eed,
        }
    }
}

/// Eigenvalues ascending with orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
    pub max_residual: f64,
}

/// Orthonormalizes in the inner product `⟨x, M y⟩` (Euclidean when `mass`
/// is `None`).
fn orthonormalize(block: &mut [Vec<f64>], mass: Option<&SparseSym>) {
    let apply = |v: &[f64]| -> Vec<f64> {
        match mass {
            Some(m) => m.matvec(v),
            None => v.to_vec(),
        }
    };
    for i in 0..block.len() {
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            let mi = apply(&block[i]);
            for j in 0..i {
                let (head, tail) = block.split_at_mut(i);
                let c = dot(&mi, &head[j]);
                axpy(-c, &head[j], &mut tail[0]);
            }
        }
        let nrm = libm::sqrt(dot(&apply(&block[i]), &block[i]));
        if nrm > 0.0 {
            block[i].iter_mut().for_each(|v| *v /= nrm);
        }
    }
}

/// The `count` smallest eigenpairs of `a`.
pub fn lowest_eigenpairs(a: &SparseSym, count: usize, opts: &EigenOptions) -> Result<Eigenpairs> {
    subspace_iteration(a, None, count, opts)
}

/// The `count` smallest eigenpairs of `a x = λ m x`, with `m` positive
/// definite; eigenvectors are `m`-orthonormal and residuals are measured as
/// `‖a x - λ m x‖ / (λ ‖m x‖)`.
pub fn lowest_generalized_eigenpairs(
    a: &SparseSym,
    m: &SparseSym,
    count: usize,
    opts: &EigenOptions,
) -> Result<Eigenpairs> {
    if m.dim() != a.dim() {
        return Err(Error::InvalidInput(
            "stiffness and mass dimensions differ".into(),
        ));
    }
    subspace_iteration(a, Some(m), count, opts)
}

fn subspace_iteration(
    a: &SparseSym,
    mass: Option<&SparseSym>,
    count: usize,
    opts: &EigenOptions,
) -> Result<Eigenpairs> {
    let n = a.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidInput(
            "eigenpair count must be in 1..=dim".into(),
        ));
    }
    let p = (count + opts.guard).min(n);
    let chol = SkylineCholesky::factor(a)?;
    let apply_mass = |v: &[f64]| -> Vec<f64> {
        match mass {
            Some(m) => m.matvec(v),
            None => v.to_vec(),
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            (0..n)
                .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
                .collect()
        })
        .collect();
    orthonormalize(&mut x, mass);

    let mut worst = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        for v in x.iter_mut() {
            let mut w = apply_mass(v);
            chol.solve_in_place(&mut w);
            *v = w;
        }
        orthonormalize(&mut x, mass);
        let ax: Vec<Vec<f64>> = x.iter().map(|v| a.matvec(v)).collect();
        let h = DenseMatrix::from_fn(p, p, |i, j| dot(&x[i], &ax[j]));
        let (theta, s) = h.symmetric_eigen();

        let rotate = |blk: &[Vec<f64>]| -> Vec<Vec<f64>> {
            (0..p)
                .map(|c| {
                    let mut out = vec![0.0; n];
                    for r in 0..p {
                        axpy(s[(r, c)], &blk[r], &mut out);
                    }
                    out
                })
                .collect()
        };
        x = rotate(&x);
        let ax = rotate(&ax);

        worst = 0.0;
        for i in 0..count {
            let mx = apply_mass(&x[i]);
            let mut r = ax[i].clone();
            axpy(-theta[i], &mx, &mut r);
            worst = worst.max(norm2(&r) / (libm::fabs(theta[i]) * norm2(&mx)));
        }
        if worst <= opts.tol {
            x.truncate(count);
            return Ok(Eigenpairs {
                values: theta[..count].to_vec(),
                vectors: x,
                iterations: iter,
                max_residual: worst,
            });
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: opts.max_iter,
        residual: worst,
    })
}
