//! Dirichlet eigenpairs of `-Δu + c/|x|² u = λu` on a convex body, their
//! boundary gradient traces and the boundary identities they satisfy.
//!
//! The operator is the symmetric cut-cell finite-difference Laplacian: each
//! grid arm that crosses the boundary at a fraction `t` of the spacing adds
//! `1/(t h²)` to the diagonal and nothing off the diagonal, so the matrix
//! stays symmetric positive definite while still seeing the exact boundary
//! position. Eigenfunctions are normalized to `∫ u² = 1`.
//!
//! Boundary traces `(∂u/∂n)²` are read along the inward normal at each
//! quadrature direction from a local cubic fit that vanishes on the boundary.

use alloc::vec::Vec;
use libm::{cos, fabs, sin};

use crate::fit::fit_at_boundary;
use crate::grid::{Arm, GridGeometry};
use crate::linalg::{lowest_eigenpairs, EigenOptions, SparseSym};
use crate::sfunction::boundary_relation_residual;
use crate::support::{ConvexBody, SupportFn};
use crate::{Error, Result, SFunction};

/// Fewest unknowns accepted by [`discretize`].
pub const MIN_UNKNOWNS: usize = 200;

/// Default grid spacing relative to the mean radius of the body.
pub const DEFAULT_SPACING_RATIO: f64 = 0.02;

/// [`DEFAULT_SPACING_RATIO`] times the mean radius.
pub fn default_spacing(body: &ConvexBody) -> f64 {
    DEFAULT_SPACING_RATIO * body.support().mean_radius()
}

/// Potential `q(x) = c/|x|²`, which satisfies `t² q(t x) = q(x)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PotentialSpec {
    pub c: f64,
}

impl PotentialSpec {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidInput(
                "potential strength c must be finite and >= 0".into(),
            ));
        }
        Ok(PotentialSpec { c })
    }

    pub fn none() -> Self {
        PotentialSpec { c: 0.0 }
    }

    #[inline]
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        if self.c == 0.0 {
            0.0
        } else {
            self.c / (x[0] * x[0] + x[1] * x[1])
        }
    }
}

/// `-Δ_h + q` on the unknowns of an embedded grid.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub geometry: GridGeometry,
    pub potential: PotentialSpec,
    pub matrix: SparseSym,
}

impl DiscreteOperator {
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.geometry.spacing
    }

    #[inline]
    pub fn body(&self) -> &ConvexBody {
        &self.geometry.body
    }

    #[inline]
    pub fn n_unknowns(&self) -> usize {
        self.geometry.n_unknowns()
    }
}

/// Assembles the cut-cell operator for `body` at the given grid spacing.
pub fn discretize(body: &ConvexBody, q: PotentialSpec, spacing: f64) -> Result<DiscreteOperator> {
    let geometry = GridGeometry::new(body, spacing, 3)?;
    if q.c > 0.0 {
        let d0 = geometry.signed_distance([0.0, 0.0]);
        if d0 < 0.0 {
            return Err(Error::OriginInsideDomain { c: q.c });
        }
        if d0 < 5.0 * spacing {
            return Err(Error::OriginTooClose {
                distance: d0,
                required: 5.0 * spacing,
            });
        }
    }
    let n = geometry.n_unknowns();
    if n < MIN_UNKNOWNS {
        return Err(Error::GridTooCoarse {
            interior: n,
            required: MIN_UNKNOWNS,
        });
    }
    let inv_h2 = 1.0 / (spacing * spacing);
    let mut matrix = SparseSym::new(n);
    for p in 0..n {
        let mut diag = q.eval(geometry.unknown_position(p));
        for arm in geometry.arms[p] {
            match arm {
                Arm::Node(r) => {
                    diag += inv_h2;
                    if r < p {
                        matrix.add(p, r, -inv_h2);
                    }
                }
                Arm::Boundary(t) => diag += inv_h2 / t,
            }
        }
        matrix.add(p, p, diag);
    }
    Ok(DiscreteOperator {
        geometry,
        potential: q,
        matrix,
    })
}

/// `(∂u/∂n)` and `|∇u|²` at the boundary point with outward normal `θ_i`,
/// on the quadrature grid of the body.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace {
    /// Outward normal derivative, signed.
    pub dudn: Vec<f64>,
    /// `|∇u|² = (∂u/∂n)²` since `u = 0` on the boundary.
    pub grad_sq: Vec<f64>,
}

impl BoundaryTrace {
    pub fn from_normal_derivative(dudn: Vec<f64>) -> Self {
        let grad_sq = dudn.iter().map(|v| v * v).collect();
        BoundaryTrace { dudn, grad_sq }
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.grad_sq.len()
    }

    /// Trace of the combination `a·u + b·v` of two eigenfunctions.
    pub fn combine(&self, a: f64, other: &BoundaryTrace, b: f64) -> BoundaryTrace {
        BoundaryTrace::from_normal_derivative(
            self.dudn
                .iter()
                .zip(&other.dudn)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    fn check(&self, body: &ConvexBody) -> Result<()> {
        if self.n_theta() != body.n_theta() {
            return Err(Error::DataDirectionMismatch {
                expected: body.n_theta(),
                got: self.n_theta(),
            });
        }
        Ok(())
    }
}

/// One Dirichlet eigenpair with its boundary trace.
#[derive(Clone, Debug)]
pub struct EigenPair2D {
    pub j: usize,
    pub lambda: f64,
    /// Values at the unknowns, `h² Σ u² = 1`.
    pub u: Vec<f64>,
    pub trace: BoundaryTrace,
}

/// Smallest `j_max` eigenpairs with boundary traces.
pub fn solve_eigen(op: &DiscreteOperator, j_max: usize) -> Result<Vec<EigenPair2D>> {
    solve_eigen_with(op, j_max, &EigenOptions::default())
}

pub fn solve_eigen_with(
    op: &DiscreteOperator,
    j_max: usize,
    opts: &EigenOptions,
) -> Result<Vec<EigenPair2D>> {
    if j_max == 0 {
        return Err(Error::InvalidInput("j_max must be >= 1".into()));
    }
    let res = lowest_eigenpairs(&op.matrix, j_max, opts)?;
    let h = op.spacing();
    res.values
        .iter()
        .zip(res.vectors)
        .enumerate()
        .map(|(k, (&lambda, v))| {
            let u = normalize_sign(v.into_iter().map(|x| x / h).collect());
            let trace = boundary_gradient_trace(&u, op)?;
            Ok(EigenPair2D {
                j: k + 1,
                lambda,
                u,
                trace,
            })
        })
        .collect()
}

/// Fixes the sign so that the entry of largest magnitude is positive.
pub(crate) fn normalize_sign(mut u: Vec<f64>) -> Vec<f64> {
    let big = u
        .iter()
        .copied()
        .fold(0.0f64, |m, x| if fabs(x) > fabs(m) { x } else { m });
    if big < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    u
}

/// Discrete `∫(|∇u|² + q u²) / ∫u²` for a grid function vanishing on the
/// boundary.
pub fn rayleigh_quotient(u: &[f64], op: &DiscreteOperator) -> Result<f64> {
    let den: f64 = u.iter().map(|x| x * x).sum();
    if den == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(op.matrix.quadratic_form(u) / den)
}

/// Normal derivative at every quadrature direction of the body, by the
/// one-sided stencil `(4u(h) - u(2h)) / 2h` along the inward normal.
pub fn boundary_gradient_trace(u: &[f64], op: &DiscreteOperator) -> Result<BoundaryTrace> {
    let geo = &op.geometry;
    let h = geo.spacing;
    let body = &geo.body;
    let support = body.support();
    let dudn = body
        .thetas()
        .into_iter()
        .map(|theta| {
            let fit = fit_at_boundary(geo, u, theta, 3, 3.2, 0.0)?;
            let (hv, dh, _) = support.eval_derivs(theta);
            let xb = crate::support::gauss_point(theta, hv, dh);
            let n = [cos(theta), sin(theta)];
            let u1 = fit.value([xb[0] - h * n[0], xb[1] - h * n[1]]);
            let u2 = fit.value([xb[0] - 2.0 * h * n[0], xb[1] - 2.0 * h * n[1]]);
            Ok(-(4.0 * u1 - u2) / (2.0 * h))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(BoundaryTrace::from_normal_derivative(dudn))
}

/// Same trace read from the gradient of the local fit at the boundary point.
pub fn boundary_gradient_trace_from_fit(u: &[f64], op: &DiscreteOperator) -> Result<BoundaryTrace> {
    let geo = &op.geometry;
    let support = geo.body.support();
    let dudn = geo
        .body
        .thetas()
        .into_iter()
        .map(|theta| {
            let fit = fit_at_boundary(geo, u, theta, 3, 3.2, 0.0)?;
            let (hv, dh, _) = support.eval_derivs(theta);
            let g = fit.gradient(crate::support::gauss_point(theta, hv, dh));
            Ok(g[0] * cos(theta) + g[1] * sin(theta))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(BoundaryTrace::from_normal_derivative(dudn))
}

/// `σ_j = |∇u_j|² / λ_j` on the boundary, indexed by outward normal.
pub fn s_function(e: &EigenPair2D) -> Result<SFunction> {
    if !(e.lambda > 0.0) {
        return Err(Error::NonpositiveData(e.lambda));
    }
    Ok(SFunction::new(
        e.j,
        e.trace.grad_sq.iter().map(|g| g / e.lambda).collect(),
    ))
}

/// `½ ∮ |∇u|² P_D(n) ds` for a unit-normalized eigenfunction.
pub fn eigenvalue_from_boundary(body: &ConvexBody, trace: &BoundaryTrace) -> Result<f64> {
    trace.check(body)?;
    let h = body.support();
    let f: Vec<f64> = body
        .thetas()
        .into_iter()
        .zip(&trace.grad_sq)
        .map(|(t, g)| g * h.eval(t))
        .collect();
    Ok(0.5 * body.boundary_integral_sampled(&f)?)
}

/// Number of angles sampled on the unit circle of a two-dimensional
/// eigenspace.
pub const EIGENSPACE_ANGLES: usize = 64;

/// Maximum of [`eigenvalue_from_boundary`] over unit-norm combinations of the
/// given orthonormal eigenfunctions. Two-dimensional eigenspaces are sampled
/// at [`EIGENSPACE_ANGLES`] angles; larger ones use the basis vectors only.
pub fn eigenvalue_from_boundary_max(body: &ConvexBody, traces: &[&BoundaryTrace]) -> Result<f64> {
    match traces {
        [] => Err(Error::InvalidInput("empty eigenspace".into())),
        [t] => eigenvalue_from_boundary(body, t),
        [a, b] => {
            let mut best = f64::NEG_INFINITY;
            // combinations at φ and φ + π have the same trace
            for k in 0..EIGENSPACE_ANGLES {
                let phi = core::f64::consts::PI * k as f64 / EIGENSPACE_ANGLES as f64;
                let t = a.combine(cos(phi), b, sin(phi));
                best = best.max(eigenvalue_from_boundary(body, &t)?);
            }
            Ok(best)
        }
        many => many
            .iter()
            .map(|t| eigenvalue_from_boundary(body, t))
            .try_fold(f64::NEG_INFINITY, |m, v| v.map(|v| m.max(v))),
    }
}

/// Groups consecutive eigenvalues whose relative gap is below `rel_tol`.
pub fn eigen_clusters(pairs: &[EigenPair2D], rel_tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        match out.last_mut() {
            Some(last)
                if fabs(p.lambda - pairs[*last.last().unwrap()].lambda)
                    <= rel_tol * fabs(p.lambda) =>
            {
                last.push(i)
            }
            _ => out.push(alloc::vec![i]),
        }
    }
    out
}

/// Relative gap below which an eigenvalue is treated as multiple.
pub const MULTIPLICITY_TOL: f64 = 1e-3;

/// True when eigenpair `idx` is separated from its neighbours by more than
/// [`MULTIPLICITY_TOL`], so the shape derivative is well defined.
pub fn is_simple(pairs: &[EigenPair2D], idx: usize) -> bool {
    let lam = pairs[idx].lambda;
    let close = |o: &EigenPair2D| fabs(o.lambda - lam) <= MULTIPLICITY_TOL * fabs(lam);
    !(idx > 0 && close(&pairs[idx - 1])) && !(idx + 1 < pairs.len() && close(&pairs[idx + 1]))
}

/// `∮ σ_j P_D(n) ds - 2`.
pub fn basic_relation_residual(body: &ConvexBody, s: &SFunction) -> Result<f64> {
    boundary_relation_residual(body, s, 2.0)
}

/// First variation `δλ = -∮ |∇u|² δP(n) ds` for a perturbation `δP` of the
/// support function.
pub fn shape_derivative(
    trace: &BoundaryTrace,
    body: &ConvexBody,
    delta: &SupportFn,
) -> Result<f64> {
    trace.check(body)?;
    let f: Vec<f64> = body
        .thetas()
        .into_iter()
        .zip(&trace.grad_sq)
        .map(|(t, g)| g * delta.eval(t))
        .collect();
    Ok(-body.boundary_integral_sampled(&f)?)
}

/// Central difference `[λ(h + εδP) - λ(h - εδP)] / 2ε` of eigenvalue `j`.
pub fn shape_derivative_fd(
    body: &ConvexBody,
    q: PotentialSpec,
    spacing: f64,
    delta: &SupportFn,
    eps: f64,
    j: usize,
) -> Result<f64> {
    let lam = |s: f64| -> Result<f64> {
        let b = ConvexBody::new(body.support().add(&delta.scale(s)), body.n_theta())?;
        let op = discretize(&b, q, spacing)?;
        let res = lowest_eigenpairs(&op.matrix, j, &EigenOptions::default())?;
        Ok(res.values[j - 1])
    };
    Ok((lam(eps)? - lam(-eps)?) / (2.0 * eps))
}

/// Mean of the trace samples, used for the constant-trace checks on disks.
pub fn trace_mean(trace: &BoundaryTrace) -> f64 {
    trace.grad_sq.iter().sum::<f64>() / trace.n_theta() as f64
}

/// Relative spread `(max - min) / mean` of a sampled function.
pub fn relative_spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (max - min) / mean
}

/// `∫ u²` by the grid rule.
pub fn l2_norm_sq(u: &[f64], spacing: f64) -> f64 {
    spacing * spacing * u.iter().map(|x| x * x).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SupportFn;

    const J01_SQ: f64 = 5.783185962946784;

    #[test]
    fn disk_ground_state() {
        let body = ConvexBody::disk(1.0);
        let op = discretize(&body, PotentialSpec::none(), 0.02).unwrap();
        let pairs = solve_eigen(&op, 1).unwrap();
        let e = &pairs[0];
        assert!((e.lambda - J01_SQ).abs() < 1e-3 * J01_SQ);
        assert!((l2_norm_sq(&e.u, 0.02) - 1.0).abs() < 1e-12);
        assert!(e.u.iter().all(|&x| x > 0.0));
        // radial mode: |∇u|² = λ/π on the unit circle
        assert!(relative_spread(&e.trace.grad_sq) < 0.02);
        assert!((trace_mean(&e.trace) - e.lambda / core::f64::consts::PI).abs() < 0.01 * e.lambda);
        let s = s_function(e).unwrap();
        assert!(basic_relation_residual(&body, &s).unwrap().abs() < 0.01);
        let from_boundary = eigenvalue_from_boundary(&body, &e.trace).unwrap();
        assert!((from_boundary / e.lambda - 1.0).abs() < 0.005);
    }

    #[test]
    fn rayleigh_quotient_of_paraboloid() {
        let body = ConvexBody::disk(1.0);
        let op = discretize(&body, PotentialSpec::none(), 0.02).unwrap();
        let u: Vec<f64> = (0..op.n_unknowns())
            .map(|p| {
                let x = op.geometry.unknown_position(p);
                1.0 - x[0] * x[0] - x[1] * x[1]
            })
            .collect();
        assert!((rayleigh_quotient(&u, &op).unwrap() - 6.0).abs() < 0.06);
        assert_eq!(
            rayleigh_quotient(&vec![0.0; u.len()], &op),
            Err(Error::ZeroFunction)
        );
    }

    #[test]
    fn rejects_bad_setups() {
        let disk = ConvexBody::disk(1.0);
        assert_eq!(
            discretize(&disk, PotentialSpec::new(1.0).unwrap(), 0.05).unwrap_err(),
            Error::OriginInsideDomain { c: 1.0 }
        );
        let near = ConvexBody::new(SupportFn::disk_at(1.0, [1.05, 0.0]), 256).unwrap();
        assert!(matches!(
            discretize(&near, PotentialSpec::new(1.0).unwrap(), 0.02),
            Err(Error::OriginTooClose { .. })
        ));
        assert!(matches!(
            discretize(&disk, PotentialSpec::none(), 0.2),
            Err(Error::GridTooCoarse { .. })
        ));
        assert!(PotentialSpec::new(-1.0).is_err());
    }

    #[test]
    fn degenerate_pair_is_clustered() {
        let body = ConvexBody::disk(1.0);
        let op = discretize(&body, PotentialSpec::none(), 0.04).unwrap();
        let pairs = solve_eigen(&op, 4).unwrap();
        assert_eq!(
            eigen_clusters(&pairs, MULTIPLICITY_TOL),
            vec![vec![0], vec![1, 2], vec![3]]
        );
        assert!(is_simple(&pairs, 0));
        assert!(!is_simple(&pairs, 1));
    }

    #[test]
    fn trace_length_mismatch() {
        let body = ConvexBody::disk(1.0);
        let t = BoundaryTrace::from_normal_derivative(vec![1.0; 10]);
        assert_eq!(
            eigenvalue_from_boundary(&body, &t),
            Err(Error::DataDirectionMismatch {
                expected: 512,
                got: 10
            })
        );
    }
}
