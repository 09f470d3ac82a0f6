//! Reconstruction of a convex body from its s-functions.
//!
//! The support function is expanded as `h = Σ α_k φ_k` in the trigonometric
//! basis `φ₀ = 1, φ_{2k-1} = cos kθ, φ_{2k} = sin kθ`. Every `φ_k` is the
//! difference `P_{G_k} - P_{H_k}` of two convex support functions, and
//! substituting the expansion into `∮ σ_j P ds = rhs` gives one quadratic
//! equation per data index,
//!
//! `Σ_{k,m} A_{k,m}(j) α_k α_m = rhs`,
//! `A_{k,m}(j) = ∮_{S_{G_k}} σ_j φ_m ds - ∮_{S_{H_k}} σ_j φ_m ds`.
//!
//! s-functions are functions of the outward normal, so both boundary
//! integrals reduce to `∫ σ_j φ_m (h + h'') dθ`.
//!
//! The system is solved in the least-squares sense by a damped Newton
//! iteration with a penalty on negative curvature radius, from several seeded
//! starts.

use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, fabs, sin, sqrt};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::DenseMatrix;
use crate::support::{convexity_check, periodic_trapezoid, uniform_angles};
use crate::{ConvexBody, Error, OperatorKind, Result, SFunction, SupportFn, DEFAULT_EPS_CONV};

/// One trigonometric basis function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Constant,
    Cos(usize),
    Sin(usize),
}

impl Mode {
    /// Frequency `k`.
    #[inline]
    pub fn order(self) -> usize {
        match self {
            Mode::Constant => 0,
            Mode::Cos(k) | Mode::Sin(k) => k,
        }
    }

    #[inline]
    pub fn eval(self, theta: f64) -> f64 {
        match self {
            Mode::Constant => 1.0,
            Mode::Cos(k) => cos(k as f64 * theta),
            Mode::Sin(k) => sin(k as f64 * theta),
        }
    }

    /// `φ + φ''`.
    #[inline]
    pub fn curvature(self, theta: f64) -> f64 {
        let k = self.order() as f64;
        (1.0 - k * k) * self.eval(theta)
    }

    /// True for `cos θ` and `sin θ`, which only translate a body.
    #[inline]
    pub fn is_translation(self) -> bool {
        self.order() == 1
    }

    fn support(self, coeff: f64) -> SupportFn {
        match self {
            Mode::Constant => SupportFn::disk(coeff),
            Mode::Cos(k) => SupportFn::from_modes(0.0, &[(k, coeff, 0.0)]).expect("k >= 1"),
            Mode::Sin(k) => SupportFn::from_modes(0.0, &[(k, 0.0, coeff)]).expect("k >= 1"),
        }
    }
}

/// `φ_k = P_{G_k} - P_{H_k}` with both bodies convex.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub mode: Mode,
    pub g: SupportFn,
    pub h: SupportFn,
}

/// Curvature margin of the bodies used for the modes of order `k ≥ 2`.
pub const BASIS_MARGIN: f64 = 1.0;

/// Trigonometric basis up to a given order with its basic bodies.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSpec {
    pub order: usize,
    pub elements: Vec<BasisElement>,
}

impl BasisSpec {
    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        self.elements.iter().map(|e| e.mode)
    }

    /// Indices of `cos θ` and `sin θ`.
    pub fn translation_indices(&self) -> Vec<usize> {
        self.modes()
            .enumerate()
            .filter(|(_, m)| m.is_translation())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Basis `φ₀ = 1, cos θ, sin θ, …, cos Kθ, sin Kθ` for `K = order`.
///
/// `1` is the unit disk minus a point, `cos θ` and `sin θ` are the points
/// `e₁`, `e₂` minus the origin, and `cos kθ`, `sin kθ` for `k ≥ 2` are the
/// body with support `φ + M` minus the disk of radius `M = k² - 1 + margin`.
pub fn build_basis(order: usize) -> BasisSpec {
    let mut elements = vec![BasisElement {
        mode: Mode::Constant,
        g: SupportFn::disk(1.0),
        h: SupportFn::point([0.0, 0.0]),
    }];
    for k in 1..=order {
        for mode in [Mode::Cos(k), Mode::Sin(k)] {
            let (g, h) = if k == 1 {
                let e = if mode == Mode::Cos(1) {
                    [1.0, 0.0]
                } else {
                    [0.0, 1.0]
                };
                (SupportFn::point(e), SupportFn::point([0.0, 0.0]))
            } else {
                let m = (k * k) as f64 - 1.0 + BASIS_MARGIN;
                (
                    mode.support(1.0).add(&SupportFn::disk(m)),
                    SupportFn::disk(m),
                )
            };
            elements.push(BasisElement { mode, g, h });
        }
    }
    BasisSpec { order, elements }
}

/// Degree-1 positively homogeneous extension `|x| f(x/|x|)`, zero at the
/// origin.
pub fn positive_homogeneous_extension<F: Fn(f64) -> f64>(f: F) -> impl Fn([f64; 2]) -> f64 {
    move |x| {
        let r = libm::hypot(x[0], x[1]);
        if r == 0.0 {
            0.0
        } else {
            r * f(libm::atan2(x[1], x[0]))
        }
    }
}

/// `A_{k,m}(j)` for each data function and the right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSystem {
    /// One `K × K` matrix per data function.
    pub a: Vec<DenseMatrix>,
    pub rhs: f64,
}

impl QuadraticSystem {
    #[inline]
    pub fn n_equations(&self) -> usize {
        self.a.len()
    }

    #[inline]
    pub fn n_unknowns(&self) -> usize {
        self.a.first().map_or(0, |m| m.rows())
    }

    /// Same system with each `A(j)` replaced by `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> QuadraticSystem {
        QuadraticSystem {
            a: self.a.iter().map(|m| m.symmetrized()).collect(),
            rhs: self.rhs,
        }
    }
}

fn check_data(data: &[SFunction]) -> Result<usize> {
    let n = data
        .first()
        .ok_or_else(|| Error::InvalidInput("no s-functions given".into()))?
        .n_theta();
    for s in data {
        if s.n_theta() != n {
            return Err(Error::DataDirectionMismatch {
                expected: n,
                got: s.n_theta(),
            });
        }
    }
    if n < 8 {
        return Err(Error::InvalidInput(
            "s-functions need at least 8 directions".into(),
        ));
    }
    Ok(n)
}

/// Assembles `A_{k,m}(j)` from boundary integrals over the basic bodies.
pub fn assemble_coefficients(
    basis: &BasisSpec,
    data: &[SFunction],
    kind: OperatorKind,
) -> Result<QuadraticSystem> {
    let n = check_data(data)?;
    let thetas = uniform_angles(n);
    let bodies: Vec<(ConvexBody, ConvexBody)> = basis
        .elements
        .iter()
        .map(|e| {
            Ok((
                ConvexBody::new(e.g.clone(), n)?,
                ConvexBody::new(e.h.clone(), n)?,
            ))
        })
        .collect::<Result<_>>()?;
    let kk = basis.len();
    let a = data
        .iter()
        .map(|s| {
            let mut m = DenseMatrix::zeros(kk, kk);
            for (col, mode) in basis.modes().enumerate() {
                let f: Vec<f64> = thetas
                    .iter()
                    .zip(&s.sigma)
                    .map(|(&t, sig)| sig * mode.eval(t))
                    .collect();
                for (row, (g, h)) in bodies.iter().enumerate() {
                    m[(row, col)] =
                        g.boundary_integral_sampled(&f)? - h.boundary_integral_sampled(&f)?;
                }
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    Ok(QuadraticSystem { a, rhs: kind.rhs() })
}

/// The same coefficients as `∫ σ_j φ_m (φ_k + φ_k'') dθ`, without the basic
/// bodies.
pub fn assemble_coefficients_direct(
    basis: &BasisSpec,
    data: &[SFunction],
    kind: OperatorKind,
) -> Result<QuadraticSystem> {
    let n = check_data(data)?;
    let thetas = uniform_angles(n);
    let modes: Vec<Mode> = basis.modes().collect();
    let a = data
        .iter()
        .map(|s| {
            DenseMatrix::from_fn(modes.len(), modes.len(), |k, m| {
                let f: Vec<f64> = thetas
                    .iter()
                    .zip(&s.sigma)
                    .map(|(&t, sig)| sig * modes[m].eval(t) * modes[k].curvature(t))
                    .collect();
                periodic_trapezoid(&f)
            })
        })
        .collect();
    Ok(QuadraticSystem { a, rhs: kind.rhs() })
}

/// `r_j = αᵀ A(j) α - rhs`.
pub fn residual(alpha: &[f64], sys: &QuadraticSystem) -> Result<Vec<f64>> {
    if alpha.len() != sys.n_unknowns() {
        return Err(Error::InvalidInput(
            "coefficient count does not match the basis".into(),
        ));
    }
    Ok(sys
        .a
        .iter()
        .map(|m| {
            let ma = m.matvec(alpha);
            ma.iter().zip(alpha).map(|(x, y)| x * y).sum::<f64>() - sys.rhs
        })
        .collect())
}

/// `Σ α_k φ_k`.
pub fn support_from_alpha(alpha: &[f64], basis: &BasisSpec) -> SupportFn {
    basis.modes().zip(alpha).fold(
        SupportFn::new(0.0, vec![(0.0, 0.0); basis.order]),
        |acc, (m, &a)| acc.add(&m.support(a)),
    )
}

/// The residual evaluated through the two convex bodies
/// `D₁ = Σ_{α>0} α_k G_k + Σ_{α<0} |α_k| H_k` and
/// `D₂ = Σ_{α>0} α_k H_k + Σ_{α<0} |α_k| G_k`, for which `P_D = P_{D₁} - P_{D₂}`:
/// `r_j = ∮_{S_{D₁}} σ_j P_D ds - ∮_{S_{D₂}} σ_j P_D ds - rhs`.
pub fn split_residual(
    alpha: &[f64],
    basis: &BasisSpec,
    data: &[SFunction],
    kind: OperatorKind,
) -> Result<Vec<f64>> {
    let n = check_data(data)?;
    if alpha.len() != basis.len() {
        return Err(Error::InvalidInput(
            "coefficient count does not match the basis".into(),
        ));
    }
    let zero = SupportFn::new(0.0, vec![(0.0, 0.0); basis.order]);
    let (mut h1, mut h2) = (zero.clone(), zero);
    for (e, &a) in basis.elements.iter().zip(alpha) {
        if a >= 0.0 {
            h1 = h1.add(&e.g.scale(a));
            h2 = h2.add(&e.h.scale(a));
        } else {
            h1 = h1.add(&e.h.scale(-a));
            h2 = h2.add(&e.g.scale(-a));
        }
    }
    let d1 = ConvexBody::new(h1, n)?;
    let d2 = ConvexBody::new(h2, n)?;
    let p = d1.support().sub(d2.support());
    let thetas = uniform_angles(n);
    data.iter()
        .map(|s| {
            let f: Vec<f64> = thetas
                .iter()
                .zip(&s.sigma)
                .map(|(&t, sig)| sig * p.eval(t))
                .collect();
            Ok(d1.boundary_integral_sampled(&f)? - d2.boundary_integral_sampled(&f)? - kind.rhs())
        })
        .collect()
}

/// Coefficients of a support function in the basis, with the size of the
/// modes above the basis order that were dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub alpha: Vec<f64>,
    /// Largest dropped Fourier coefficient; zero when nothing was lost.
    pub truncation_loss: f64,
}

impl Decomposition {
    #[inline]
    pub fn truncated(&self) -> bool {
        self.truncation_loss > 0.0
    }
}

pub fn decompose_support(h: &SupportFn, basis: &BasisSpec) -> Decomposition {
    let alpha = basis
        .modes()
        .map(|m| match m {
            Mode::Constant => h.a0(),
            Mode::Cos(k) => h.mode(k).0,
            Mode::Sin(k) => h.mode(k).1,
        })
        .collect();
    let truncation_loss = (basis.order + 1..=h.order())
        .map(|k| h.mode(k))
        .fold(0.0f64, |m, (a, b)| m.max(fabs(a)).max(fabs(b)));
    Decomposition {
        alpha,
        truncation_loss,
    }
}

/// Options for [`solve_quadratic_system`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Weight `μ` of the negative-curvature penalty.
    pub penalty: f64,
    /// Directions at which the penalty and the convexity margin are sampled.
    pub penalty_samples: usize,
    /// Coefficients held at their initial value.
    pub fixed: Vec<usize>,
    pub eps_conv: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 300,
            penalty: 10.0,
            penalty_samples: 128,
            fixed: Vec::new(),
            eps_conv: DEFAULT_EPS_CONV,
        }
    }
}

/// A stationary point of the penalized least-squares problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub alpha: Vec<f64>,
    pub support: SupportFn,
    /// `r_j` for every data function.
    pub residuals: Vec<f64>,
    /// `min (h + h'')` over the sample directions.
    pub convexity_margin: f64,
    /// Singular values of `∂r/∂α` over the free coefficients, descending.
    pub singular_values: Vec<f64>,
    pub iterations: usize,
    /// Set when the margin is below `-ε_conv`.
    pub non_convex: bool,
}

impl ReconstructionResult {
    /// `max_j |r_j|`.
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(fabs(*r)))
    }
}

/// `α₀ = √(rhs / A₀₀(1))` with every other coefficient zero: the disk that
/// satisfies the first equation.
pub fn default_init(sys: &QuadraticSystem) -> Result<Vec<f64>> {
    let a00 = sys
        .a
        .first()
        .map(|m| m[(0, 0)])
        .ok_or_else(|| Error::InvalidInput("empty system".into()))?;
    if !(a00 > 0.0) {
        return Err(Error::NonpositiveData(a00));
    }
    let mut alpha = vec![0.0; sys.n_unknowns()];
    alpha[0] = sqrt(sys.rhs / a00);
    Ok(alpha)
}

struct Problem {
    sym: QuadraticSystem,
    free: Vec<usize>,
    /// `(φ_k + φ_k'')(θ_i)`, row per sample.
    curv: DenseMatrix,
    pen_w: f64,
}

impl Problem {
    /// Residual vector (data rows then penalty rows) and its Jacobian in the
    /// free coefficients.
    fn eval(&self, alpha: &[f64]) -> (Vec<f64>, DenseMatrix) {
        let nj = self.sym.n_equations();
        let ns = self.curv.rows();
        let nf = self.free.len();
        let mut r = Vec::with_capacity(nj + ns);
        let mut jac = DenseMatrix::zeros(nj + ns, nf);
        for (j, m) in self.sym.a.iter().enumerate() {
            let ma = m.matvec(alpha);
            r.push(ma.iter().zip(alpha).map(|(x, y)| x * y).sum::<f64>() - self.sym.rhs);
            for (c, &k) in self.free.iter().enumerate() {
                jac[(j, c)] = 2.0 * ma[k];
            }
        }
        for i in 0..ns {
            let rho: f64 = self.curv.row(i).iter().zip(alpha).map(|(x, y)| x * y).sum();
            if rho < 0.0 {
                r.push(-self.pen_w * rho);
                for (c, &k) in self.free.iter().enumerate() {
                    jac[(nj + i, c)] = -self.pen_w * self.curv[(i, k)];
                }
            } else {
                r.push(0.0);
            }
        }
        (r, jac)
    }
}

fn half_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|x| x * x).sum::<f64>()
}

/// Minimizes `Σ_j r_j² + μ Σ_i max(0, -(h + h'')(θ_i))²` from `init` by a
/// damped Newton iteration. The residuals are quadratic, so the Gauss–Newton
/// matrix plus `Σ_j r_j ∇²r_j` is the exact Hessian; the second term matters
/// along directions where `∂r/∂α` nearly vanishes.
pub fn solve_quadratic_system(
    sys: &QuadraticSystem,
    basis: &BasisSpec,
    init: &[f64],
    opts: &SolveOptions,
) -> Result<ReconstructionResult> {
    if sys.n_equations() == 0 {
        return Err(Error::InvalidInput("no equations".into()));
    }
    if init.len() != basis.len() || sys.n_unknowns() != basis.len() {
        return Err(Error::InvalidInput(
            "coefficient count does not match the basis".into(),
        ));
    }
    let modes: Vec<Mode> = basis.modes().collect();
    let thetas = uniform_angles(opts.penalty_samples.max(8));
    let curv = DenseMatrix::from_fn(thetas.len(), modes.len(), |i, k| {
        modes[k].curvature(thetas[i])
    });
    let free: Vec<usize> = (0..modes.len())
        .filter(|k| !opts.fixed.contains(k))
        .collect();
    let problem = Problem {
        sym: sys.symmetrized(),
        free,
        curv,
        pen_w: sqrt(opts.penalty / thetas.len() as f64),
    };
    let nf = problem.free.len();

    let mut alpha = init.to_vec();
    let (mut r, mut jac) = problem.eval(&alpha);
    let mut cost = half_sq(&r);
    let mut mu = 1e-3;
    let mut iterations = 0;
    while iterations < opts.max_iter && nf > 0 {
        iterations += 1;
        let jt = jac.transpose();
        // exact Hessian of ½|r|²: each r_j is quadratic with Hessian 2A(j)
        let mut hess = jt.matmul(&jac);
        for (m, rj) in problem.sym.a.iter().zip(&r) {
            for (a, &p) in problem.free.iter().enumerate() {
                for (b, &q) in problem.free.iter().enumerate() {
                    hess[(a, b)] += 2.0 * rj * m[(p, q)];
                }
            }
        }
        let g = jt.matvec(&r);
        let gmax = g.iter().fold(0.0f64, |m, x| m.max(fabs(*x)));
        if gmax <= 1e-15 * (1.0 + cost) || cost < 1e-30 {
            break;
        }
        let scale = (0..nf)
            .map(|i| fabs(hess[(i, i)]))
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut accepted = false;
        let mut small = false;
        while mu < 1e16 {
            let lhs = DenseMatrix::from_fn(nf, nf, |i, k| {
                hess[(i, k)] + if i == k { mu * scale } else { 0.0 }
            });
            let step = match lhs.solve(&g) {
                Ok(s) => s,
                Err(_) => {
                    mu *= 10.0;
                    continue;
                }
            };
            let mut trial = alpha.clone();
            for (c, &k) in problem.free.iter().enumerate() {
                trial[k] -= step[c];
            }
            let (rt, jt_new) = problem.eval(&trial);
            let ct = half_sq(&rt);
            if ct < cost {
                small = step
                    .iter()
                    .zip(&problem.free)
                    .all(|(s, &k)| fabs(*s) <= 1e-14 * (1.0 + fabs(alpha[k])));
                small |= cost - ct <= 1e-16 * ct;
                alpha = trial;
                r = rt;
                jac = jt_new;
                cost = ct;
                mu = (mu * 0.3).max(1e-12);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            // no decrease along any damped step: stationary unless the
            // gradient is still large
            if gmax > 1e-6 * (1.0 + sqrt(2.0 * cost)) {
                return Err(Error::NoDescent { iterations });
            }
            break;
        }
        if small {
            break;
        }
    }

    let support = support_from_alpha(&alpha, basis);
    let convexity_margin = convexity_check(&support, opts.penalty_samples.max(1024));
    let residuals = residual(&alpha, sys)?;
    let (_, jac) = problem.eval(&alpha);
    let data_jac = DenseMatrix::from_fn(sys.n_equations(), nf, |i, k| jac[(i, k)]);
    let singular_values = if nf > 0 {
        data_jac.singular_values()
    } else {
        Vec::new()
    };
    Ok(ReconstructionResult {
        alpha,
        support,
        residuals,
        convexity_margin,
        singular_values,
        iterations,
        non_convex: convexity_margin < -opts.eps_conv,
    })
}

/// Options for [`solve_multistart`].
#[derive(Clone, Debug, PartialEq)]
pub struct MultiStartOptions {
    pub starts: usize,
    pub seed: u64,
    /// Solutions with `max_j |r_j|` above this are discarded.
    pub residual_tol: f64,
    /// Relative size of the random perturbation of non-constant modes.
    pub spread: f64,
    pub solve: SolveOptions,
}

impl Default for MultiStartOptions {
    fn default() -> Self {
        MultiStartOptions {
            starts: 8,
            seed: 1,
            residual_tol: 0.1,
            spread: 0.3,
            solve: SolveOptions::default(),
        }
    }
}

/// All distinct solutions found from the default start and `starts - 1`
/// seeded random starts.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiStartOutcome {
    /// Convex solutions within the residual tolerance, best first.
    pub solutions: Vec<ReconstructionResult>,
    /// Non-convex stationary points within the tolerance, best first.
    pub non_convex: Vec<ReconstructionResult>,
    /// Starts whose iteration failed.
    pub failed: usize,
}

pub fn solve_multistart(
    sys: &QuadraticSystem,
    basis: &BasisSpec,
    opts: &MultiStartOptions,
) -> Result<MultiStartOutcome> {
    let base = default_init(sys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut out = MultiStartOutcome {
        solutions: Vec::new(),
        non_convex: Vec::new(),
        failed: 0,
    };
    for s in 0..opts.starts.max(1) {
        let mut init = base.clone();
        if s > 0 {
            init[0] *= 0.5 + uniform();
            for (k, a) in init.iter_mut().enumerate().skip(1) {
                let r = (2.0 * uniform() - 1.0) * opts.spread * base[0];
                if !opts.solve.fixed.contains(&k) {
                    *a = r;
                }
            }
        }
        let res = match solve_quadratic_system(sys, basis, &init, &opts.solve) {
            Ok(r) => r,
            Err(Error::NoDescent { .. }) => {
                out.failed += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !(res.max_residual() <= opts.residual_tol) {
            continue;
        }
        let bucket = if res.non_convex {
            &mut out.non_convex
        } else {
            &mut out.solutions
        };
        let scale = res.alpha.iter().fold(1e-12f64, |m, a| m.max(fabs(*a)));
        let dup = bucket.iter().any(|o| {
            o.alpha
                .iter()
                .zip(&res.alpha)
                .all(|(a, b)| fabs(a - b) <= 1e-5 * scale)
        });
        if !dup {
            bucket.push(res);
        }
    }
    let by_residual = |a: &ReconstructionResult, b: &ReconstructionResult| {
        a.max_residual().total_cmp(&b.max_residual())
    };
    out.solutions.sort_by(by_residual);
    out.non_convex.sort_by(by_residual);
    Ok(out)
}

/// Body with support `Σ α_k φ_k`.
pub fn reconstruct_domain(result: &ReconstructionResult, n_theta: usize) -> Result<ConvexBody> {
    ConvexBody::with_tolerance(result.support.clone(), n_theta, DEFAULT_EPS_CONV).map_err(|e| {
        match e {
            Error::ConvexityViolation { .. } => Error::NonConvexSupport {
                margin: convexity_check(&result.support, n_theta),
            },
            other => other,
        }
    })
}

/// Nearby convex support function: the curvature radius `h + h''` is clipped
/// at zero and integrated back, alternating with truncation to the order of
/// `h`, and any negative curvature left is removed by adding a disk. Returns
/// the projected function and whether anything changed.
pub fn project_convex(h: &SupportFn, n_theta: usize) -> (SupportFn, bool) {
    if convexity_check(h, n_theta) >= 0.0 {
        return (h.clone(), false);
    }
    let order = h.order();
    let thetas = uniform_angles(n_theta);
    let mut cur = h.clone();
    for _ in 0..50 {
        let rho: Vec<f64> = thetas
            .iter()
            .map(|&t| cur.curvature_radius(t).max(0.0))
            .collect();
        // ρ_k = (1 - k²) h_k, except that translations are kept
        let mut modes = vec![(0.0, 0.0); order];
        for (k, m) in modes.iter_mut().enumerate().map(|(i, m)| (i + 1, m)) {
            if k == 1 {
                *m = h.mode(1);
                continue;
            }
            let (mut a, mut b) = (0.0, 0.0);
            for (&t, &r) in thetas.iter().zip(&rho) {
                a += r * cos(k as f64 * t);
                b += r * sin(k as f64 * t);
            }
            let s = 2.0 / (n_theta as f64 * (1.0 - (k * k) as f64));
            *m = (a * s, b * s);
        }
        let a0 = rho.iter().sum::<f64>() / n_theta as f64;
        cur = SupportFn::new(a0, modes);
        if convexity_check(&cur, n_theta) >= 0.0 {
            break;
        }
    }
    let margin = convexity_check(&cur, n_theta);
    if margin < 0.0 {
        cur = cur.add(&SupportFn::disk(-margin));
    }
    (cur, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn constant_data(value: f64, count: usize) -> Vec<SFunction> {
        (1..=count)
            .map(|j| SFunction::constant(j, value, 256))
            .collect()
    }

    #[test]
    fn basis_differences_reproduce_modes() {
        let basis = build_basis(4);
        assert_eq!(basis.len(), 9);
        for e in &basis.elements {
            for t in uniform_angles(64) {
                let d = e.g.eval(t) - e.h.eval(t);
                assert!((d - e.mode.eval(t)).abs() < 1e-12);
            }
            assert!(
                convexity_check(&e.g, 256)
                    >= (if e.mode.order() >= 2 {
                        BASIS_MARGIN - 1e-12
                    } else {
                        0.0
                    })
            );
            assert!(convexity_check(&e.h, 256) >= 0.0);
        }
        // cos 2θ: G has h = cos 2θ + 4 and h + h'' = 4 - 3 cos 2θ
        assert_eq!(basis.elements[3].mode, Mode::Cos(2));
        assert!((convexity_check(&basis.elements[3].g, 256) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_extension() {
        let one = positive_homogeneous_extension(|_| 1.0);
        assert!((one([3.0, 4.0]) - 5.0).abs() < 1e-15);
        let c1 = positive_homogeneous_extension(cos);
        assert!((c1([0.7, -2.0]) - 0.7).abs() < 1e-14);
        let c2 = positive_homogeneous_extension(|t| cos(2.0 * t));
        assert!((c2([2.0, 0.0]) - 2.0).abs() < 1e-15);
        assert_eq!(c2([0.0, 0.0]), 0.0);
    }

    #[test]
    fn constant_data_coefficients() {
        let basis = build_basis(2);
        let data = constant_data(1.0 / PI, 2);
        let sys = assemble_coefficients(&basis, &data, OperatorKind::Membrane).unwrap();
        assert!((sys.a[0][(0, 0)] - 2.0).abs() < 1e-12);
        assert!(sys.a[0][(0, 3)].abs() < 1e-12);
        let direct = assemble_coefficients_direct(&basis, &data, OperatorKind::Membrane).unwrap();
        let doubled =
            assemble_coefficients(&basis, &constant_data(2.0 / PI, 2), OperatorKind::Membrane)
                .unwrap();
        for (j, m) in sys.a.iter().enumerate() {
            for k in 0..5 {
                for l in 0..5 {
                    assert!((m[(k, l)] - direct.a[j][(k, l)]).abs() < 1e-9);
                    assert!((doubled.a[j][(k, l)] - 2.0 * m[(k, l)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn residual_examples() {
        let basis = build_basis(0);
        let sys =
            assemble_coefficients(&basis, &constant_data(1.0 / PI, 1), OperatorKind::Membrane)
                .unwrap();
        assert!(residual(&[1.0], &sys).unwrap()[0].abs() < 1e-12);
        assert_eq!(residual(&[0.0], &sys).unwrap(), vec![-2.0]);
        let r = residual(&[3.0], &sys).unwrap()[0];
        assert!((r + 2.0 - 9.0 * 2.0).abs() < 1e-10);
        assert!(residual(&[1.0, 2.0], &sys).is_err());
    }

    #[test]
    fn single_mode_solutions() {
        let basis = build_basis(0);
        let sys =
            assemble_coefficients(&basis, &constant_data(1.0 / PI, 1), OperatorKind::Membrane)
                .unwrap();
        let res = solve_quadratic_system(&sys, &basis, &[0.3], &SolveOptions::default()).unwrap();
        assert!((res.alpha[0] - 1.0).abs() < 1e-10);
        assert!(!res.non_convex);
        let plate = assemble_coefficients(&basis, &constant_data(2.0 / PI, 1), OperatorKind::Plate)
            .unwrap();
        assert!((plate.a[0][(0, 0)] - 4.0).abs() < 1e-12);
        let res = solve_quadratic_system(
            &plate,
            &basis,
            &default_init(&plate).unwrap(),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!((res.alpha[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decomposition_round_trip() {
        let basis = build_basis(3);
        let h = SupportFn::from_modes(1.0, &[(2, 0.2, 0.0), (3, 0.0, -0.05)]).unwrap();
        let d = decompose_support(&h, &basis);
        assert!(!d.truncated());
        assert_eq!(d.alpha[0], 1.0);
        assert_eq!(d.alpha[3], 0.2);
        assert_eq!(support_from_alpha(&d.alpha, &basis).coeff_distance(&h), 0.0);
        let low = decompose_support(&h, &build_basis(2));
        assert!((low.truncation_loss - 0.05).abs() < 1e-15);
    }

    #[test]
    fn reconstruct_rejects_non_convex() {
        let basis = build_basis(2);
        let mut alpha = vec![0.0; 5];
        alpha[3] = 1.0;
        let res = ReconstructionResult {
            support: support_from_alpha(&alpha, &basis),
            alpha,
            residuals: vec![],
            convexity_margin: -3.0,
            singular_values: vec![],
            iterations: 0,
            non_convex: true,
        };
        assert!(matches!(
            reconstruct_domain(&res, 256),
            Err(Error::NonConvexSupport { .. })
        ));
        let (p, changed) = project_convex(&res.support, 256);
        assert!(changed);
        assert!(convexity_check(&p, 256) >= -1e-12);
    }

    #[test]
    fn split_matches_quadratic_form() {
        let basis = build_basis(3);
        let data: Vec<SFunction> = (1..=3)
            .map(|j| {
                let s = uniform_angles(256)
                    .into_iter()
                    .map(|t| 0.3 + 0.1 * cos(j as f64 * t) + 0.05 * sin(t))
                    .collect();
                SFunction::new(j, s)
            })
            .collect();
        let sys = assemble_coefficients(&basis, &data, OperatorKind::Membrane).unwrap();
        let alpha = [1.0, 0.1, -0.2, 0.15, -0.05, 0.0, 0.02];
        let direct = residual(&alpha, &sys).unwrap();
        let split = split_residual(&alpha, &basis, &data, OperatorKind::Membrane).unwrap();
        let sym = residual(&alpha, &sys.symmetrized()).unwrap();
        for ((a, b), c) in direct.iter().zip(&split).zip(&sym) {
            assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-12);
        }
    }
}
