//! The interval problem `-u'' + c/x² u = λu`, `u(a) = u(b) = 0`.
//!
//! Eigenpairs come from the symmetric tridiagonal second-difference matrix on
//! a uniform grid. Endpoint slopes use a fourth-order one-sided stencil, since
//! the s-values `u'(a)²/λ`, `u'(b)²/λ` square them.
//!
//! For `c > 0` and an endpoint at the origin the potential is singular there;
//! that endpoint is moved inward by `offset_ratio · (b - a)` where the
//! eigenfunctions vanish like `x^ν`, `ν = 1/2 + sqrt(1/4 + c)`.

use alloc::vec::Vec;

use libm::fabs;

use crate::linalg::tridiag::SymTridiagonal;
use crate::{Error, Result};

/// `-u'' + c/x² u = λu` on `(a, b)` with Dirichlet ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalProblem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub j_max: usize,
}

impl IntervalProblem {
    pub fn new(a: f64, b: f64, c: f64, j_max: usize) -> Result<Self> {
        let p = IntervalProblem { a, b, c, j_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidInput("interval needs a < b".into()));
        }
        if !(self.c >= 0.0) {
            return Err(Error::InvalidInput(
                "potential strength c must be >= 0".into(),
            ));
        }
        if self.j_max == 0 {
            return Err(Error::InvalidInput("j_max must be >= 1".into()));
        }
        if self.c > 0.0 && self.a < 0.0 && self.b > 0.0 {
            return Err(Error::SingularPotential {
                a: self.a,
                b: self.b,
                c: self.c,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn potential(&self, x: f64) -> f64 {
        if self.c == 0.0 {
            0.0
        } else {
            self.c / (x * x)
        }
    }

    /// Same problem on `(t a, t b)`.
    pub fn scaled(&self, t: f64) -> IntervalProblem {
        IntervalProblem {
            a: self.a * t,
            b: self.b * t,
            ..*self
        }
    }
}

/// Options for [`solve_interval_with`].
#[derive(Clone, Copy, Debug)]
pub struct IntervalOptions {
    /// Inward offset of a singular endpoint, relative to the interval length.
    pub offset_ratio: f64,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        IntervalOptions { offset_ratio: 1e-4 }
    }
}

/// One eigenpair of the interval problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigen1D {
    pub j: usize,
    pub lambda: f64,
    /// Grid nodes including both (possibly offset) endpoints.
    pub x: Vec<f64>,
    /// Eigenfunction at `x`, `∫ u² = 1`, positive slope at the left end.
    pub u: Vec<f64>,
    pub dua: f64,
    pub dub: f64,
}

impl Eigen1D {
    /// `∫ u² dx` by the trapezoid rule.
    pub fn norm_sq(&self) -> f64 {
        let h = self.x[1] - self.x[0];
        h * self.u.iter().map(|v| v * v).sum::<f64>()
    }
}

/// Lowest `p.j_max` eigenpairs on a grid of `n_grid` intervals.
pub fn solve_interval(p: &IntervalProblem, n_grid: usize) -> Result<Vec<Eigen1D>> {
    solve_interval_with(p, n_grid, &IntervalOptions::default())
}

pub fn solve_interval_with(
    p: &IntervalProblem,
    n_grid: usize,
    opts: &IntervalOptions,
) -> Result<Vec<Eigen1D>> {
    p.validate()?;
    if n_grid < 64 {
        return Err(Error::InvalidInput("n_grid must be >= 64".into()));
    }
    let len = p.b - p.a;
    let mut left = p.a;
    let mut right = p.b;
    if p.c > 0.0 {
        if p.a == 0.0 {
            left = opts.offset_ratio * len;
        }
        if p.b == 0.0 {
            right = -opts.offset_ratio * len;
        }
    }
    let h = (right - left) / n_grid as f64;
    let x: Vec<f64> = (0..=n_grid).map(|i| left + h * i as f64).collect();
    let m = n_grid - 1;
    if p.j_max > m {
        return Err(Error::InvalidInput(
            "j_max exceeds the number of grid unknowns".into(),
        ));
    }
    let inv_h2 = 1.0 / (h * h);
    let d: Vec<f64> = (1..=m).map(|i| 2.0 * inv_h2 + p.potential(x[i])).collect();
    let e = alloc::vec![-inv_h2; m - 1];
    let t = SymTridiagonal::new(d, e);

    (0..p.j_max)
        .map(|k| {
            let lambda = t.eigenvalue(k);
            let v = t.eigenvector(lambda);
            let mut u = Vec::with_capacity(n_grid + 1);
            u.push(0.0);
            u.extend_from_slice(&v);
            u.push(0.0);
            let nrm = libm::sqrt(h * u.iter().map(|w| w * w).sum::<f64>());
            let mut dua = left_slope(&u, h) / nrm;
            let sign = if dua < 0.0 { -1.0 } else { 1.0 };
            u.iter_mut().for_each(|w| *w *= sign / nrm);
            dua *= sign;
            let dub = right_slope(&u, h);
            Ok(Eigen1D {
                j: k + 1,
                lambda,
                x: x.clone(),
                u,
                dua,
                dub,
            })
        })
        .collect()
}

/// Fourth-order forward difference for `u'(x_0)`.
fn left_slope(u: &[f64], h: f64) -> f64 {
    (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * h)
}

/// Fourth-order backward difference for `u'(x_N)`.
fn right_slope(u: &[f64], h: f64) -> f64 {
    let n = u.len() - 1;
    (25.0 * u[n] - 48.0 * u[n - 1] + 36.0 * u[n - 2] - 16.0 * u[n - 3] + 3.0 * u[n - 4])
        / (12.0 * h)
}

/// `(J(a), J(b)) = (u'(a)²/λ, u'(b)²/λ)`.
pub fn s_values_1d(e: &Eigen1D) -> (f64, f64) {
    (e.dua * e.dua / e.lambda, e.dub * e.dub / e.lambda)
}

/// `J(b)·b - J(a)·a - 2`.
pub fn interval_identity_residual(e: &Eigen1D, p: &IntervalProblem) -> f64 {
    let (ja, jb) = s_values_1d(e);
    jb * p.b - ja * p.a - 2.0
}

/// Which endpoint an s-value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Left,
    Right,
}

/// Endpoint position from its s-value when the other endpoint is the origin:
/// `b = 2/J(b)` or `a = -2/J(a)`.
pub fn recover_endpoint(j_value: f64, which: Endpoint) -> Result<f64> {
    if !(j_value > 0.0) {
        return Err(Error::NonpositiveData(j_value));
    }
    Ok(match which {
        Endpoint::Right => 2.0 / j_value,
        Endpoint::Left => -2.0 / j_value,
    })
}

/// Eigenvalue and s-values after one Richardson step on grids `n` and `2n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinedSValues {
    pub j: usize,
    pub lambda: f64,
    pub j_a: f64,
    pub j_b: f64,
}

impl RefinedSValues {
    pub fn identity_residual(&self, p: &IntervalProblem) -> f64 {
        self.j_b * p.b - self.j_a * p.a - 2.0
    }
}

/// Second-order Richardson extrapolation `(4 v_{h/2} - v_h) / 3` of the
/// eigenvalues and s-values.
pub fn solve_interval_richardson(
    p: &IntervalProblem,
    n_grid: usize,
) -> Result<Vec<RefinedSValues>> {
    let coarse = solve_interval(p, n_grid)?;
    let fine = solve_interval(p, 2 * n_grid)?;
    let extrap = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| {
            let (ca, cb) = s_values_1d(c);
            let (fa, fb) = s_values_1d(f);
            RefinedSValues {
                j: c.j,
                lambda: extrap(c.lambda, f.lambda),
                j_a: extrap(ca, fa),
                j_b: extrap(cb, fb),
            }
        })
        .collect())
}

/// True when the eigenvalues are strictly increasing.
pub fn strictly_increasing(eigs: &[Eigen1D]) -> bool {
    eigs.windows(2)
        .all(|w| w[1].lambda > w[0].lambda + 1e-12 * fabs(w[0].lambda))
}
