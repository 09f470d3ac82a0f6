//! Local least-squares polynomial fits of grid functions next to the
//! boundary, used to read off boundary traces.

use alloc::vec::Vec;

use crate::grid::GridGeometry;
use crate::linalg::DenseMatrix;
use crate::Result;

/// Polynomial in the scaled local coordinates `ξ = (x - center) / scale`.
#[derive(Clone, Debug)]
pub(crate) struct LocalFit {
    center: [f64; 2],
    scale: f64,
    exps: Vec<(i32, i32)>,
    coeffs: Vec<f64>,
}

fn exponents(degree: usize) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for total in 0..=degree as i32 {
        for a in (0..=total).rev() {
            out.push((a, total - a));
        }
    }
    out
}

#[inline]
fn powi(x: f64, n: i32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r *= x;
    }
    r
}

/// `∂^(dx,dy)` of `ξ^a η^b`.
#[inline]
fn monomial_deriv(xi: f64, eta: f64, a: i32, b: i32, dx: i32, dy: i32) -> f64 {
    if dx > a || dy > b {
        return 0.0;
    }
    let mut c = 1.0;
    for k in 0..dx {
        c *= (a - k) as f64;
    }
    for k in 0..dy {
        c *= (b - k) as f64;
    }
    c * powi(xi, a - dx) * powi(eta, b - dy)
}

impl LocalFit {
    fn local(&self, x: [f64; 2]) -> (f64, f64) {
        (
            (x[0] - self.center[0]) / self.scale,
            (x[1] - self.center[1]) / self.scale,
        )
    }

    fn deriv(&self, x: [f64; 2], dx: i32, dy: i32) -> f64 {
        let (xi, eta) = self.local(x);
        let s = powi(self.scale, dx + dy);
        self.exps
            .iter()
            .zip(&self.coeffs)
            .map(|(&(a, b), c)| c * monomial_deriv(xi, eta, a, b, dx, dy))
            .sum::<f64>()
            / s
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        self.deriv(x, 0, 0)
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        [self.deriv(x, 1, 0), self.deriv(x, 0, 1)]
    }
}

/// Fits a polynomial of `degree` to the unknowns within `radius` spacings of
/// the boundary point with outward normal `theta`, imposing `u = 0` at
/// nearby boundary points. Unknowns closer than `skip` spacings
/// to the boundary are left out. Boundary rows carry weight `bc_weight`
/// relative to grid values.
pub(crate) fn fit_at_boundary(
    geo: &GridGeometry,
    u: &[f64],
    theta: f64,
    degree: usize,
    radius: f64,
    skip: f64,
) -> Result<LocalFit> {
    let h = geo.spacing;
    let support = geo.body.support();
    let (hv, dh, d2h) = support.eval_derivs(theta);
    let center = crate::support::gauss_point(theta, hv, dh);
    let rho = (hv + d2h).max(1e-12);
    let exps = exponents(degree);
    let ncoef = exps.len();
    let bc_weight = 10.0;

    let mut radius = radius;
    loop {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for p in geo.unknowns_near(center, radius) {
            if skip > 0.0 && geo.node_distance(geo.nodes[p]) > -skip * h {
                continue;
            }
            let x = geo.unknown_position(p);
            let (xi, eta) = ((x[0] - center[0]) / h, (x[1] - center[1]) / h);
            rows.push(
                exps.iter()
                    .map(|&(a, b)| monomial_deriv(xi, eta, a, b, 0, 0))
                    .collect(),
            );
            rhs.push(u[p]);
        }
        // boundary points spaced about one grid spacing apart in arc length
        let dtheta = (h / rho).min(0.25);
        let reach = (radius as i32).max(1);
        for k in -reach..=reach {
            let t = theta + k as f64 * dtheta;
            let (hv, dh, _) = support.eval_derivs(t);
            let x = crate::support::gauss_point(t, hv, dh);
            let (xi, eta) = ((x[0] - center[0]) / h, (x[1] - center[1]) / h);
            if xi * xi + eta * eta > radius * radius {
                continue;
            }
            rows.push(
                exps.iter()
                    .map(|&(a, b)| bc_weight * monomial_deriv(xi, eta, a, b, 0, 0))
                    .collect(),
            );
            rhs.push(0.0);
        }
        if rows.len() >= ncoef + ncoef / 2 {
            let a = DenseMatrix::from_fn(rows.len(), ncoef, |i, j| rows[i][j]);
            if let Ok(coeffs) = a.least_squares(&rhs) {
                return Ok(LocalFit {
                    center,
                    scale: h,
                    exps,
                    coeffs,
                });
            }
        }
        if radius > 8.0 {
            return Err(crate::Error::InvalidInput(
                "too few grid values near the boundary for a local fit".into(),
            ));
        }
        radius += 0.5;
    }
}
