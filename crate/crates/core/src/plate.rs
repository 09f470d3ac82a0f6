//! Clamped plate `Δ²u = λu` with `u = ∂u/∂n = 0` on the boundary.
//!
//! Trial functions are `u = w·v`, where `v` is a tensor cubic B-spline on the
//! grid of the given spacing and `w = ω(s/δ)` depends on the depth `s` below
//! the boundary, with `ω(σ) = 6σ² - 8σ³ + 3σ⁴` for `σ < 1` and `ω = 1`
//! deeper in. Every trial function is clamped, so this is a conforming Ritz
//! method: eigenvalues converge from above and the boundary trace is simply
//! `Δu = ω''(0) v / δ² = 12 v / δ²`.
//!
//! B-splines with a support cell entirely inside the body are the unknowns.
//! Each remaining B-spline that meets the body is tied to the nearest 4×4
//! block of inner ones by cubic extrapolation of its coefficient, which keeps
//! cubic reproduction while removing the poorly determined small-support
//! functions.
//!
//! Integrals use the star-shaped parametrization
//! `x = c + ρ (x_b(θ) - c)` about the Steiner point `c`, with area element
//! `ρ (h + h'')(h - c·n) dρ dθ`: composite Gauss in `ρ`, trapezoid in `θ`.

use alloc::vec;
use alloc::vec::Vec;

use libm::{ceil, cos, floor, sin};

use crate::grid::DistanceField;
use crate::linalg::{lowest_generalized_eigenpairs, EigenOptions, SparseSym};
use crate::sfunction::boundary_relation_residual;
use crate::spectral_2d::{normalize_sign, MIN_UNKNOWNS};
use crate::support::gauss_point;
use crate::{ConvexBody, Error, Result, SFunction};

/// Default knot spacing relative to the mean radius of the body.
pub const DEFAULT_SPACING_RATIO: f64 = 0.05;

/// [`DEFAULT_SPACING_RATIO`] times the mean radius.
pub fn default_spacing(body: &ConvexBody) -> f64 {
    DEFAULT_SPACING_RATIO * body.support().mean_radius()
}

/// Clamped-plate eigenpair.
#[derive(Clone, Debug)]
pub struct PlateEigenPair {
    pub j: usize,
    pub lambda: f64,
    /// Values at [`PlateOperator::grid_nodes`], with `∫ u² = 1`.
    pub u: Vec<f64>,
    /// Spline coefficients of `v`.
    pub coeffs: Vec<f64>,
    /// `|Δu|²` on the boundary, indexed by outward normal.
    pub lap_trace: Vec<f64>,
    /// Signed `Δu = ∂²u/∂n²` on the boundary.
    pub unn: Vec<f64>,
}

/// Weighted spline discretization of the clamped bilaplacian.
#[derive(Clone, Debug)]
pub struct PlateOperator {
    pub body: ConvexBody,
    pub spacing: f64,
    /// Width of the boundary layer carrying the weight.
    pub delta: f64,
    /// Knot indices of the inner B-splines, one per unknown.
    pub dofs: Vec<(i64, i64)>,
    pub stiffness: SparseSym,
    pub mass: SparseSym,
    field: DistanceField,
    /// Each knot of the box `[i0, i0 + nx) × [j0, j0 + ny)` as a combination
    /// of unknowns (empty when the B-spline is unused).
    ext: Vec<Vec<(usize, f64)>>,
    i0: i64,
    j0: i64,
    nx: usize,
    ny: usize,
}

#[inline]
fn omega(sig: f64) -> (f64, f64, f64) {
    if sig >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let r = 1.0 - sig;
    (
        sig * sig * (6.0 - 8.0 * sig + 3.0 * sig * sig),
        12.0 * sig * r * r,
        12.0 * r * (1.0 - 3.0 * sig),
    )
}

/// Cubic B-spline on knots `-2..=2` and its first two derivatives.
#[inline]
fn bspline(t: f64) -> (f64, f64, f64) {
    let a = t.abs();
    let sg = if t < 0.0 { -1.0 } else { 1.0 };
    if a < 1.0 {
        (
            2.0 / 3.0 - a * a + 0.5 * a * a * a,
            sg * (-2.0 * a + 1.5 * a * a),
            -2.0 + 3.0 * a,
        )
    } else if a < 2.0 {
        let r = 2.0 - a;
        (r * r * r / 6.0, -sg * 0.5 * r * r, r)
    } else {
        (0.0, 0.0, 0.0)
    }
}

/// Value, gradient and Laplacian of the weight at a point.
struct Weight {
    w: f64,
    grad: [f64; 2],
    lap: f64,
}

type SplineSample = ((i64, i64), f64, [f64; 2], f64);

/// The 16 B-splines that can be nonzero at `x`: knot index, value, gradient
/// and Laplacian, all in physical units.
fn splines_at(x: [f64; 2], h: f64) -> [SplineSample; 16] {
    let gx = x[0] / h;
    let gy = x[1] / h;
    let ix = floor(gx) as i64;
    let iy = floor(gy) as i64;
    let mut bx = [(0i64, (0.0, 0.0, 0.0)); 4];
    let mut by = [(0i64, (0.0, 0.0, 0.0)); 4];
    for k in 0..4 {
        let i = ix - 1 + k as i64;
        bx[k] = (i, bspline(gx - i as f64));
        let j = iy - 1 + k as i64;
        by[k] = (j, bspline(gy - j as f64));
    }
    let mut out = [((0, 0), 0.0, [0.0; 2], 0.0); 16];
    let (ih, ih2) = (1.0 / h, 1.0 / (h * h));
    for (a, &(j, (ny, dny, d2ny))) in by.iter().enumerate() {
        for (b, &(i, (nx, dnx, d2nx))) in bx.iter().enumerate() {
            out[4 * a + b] = (
                (i, j),
                nx * ny,
                [dnx * ny * ih, nx * dny * ih],
                (d2nx * ny + nx * d2ny) * ih2,
            );
        }
    }
    out
}

/// Quadrature nodes `(x, weight)` covering the body.
fn quadrature(body: &ConvexBody, spacing: f64) -> Vec<([f64; 2], f64)> {
    let support = body.support();
    let (c1, s1) = support.mode(1);
    let c = [c1, s1];
    let [xmin, xmax, ymin, ymax] = body.bounding_box();
    let extent = (xmax - xmin).max(ymax - ymin);
    let panels = ceil(2.0 * extent / spacing) as usize + 2;
    let n_theta = (ceil(8.0 * body.perimeter() / spacing) as usize).max(256);
    const G: [(f64, f64); 4] = [
        (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    ];
    let dtheta = core::f64::consts::TAU / n_theta as f64;
    let mut out = Vec::with_capacity(n_theta * panels * 4);
    for k in 0..n_theta {
        let theta = k as f64 * dtheta;
        let (hv, dh, d2h) = support.eval_derivs(theta);
        let xb = gauss_point(theta, hv, dh);
        let jac = (hv + d2h) * (hv - c[0] * cos(theta) - c[1] * sin(theta)) * dtheta;
        for p in 0..panels {
            let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
            for &(g, wg) in &G {
                let rho = 0.5 * (a + b) + 0.5 * (b - a) * g;
                let x = [c[0] + rho * (xb[0] - c[0]), c[1] + rho * (xb[1] - c[1])];
                out.push((x, rho * jac * 0.5 * (b - a) * wg));
            }
        }
    }
    out
}

impl PlateOperator {
    fn weight(&self, x: [f64; 2]) -> Weight {
        let (d, theta) = self.field.eval_with_normal(x);
        let s = -d;
        let sig = s / self.delta;
        if sig >= 1.0 {
            return Weight {
                w: 1.0,
                grad: [0.0; 2],
                lap: 0.0,
            };
        }
        let (w, dw, d2w) = omega(sig);
        // ∇s = -n and Δs = -1/(ρ - s) in normal coordinates
        let rho = self.body.support().curvature_radius(theta);
        let g = dw / self.delta;
        Weight {
            w,
            grad: [-g * cos(theta), -g * sin(theta)],
            lap: d2w / (self.delta * self.delta) - g / (rho - s),
        }
    }

    fn ext(&self, k: (i64, i64)) -> &[(usize, f64)] {
        let (a, b) = (k.0 - self.i0, k.1 - self.j0);
        if a < 0 || b < 0 || a >= self.nx as i64 || b >= self.ny as i64 {
            return &[];
        }
        &self.ext[b as usize * self.nx + a as usize]
    }

    /// Merges the extended B-splines at a point: `(unknown, value, gradient,
    /// Laplacian)` of `v`.
    fn basis_at(&self, x: [f64; 2], out: &mut Vec<(usize, f64, [f64; 2], f64)>) {
        out.clear();
        for (k, b, g, l) in splines_at(x, self.spacing) {
            for &(i, c) in self.ext(k) {
                match out.iter_mut().find(|e| e.0 == i) {
                    Some(e) => {
                        e.1 += c * b;
                        e.2[0] += c * g[0];
                        e.2[1] += c * g[1];
                        e.3 += c * l;
                    }
                    None => out.push((i, c * b, [c * g[0], c * g[1]], c * l)),
                }
            }
        }
    }

    #[inline]
    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    /// `v(x) = Σ c_k B_k(x)`.
    pub fn spline_value(&self, coeffs: &[f64], x: [f64; 2]) -> f64 {
        let mut basis = Vec::with_capacity(32);
        self.basis_at(x, &mut basis);
        basis.iter().map(|(i, b, _, _)| coeffs[*i] * b).sum()
    }

    /// `u(x) = w(x) v(x)`.
    pub fn value(&self, coeffs: &[f64], x: [f64; 2]) -> f64 {
        self.weight(x).w * self.spline_value(coeffs, x)
    }

    /// `Δu(x)` by the product rule.
    pub fn laplacian(&self, coeffs: &[f64], x: [f64; 2]) -> f64 {
        let wt = self.weight(x);
        let mut basis = Vec::with_capacity(32);
        self.basis_at(x, &mut basis);
        basis
            .iter()
            .map(|(i, b, g, l)| {
                coeffs[*i] * (wt.w * l + 2.0 * (wt.grad[0] * g[0] + wt.grad[1] * g[1]) + wt.lap * b)
            })
            .sum()
    }

    /// Grid nodes (integer multiples of the spacing) strictly inside the body.
    pub fn grid_nodes(&self) -> Vec<[f64; 2]> {
        let h = self.spacing;
        let [xmin, xmax, ymin, ymax] = self.body.bounding_box();
        let mut out = Vec::new();
        for j in floor(ymin / h) as i64..=ceil(ymax / h) as i64 {
            for i in floor(xmin / h) as i64..=ceil(xmax / h) as i64 {
                let x = [i as f64 * h, j as f64 * h];
                if self.field.eval(x) < 0.0 {
                    out.push(x);
                }
            }
        }
        out
    }
}

/// Boundary-layer width: half the smallest radius of curvature, capped at a
/// quarter of the minimal width so the layer stays inside the normal
/// coordinate patch.
fn layer_width(body: &ConvexBody) -> f64 {
    let support = body.support();
    let thetas = body.thetas();
    let rho_min = thetas
        .iter()
        .map(|&t| support.curvature_radius(t))
        .fold(f64::INFINITY, f64::min);
    let width = thetas
        .iter()
        .map(|&t| support.eval(t) + support.eval(t + core::f64::consts::PI))
        .fold(f64::INFINITY, f64::min);
    (0.5 * rho_min).min(0.25 * width)
}

/// Lagrange weights at `t` for the nodes `0, 1, 2, 3`.
fn lagrange4(t: f64) -> [f64; 4] {
    let mut out = [1.0; 4];
    for (p, o) in out.iter_mut().enumerate() {
        for q in 0..4 {
            if q != p {
                *o *= (t - q as f64) / (p as f64 - q as f64);
            }
        }
    }
    out
}

/// Assembles stiffness `∫ Δu Δv` and mass `∫ u v` for `body` at the given
/// knot spacing.
pub fn discretize_plate(body: &ConvexBody, spacing: f64) -> Result<PlateOperator> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidInput("spacing must be positive".into()));
    }
    let delta = layer_width(body);
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(
            "body has a vanishing radius of curvature".into(),
        ));
    }
    let field = DistanceField::new(body);
    let [xmin, xmax, ymin, ymax] = body.bounding_box();
    let i0 = floor(xmin / spacing) as i64 - 2;
    let j0 = floor(ymin / spacing) as i64 - 2;
    let nx = (ceil(xmax / spacing) as i64 + 3 - i0) as usize;
    let ny = (ceil(ymax / spacing) as i64 + 3 - j0) as usize;
    let off = |k: (i64, i64)| -> Option<usize> {
        let (a, b) = (k.0 - i0, k.1 - j0);
        (a >= 0 && b >= 0 && a < nx as i64 && b < ny as i64).then(|| b as usize * nx + a as usize)
    };

    // knot corners inside the body; the cell [i, i+1] × [j, j+1] is inside
    // when its four corners are
    let corner_in: Vec<bool> = (0..nx * ny)
        .map(|o| {
            let (a, b) = ((o % nx) as i64 + i0, (o / nx) as i64 + j0);
            field.eval([a as f64 * spacing, b as f64 * spacing]) < 0.0
        })
        .collect();
    let cell_in = |i: i64, j: i64| -> bool {
        [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
            .iter()
            .all(|&k| off(k).is_some_and(|o| corner_in[o]))
    };
    let mut inner = vec![false; nx * ny];
    let mut dofs = Vec::new();
    let mut index = vec![usize::MAX; nx * ny];
    for o in 0..nx * ny {
        let (a, b) = ((o % nx) as i64 + i0, (o / nx) as i64 + j0);
        if (a - 2..a + 2).any(|i| (b - 2..b + 2).any(|j| cell_in(i, j))) {
            inner[o] = true;
            index[o] = dofs.len();
            dofs.push((a, b));
        }
    }
    let n = dofs.len();
    if n < MIN_UNKNOWNS {
        return Err(Error::GridTooCoarse {
            interior: n,
            required: MIN_UNKNOWNS,
        });
    }

    // outer knots: extrapolate from the nearest all-inner 4×4 block
    let mut ext: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nx * ny];
    for o in 0..nx * ny {
        let (a, b) = ((o % nx) as i64 + i0, (o / nx) as i64 + j0);
        if inner[o] {
            ext[o] = vec![(index[o], 1.0)];
            continue;
        }
        let mut best: Option<(i64, (i64, i64))> = None;
        for bb in b - 7..=b + 4 {
            for ba in a - 7..=a + 4 {
                let all_inner =
                    (0..4).all(|q| (0..4).all(|p| off((ba + p, bb + q)).is_some_and(|t| inner[t])));
                if !all_inner {
                    continue;
                }
                // squared distance from the knot to the block centre, in
                // half-knot units to stay integral
                let dx = 2 * (ba - a) + 3;
                let dy = 2 * (bb - b) + 3;
                let d2 = dx * dx + dy * dy;
                if best.is_none_or(|(bd, _)| d2 < bd) {
                    best = Some((d2, (ba, bb)));
                }
            }
        }
        if let Some((_, (ba, bb))) = best {
            let lx = lagrange4((a - ba) as f64);
            let ly = lagrange4((b - bb) as f64);
            for q in 0..4 {
                for p in 0..4 {
                    let t = off((ba + p as i64, bb + q as i64)).expect("block inside the box");
                    ext[o].push((index[t], lx[p] * ly[q]));
                }
            }
        }
    }

    let mut op = PlateOperator {
        body: body.clone(),
        spacing,
        delta,
        dofs,
        stiffness: SparseSym::new(n),
        mass: SparseSym::new(n),
        field,
        ext,
        i0,
        j0,
        nx,
        ny,
    };

    let mut stiffness = SparseSym::new(n);
    let mut mass = SparseSym::new(n);
    let mut basis = Vec::with_capacity(64);
    for (x, wq) in quadrature(body, spacing) {
        let wt = op.weight(x);
        op.basis_at(x, &mut basis);
        for &(i, bi, gi, li) in &basis {
            let vi = wt.w * bi;
            let di = wt.w * li + 2.0 * (wt.grad[0] * gi[0] + wt.grad[1] * gi[1]) + wt.lap * bi;
            for &(j, bj, gj, lj) in &basis {
                if j > i {
                    continue;
                }
                let vj = wt.w * bj;
                let dj = wt.w * lj + 2.0 * (wt.grad[0] * gj[0] + wt.grad[1] * gj[1]) + wt.lap * bj;
                stiffness.add(i, j, wq * di * dj);
                mass.add(i, j, wq * vi * vj);
            }
        }
    }
    op.stiffness = stiffness;
    op.mass = mass;
    Ok(op)
}

/// Smallest `j_max` clamped-plate eigenpairs with boundary traces.
pub fn solve_clamped_plate(
    body: &ConvexBody,
    j_max: usize,
    spacing: f64,
) -> Result<Vec<PlateEigenPair>> {
    let op = discretize_plate(body, spacing)?;
    solve_plate_operator(&op, j_max, &EigenOptions::default())
}

pub fn solve_plate_operator(
    op: &PlateOperator,
    j_max: usize,
    opts: &EigenOptions,
) -> Result<Vec<PlateEigenPair>> {
    if j_max == 0 {
        return Err(Error::InvalidInput("j_max must be >= 1".into()));
    }
    let res = lowest_generalized_eigenpairs(&op.stiffness, &op.mass, j_max, opts)?;
    let nodes = op.grid_nodes();
    res.values
        .iter()
        .zip(res.vectors)
        .enumerate()
        .map(|(k, (&lambda, c))| {
            let raw: Vec<f64> = nodes.iter().map(|&x| op.value(&c, x)).collect();
            let u = normalize_sign(raw.clone());
            let s = if u.first() == raw.first() { 1.0 } else { -1.0 };
            let coeffs: Vec<f64> = c.into_iter().map(|x| s * x).collect();
            let unn = boundary_laplacian(op, &coeffs);
            let lap_trace = unn.iter().map(|x| x * x).collect();
            Ok(PlateEigenPair {
                j: k + 1,
                lambda,
                u,
                coeffs,
                lap_trace,
                unn,
            })
        })
        .collect()
}

/// `Δu = 12 v / δ²` at the boundary point with outward normal `θ_i`.
pub fn boundary_laplacian(op: &PlateOperator, coeffs: &[f64]) -> Vec<f64> {
    let support = op.body.support();
    let scale = 12.0 / (op.delta * op.delta);
    op.body
        .thetas()
        .into_iter()
        .map(|t| {
            let (hv, dh, _) = support.eval_derivs(t);
            scale * op.spline_value(coeffs, gauss_point(t, hv, dh))
        })
        .collect()
}

/// `∂²u/∂n²` on the boundary by a central difference of `u` across it.
pub fn boundary_second_normal_fd(op: &PlateOperator, coeffs: &[f64]) -> Vec<f64> {
    let support = op.body.support();
    let eps = 1e-3 * op.delta;
    op.body
        .thetas()
        .into_iter()
        .map(|t| {
            let (hv, dh, _) = support.eval_derivs(t);
            let xb = gauss_point(t, hv, dh);
            let n = [cos(t), sin(t)];
            let at = |s: f64| op.value(coeffs, [xb[0] + s * n[0], xb[1] + s * n[1]]);
            (at(eps) - 2.0 * at(0.0) + at(-eps)) / (eps * eps)
        })
        .collect()
}

/// `σ_j = |Δu_j|² / λ_j` on the boundary.
pub fn plate_s_function(e: &PlateEigenPair) -> Result<SFunction> {
    if !(e.lambda > 0.0) {
        return Err(Error::NonpositiveData(e.lambda));
    }
    Ok(SFunction::new(
        e.j,
        e.lap_trace.iter().map(|v| v / e.lambda).collect(),
    ))
}

/// `∮ σ_j P_D(n) ds - 4`.
pub fn plate_identity_residual(body: &ConvexBody, s: &SFunction) -> Result<f64> {
    boundary_relation_residual(body, s, 4.0)
}

/// `¼ ∮ |Δu|² P_D(n) ds` for a unit-normalized eigenfunction.
pub fn plate_eigenvalue_from_boundary(body: &ConvexBody, lap_trace: &[f64]) -> Result<f64> {
    if lap_trace.len() != body.n_theta() {
        return Err(Error::DataDirectionMismatch {
            expected: body.n_theta(),
            got: lap_trace.len(),
        });
    }
    let h = body.support();
    let f: Vec<f64> = body
        .thetas()
        .into_iter()
        .zip(lap_trace)
        .map(|(t, g)| g * h.eval(t))
        .collect();
    Ok(0.25 * body.boundary_integral_sampled(&f)?)
}
