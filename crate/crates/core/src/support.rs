//! Support-function calculus for convex planar bodies.
//!
//! A body is stored through its support function restricted to the circle of
//! outward normals, `h(θ) = a0 + Σ_k (a_k cos kθ + b_k sin kθ)`. For such a
//! body the boundary is parameterized by the normal angle,
//!
//! ```text
//! x(θ) = (h cos θ - h' sin θ, h sin θ + h' cos θ),   ds = (h + h'') dθ,
//! ```
//!
//! so any integral over the boundary of a function of the outward normal is a
//! periodic integral in θ weighted by the curvature radius `h + h''`. Minkowski
//! addition adds support functions, so these integrals are additive over
//! Minkowski sums.
//!
//! Quadrature is the uniform periodic trapezoid rule, exact for trigonometric
//! polynomials of degree below the node count.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use libm::{cos, fabs, sin};

use crate::{Error, Result, DEFAULT_EPS_CONV, DEFAULT_NTHETA};

/// An outward normal direction `(cos θ, sin θ)`, stored with θ in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Direction(f64);

impl Direction {
    pub fn new(theta: f64) -> Self {
        let mut t = theta % TAU;
        if t < 0.0 {
            t += TAU;
        }
        // `-tiny % 2π + 2π` rounds to 2π
        if t >= TAU {
            t = 0.0;
        }
        Direction(t)
    }

    #[inline]
    pub fn theta(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn unit(self) -> [f64; 2] {
        [cos(self.0), sin(self.0)]
    }
}

/// Uniform angles `θ_i = 2π i / n`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// Periodic trapezoid rule on `n` uniform samples of a function on `[0, 2π)`.
pub fn periodic_trapezoid(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().sum::<f64>() * TAU / samples.len() as f64
}

/// Truncated Fourier series of a support function on the unit circle.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SupportFn {
    a0: f64,
    /// `modes[k - 1] = (a_k, b_k)`
    modes: Vec<(f64, f64)>,
}

/// Smoothing applied when projecting a sampled function onto Fourier modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothing {
    /// Plain truncated Fourier projection.
    None,
    /// Fejér (Cesàro) weights `1 - k/(K+1)`. The Fejér kernel is positive, so
    /// the projection of a support function is again a support function.
    Fejer,
}

impl SupportFn {
    pub fn new(a0: f64, modes: Vec<(f64, f64)>) -> Self {
        SupportFn { a0, modes }
    }

    /// Support function of the disk of radius `r` centered at the origin.
    pub fn disk(r: f64) -> Self {
        SupportFn::new(r, Vec::new())
    }

    /// Disk of radius `r` centered at `center`.
    pub fn disk_at(r: f64, center: [f64; 2]) -> Self {
        SupportFn::new(r, alloc::vec![(center[0], center[1])])
    }

    /// The single point `p`: `h(θ) = p · n(θ)`.
    pub fn point(p: [f64; 2]) -> Self {
        SupportFn::disk_at(0.0, p)
    }

    /// Builds a support function from `(k, a_k, b_k)` triples. Repeated `k`
    /// accumulate.
    pub fn from_modes(a0: f64, triples: &[(usize, f64, f64)]) -> Result<Self> {
        let order = triples.iter().map(|t| t.0).max().unwrap_or(0);
        let mut modes = alloc::vec![(0.0, 0.0); order];
        for &(k, a, b) in triples {
            if k == 0 {
                return Err(Error::InvalidInput("mode index k must be >= 1".into()));
            }
            modes[k - 1].0 += a;
            modes[k - 1].1 += b;
        }
        Ok(SupportFn::new(a0, modes))
    }

    /// Fourier projection of `f` onto modes `0..=order`, using `n` quadrature
    /// nodes.
    pub fn project<F: Fn(f64) -> f64>(f: F, order: usize, n: usize, smoothing: Smoothing) -> Self {
        let thetas = uniform_angles(n);
        let vals: Vec<f64> = thetas.iter().map(|&t| f(t)).collect();
        let a0 = periodic_trapezoid(&vals) / TAU;
        let modes = (1..=order)
            .map(|k| {
                let kf = k as f64;
                let (mut a, mut b) = (0.0, 0.0);
                for (&t, &v) in thetas.iter().zip(&vals) {
                    a += v * cos(kf * t);
                    b += v * sin(kf * t);
                }
                let scale = 2.0 / n as f64;
                let w = match smoothing {
                    Smoothing::None => 1.0,
                    Smoothing::Fejer => 1.0 - kf / (order as f64 + 1.0),
                };
                (a * scale * w, b * scale * w)
            })
            .collect();
        SupportFn::new(a0, modes)
    }

    /// Fejér (Cesàro) mean of the series at its own truncation order.
    pub fn fejer(&self) -> SupportFn {
        let w = self.order() as f64 + 1.0;
        SupportFn::new(
            self.a0,
            self.modes
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    let f = 1.0 - (i + 1) as f64 / w;
                    (a * f, b * f)
                })
                .collect(),
        )
    }

    #[inline]
    pub fn a0(&self) -> f64 {
        self.a0
    }

    #[inline]
    pub fn modes(&self) -> &[(f64, f64)] {
        &self.modes
    }

    /// Highest mode index present (trailing zero modes count).
    #[inline]
    pub fn order(&self) -> usize {
        self.modes.len()
    }

    /// `(a_k, b_k)` for `k >= 1`, zero beyond the truncation order.
    pub fn mode(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            (self.a0, 0.0)
        } else {
            self.modes.get(k - 1).copied().unwrap_or((0.0, 0.0))
        }
    }

    /// Values of `h`, `h'` and `h''` at θ.
    pub fn eval_derivs(&self, theta: f64) -> (f64, f64, f64) {
        let (mut h, mut dh, mut d2h) = (self.a0, 0.0, 0.0);
        let (s1, c1) = (sin(theta), cos(theta));
        // cos kθ, sin kθ by the angle-addition recurrence
        let (mut ck, mut sk) = (1.0, 0.0);
        for (i, &(a, b)) in self.modes.iter().enumerate() {
            let k = (i + 1) as f64;
            let c_next = ck * c1 - sk * s1;
            let s_next = sk * c1 + ck * s1;
            ck = c_next;
            sk = s_next;
            h += a * ck + b * sk;
            dh += k * (b * ck - a * sk);
            d2h -= k * k * (a * ck + b * sk);
        }
        (h, dh, d2h)
    }

    #[inline]
    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_derivs(theta).0
    }

    /// Curvature radius `h + h''`, the boundary length per unit normal angle.
    #[inline]
    pub fn curvature_radius(&self, theta: f64) -> f64 {
        let (h, _, d2h) = self.eval_derivs(theta);
        h + d2h
    }

    /// Degree-1 positively homogeneous extension `|x| h(x/|x|)`, zero at the
    /// origin.
    pub fn eval_homogeneous(&self, x: [f64; 2]) -> f64 {
        let r = libm::hypot(x[0], x[1]);
        if r == 0.0 {
            return 0.0;
        }
        r * self.eval(libm::atan2(x[1], x[0]))
    }

    /// Coefficient-wise sum; truncation order is the larger of the two.
    pub fn add(&self, other: &SupportFn) -> SupportFn {
        let order = self.order().max(other.order());
        let modes = (1..=order)
            .map(|k| {
                let (a1, b1) = self.mode(k);
                let (a2, b2) = other.mode(k);
                (a1 + a2, b1 + b2)
            })
            .collect();
        SupportFn::new(self.a0 + other.a0, modes)
    }

    pub fn sub(&self, other: &SupportFn) -> SupportFn {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, t: f64) -> SupportFn {
        SupportFn::new(
            self.a0 * t,
            self.modes.iter().map(|&(a, b)| (a * t, b * t)).collect(),
        )
    }

    /// `L∞` distance between two coefficient vectors.
    pub fn coeff_distance(&self, other: &SupportFn) -> f64 {
        let order = self.order().max(other.order());
        let mut d = fabs(self.a0 - other.a0);
        for k in 1..=order {
            let (a1, b1) = self.mode(k);
            let (a2, b2) = other.mode(k);
            d = d.max(fabs(a1 - a2)).max(fabs(b1 - b2));
        }
        d
    }

    /// Sup-norm of `self - other` over `n` sample directions.
    pub fn sup_distance(&self, other: &SupportFn, n: usize) -> f64 {
        let diff = self.sub(other);
        uniform_angles(n)
            .into_iter()
            .map(|t| fabs(diff.eval(t)))
            .fold(0.0, f64::max)
    }

    /// Mean radius `a0` of the body, i.e. perimeter / 2π.
    #[inline]
    pub fn mean_radius(&self) -> f64 {
        self.a0
    }
}

/// Minimum of `h + h''` over `n` uniform samples. A support function of a
/// convex body has this non-negative.
pub fn convexity_check(h: &SupportFn, n: usize) -> f64 {
    uniform_angles(n)
        .into_iter()
        .map(|t| h.curvature_radius(t))
        .fold(f64::INFINITY, f64::min)
}

/// `h(θ)` at the given direction.
#[inline]
pub fn eval_support(h: &SupportFn, d: Direction) -> f64 {
    h.eval(d.theta())
}

/// A convex body together with the boundary quadrature used for it.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexBody {
    support: SupportFn,
    n_theta: usize,
}

impl ConvexBody {
    /// Wraps a support function, rejecting it when `h + h''` drops below
    /// `-eps_conv` on the quadrature grid.
    pub fn new(support: SupportFn, n_theta: usize) -> Result<Self> {
        Self::with_tolerance(support, n_theta, DEFAULT_EPS_CONV)
    }

    pub fn with_tolerance(support: SupportFn, n_theta: usize, eps_conv: f64) -> Result<Self> {
        if n_theta < 8 {
            return Err(Error::InvalidInput("n_theta must be at least 8".into()));
        }
        let body = ConvexBody { support, n_theta };
        body.check_convex(eps_conv)?;
        Ok(body)
    }

    /// Skips the convexity check. Boundary integrals over such a body still
    /// run the check and fail.
    pub fn new_unchecked(support: SupportFn, n_theta: usize) -> Self {
        ConvexBody { support, n_theta }
    }

    pub fn disk(r: f64) -> Self {
        ConvexBody::new_unchecked(SupportFn::disk(r), DEFAULT_NTHETA)
    }

    #[inline]
    pub fn support(&self) -> &SupportFn {
        &self.support
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn with_n_theta(&self, n_theta: usize) -> Self {
        ConvexBody {
            support: self.support.clone(),
            n_theta,
        }
    }

    pub fn thetas(&self) -> Vec<f64> {
        uniform_angles(self.n_theta)
    }

    /// `h + h''` at each quadrature node.
    pub fn curvature_radii(&self) -> Vec<f64> {
        self.thetas()
            .into_iter()
            .map(|t| self.support.curvature_radius(t))
            .collect()
    }

    fn check_convex(&self, eps_conv: f64) -> Result<Vec<f64>> {
        let rho = self.curvature_radii();
        for (i, &r) in rho.iter().enumerate() {
            if r < -eps_conv {
                return Err(Error::ConvexityViolation {
                    theta: TAU * i as f64 / self.n_theta as f64,
                    value: r,
                });
            }
        }
        Ok(rho)
    }

    /// Quadrature weights `(h + h'') Δθ` on the node grid: boundary length
    /// carried by each node.
    pub fn arc_weights(&self) -> Result<Vec<f64>> {
        let dtheta = TAU / self.n_theta as f64;
        Ok(self
            .check_convex(DEFAULT_EPS_CONV)?
            .into_iter()
            .map(|r| r * dtheta)
            .collect())
    }

    pub fn perimeter(&self) -> f64 {
        TAU * self.support.a0
    }

    /// Area `½ ∫ h (h + h'') dθ`.
    pub fn area(&self) -> f64 {
        let h = &self.support;
        let mut area = PI * h.a0 * h.a0;
        for (i, &(a, b)) in h.modes.iter().enumerate() {
            let k = (i + 1) as f64;
            area += 0.5 * PI * (1.0 - k * k) * (a * a + b * b);
        }
        area
    }

    /// Boundary point with outward normal `d`.
    pub fn boundary_point(&self, d: Direction) -> Result<[f64; 2]> {
        let t = d.theta();
        let (h, dh, d2h) = self.support.eval_derivs(t);
        if h + d2h <= 0.0 {
            return Err(Error::DegenerateGaussMap {
                theta: t,
                value: h + d2h,
            });
        }
        Ok(gauss_point(t, h, dh))
    }

    /// Axis-aligned bounding box `[xmin, xmax, ymin, ymax]`.
    pub fn bounding_box(&self) -> [f64; 4] {
        let h = &self.support;
        [
            -h.eval(PI),
            h.eval(0.0),
            -h.eval(1.5 * PI),
            h.eval(0.5 * PI),
        ]
    }

    /// Minkowski sum; the quadrature is the finer of the two.
    pub fn minkowski_sum(&self, other: &ConvexBody) -> ConvexBody {
        ConvexBody {
            support: self.support.add(&other.support),
            n_theta: self.n_theta.max(other.n_theta),
        }
    }

    /// Homothety `t·D`, `t >= 0`.
    pub fn scale(&self, t: f64) -> ConvexBody {
        ConvexBody {
            support: self.support.scale(t),
            n_theta: self.n_theta,
        }
    }

    /// `∫_{S_D} f(n(ξ)) ds = ∫ f(θ)(h + h'')(θ) dθ`.
    pub fn boundary_integral<F: Fn(Direction) -> f64>(&self, f: F) -> Result<f64> {
        let w = self.arc_weights()?;
        Ok(self
            .thetas()
            .into_iter()
            .zip(w)
            .map(|(t, w)| f(Direction::new(t)) * w)
            .sum())
    }

    /// Same as [`ConvexBody::boundary_integral`] for `f` given by its values
    /// on the quadrature nodes.
    pub fn boundary_integral_sampled(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.n_theta {
            return Err(Error::DataDirectionMismatch {
                expected: self.n_theta,
                got: f.len(),
            });
        }
        let w = self.arc_weights()?;
        Ok(f.iter().zip(w).map(|(v, w)| v * w).sum())
    }
}

#[inline]
pub(crate) fn gauss_point(theta: f64, h: f64, dh: f64) -> [f64; 2] {
    let (s, c) = (sin(theta), cos(theta));
    [h * c - dh * s, h * s + dh * c]
}

/// Minkowski sum of two bodies.
pub fn minkowski_sum(a: &ConvexBody, b: &ConvexBody) -> ConvexBody {
    a.minkowski_sum(b)
}

/// `t·D` for `t >= 0`.
pub fn scale(d: &ConvexBody, t: f64) -> Result<ConvexBody> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(
            "scale factor must be non-negative".into(),
        ));
    }
    Ok(d.scale(t))
}

/// Boundary integral of a function of the outward normal.
pub fn boundary_integral_normal_fn<F: Fn(Direction) -> f64>(d: &ConvexBody, f: F) -> Result<f64> {
    d.boundary_integral(f)
}

/// `∫_{S_{D1}} P_{D2}(n(ξ)) ds`, symmetric in its arguments.
pub fn mixed_support_integral(d1: &ConvexBody, d2: &ConvexBody) -> Result<f64> {
    let h2 = d2.support();
    d1.boundary_integral(|d| h2.eval(d.theta()))
}

/// Boundary point with outward normal `d`.
pub fn boundary_point(d: &ConvexBody, dir: Direction) -> Result<[f64; 2]> {
    d.boundary_point(dir)
}

/// Element of the space of difference pairs of convex bodies.
///
/// `(A, B)` stands for the formal difference `P_A - P_B`; two pairs are equal
/// when `A + D = B + C`.
#[derive(Clone, Debug)]
pub struct BodyPair {
    pub first: ConvexBody,
    pub second: ConvexBody,
}

impl BodyPair {
    pub fn new(first: ConvexBody, second: ConvexBody) -> Self {
        BodyPair { first, second }
    }

    /// `P_first - P_second`.
    pub fn difference(&self) -> SupportFn {
        self.first.support().sub(self.second.support())
    }

    pub fn add(&self, other: &BodyPair) -> BodyPair {
        BodyPair {
            first: self.first.minkowski_sum(&other.first),
            second: self.second.minkowski_sum(&other.second),
        }
    }

    /// Scalar multiple. A negative factor swaps the components, so the
    /// difference is scaled with its sign.
    pub fn scale(&self, t: f64) -> BodyPair {
        if t >= 0.0 {
            BodyPair::new(self.first.scale(t), self.second.scale(t))
        } else {
            BodyPair::new(self.second.scale(-t), self.first.scale(-t))
        }
    }

    /// Quotient equality `A + D = B + C`, compared on Fourier coefficients.
    pub fn equivalent(&self, other: &BodyPair, tol: f64) -> bool {
        let lhs = self.first.support().add(other.second.support());
        let rhs = self.second.support().add(other.first.support());
        lhs.coeff_distance(&rhs) <= tol
    }

    /// Norm induced by [`pair_scalar_product`].
    pub fn norm(&self) -> f64 {
        libm::sqrt(pair_scalar_product(self, self).max(0.0))
    }
}

/// `∫_{S_B} (P_{A1} - P_{A2})(P_{B1} - P_{B2}) dθ` over the unit circle.
pub fn pair_scalar_product(a: &BodyPair, b: &BodyPair) -> f64 {
    let p1 = a.difference();
    let p2 = b.difference();
    // exact for the product of two trigonometric polynomials
    let n = (2 * (p1.order().max(p2.order()) + 1)).max(a.first.n_theta().min(b.first.n_theta()));
    let vals: Vec<f64> = uniform_angles(n)
        .into_iter()
        .map(|t| p1.eval(t) * p2.eval(t))
        .collect();
    periodic_trapezoid(&vals)
}
