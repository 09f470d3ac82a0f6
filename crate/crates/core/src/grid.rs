//! A convex body embedded in the uniform grid `{(i h, j h)}`.
//!
//! Nodes strictly inside the body are the unknowns, numbered row by row. For
//! each unknown the four grid arms either reach another unknown or cross the
//! boundary at a fraction `t ∈ (0, 1]` of the spacing; the crossing is found
//! exactly from the support function, not from a level-set approximation.
//!
//! Grid nodes sit at integer multiples of the spacing, so scaling a body and
//! the spacing by the same factor reproduces the same discrete problem.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use libm::{ceil, cos, floor, sin};

use crate::support::ConvexBody;
use crate::{Error, Result};

/// Smallest admissible boundary fraction on an arm. Nodes closer to the
/// boundary than this keep the floor value.
const MIN_ARM_FRACTION: f64 = 1e-9;

/// Where a grid arm from an unknown ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Arm {
    /// Another unknown.
    Node(usize),
    /// The boundary, at this fraction of the spacing.
    Boundary(f64),
}

/// Arm directions in the order stored in [`GridGeometry::arms`].
pub const ARM_DIRS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Signed distance to the boundary of a convex body:
/// `max_θ (x·n(θ) - h(θ))`, negative inside.
#[derive(Clone, Debug)]
pub struct DistanceField {
    body: ConvexBody,
    cos: Vec<f64>,
    sin: Vec<f64>,
    h: Vec<f64>,
}

impl DistanceField {
    pub fn new(body: &ConvexBody) -> Self {
        let n = body.n_theta().max(256);
        let thetas: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        DistanceField {
            body: body.clone(),
            cos: thetas.iter().map(|&t| cos(t)).collect(),
            sin: thetas.iter().map(|&t| sin(t)).collect(),
            h: thetas.iter().map(|&t| body.support().eval(t)).collect(),
        }
    }

    /// Coarse value from the sampled directions, with the maximizing sample.
    fn sampled(&self, x: [f64; 2]) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for i in 0..self.h.len() {
            let g = x[0] * self.cos[i] + x[1] * self.sin[i] - self.h[i];
            if g > best {
                best = g;
                arg = i;
            }
        }
        (best, arg)
    }

    /// Signed distance with the maximizing direction refined by Newton's
    /// method on `g'(θ) = 0`.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.eval_with_normal(x).0
    }

    /// Signed distance and the direction attaining it (the outward normal of
    /// the nearest boundary point).
    pub fn eval_with_normal(&self, x: [f64; 2]) -> (f64, f64) {
        let (coarse, arg) = self.sampled(x);
        let n = self.h.len();
        let mut theta = TAU * arg as f64 / n as f64;
        let h = self.body.support();
        let g = |t: f64| {
            let (hv, dh, d2h) = h.eval_derivs(t);
            let (s, c) = (sin(t), cos(t));
            (
                x[0] * c + x[1] * s - hv,
                -x[0] * s + x[1] * c - dh,
                -x[0] * c - x[1] * s - d2h,
            )
        };
        let mut best = coarse;
        for _ in 0..12 {
            let (_, d1, d2) = g(theta);
            if d2 >= 0.0 {
                break;
            }
            let step = (-d1 / d2).clamp(-TAU / n as f64, TAU / n as f64);
            let cand = theta + step;
            let (val, _, _) = g(cand);
            if val + 1e-300 < best && step.abs() > 1e-15 {
                break;
            }
            best = best.max(val);
            theta = cand;
            if step.abs() < 1e-14 {
                break;
            }
        }
        (best, theta)
    }
}

/// Unknowns, arms and boundary geometry of a body on a uniform grid.
#[derive(Clone, Debug)]
pub struct GridGeometry {
    pub spacing: f64,
    /// Integer coordinates of the lower-left corner of the node box.
    pub origin: (i64, i64),
    pub nx: usize,
    pub ny: usize,
    /// Unknown index of each box node (row-major), `u32::MAX` when outside.
    index: Vec<u32>,
    /// Signed distance of each box node.
    dist: Vec<f64>,
    /// Integer coordinates of each unknown.
    pub nodes: Vec<(i64, i64)>,
    /// Arms of each unknown in [`ARM_DIRS`] order.
    pub arms: Vec<[Arm; 4]>,
    pub body: ConvexBody,
    field: DistanceField,
}

impl GridGeometry {
    /// Embeds `body` in the grid of the given spacing. `margin` extra node
    /// layers are kept around the bounding box.
    pub fn new(body: &ConvexBody, spacing: f64, margin: usize) -> Result<Self> {
        Self::with_clearance(body, spacing, margin, 0.0)
    }

    /// As [`GridGeometry::new`], but nodes within `clearance` spacings of the
    /// boundary are not unknowns.
    pub fn with_clearance(
        body: &ConvexBody,
        spacing: f64,
        margin: usize,
        clearance: f64,
    ) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidInput("spacing must be positive".into()));
        }
        let field = DistanceField::new(body);
        let [xmin, xmax, ymin, ymax] = body.bounding_box();
        let m = margin as i64 + 1;
        let i0 = floor(xmin / spacing) as i64 - m;
        let i1 = ceil(xmax / spacing) as i64 + m;
        let j0 = floor(ymin / spacing) as i64 - m;
        let j1 = ceil(ymax / spacing) as i64 + m;
        let nx = (i1 - i0 + 1) as usize;
        let ny = (j1 - j0 + 1) as usize;
        let mut dist = vec![0.0; nx * ny];
        let mut index = vec![u32::MAX; nx * ny];
        let mut nodes = Vec::new();
        for jj in 0..ny {
            for ii in 0..nx {
                let (gi, gj) = (i0 + ii as i64, j0 + jj as i64);
                let x = [gi as f64 * spacing, gj as f64 * spacing];
                let d = field.eval(x);
                dist[jj * nx + ii] = d;
                if d < -clearance * spacing {
                    index[jj * nx + ii] = nodes.len() as u32;
                    nodes.push((gi, gj));
                }
            }
        }
        let mut geo = GridGeometry {
            spacing,
            origin: (i0, j0),
            nx,
            ny,
            index,
            dist,
            nodes,
            arms: Vec::new(),
            body: body.clone(),
            field,
        };
        geo.arms = (0..geo.nodes.len()).map(|p| geo.compute_arms(p)).collect();
        Ok(geo)
    }

    #[inline]
    pub fn n_unknowns(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn position(&self, node: (i64, i64)) -> [f64; 2] {
        [node.0 as f64 * self.spacing, node.1 as f64 * self.spacing]
    }

    #[inline]
    pub fn unknown_position(&self, p: usize) -> [f64; 2] {
        self.position(self.nodes[p])
    }

    fn box_offset(&self, node: (i64, i64)) -> Option<usize> {
        let ii = node.0 - self.origin.0;
        let jj = node.1 - self.origin.1;
        if ii < 0 || jj < 0 || ii >= self.nx as i64 || jj >= self.ny as i64 {
            return None;
        }
        Some(jj as usize * self.nx + ii as usize)
    }

    /// Unknown index of a grid node, if it is inside the body.
    pub fn unknown_at(&self, node: (i64, i64)) -> Option<usize> {
        let off = self.box_offset(node)?;
        let v = self.index[off];
        (v != u32::MAX).then_some(v as usize)
    }

    /// Signed distance of any point.
    pub fn signed_distance(&self, x: [f64; 2]) -> f64 {
        self.field.eval(x)
    }

    /// Signed distance of a grid node (cached inside the node box).
    pub fn node_distance(&self, node: (i64, i64)) -> f64 {
        match self.box_offset(node) {
            Some(off) => self.dist[off],
            None => self.field.eval(self.position(node)),
        }
    }

    /// Distance from an interior point `x` to the boundary along the unit
    /// direction `e`, searched within `[0, max_len]`.
    pub fn ray_crossing(&self, x: [f64; 2], e: [f64; 2], max_len: f64) -> f64 {
        let at = |t: f64| self.field.eval([x[0] + t * e[0], x[1] + t * e[1]]);
        let (mut lo, mut hi) = (0.0, max_len);
        let (mut flo, mut fhi) = (at(lo), at(hi));
        if fhi < 0.0 {
            return max_len;
        }
        // the distance is convex along the ray; Illinois false position
        let mut side = 0i8;
        for _ in 0..100 {
            let mid = (lo * fhi - hi * flo) / (fhi - flo);
            let mid = if mid.is_finite() && mid > lo && mid < hi {
                mid
            } else {
                0.5 * (lo + hi)
            };
            let fm = at(mid);
            if fm < 0.0 {
                lo = mid;
                flo = fm;
                if side == -1 {
                    fhi *= 0.5;
                }
                side = -1;
            } else {
                hi = mid;
                fhi = fm;
                if side == 1 {
                    flo *= 0.5;
                }
                side = 1;
            }
            if hi - lo <= 1e-15 * max_len.max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn compute_arms(&self, p: usize) -> [Arm; 4] {
        ARM_DIRS.map(|d| self.arm(p, d))
    }

    /// Arm from unknown `p` along the integer step `d`; boundary fractions
    /// are in units of the step length.
    pub fn arm(&self, p: usize, d: (i64, i64)) -> Arm {
        let node = self.nodes[p];
        match self.unknown_at((node.0 + d.0, node.1 + d.1)) {
            Some(q) => Arm::Node(q),
            None => {
                let len = libm::hypot(d.0 as f64, d.1 as f64);
                let e = [d.0 as f64 / len, d.1 as f64 / len];
                let step = len * self.spacing;
                let t = self.ray_crossing(self.position(node), e, step) / step;
                Arm::Boundary(t.max(MIN_ARM_FRACTION))
            }
        }
    }

    /// True when every arm of the unknown reaches another unknown.
    pub fn is_regular(&self, p: usize) -> bool {
        self.arms[p].iter().all(|a| matches!(a, Arm::Node(_)))
    }

    /// Unknowns whose grid position lies within `radius` (in spacings) of `x`.
    pub fn unknowns_near(&self, x: [f64; 2], radius: f64) -> Vec<usize> {
        let h = self.spacing;
        let r = radius * h;
        let i_lo = floor((x[0] - r) / h) as i64;
        let i_hi = ceil((x[0] + r) / h) as i64;
        let j_lo = floor((x[1] - r) / h) as i64;
        let j_hi = ceil((x[1] + r) / h) as i64;
        let mut out = Vec::new();
        for j in j_lo..=j_hi {
            for i in i_lo..=i_hi {
                if let Some(p) = self.unknown_at((i, j)) {
                    let q = self.position((i, j));
                    let (dx, dy) = (q[0] - x[0], q[1] - x[1]);
                    if dx * dx + dy * dy <= r * r {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    /// Area of the body attributed to each unknown: the part of the body
    /// nearer to that unknown than to any other. Cells meeting the boundary
    /// are resolved with `sub × sub` sample points.
    pub fn voronoi_areas(&self, sub: usize) -> Vec<f64> {
        let h = self.spacing;
        let cell = h * h;
        let mut w = vec![0.0; self.n_unknowns()];
        let near = 0.75 * h;
        for jj in 0..self.ny {
            for ii in 0..self.nx {
                let node = (self.origin.0 + ii as i64, self.origin.1 + jj as i64);
                let d = self.dist[jj * self.nx + ii];
                let own = self.unknown_at(node);
                if d < -near {
                    if let Some(p) = own {
                        w[p] += cell;
                    }
                    continue;
                }
                if d > near {
                    continue;
                }
                let c = self.position(node);
                let ds = h / sub as f64;
                for sj in 0..sub {
                    for si in 0..sub {
                        let x = [
                            c[0] - 0.5 * h + (si as f64 + 0.5) * ds,
                            c[1] - 0.5 * h + (sj as f64 + 0.5) * ds,
                        ];
                        if self.field.eval(x) >= 0.0 {
                            continue;
                        }
                        let target = match own {
                            Some(p) => Some(p),
                            None => self.nearest_unknown(x, 2),
                        };
                        if let Some(p) = target {
                            w[p] += ds * ds;
                        }
                    }
                }
            }
        }
        w
    }

    fn nearest_unknown(&self, x: [f64; 2], reach: i64) -> Option<usize> {
        let h = self.spacing;
        let ci = libm::round(x[0] / h) as i64;
        let cj = libm::round(x[1] / h) as i64;
        let mut best: Option<(f64, usize)> = None;
        for j in cj - reach..=cj + reach {
            for i in ci - reach..=ci + reach {
                if let Some(p) = self.unknown_at((i, j)) {
                    let q = self.position((i, j));
                    let d2 = (q[0] - x[0]) * (q[0] - x[0]) + (q[1] - x[1]) * (q[1] - x[1]);
                    if best.is_none_or(|b| d2 < b.0) {
                        best = Some((d2, p));
                    }
                }
            }
        }
        best.map(|b| b.1)
    }
}
