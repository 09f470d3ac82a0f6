//! Conversion of s-values sampled at points of a closed convex locus into
//! functions of the outward normal.

use std::f64::consts::TAU;
use std::str::FromStr;

use ispd_core::support::uniform_angles;
use ispd_core::{Error, SFunction};

use crate::error::{CliError, Result};
use crate::formats::{parse_cell, Table};

pub const POINT_HEADER: [&str; 4] = ["j", "x", "y", "s"];

/// How the point data is understood off the locus. Recorded in the output
/// metadata; the conversion itself only reads values on the locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    None,
    /// `s(tx) = t⁻² s(x)`.
    DegreeMinus2,
    /// `s(tx) = s(x)`.
    ConstantRay,
}

impl Extension {
    pub fn name(self) -> &'static str {
        match self {
            Extension::None => "none",
            Extension::DegreeMinus2 => "degree-2",
            Extension::ConstantRay => "constant-ray",
        }
    }
}

impl FromStr for Extension {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(Extension::None),
            "degree-2" | "degree-minus-2" => Ok(Extension::DegreeMinus2),
            "constant-ray" => Ok(Extension::ConstantRay),
            other => Err(format!(
                "unknown extension `{other}` (none | degree-2 | constant-ray)"
            )),
        }
    }
}

/// Values of one s-function at the vertices of a closed polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSamples {
    pub j: usize,
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
}

pub fn parse_point_samples(text: &str) -> Result<Vec<PointSamples>> {
    let t = Table::parse(text, &POINT_HEADER)?;
    let mut out: Vec<PointSamples> = Vec::new();
    for (i, r) in t.rows.iter().enumerate() {
        let j: usize = parse_cell(&r[0], "j", i)?;
        let p = [parse_cell(&r[1], "x", i)?, parse_cell(&r[2], "y", i)?];
        let s: f64 = parse_cell(&r[3], "s", i)?;
        match out.last_mut() {
            Some(g) if g.j == j => {
                g.points.push(p);
                g.values.push(s);
            }
            _ => out.push(PointSamples {
                j,
                points: vec![p],
                values: vec![s],
            }),
        }
    }
    Ok(out)
}

/// Outward normal angles at the vertices, unwrapped to increase from the
/// first one, with the vertex order made counterclockwise. Fails unless the
/// angles increase strictly through one full turn.
fn vertex_normals(points: &[[f64; 2]]) -> Result<(Vec<f64>, bool), Error> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InvalidInput(
            "a locus needs at least 3 points".into(),
        ));
    }
    let area2: f64 = (0..n)
        .map(|i| {
            let (p, q) = (points[i], points[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    let reversed = area2 < 0.0;
    let at = |i: usize| {
        if reversed {
            points[n - 1 - i]
        } else {
            points[i]
        }
    };
    let mut angles = Vec::with_capacity(n);
    for i in 0..n {
        let (prev, next) = (at((i + n - 1) % n), at((i + 1) % n));
        let (dx, dy) = (next[0] - prev[0], next[1] - prev[1]);
        angles.push((-dx).atan2(dy));
    }
    let mut unwrapped = Vec::with_capacity(n);
    unwrapped.push(angles[0]);
    for i in 1..=n {
        let mut d = angles[i % n] - angles[i - 1];
        d -= TAU * (d / TAU).round();
        if !(d > 1e-12) {
            let index = if reversed { n - 1 - (i % n) } else { i % n };
            return Err(Error::NonMonotoneNormals { index });
        }
        if i < n {
            unwrapped.push(unwrapped[i - 1] + d);
        } else if ((unwrapped[n - 1] + d - unwrapped[0]) - TAU).abs() > 1e-6 {
            return Err(Error::NonMonotoneNormals { index: 0 });
        }
    }
    Ok((unwrapped, reversed))
}

/// `σ(θ_i) = s` at the locus point whose outward normal is `θ_i`, for `n_theta`
/// uniform directions: the normal angle is inverted by bisection over the
/// vertices and `s` is interpolated linearly in the angle.
pub fn pointwise_to_directional(samples: &PointSamples, n_theta: usize) -> Result<SFunction> {
    if samples.points.len() != samples.values.len() {
        return Err(CliError::BadInput("point and value counts differ".into()));
    }
    let (normals, reversed) = vertex_normals(&samples.points)?;
    let n = normals.len();
    let values: Vec<f64> = if reversed {
        samples.values.iter().rev().copied().collect()
    } else {
        samples.values.clone()
    };
    let start = normals[0];
    let sigma = uniform_angles(n_theta)
        .into_iter()
        .map(|theta| {
            let t = start + (theta - start).rem_euclid(TAU);
            // largest vertex index with normal <= t
            let (mut lo, mut hi) = (0usize, n);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if normals[mid] <= t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (t1, v1) = if lo + 1 < n {
                (normals[lo + 1], values[lo + 1])
            } else {
                (start + TAU, values[0])
            };
            let w = (t - normals[lo]) / (t1 - normals[lo]);
            (1.0 - w) * values[lo] + w * v1
        })
        .collect();
    Ok(SFunction::new(samples.j, sigma))
}
