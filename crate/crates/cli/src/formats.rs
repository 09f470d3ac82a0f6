//! Text formats: domain specs (TOML), tab-separated tables with `# key = value`
//! metadata, and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use ispd_core::support::uniform_angles;
use ispd_core::{ConvexBody, OperatorKind, SFunction, SupportFn, DEFAULT_NTHETA};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// One Fourier mode `a cos kθ + b sin kθ` of a domain spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: usize,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

/// Support function `a0 + Σ a_k cos kθ + b_k sin kθ` and quadrature size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub a0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(default)]
    pub modes: Vec<ModeSpec>,
}

impl DomainSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: DomainSpec =
            toml::from_str(text).map_err(|e| CliError::BadInput(format!("domain spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?).map_err(|e| match e {
            CliError::BadInput(m) => CliError::BadInput(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("domain spec serializes")
    }

    pub fn from_support(h: &SupportFn, n_theta: Option<usize>) -> Self {
        let modes = h
            .modes()
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| ModeSpec { k: i + 1, a, b })
            .collect();
        DomainSpec {
            a0: h.a0(),
            n_theta,
            modes,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |field: String, msg: &str| {
            Err(CliError::BadInput(format!(
                "domain spec: field `{field}`: {msg}"
            )))
        };
        if !self.a0.is_finite() || self.a0 <= 0.0 {
            return bad("a0".into(), "must be a positive finite number");
        }
        if let Some(n) = self.n_theta {
            if n < 16 {
                return bad("n_theta".into(), "must be at least 16");
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, m) in self.modes.iter().enumerate() {
            if m.k == 0 {
                return bad(
                    format!("modes[{i}].k"),
                    "must be >= 1 (the constant term is a0)",
                );
            }
            if !seen.insert(m.k) {
                return bad(format!("modes[{i}].k"), "repeats an earlier mode");
            }
            if !m.a.is_finite() {
                return bad(format!("modes[{i}].a"), "must be finite");
            }
            if !m.b.is_finite() {
                return bad(format!("modes[{i}].b"), "must be finite");
            }
        }
        Ok(())
    }

    pub fn support(&self) -> Result<SupportFn> {
        let triples: Vec<(usize, f64, f64)> = self.modes.iter().map(|m| (m.k, m.a, m.b)).collect();
        Ok(SupportFn::from_modes(self.a0, &triples)?)
    }

    /// Quadrature size: the override, the spec value or the default.
    pub fn n_theta_or(&self, over: Option<usize>) -> usize {
        over.or(self.n_theta).unwrap_or(DEFAULT_NTHETA)
    }

    pub fn body(&self, n_theta: Option<usize>) -> Result<ConvexBody> {
        ConvexBody::new(self.support()?, self.n_theta_or(n_theta))
            .map_err(|e| CliError::BadInput(format!("domain spec: field `modes`: {e}")))
    }
}

/// Ordered `key = value` metadata written as `# key = value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| CliError::BadInput(format!("missing metadata `{key}`")))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        v.parse()
            .map_err(|_| CliError::BadInput(format!("metadata `{key}`: `{v}` is not a number")))
    }
}

/// Tab-separated table with a metadata preamble and a header line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub meta: Metadata,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            meta: Metadata::default(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta.0 {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.header.join("\t"));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join("\t"));
        }
        out
    }

    /// Parses a table and checks that its header is `expected`.
    pub fn parse(text: &str, expected: &[&str]) -> Result<Self> {
        let mut t = Table::default();
        let mut header_seen = false;
        for (no, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if header_seen {
                    continue;
                }
                if let Some((k, v)) = rest.split_once('=') {
                    t.meta.push(k.trim(), v.trim());
                }
                continue;
            }
            let cells: Vec<String> = line.split('\t').map(|s| s.trim().to_string()).collect();
            if !header_seen {
                if cells != expected {
                    return Err(CliError::BadInput(format!(
                        "line {}: expected header `{}`, found `{}`",
                        no + 1,
                        expected.join("\t"),
                        cells.join("\t")
                    )));
                }
                t.header = cells;
                header_seen = true;
                continue;
            }
            if cells.len() != expected.len() {
                return Err(CliError::BadInput(format!(
                    "line {}: expected {} columns, found {}",
                    no + 1,
                    expected.len(),
                    cells.len()
                )));
            }
            t.rows.push(cells);
        }
        if !header_seen {
            return Err(CliError::BadInput(format!(
                "missing header `{}`",
                expected.join("\t")
            )));
        }
        Ok(t)
    }
}

pub fn parse_cell<T: std::str::FromStr>(cell: &str, column: &str, row: usize) -> Result<T> {
    cell.parse().map_err(|_| {
        CliError::BadInput(format!(
            "row {}: column `{column}`: cannot parse `{cell}`",
            row + 1
        ))
    })
}

pub const SIGMA_HEADER: [&str; 3] = ["j", "theta", "sigma"];

/// `σ_j(θ_i)` for `j = 1..J` on a uniform grid of outward normals.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaTable {
    pub operator: OperatorKind,
    pub c: f64,
    /// Everything besides the fixed keys, kept in order.
    pub extra: Metadata,
    pub data: Vec<SFunction>,
}

pub fn parse_operator(s: &str) -> Result<OperatorKind> {
    match s {
        "membrane" => Ok(OperatorKind::Membrane),
        "plate" => Ok(OperatorKind::Plate),
        other => Err(CliError::BadInput(format!(
            "operator must be `membrane` or `plate`, found `{other}`"
        ))),
    }
}

const FIXED_KEYS: [&str; 6] = [
    "operator",
    "c",
    "normalization",
    "indexing",
    "n_theta",
    "j_max",
];

impl SigmaTable {
    pub fn n_theta(&self) -> usize {
        self.data.first().map_or(0, |s| s.n_theta())
    }

    pub fn render(&self) -> String {
        let mut t = Table::new(&SIGMA_HEADER);
        t.meta.push("operator", self.operator.name());
        t.meta.push("c", fmt_f64(self.c));
        t.meta.push("normalization", "unit-L2");
        t.meta.push("indexing", "normal-direction");
        t.meta.push("n_theta", self.n_theta());
        t.meta.push("j_max", self.data.len());
        t.meta.0.extend(self.extra.0.iter().cloned());
        for s in &self.data {
            for (theta, v) in s.thetas().into_iter().zip(&s.sigma) {
                t.push(vec![s.j.to_string(), fmt_f64(theta), fmt_f64(*v)]);
            }
        }
        t.render()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = Table::parse(text, &SIGMA_HEADER)?;
        let operator = parse_operator(t.meta.require("operator")?)?;
        let c = t.meta.require_f64("c")?;
        for (key, want) in [
            ("normalization", "unit-L2"),
            ("indexing", "normal-direction"),
        ] {
            let got = t.meta.require(key)?;
            if got != want {
                return Err(CliError::BadInput(format!(
                    "metadata `{key}`: expected `{want}`, found `{got}`"
                )));
            }
        }
        let mut groups: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
        for (i, r) in t.rows.iter().enumerate() {
            let j: usize = parse_cell(&r[0], "j", i)?;
            let theta: f64 = parse_cell(&r[1], "theta", i)?;
            let sigma: f64 = parse_cell(&r[2], "sigma", i)?;
            if !(sigma >= 0.0) || !sigma.is_finite() {
                return Err(CliError::BadInput(format!(
                    "row {}: column `sigma`: must be finite and >= 0",
                    i + 1
                )));
            }
            match groups.last_mut() {
                Some((gj, g)) if *gj == j => g.push((theta, sigma)),
                _ => {
                    if groups.iter().any(|(gj, _)| *gj == j) {
                        return Err(CliError::BadInput(format!(
                            "row {}: rows of j = {j} are not contiguous",
                            i + 1
                        )));
                    }
                    groups.push((j, vec![(theta, sigma)]));
                }
            }
        }
        if groups.is_empty() {
            return Err(CliError::BadInput("sigma table has no rows".into()));
        }
        let n = groups[0].1.len();
        let grid = uniform_angles(n);
        let tol = 1e-9 * std::f64::consts::TAU;
        let mut data = Vec::with_capacity(groups.len());
        for (j, g) in groups {
            if g.len() != n {
                return Err(CliError::BadInput(format!(
                    "j = {j}: {} directions, expected {n}",
                    g.len()
                )));
            }
            if let Some(i) = g
                .iter()
                .zip(&grid)
                .position(|((t, _), u)| (t - u).abs() > tol)
            {
                return Err(CliError::BadInput(format!(
                    "j = {j}: theta at position {i} is {}, expected the uniform grid value {}",
                    g[i].0, grid[i]
                )));
            }
            data.push(SFunction::new(j, g.into_iter().map(|(_, s)| s).collect()));
        }
        if let Some(v) = t.meta.get("n_theta") {
            if v != n.to_string() {
                return Err(CliError::BadInput(format!(
                    "metadata `n_theta` = {v} but the table has {n} directions"
                )));
            }
        }
        let extra = Metadata(
            t.meta
                .0
                .into_iter()
                .filter(|(k, _)| !FIXED_KEYS.contains(&k.as_str()))
                .collect(),
        );
        Ok(SigmaTable {
            operator,
            c,
            extra,
            data,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?).map_err(|e| match e {
            CliError::BadInput(m) => CliError::BadInput(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}
