//! The five commands. Each builds its output in memory; `main` writes files.

use std::f64::consts::TAU;

use ispd_core::inverse::{
    assemble_coefficients, build_basis, project_convex, reconstruct_domain, solve_multistart,
    BasisSpec, Mode, MultiStartOptions, ReconstructionResult,
};
use ispd_core::plate::{
    self, plate_eigenvalue_from_boundary, plate_identity_residual, plate_s_function,
};
use ispd_core::spectral_1d::{
    recover_endpoint, solve_interval_richardson, Endpoint, IntervalProblem,
};
use ispd_core::spectral_2d::{
    self, basic_relation_residual, discretize, eigen_clusters, eigenvalue_from_boundary_max,
    is_simple, s_function, shape_derivative, shape_derivative_fd, solve_eigen, PotentialSpec,
    MULTIPLICITY_TOL,
};
use ispd_core::support::{boundary_integral_normal_fn, mixed_support_integral};
use ispd_core::{ConvexBody, Direction, Error, OperatorKind, SFunction, SupportFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convert::{pointwise_to_directional, Extension, PointSamples};
use crate::error::{CliError, Result};
use crate::formats::{fmt_f64, DomainSpec, Metadata, SigmaTable, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Scale applied to every tolerance of `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ToleranceProfile {
    Default,
    Strict,
    Loose,
}

impl ToleranceProfile {
    pub fn factor(self) -> f64 {
        match self {
            ToleranceProfile::Default => 1.0,
            ToleranceProfile::Strict => 0.2,
            ToleranceProfile::Loose => 5.0,
        }
    }
}

fn potential(c: f64) -> Result<PotentialSpec> {
    PotentialSpec::new(c).map_err(CliError::from)
}

// ---------------------------------------------------------------- forward

#[derive(Clone, Debug)]
pub struct ForwardArgs {
    pub domain: DomainSpec,
    pub operator: OperatorKind,
    pub c: f64,
    pub j_max: usize,
    pub spacing: Option<f64>,
    pub n_theta: Option<usize>,
}

pub fn forward(args: &ForwardArgs) -> Result<SigmaTable> {
    if args.j_max == 0 {
        return Err(CliError::BadInput("--jmax must be >= 1".into()));
    }
    let body = args.domain.body(args.n_theta)?;
    let mut extra = Metadata::default();
    let data = match args.operator {
        OperatorKind::Membrane => {
            let spacing = args
                .spacing
                .unwrap_or_else(|| spectral_2d::default_spacing(&body));
            extra.push("spacing", fmt_f64(spacing));
            let op = discretize(&body, potential(args.c)?, spacing)?;
            let pairs = solve_eigen(&op, args.j_max)?;
            for e in &pairs {
                extra.push(&format!("lambda_{}", e.j), fmt_f64(e.lambda));
            }
            pairs
                .iter()
                .map(s_function)
                .collect::<Result<Vec<_>, _>>()?
        }
        OperatorKind::Plate => {
            if args.c != 0.0 {
                return Err(CliError::BadInput(
                    "--c: the plate operator has no potential, use c = 0".into(),
                ));
            }
            let spacing = args
                .spacing
                .unwrap_or_else(|| plate::default_spacing(&body));
            extra.push("spacing", fmt_f64(spacing));
            let pairs = plate::solve_clamped_plate(&body, args.j_max, spacing)?;
            for e in &pairs {
                extra.push(&format!("lambda_{}", e.j), fmt_f64(e.lambda));
            }
            pairs
                .iter()
                .map(plate_s_function)
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    extra.push("domain_a0", fmt_f64(args.domain.a0));
    for m in &args.domain.modes {
        extra.push(
            &format!("domain_mode_{}", m.k),
            format!("{} {}", fmt_f64(m.a), fmt_f64(m.b)),
        );
    }
    extra.push("version", VERSION);
    Ok(SigmaTable {
        operator: args.operator,
        c: args.c,
        extra,
        data,
    })
}

// ---------------------------------------------------------------- verify

pub const REPORT_HEADER: [&str; 9] = [
    "identity",
    "domain",
    "j",
    "computed",
    "expected",
    "residual",
    "resolution",
    "tolerance",
    "pass",
];

/// Identities `verify` knows, with the context each one needs.
pub const DOMAIN_IDENTITIES: [&str; 4] = ["eq5", "eq6", "eq10", "plate4"];
pub const GEOMETRY_IDENTITIES: [&str; 3] = ["lemma1", "eq20", "eq33"];
pub const INTERVAL_IDENTITIES: [&str; 3] = ["eq13", "eq14", "eq15"];

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub identity: String,
    pub domain: String,
    pub j: usize,
    pub computed: f64,
    pub expected: f64,
    pub residual: f64,
    pub resolution: f64,
    pub tolerance: f64,
    /// `|residual| <= tolerance`, or for trend rows `residual < 0`.
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub meta: Metadata,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn render(&self) -> String {
        let mut t = Table::new(&REPORT_HEADER);
        t.meta = self.meta.clone();
        for r in &self.rows {
            t.push(vec![
                r.identity.clone(),
                r.domain.clone(),
                r.j.to_string(),
                fmt_f64(r.computed),
                fmt_f64(r.expected),
                fmt_f64(r.residual),
                fmt_f64(r.resolution),
                fmt_f64(r.tolerance),
                r.pass.to_string(),
            ]);
        }
        t.render()
    }
}

#[derive(Clone, Debug)]
pub struct VerifyArgs {
    /// Label and spec of the domain, if any.
    pub domain: Option<(String, DomainSpec)>,
    pub interval: Option<(f64, f64)>,
    pub operator: OperatorKind,
    pub c: f64,
    pub j_max: usize,
    /// Empty means every identity that applies.
    pub identities: Vec<String>,
    /// Empty means the default spacing.
    pub spacings: Vec<f64>,
    pub n_grid: usize,
    pub n_theta: Option<usize>,
    pub seed: u64,
    pub profile: ToleranceProfile,
}

fn default_identities(args: &VerifyArgs) -> Vec<String> {
    let mut ids: Vec<&str> = Vec::new();
    if args.domain.is_some() {
        match args.operator {
            OperatorKind::Membrane => ids.extend(["eq10", "eq6", "eq5"]),
            OperatorKind::Plate => ids.extend(["plate4", "eq33"]),
        }
        ids.extend(["lemma1", "eq20"]);
    }
    if let Some((a, _)) = args.interval {
        ids.push("eq13");
        if a == 0.0 {
            ids.extend(["eq14", "eq15"]);
        }
    }
    ids.into_iter().map(String::from).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b) / b
}

/// Convex body drawn from `rng` with mean radius in `[0.5, 1.5)`.
fn random_body(rng: &mut ChaCha8Rng, n_theta: usize) -> ConvexBody {
    let a0 = rng.random_range(0.5..1.5);
    let mut modes = vec![(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))];
    for k in 2..=3 {
        let bound = 0.2 * a0 / (k * k - 1) as f64;
        modes.push((
            rng.random_range(-bound..bound),
            rng.random_range(-bound..bound),
        ));
    }
    ConvexBody::new(SupportFn::new(a0, modes), n_theta)
        .expect("curvature radius stays above 0.2 a0")
}

struct MembraneRun {
    spacing: f64,
    pairs: Vec<spectral_2d::EigenPair2D>,
}

pub fn verify(args: &VerifyArgs) -> Result<Report> {
    let ids = if args.identities.is_empty() {
        default_identities(args)
    } else {
        args.identities.clone()
    };
    if ids.is_empty() {
        return Err(CliError::BadInput(
            "nothing to verify: pass --domain and/or --interval".into(),
        ));
    }
    for id in &ids {
        let known = DOMAIN_IDENTITIES.contains(&id.as_str())
            || GEOMETRY_IDENTITIES.contains(&id.as_str())
            || INTERVAL_IDENTITIES.contains(&id.as_str());
        if !known {
            return Err(CliError::BadInput(format!(
                "--identities: unknown identity `{id}`"
            )));
        }
        if INTERVAL_IDENTITIES.contains(&id.as_str()) && args.interval.is_none() {
            return Err(CliError::BadInput(format!(
                "identity `{id}` needs --interval"
            )));
        }
        if !INTERVAL_IDENTITIES.contains(&id.as_str()) && args.domain.is_none() {
            return Err(CliError::BadInput(format!(
                "identity `{id}` needs --domain"
            )));
        }
        let membrane_only = ["eq5", "eq6", "eq10"].contains(&id.as_str());
        let plate_only = ["eq33", "plate4"].contains(&id.as_str());
        if (membrane_only && args.operator != OperatorKind::Membrane)
            || (plate_only && args.operator != OperatorKind::Plate)
        {
            return Err(CliError::BadInput(format!(
                "identity `{id}` does not apply to --operator {}",
                args.operator.name()
            )));
        }
    }
    if args.j_max == 0 {
        return Err(CliError::BadInput("--jmax must be >= 1".into()));
    }
    let has = |id: &str| ids.iter().any(|x| x == id);
    let f = args.profile.factor();
    let mut report = Report::default();
    report.meta.push("operator", args.operator.name());
    report.meta.push("c", fmt_f64(args.c));
    report.meta.push("j_max", args.j_max);
    report.meta.push("seed", args.seed);
    report.meta.push(
        "tolerance_profile",
        format!("{:?}", args.profile).to_lowercase(),
    );
    report.meta.push("version", VERSION);
    let rows = &mut report.rows;

    if let Some((a, b)) = args.interval {
        let label = format!("interval({},{})", fmt_f64(a), fmt_f64(b));
        let p = IntervalProblem::new(a, b, args.c, args.j_max)?;
        let res = solve_interval_richardson(&p, args.n_grid)?;
        let n = args.n_grid as f64;
        for e in &res {
            let mut row = |id: &str, computed: f64, expected: f64, residual: f64, tol: f64| {
                rows.push(ReportRow {
                    identity: id.into(),
                    domain: label.clone(),
                    j: e.j,
                    computed,
                    expected,
                    residual,
                    resolution: n,
                    tolerance: tol * f,
                    pass: residual.abs() <= tol * f,
                })
            };
            if has("eq13") {
                let v = e.j_b * b - e.j_a * a;
                row("eq13", v, 2.0, v - 2.0, 1e-3);
            }
            if has("eq14") || has("eq15") {
                if a != 0.0 {
                    return Err(CliError::BadInput(
                        "identities eq14 and eq15 need an interval starting at 0".into(),
                    ));
                }
                if has("eq14") {
                    row("eq14", e.j_b, 2.0 / b, rel(e.j_b, 2.0 / b), 1e-3);
                }
                if has("eq15") {
                    let bb = recover_endpoint(e.j_b, Endpoint::Right)?;
                    row("eq15", bb, b, rel(bb, b), 1e-3);
                }
            }
        }
    }

    if let Some((label, spec)) = &args.domain {
        let body = spec.body(args.n_theta)?;
        let q = potential(args.c)?;
        let spacings: Vec<f64> = if args.spacings.is_empty() {
            vec![match args.operator {
                OperatorKind::Membrane => spectral_2d::default_spacing(&body),
                OperatorKind::Plate => plate::default_spacing(&body),
            }]
        } else {
            args.spacings.clone()
        };
        if let Some(s) = spacings.iter().find(|s| !(**s > 0.0)) {
            return Err(CliError::BadInput(format!(
                "--spacing: {s} is not positive"
            )));
        }
        let mk =
            |id: &str, j: usize, computed: f64, expected: f64, residual: f64, h: f64, tol: f64| {
                ReportRow {
                    identity: id.into(),
                    domain: label.clone(),
                    j,
                    computed,
                    expected,
                    residual,
                    resolution: h,
                    tolerance: tol * f,
                    pass: residual.abs() <= tol * f,
                }
            };

        match args.operator {
            OperatorKind::Membrane if has("eq10") || has("eq6") || has("eq5") => {
                let runs: Vec<MembraneRun> = spacings
                    .iter()
                    .map(|&h| {
                        let op = discretize(&body, q, h)?;
                        Ok(MembraneRun {
                            spacing: h,
                            pairs: solve_eigen(&op, args.j_max)?,
                        })
                    })
                    .collect::<Result<_>>()?;
                let mut worst = Vec::new();
                for run in &runs {
                    let h = run.spacing;
                    let mut w: f64 = 0.0;
                    if has("eq10") {
                        for e in &run.pairs {
                            let r = basic_relation_residual(&body, &s_function(e)?)?;
                            w = w.max(r.abs());
                            rows.push(mk("eq10", e.j, r + 2.0, 2.0, r, h, 0.05));
                        }
                    }
                    worst.push(w);
                    if has("eq6") {
                        for cluster in eigen_clusters(&run.pairs, MULTIPLICITY_TOL) {
                            let traces: Vec<_> =
                                cluster.iter().map(|&i| &run.pairs[i].trace).collect();
                            let v = eigenvalue_from_boundary_max(&body, &traces)?;
                            for &i in &cluster {
                                let lam = run.pairs[i].lambda;
                                rows.push(mk("eq6", i + 1, v, lam, rel(v, lam), h, 0.02));
                            }
                        }
                    }
                    if has("eq5") && is_simple(&run.pairs, 0) {
                        let deltas = [
                            SupportFn::disk(1.0),
                            SupportFn::from_modes(0.0, &[(2, 1.0, 0.0)])?,
                        ];
                        for delta in &deltas {
                            let analytic = shape_derivative(&run.pairs[0].trace, &body, delta)?;
                            let fd = shape_derivative_fd(
                                &body,
                                q,
                                h,
                                delta,
                                1e-2 * body.support().mean_radius(),
                                1,
                            )?;
                            rows.push(mk("eq5", 1, analytic, fd, rel(analytic, fd), h, 0.05));
                        }
                    }
                }
                if has("eq10") && runs.len() >= 2 {
                    // max_j |r_j| at the finest spacing against the coarsest
                    let (first, last) = (worst[0], worst[worst.len() - 1]);
                    rows.push(ReportRow {
                        identity: "eq10-trend".into(),
                        domain: label.clone(),
                        j: 0,
                        computed: last,
                        expected: first,
                        residual: last - first,
                        resolution: runs[runs.len() - 1].spacing,
                        tolerance: 0.0,
                        pass: last < first,
                    });
                }
            }
            OperatorKind::Plate if has("plate4") || has("eq33") => {
                for &h in &spacings {
                    let pairs = plate::solve_clamped_plate(&body, args.j_max, h)?;
                    for e in &pairs {
                        if has("plate4") {
                            let r = plate_identity_residual(&body, &plate_s_function(e)?)?;
                            rows.push(mk("plate4", e.j, r + 4.0, 4.0, r, h, 0.1));
                        }
                        if has("eq33") {
                            let v = plate_eigenvalue_from_boundary(&body, &e.lap_trace)?;
                            rows.push(mk("eq33", e.j, v, e.lambda, rel(v, e.lambda), h, 0.03));
                        }
                    }
                }
            }
            _ => {}
        }

        if has("lemma1") || has("eq20") {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let other = random_body(&mut rng, body.n_theta());
            let n = body.n_theta() as f64;
            if has("lemma1") {
                let coeffs: Vec<(f64, f64)> = (0..6)
                    .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let g = |d: Direction| {
                    let t = d.theta();
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
                        .sum::<f64>()
                };
                let sum = body.minkowski_sum(&other);
                let lhs = boundary_integral_normal_fn(&sum, g)?;
                let rhs = boundary_integral_normal_fn(&body, g)?
                    + boundary_integral_normal_fn(&other, g)?;
                rows.push(mk("lemma1", 0, lhs, rhs, lhs - rhs, n, 1e-10));
            }
            if has("eq20") {
                let lhs = mixed_support_integral(&body, &other)?;
                let rhs = mixed_support_integral(&other, &body)?;
                rows.push(mk("eq20", 0, lhs, rhs, lhs - rhs, n, 1e-10));
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------- invert

#[derive(Clone, Debug)]
pub struct InvertArgs {
    pub basis_order: usize,
    pub rhs: Option<f64>,
    pub starts: usize,
    pub seed: u64,
    pub residual_tol: f64,
    pub project: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionStatus {
    Convex,
    NonConvex,
    Projected,
}

impl SolutionStatus {
    fn name(&self) -> &'static str {
        match self {
            SolutionStatus::Convex => "convex",
            SolutionStatus::NonConvex => "non-convex",
            SolutionStatus::Projected => "projected",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: SolutionStatus,
    pub result: ReconstructionResult,
    /// Support function written out; differs from `result.support` only for
    /// projected solutions.
    pub support: SupportFn,
}

#[derive(Clone, Debug)]
pub struct InvertOutput {
    pub meta: Metadata,
    pub basis: BasisSpec,
    pub solutions: Vec<Solution>,
}

impl InvertOutput {
    pub fn has_convex(&self) -> bool {
        self.solutions
            .iter()
            .any(|s| s.status != SolutionStatus::NonConvex)
    }

    pub fn solutions_table(&self) -> Table {
        let mut t = Table::new(&["solution", "field", "index", "value"]);
        t.meta = self.meta.clone();
        for (n, s) in self.solutions.iter().enumerate() {
            let id = n.to_string();
            let mut row = |field: &str, index: String, value: String| {
                t.push(vec![id.clone(), field.into(), index, value])
            };
            row("status", "0".into(), s.status.name().into());
            for (mode, a) in self.basis.modes().zip(&s.result.alpha) {
                row("alpha", mode_name(mode), fmt_f64(*a));
            }
            for (j, r) in s.result.residuals.iter().enumerate() {
                row("residual", (j + 1).to_string(), fmt_f64(*r));
            }
            row("max_residual", "0".into(), fmt_f64(s.result.max_residual()));
            row(
                "convexity_margin",
                "0".into(),
                fmt_f64(s.result.convexity_margin),
            );
            row("iterations", "0".into(), s.result.iterations.to_string());
            for (i, v) in s.result.singular_values.iter().enumerate() {
                row("singular_value", (i + 1).to_string(), fmt_f64(*v));
            }
            row("support_a0", "0".into(), fmt_f64(s.support.a0()));
            for (k, (a, b)) in s.support.modes().iter().enumerate() {
                row("support_a", (k + 1).to_string(), fmt_f64(*a));
                row("support_b", (k + 1).to_string(), fmt_f64(*b));
            }
        }
        t
    }

    /// Boundary points `h n + h' n^⊥` for `n` directions per solution.
    pub fn boundary_table(&self, n: usize) -> Table {
        let mut t = Table::new(&["solution", "theta", "x", "y"]);
        for (id, s) in self.solutions.iter().enumerate() {
            for (theta, [x, y]) in boundary_polyline(&s.support, n) {
                t.push(vec![id.to_string(), fmt_f64(theta), fmt_f64(x), fmt_f64(y)]);
            }
        }
        t
    }

    pub fn svg(&self, n: usize) -> String {
        let polys: Vec<Vec<[f64; 2]>> = self
            .solutions
            .iter()
            .map(|s| {
                boundary_polyline(&s.support, n)
                    .into_iter()
                    .map(|(_, p)| p)
                    .collect()
            })
            .collect();
        let ext = polys
            .iter()
            .flatten()
            .fold(1e-9f64, |m, p| m.max(p[0].abs()).max(p[1].abs()))
            * 1.1;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"480\" height=\"480\">\n",
            -ext,
            -ext,
            2.0 * ext,
            2.0 * ext
        );
        let colors = [
            "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
        ];
        let stroke = 2.0 * ext / 400.0;
        for (i, (poly, s)) in polys.iter().zip(&self.solutions).enumerate() {
            let pts: Vec<String> = poly
                .iter()
                .map(|p| format!("{:.6},{:.6}", p[0], -p[1]))
                .collect();
            let dash = if s.status == SolutionStatus::Convex {
                ""
            } else {
                " stroke-dasharray=\"4 2\""
            };
            out.push_str(&format!(
                "  <polygon points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{stroke:.6}\"{dash}/>\n",
                pts.join(" "),
                colors[i % colors.len()]
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn mode_name(m: Mode) -> String {
    match m {
        Mode::Constant => "1".into(),
        Mode::Cos(k) => format!("cos{k}"),
        Mode::Sin(k) => format!("sin{k}"),
    }
}

fn boundary_polyline(h: &SupportFn, n: usize) -> Vec<(f64, [f64; 2])> {
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            let (v, d, _) = h.eval_derivs(t);
            let (c, s) = (t.cos(), t.sin());
            (t, [v * c - d * s, v * s + d * c])
        })
        .collect()
}

pub fn invert(table: &SigmaTable, args: &InvertArgs) -> Result<InvertOutput> {
    let kind = table.operator;
    if let Some(rhs) = args.rhs {
        if rhs != kind.rhs() {
            return Err(CliError::BadInput(format!(
                "--rhs {rhs} does not match the {} table, whose relation has right-hand side {}",
                kind.name(),
                kind.rhs()
            )));
        }
    }
    let basis = build_basis(args.basis_order);
    let sys = assemble_coefficients(&basis, &table.data, kind)?;
    let mut opts = MultiStartOptions {
        starts: args.starts,
        seed: args.seed,
        residual_tol: args.residual_tol,
        ..Default::default()
    };
    if table.c == 0.0 {
        opts.solve.fixed = basis.translation_indices();
    }
    let outcome = solve_multistart(&sys, &basis, &opts).map_err(|e| match e {
        Error::NonpositiveData(v) => CliError::NoSolution(format!(
            "the data cannot satisfy the first relation (leading coefficient {v})"
        )),
        other => other.into(),
    })?;
    let n_check = table.n_theta().max(256);
    let mut solutions: Vec<Solution> = Vec::new();
    for r in outcome.solutions {
        reconstruct_domain(&r, n_check)?;
        solutions.push(Solution {
            status: SolutionStatus::Convex,
            support: r.support.clone(),
            result: r,
        });
    }
    for r in outcome.non_convex {
        if args.project && solutions.is_empty() {
            let (h, _) = project_convex(&r.support, n_check);
            solutions.push(Solution {
                status: SolutionStatus::Projected,
                support: h,
                result: r,
            });
        } else {
            solutions.push(Solution {
                status: SolutionStatus::NonConvex,
                support: r.support.clone(),
                result: r,
            });
        }
    }
    let mut meta = Metadata::default();
    meta.push("operator", kind.name());
    meta.push("c", fmt_f64(table.c));
    meta.push("rhs", fmt_f64(kind.rhs()));
    meta.push("basis_order", args.basis_order);
    meta.push(
        "basis",
        basis.modes().map(mode_name).collect::<Vec<_>>().join(","),
    );
    meta.push("translations_fixed", (table.c == 0.0).to_string());
    meta.push("starts", args.starts);
    meta.push("seed", args.seed);
    meta.push("residual_tol", fmt_f64(args.residual_tol));
    meta.push("failed_starts", outcome.failed);
    meta.push("j_max", table.data.len());
    meta.push("version", VERSION);
    Ok(InvertOutput {
        meta,
        basis,
        solutions,
    })
}

// ---------------------------------------------------------------- convert

pub fn convert(
    samples: &[PointSamples],
    extension: Extension,
    n_theta: usize,
    operator: OperatorKind,
    c: f64,
) -> Result<SigmaTable> {
    if samples.is_empty() {
        return Err(CliError::BadInput("no point samples".into()));
    }
    let data = samples
        .iter()
        .map(|s| pointwise_to_directional(s, n_theta))
        .collect::<Result<Vec<SFunction>>>()?;
    for (s, d) in samples.iter().zip(&data) {
        if let Some(v) = d.sigma.iter().find(|v| !(**v >= 0.0)) {
            return Err(CliError::BadInput(format!(
                "j = {}: s-values must be >= 0, interpolated {v}",
                s.j
            )));
        }
    }
    let mut extra = Metadata::default();
    extra.push("extension", extension.name());
    extra.push("source", "pointwise");
    extra.push("version", VERSION);
    Ok(SigmaTable {
        operator,
        c,
        extra,
        data,
    })
}

// ---------------------------------------------------------------- sweep-1d

#[derive(Clone, Debug)]
pub struct SweepArgs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub j_max: usize,
    pub n_grid: usize,
}

pub fn sweep_1d(args: &SweepArgs) -> Result<Table> {
    let mut t = Table::new(&[
        "a",
        "b",
        "c",
        "j",
        "lambda",
        "J_a",
        "J_b",
        "identity_residual",
    ]);
    t.meta.push("n_grid", args.n_grid);
    t.meta.push("extrapolation", "richardson");
    t.meta.push("version", VERSION);
    for &a in &args.a {
        for &b in &args.b {
            for &c in &args.c {
                let p = IntervalProblem::new(a, b, c, args.j_max)?;
                for e in solve_interval_richardson(&p, args.n_grid)? {
                    t.push(vec![
                        fmt_f64(a),
                        fmt_f64(b),
                        fmt_f64(c),
                        e.j.to_string(),
                        fmt_f64(e.lambda),
                        fmt_f64(e.j_a),
                        fmt_f64(e.j_b),
                        fmt_f64(e.identity_residual(&p)),
                    ]);
                }
            }
        }
    }
    Ok(t)
}
