use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ispd::commands::{self, ForwardArgs, InvertArgs, SweepArgs, ToleranceProfile, VerifyArgs};
use ispd::convert::{parse_point_samples, Extension};
use ispd::formats::{parse_operator, read_text, write_atomic, DomainSpec, SigmaTable};
use ispd::{CliError, ExitKind};
use ispd_core::{OperatorKind, DEFAULT_NTHETA};

#[derive(Parser)]
#[command(
    name = "ispd",
    version,
    about = "Boundary eigen-data of convex planar bodies and reconstruction from it"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the eigenproblem on a domain and write its s-function table.
    Forward {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value = "membrane", value_parser = operator)]
        operator: OperatorKind,
        /// Strength of the potential c/|x|^2.
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long, default_value_t = 4)]
        jmax: usize,
        /// Grid spacing; defaults to a fixed fraction of the mean radius.
        #[arg(long)]
        spacing: Option<f64>,
        /// Number of normal directions; overrides the domain file.
        #[arg(long)]
        ntheta: Option<usize>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the identities and write a residual report.
    Verify {
        #[arg(long)]
        domain: Option<PathBuf>,
        /// Interval endpoints `a,b` for the one-dimensional identities.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        interval: Option<Vec<f64>>,
        #[arg(long, default_value = "membrane", value_parser = operator)]
        operator: OperatorKind,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long, default_value_t = 4)]
        jmax: usize,
        /// Comma-separated identity ids; every applicable one when absent.
        #[arg(long, value_delimiter = ',')]
        identities: Vec<String>,
        /// Comma-separated grid spacings, coarse to fine.
        #[arg(long, value_delimiter = ',')]
        spacing: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        n_grid: usize,
        #[arg(long)]
        ntheta: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "default")]
        tolerance_profile: ToleranceProfile,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct support functions from an s-function table.
    Invert {
        /// Sigma table written by `forward` or `convert`.
        table: PathBuf,
        /// Highest Fourier order K of the basis.
        #[arg(long, default_value_t = 2)]
        basis_order: usize,
        /// Right-hand side of the relation, 2 (membrane) or 4 (plate); checked
        /// against the table.
        #[arg(long)]
        rhs: Option<f64>,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Solutions with a larger max |r_j| are discarded.
        #[arg(long, default_value_t = 0.1)]
        residual_tol: f64,
        /// Replace a non-convex best solution by a nearby convex one.
        #[arg(long)]
        project: bool,
        /// Also write boundary.svg.
        #[arg(long)]
        svg: bool,
        /// Points per boundary polyline.
        #[arg(long, default_value_t = 256)]
        ntheta: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn s-values sampled along a convex locus into an s-function table.
    Convert {
        /// Table with columns j, x, y, s.
        input: PathBuf,
        #[arg(long, default_value = "none")]
        extension: Extension,
        #[arg(long, default_value_t = DEFAULT_NTHETA)]
        ntheta: usize,
        #[arg(long, default_value = "membrane", value_parser = operator)]
        operator: OperatorKind,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interval eigenvalues and endpoint s-values over a parameter grid.
    #[command(name = "sweep-1d")]
    Sweep1d {
        #[arg(long, value_delimiter = ',', default_value = "0")]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        b: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        c: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        jmax: usize,
        #[arg(long, default_value_t = 1000)]
        n_grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn operator(s: &str) -> Result<OperatorKind, String> {
    parse_operator(s).map_err(|e| e.to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn label(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn run(cli: Cli) -> Result<ExitKind, CliError> {
    match cli.command {
        Command::Forward {
            domain,
            operator,
            c,
            jmax,
            spacing,
            ntheta,
            out,
        } => {
            let args = ForwardArgs {
                domain: DomainSpec::load(&domain)?,
                operator,
                c,
                j_max: jmax,
                spacing,
                n_theta: ntheta,
            };
            emit(out.as_deref(), &commands::forward(&args)?.render())?;
            Ok(ExitKind::Ok)
        }
        Command::Verify {
            domain,
            interval,
            operator,
            c,
            jmax,
            identities,
            spacing,
            n_grid,
            ntheta,
            seed,
            tolerance_profile,
            out,
        } => {
            let domain = match domain {
                Some(p) => Some((label(&p), DomainSpec::load(&p)?)),
                None => None,
            };
            let interval = match interval.as_deref() {
                None => None,
                Some(&[a, b]) => Some((a, b)),
                Some(_) => {
                    return Err(CliError::BadInput(
                        "--interval takes two values `a,b`".into(),
                    ))
                }
            };
            let args = VerifyArgs {
                domain,
                interval,
                operator,
                c,
                j_max: jmax,
                identities,
                spacings: spacing,
                n_grid,
                n_theta: ntheta,
                seed,
                profile: tolerance_profile,
            };
            let report = commands::verify(&args)?;
            emit(out.as_deref(), &report.render())?;
            if report.all_pass() {
                Ok(ExitKind::Ok)
            } else {
                let failed: Vec<String> = report
                    .rows
                    .iter()
                    .filter(|r| !r.pass)
                    .map(|r| {
                        format!(
                            "{} j={} residual {:e} (tol {:e})",
                            r.identity, r.j, r.residual, r.tolerance
                        )
                    })
                    .collect();
                eprintln!("ispd: tolerance breach: {}", failed.join("; "));
                Ok(ExitKind::ToleranceBreach)
            }
        }
        Command::Invert {
            table,
            basis_order,
            rhs,
            starts,
            seed,
            residual_tol,
            project,
            svg,
            ntheta,
            out,
        } => {
            let data = SigmaTable::load(&table)?;
            let args = InvertArgs {
                basis_order,
                rhs,
                starts,
                seed,
                residual_tol,
                project,
            };
            let res = commands::invert(&data, &args)?;
            write_atomic(&out.join("solutions.tsv"), &res.solutions_table().render())?;
            write_atomic(
                &out.join("boundary.tsv"),
                &res.boundary_table(ntheta).render(),
            )?;
            if svg {
                write_atomic(&out.join("boundary.svg"), &res.svg(ntheta))?;
            }
            if res.has_convex() {
                Ok(ExitKind::Ok)
            } else {
                Err(CliError::NoSolution(format!(
                    "no convex solution with max residual <= {residual_tol} ({} non-convex found)",
                    res.solutions.len()
                )))
            }
        }
        Command::Convert {
            input,
            extension,
            ntheta,
            operator,
            c,
            out,
        } => {
            let samples = parse_point_samples(&read_text(&input)?)?;
            let table = commands::convert(&samples, extension, ntheta, operator, c)?;
            emit(out.as_deref(), &table.render())?;
            Ok(ExitKind::Ok)
        }
        Command::Sweep1d {
            a,
            b,
            c,
            jmax,
            n_grid,
            out,
        } => {
            let t = commands::sweep_1d(&SweepArgs {
                a,
                b,
                c,
                j_max: jmax,
                n_grid,
            })?;
            emit(out.as_deref(), &t.render())?;
            Ok(ExitKind::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                ExitKind::BadInput as u8
            } else {
                0
            });
        }
    };
    match run(cli) {
        Ok(k) => ExitCode::from(k as u8),
        Err(e) => {
            eprintln!("ispd: {e}");
            ExitCode::from(e.exit_kind() as u8)
        }
    }
}
