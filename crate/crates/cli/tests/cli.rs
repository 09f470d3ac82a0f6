//! End-to-end runs of the `ispd` binary.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::Command;

use ispd::formats::{Metadata, SigmaTable, Table};
use ispd_core::{OperatorKind, SFunction};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ispd(args: &[&str], dir: &Path) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ispd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn ispd");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const DISK: &str = "a0 = 1.0\n";
const OVAL: &str = "a0 = 1.0\nn_theta = 512\n\n[[modes]]\nk = 2\na = 0.2\n";

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `(field, index) -> value` of solution `id` in a solutions table.
fn solution_field(t: &Table, id: &str, field: &str, index: &str) -> Option<f64> {
    t.rows
        .iter()
        .find(|r| r[0] == id && r[1] == field && r[2] == index)
        .map(|r| r[3].parse().unwrap())
}

fn exact_table(value: f64, operator: OperatorKind, j_max: usize) -> String {
    let data = (1..=j_max)
        .map(|j| SFunction::constant(j, value, 256))
        .collect();
    SigmaTable {
        operator,
        c: 0.0,
        extra: Metadata::default(),
        data,
    }
    .render()
}

#[test]
fn forward_disk_membrane() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "disk.toml", DISK);
    let r = ispd(
        &[
            "forward",
            "--domain",
            "disk.toml",
            "--jmax",
            "2",
            "--out",
            "s.tsv",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = SigmaTable::parse(&read(dir.path(), "s.tsv")).unwrap();
    assert_eq!(t.operator, OperatorKind::Membrane);
    assert_eq!(t.data.len(), 2);
    // the first mode is radial, so its trace is constant
    for v in &t.data[0].sigma {
        assert!((v - 1.0 / PI).abs() < 0.01 / PI, "{v}");
    }
    // the second eigenvalue is double; one eigenfunction averages to 1/π
    assert!((mean(&t.data[1].sigma) - 1.0 / PI).abs() < 0.01 / PI);
    assert!(t.extra.get("lambda_1").is_some() && t.extra.get("spacing").is_some());
}

#[test]
fn forward_disk_plate() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "disk.toml", DISK);
    let r = ispd(
        &[
            "forward",
            "--domain",
            "disk.toml",
            "--operator",
            "plate",
            "--jmax",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = SigmaTable::parse(&r.stdout).unwrap();
    assert_eq!(t.operator, OperatorKind::Plate);
    assert!((mean(&t.data[0].sigma) - 2.0 / PI).abs() < 0.02 * 2.0 / PI);
}

#[test]
fn malformed_domain_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("a0 = 1.0\n[[modes]]\nk = 0\na = 0.1\n", "modes[0].k"),
        ("a0 = -2.0\n", "a0"),
        ("n_theta = 256\n", "a0"),
        ("a0 = 1.0\nradius = 3.0\n", "radius"),
        ("a0 = 1.0\n[[modes]]\nk = 3\na = 0.5\n", "modes"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let name = format!("bad{i}.toml");
        write(dir.path(), &name, text);
        let r = ispd(&["forward", "--domain", &name], dir.path());
        assert_eq!(r.code, 2, "{text}: {}", r.stderr);
        assert!(r.stderr.contains(field), "{text}: {}", r.stderr);
    }
    let r = ispd(&["forward", "--domain", "missing.toml"], dir.path());
    assert_eq!(r.code, 2);
    write(dir.path(), "disk.toml", DISK);
    let r = ispd(
        &[
            "forward",
            "--domain",
            "disk.toml",
            "--operator",
            "plate",
            "--c",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 2, "{}", r.stderr);
}

fn report(text: &str) -> Table {
    Table::parse(
        text,
        &[
            "identity",
            "domain",
            "j",
            "computed",
            "expected",
            "residual",
            "resolution",
            "tolerance",
            "pass",
        ],
    )
    .unwrap()
}

#[test]
fn verify_interval_identity() {
    let dir = tempfile::tempdir().unwrap();
    let r = ispd(
        &[
            "verify",
            "--interval",
            "0,1",
            "--identities",
            "eq14",
            "--out",
            "r.tsv",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = report(&read(dir.path(), "r.tsv"));
    assert_eq!(t.rows.len(), 4);
    for row in &t.rows {
        let computed: f64 = row[3].parse().unwrap();
        assert!((computed - 2.0).abs() < 2e-3);
        assert_eq!(row[8], "true");
    }
}

#[test]
fn verify_lemma_on_random_pair() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "oval.toml", OVAL);
    let r = ispd(
        &[
            "verify",
            "--domain",
            "oval.toml",
            "--identities",
            "lemma1,eq20",
            "--seed",
            "7",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = report(&r.stdout);
    assert_eq!(t.rows.len(), 2);
    for row in &t.rows {
        assert!(row[5].parse::<f64>().unwrap().abs() <= 1e-10);
    }
}

#[test]
fn verify_relation_improves_with_refinement() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "disk.toml", DISK);
    let r = ispd(
        &[
            "verify",
            "--domain",
            "disk.toml",
            "--identities",
            "eq10",
            "--spacing",
            "0.04,0.02",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = report(&r.stdout);
    let trend = t
        .rows
        .iter()
        .find(|row| row[0] == "eq10-trend")
        .expect("trend row");
    assert!(trend[5].parse::<f64>().unwrap() < 0.0);

    // listing the spacings fine to coarse makes the trend row fail
    let r = ispd(
        &[
            "verify",
            "--domain",
            "disk.toml",
            "--identities",
            "eq10",
            "--spacing",
            "0.02,0.04",
            "--out",
            "r.tsv",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stderr.contains("eq10-trend"));
    assert!(report(&read(dir.path(), "r.tsv"))
        .rows
        .iter()
        .any(|row| row[8] == "false"));
}

#[test]
fn verify_rejects_unknown_or_misplaced_identities() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "disk.toml", DISK);
    assert_eq!(
        ispd(
            &["verify", "--domain", "disk.toml", "--identities", "eq99"],
            dir.path()
        )
        .code,
        2
    );
    assert_eq!(
        ispd(
            &["verify", "--domain", "disk.toml", "--identities", "eq14"],
            dir.path()
        )
        .code,
        2
    );
    assert_eq!(
        ispd(
            &["verify", "--interval", "1,2", "--identities", "eq14"],
            dir.path()
        )
        .code,
        2
    );
    assert_eq!(
        ispd(&["verify", "--interval", "-1,1", "--c", "1"], dir.path()).code,
        2
    );
}

#[test]
fn invert_exact_disk_data() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "disk.tsv",
        &exact_table(1.0 / PI, OperatorKind::Membrane, 1),
    );
    let r = ispd(
        &[
            "invert",
            "disk.tsv",
            "--basis-order",
            "0",
            "--rhs",
            "2",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = Table::parse(
        &read(dir.path(), "out/solutions.tsv"),
        &["solution", "field", "index", "value"],
    )
    .unwrap();
    let alpha = solution_field(&t, "0", "alpha", "1").unwrap();
    assert!((alpha - 1.0).abs() < 1e-9, "{alpha}");
    let b = Table::parse(
        &read(dir.path(), "out/boundary.tsv"),
        &["solution", "theta", "x", "y"],
    )
    .unwrap();
    assert_eq!(b.rows.len(), 256);
    for row in &b.rows {
        let (x, y): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
        assert!((x.hypot(y) - 1.0).abs() < 1e-9);
    }

    // the plate relation with σ ≡ 2/π gives the same disk
    write(
        dir.path(),
        "plate.tsv",
        &exact_table(2.0 / PI, OperatorKind::Plate, 1),
    );
    let r = ispd(
        &[
            "invert",
            "plate.tsv",
            "--basis-order",
            "0",
            "--rhs",
            "4",
            "--out",
            "p",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = Table::parse(
        &read(dir.path(), "p/solutions.tsv"),
        &["solution", "field", "index", "value"],
    )
    .unwrap();
    assert!((solution_field(&t, "0", "alpha", "1").unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn invert_inconsistent_data_has_no_solution() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "zero.tsv",
        &exact_table(0.0, OperatorKind::Membrane, 3),
    );
    let r = ispd(&["invert", "zero.tsv", "--out", "out"], dir.path());
    assert_eq!(r.code, 4, "{}", r.stderr);
    write(
        dir.path(),
        "disk.tsv",
        &exact_table(1.0 / PI, OperatorKind::Membrane, 1),
    );
    let r = ispd(
        &["invert", "disk.tsv", "--rhs", "4", "--out", "out"],
        dir.path(),
    );
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn forward_then_invert_recovers_the_oval() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "oval.toml", OVAL);
    let r = ispd(
        &[
            "forward",
            "--domain",
            "oval.toml",
            "--jmax",
            "4",
            "--out",
            "s.tsv",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = ispd(
        &[
            "invert",
            "s.tsv",
            "--basis-order",
            "2",
            "--seed",
            "3",
            "--svg",
            "--out",
            "inv",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(read(dir.path(), "inv/boundary.svg").starts_with("<svg"));
    let t = Table::parse(
        &read(dir.path(), "inv/solutions.tsv"),
        &["solution", "field", "index", "value"],
    )
    .unwrap();
    assert_eq!(
        t.rows
            .iter()
            .find(|r| r[0] == "0" && r[1] == "status")
            .unwrap()[3],
        "convex"
    );
    let a0 = solution_field(&t, "0", "support_a0", "0").unwrap();
    let modes: Vec<(f64, f64)> = (1..=2)
        .map(|k| {
            let k = k.to_string();
            (
                solution_field(&t, "0", "support_a", &k).unwrap(),
                solution_field(&t, "0", "support_b", &k).unwrap(),
            )
        })
        .collect();
    let sup = (0..1024)
        .map(|i| {
            let th = TAU * i as f64 / 1024.0;
            let h = a0
                + modes
                    .iter()
                    .enumerate()
                    .map(|(k, (a, b))| {
                        let kt = (k + 1) as f64 * th;
                        a * kt.cos() + b * kt.sin()
                    })
                    .sum::<f64>();
            (h - 1.0 - 0.2 * (2.0 * th).cos()).abs()
        })
        .fold(0.0f64, f64::max);
    assert!(sup <= 0.05, "sup error {sup}");
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "oval.toml", OVAL);
    for name in ["a", "b"] {
        let s = format!("{name}.tsv");
        assert_eq!(
            ispd(
                &[
                    "forward",
                    "--domain",
                    "oval.toml",
                    "--jmax",
                    "3",
                    "--out",
                    &s
                ],
                dir.path()
            )
            .code,
            0
        );
        let out = format!("inv_{name}");
        assert_eq!(
            ispd(
                &["invert", &s, "--starts", "5", "--seed", "11", "--out", &out],
                dir.path()
            )
            .code,
            0
        );
        let rep = format!("rep_{name}.tsv");
        let r = ispd(
            &[
                "verify",
                "--domain",
                "oval.toml",
                "--identities",
                "eq10,lemma1",
                "--out",
                &rep,
            ],
            dir.path(),
        );
        assert_eq!(r.code, 0, "{}", r.stderr);
    }
    assert_eq!(read(dir.path(), "a.tsv"), read(dir.path(), "b.tsv"));
    assert_eq!(
        read(dir.path(), "inv_a/solutions.tsv"),
        read(dir.path(), "inv_b/solutions.tsv")
    );
    assert_eq!(
        read(dir.path(), "inv_a/boundary.tsv"),
        read(dir.path(), "inv_b/boundary.tsv")
    );
    assert_eq!(read(dir.path(), "rep_a.tsv"), read(dir.path(), "rep_b.tsv"));
}

fn circle_samples(r: f64, n: usize, s: impl Fn(f64, f64) -> f64) -> String {
    let mut out = String::from("j\tx\ty\ts\n");
    for i in 0..n {
        let t = TAU * i as f64 / n as f64;
        let (x, y) = (r * t.cos(), r * t.sin());
        out.push_str(&format!("1\t{x:e}\t{y:e}\t{:e}\n", s(x, y)));
    }
    out
}

#[test]
fn convert_point_samples() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "unit.tsv",
        &circle_samples(1.0, 200, |_, _| 1.0 / PI),
    );
    let r = ispd(&["convert", "unit.tsv", "--ntheta", "128"], dir.path());
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = SigmaTable::parse(&r.stdout).unwrap();
    assert!(t.data[0].sigma.iter().all(|v| (v - 1.0 / PI).abs() < 1e-12));

    write(
        dir.path(),
        "big.tsv",
        &circle_samples(2.0, 300, |x, y| 1.0 / (PI * (x * x + y * y))),
    );
    let r = ispd(
        &[
            "convert",
            "big.tsv",
            "--extension",
            "degree-2",
            "--out",
            "big_sigma.tsv",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = SigmaTable::parse(&read(dir.path(), "big_sigma.tsv")).unwrap();
    assert_eq!(t.n_theta(), 512);
    assert_eq!(t.extra.get("extension"), Some("degree-2"));
    assert!(t.data[0]
        .sigma
        .iter()
        .all(|v| (v - 0.25 / PI).abs() < 1e-12));

    // the converted table inverts to the radius-2 disk
    let r = ispd(
        &[
            "invert",
            "big_sigma.tsv",
            "--basis-order",
            "0",
            "--out",
            "inv",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = Table::parse(
        &read(dir.path(), "inv/solutions.tsv"),
        &["solution", "field", "index", "value"],
    )
    .unwrap();
    assert!((solution_field(&s, "0", "alpha", "1").unwrap() - 2.0).abs() < 1e-9);

    write(
        dir.path(),
        "flat.tsv",
        "j\tx\ty\ts\n1\t0\t0\t1\n1\t1\t0\t1\n1\t2\t0\t1\n1\t3\t0\t1\n1\t3\t1\t1\n1\t0\t1\t1\n",
    );
    let r = ispd(&["convert", "flat.tsv"], dir.path());
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not strictly convex"), "{}", r.stderr);
}

#[test]
fn sweep_interval_batch() {
    let dir = tempfile::tempdir().unwrap();
    let r = ispd(
        &[
            "sweep-1d", "--a", "0,1", "--b", "2", "--c", "0,2", "--jmax", "3", "--out", "s.tsv",
        ],
        dir.path(),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = Table::parse(
        &read(dir.path(), "s.tsv"),
        &[
            "a",
            "b",
            "c",
            "j",
            "lambda",
            "J_a",
            "J_b",
            "identity_residual",
        ],
    )
    .unwrap();
    assert_eq!(t.rows.len(), 12);
    for row in &t.rows {
        assert!(row[7].parse::<f64>().unwrap().abs() < 1e-3);
    }
    // the potential is singular at 0 inside (-1, 1)
    assert_eq!(
        ispd(&["sweep-1d", "--a=-1", "--b", "1", "--c", "1"], dir.path()).code,
        2
    );
}
