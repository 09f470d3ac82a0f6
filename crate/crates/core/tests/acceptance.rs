//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::time::Instant;

use common::{disk_membrane_lambda, disk_plate_lambda, oval, Lcg};
use ispd_core::inverse::{
    assemble_coefficients, build_basis, default_init, residual, solve_multistart,
    solve_quadratic_system, split_residual, MultiStartOptions, SolveOptions,
};
use ispd_core::plate::{self, plate_identity_residual, plate_s_function, solve_clamped_plate};
use ispd_core::spectral_1d::{solve_interval_richardson, IntervalProblem};
use ispd_core::spectral_2d::{
    self, basic_relation_residual, discretize, eigen_clusters, eigenvalue_from_boundary_max,
    s_function, shape_derivative, shape_derivative_fd, solve_eigen, EigenPair2D, PotentialSpec,
    MULTIPLICITY_TOL,
};
use ispd_core::support::{boundary_integral_normal_fn, mixed_support_integral};
use ispd_core::{ConvexBody, OperatorKind, SFunction, SupportFn};

type Outcome = (bool, String);

fn membrane(body: &ConvexBody, spacing: f64, j_max: usize) -> Vec<EigenPair2D> {
    let op = discretize(body, PotentialSpec::none(), spacing).expect("discretize");
    solve_eigen(&op, j_max).expect("eigensolve")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn c1_interval_consequence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for b in [1.0, 2.0] {
        for c in [0.0, 1.0, 2.0] {
            let p = IntervalProblem::new(0.0, b, c, 5).unwrap();
            for e in solve_interval_richardson(&p, 2000).unwrap() {
                worst = worst.max(rel(e.j_b, 2.0 / b));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= 1e-3 && secs < 10.0,
        format!("max rel err {worst:.2e} (tol 1e-3), {secs:.2} s (limit 10 s)"),
    )
}

fn c2_interval_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for c in [0.0, 2.0] {
        let p = IntervalProblem::new(1.0, 2.0, c, 5).unwrap();
        for e in solve_interval_richardson(&p, 2000).unwrap() {
            worst = worst.max(e.identity_residual(&p).abs());
        }
    }
    (
        worst <= 1e-3,
        format!("max |residual| {worst:.2e} (tol 1e-3)"),
    )
}

struct Membrane {
    disk: [Vec<EigenPair2D>; 2],
    oval: [Vec<EigenPair2D>; 2],
    fine_disk_secs: f64,
}

const COARSE: f64 = 0.02;
const FINE: f64 = 0.01;

fn c3_disk_spectrum(m: &Membrane) -> Outcome {
    let exact = disk_membrane_lambda();
    let err = rel(m.disk[1][0].lambda, exact);
    (
        err <= 5e-3 && m.fine_disk_secs < 60.0,
        format!(
            "lambda1 {:.5} vs {exact:.5}, rel err {err:.2e} (tol 5e-3) at spacing {FINE}, {:.1} s (limit 60 s)",
            m.disk[1][0].lambda, m.fine_disk_secs
        ),
    )
}

fn max_relation_residual(body: &ConvexBody, pairs: &[EigenPair2D]) -> (f64, Vec<f64>) {
    let r: Vec<f64> = pairs
        .iter()
        .map(|e| basic_relation_residual(body, &s_function(e).unwrap()).unwrap())
        .collect();
    (r.iter().fold(0.0f64, |a, x| a.max(x.abs())), r)
}

fn c4_basic_relation(m: &Membrane) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, body, pairs) in [
        ("disk", ConvexBody::disk(1.0), &m.disk),
        ("oval", oval(), &m.oval),
    ] {
        let (coarse, rc) = max_relation_residual(&body, &pairs[0]);
        let (fine, rf) = max_relation_residual(&body, &pairs[1]);
        ok &= coarse <= 0.05 && fine <= 0.05 && fine < coarse;
        parts.push(format!(
            "{name}: max|r| {coarse:.2e} -> {fine:.2e} [{}] -> [{}]",
            rc.iter()
                .map(|x| format!("{x:.1e}"))
                .collect::<Vec<_>>()
                .join(" "),
            rf.iter()
                .map(|x| format!("{x:.1e}"))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    (
        ok,
        format!("{} (tol 0.05, max over j must drop)", parts.join("; ")),
    )
}

fn c5_boundary_eigenvalue(m: &Membrane) -> Outcome {
    let mut worst: f64 = 0.0;
    for (body, pairs) in [(ConvexBody::disk(1.0), &m.disk[0]), (oval(), &m.oval[0])] {
        for cluster in eigen_clusters(pairs, MULTIPLICITY_TOL) {
            if cluster[0] >= 3 {
                continue;
            }
            let traces: Vec<_> = cluster.iter().map(|&i| &pairs[i].trace).collect();
            let from_boundary = eigenvalue_from_boundary_max(&body, &traces).unwrap();
            for &i in cluster.iter().filter(|&&i| i < 3) {
                worst = worst.max(rel(from_boundary, pairs[i].lambda));
            }
        }
    }
    (
        worst <= 0.02,
        format!("max rel err {worst:.2e} over j = 1..3 on disk and oval (tol 2e-2)"),
    )
}

fn c6_shape_derivative(m: &Membrane) -> Outcome {
    let body = oval();
    let e = &m.oval[0][0];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, delta) in [
        ("1", SupportFn::disk(1.0)),
        (
            "cos2t",
            SupportFn::from_modes(0.0, &[(2, 1.0, 0.0)]).unwrap(),
        ),
    ] {
        let analytic = shape_derivative(&e.trace, &body, &delta).unwrap();
        for eps in [1e-2, 1e-3] {
            let fd =
                shape_derivative_fd(&body, PotentialSpec::none(), COARSE, &delta, eps, 1).unwrap();
            let err = rel(analytic, fd);
            worst = worst.max(err);
            parts.push(format!("dP={name} eps={eps:.0e}: {analytic:.4} vs {fd:.4}"));
        }
    }
    (
        worst <= 0.05,
        format!("max rel err {worst:.2e} (tol 5e-2); {}", parts.join(", ")),
    )
}

fn c7_scaling() -> Outcome {
    // fixed absolute spacing, so the scaled bodies see different grids
    let oval = oval();
    let disk = ConvexBody::disk(1.0);
    let base_m = membrane(&oval, COARSE, 1)[0].lambda;
    let base_p = solve_clamped_plate(&disk, 1, 0.05).unwrap()[0].lambda;
    let (mut worst_m, mut worst_p): (f64, f64) = (0.0, 0.0);
    for t in [0.5, 2.0] {
        let lm = membrane(&oval.scale(t), COARSE, 1)[0].lambda;
        let lp = solve_clamped_plate(&disk.scale(t), 1, 0.05).unwrap()[0].lambda;
        worst_m = worst_m.max(rel(lm, base_m / (t * t)));
        worst_p = worst_p.max(rel(lp, base_p / t.powi(4)));
    }
    (
        worst_m <= 0.01 && worst_p <= 0.01,
        format!("membrane on the oval {worst_m:.2e}, plate on the disk {worst_p:.2e}, spacing fixed (tol 1e-2)"),
    )
}

fn c8_lemma_and_symmetry() -> Outcome {
    let start = Instant::now();
    let mut rng = Lcg(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d1 = ConvexBody::new(rng.body(), 512).unwrap();
        let d2 = ConvexBody::new(rng.body(), 512).unwrap();
        let sum = d1.minkowski_sum(&d2);
        let coeffs: Vec<(f64, f64)> = (0..6)
            .map(|_| (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)))
            .collect();
        let f = |d: ispd_core::Direction| {
            let t = d.theta();
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
                .sum::<f64>()
        };
        let additivity = boundary_integral_normal_fn(&sum, f).unwrap()
            - boundary_integral_normal_fn(&d1, f).unwrap()
            - boundary_integral_normal_fn(&d2, f).unwrap();
        let symmetry =
            mixed_support_integral(&d1, &d2).unwrap() - mixed_support_integral(&d2, &d1).unwrap();
        worst = worst.max(additivity.abs()).max(symmetry.abs());
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= 1e-10 && secs < 1.0,
        format!("max residual {worst:.2e} (tol 1e-10), {secs:.3} s (limit 1 s)"),
    )
}

fn c9_plate_identity() -> Outcome {
    let body = ConvexBody::disk(1.0);
    let e = &solve_clamped_plate(&body, 1, plate::default_spacing(&body)).unwrap()[0];
    let r = plate_identity_residual(&body, &plate_s_function(e).unwrap()).unwrap();
    let exact = disk_plate_lambda();
    let err = rel(e.lambda, exact);
    (
        r.abs() <= 0.1 && err <= 0.02,
        format!("|residual| {:.2e} (tol 0.1); lambda1 {:.3} vs {exact:.3}, rel err {err:.2e} (tol 2e-2)", r.abs(), e.lambda),
    )
}

fn c10_round_trip(m: &Membrane) -> Outcome {
    let start = Instant::now();
    let body = oval();
    let data: Vec<SFunction> = m.oval[0].iter().map(|e| s_function(e).unwrap()).collect();
    let basis = build_basis(2);
    let sys = assemble_coefficients(&basis, &data, OperatorKind::Membrane).unwrap();
    let mut opts = MultiStartOptions::default();
    opts.solve.fixed = basis.translation_indices();
    let out = solve_multistart(&sys, &basis, &opts).unwrap();
    let best = out.solutions.first();
    let sup = best.map_or(f64::INFINITY, |b| {
        b.support.sup_distance(body.support(), 1024)
    });
    let sup_rel = sup / body.support().mean_radius();

    let single = build_basis(0);
    let exact = vec![SFunction::constant(1, 1.0 / std::f64::consts::PI, 512)];
    let ss = assemble_coefficients(&single, &exact, OperatorKind::Membrane).unwrap();
    let alpha = solve_quadratic_system(&ss, &single, &[0.3], &SolveOptions::default())
        .unwrap()
        .alpha[0];
    let secs = start.elapsed().as_secs_f64();
    (
        sup_rel <= 0.05 && (alpha - 1.0).abs() <= 1e-6 && secs < 300.0,
        format!(
            "sup err {sup_rel:.2e} of mean radius (tol 5e-2) from {} distinct solution(s); disk alpha {alpha:.9} (tol 1e-6); {secs:.2} s (limit 300 s)",
            out.solutions.len()
        ),
    )
}

fn c11_plate_inverse() -> Outcome {
    let radius = 1.5;
    let body = ConvexBody::disk(radius);
    let pairs = solve_clamped_plate(&body, 1, plate::default_spacing(&body)).unwrap();
    let data: Vec<SFunction> = pairs.iter().map(|e| plate_s_function(e).unwrap()).collect();
    let basis = build_basis(0);
    let sys = assemble_coefficients(&basis, &data, OperatorKind::Plate).unwrap();
    let res = solve_quadratic_system(
        &sys,
        &basis,
        &default_init(&sys).unwrap(),
        &SolveOptions::default(),
    )
    .unwrap();
    let err = rel(res.alpha[0], radius);
    (
        err <= 0.01,
        format!(
            "recovered radius {:.5} vs {radius}, rel err {err:.2e} (tol 1e-2)",
            res.alpha[0]
        ),
    )
}

fn c12_index_split(m: &Membrane) -> Outcome {
    let data: Vec<SFunction> = m.oval[0].iter().map(|e| s_function(e).unwrap()).collect();
    let basis = build_basis(3);
    let sys = assemble_coefficients(&basis, &data, OperatorKind::Membrane).unwrap();
    let mut rng = Lcg(12);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let alpha: Vec<f64> = (0..basis.len()).map(|_| rng.range(-1.0, 1.0)).collect();
        let direct = residual(&alpha, &sys).unwrap();
        let split = split_residual(&alpha, &basis, &data, OperatorKind::Membrane).unwrap();
        for (a, b) in direct.iter().zip(&split) {
            worst = worst.max((a - b).abs());
        }
    }
    (
        worst <= 1e-8,
        format!("max |split - direct| {worst:.2e} over 50 random alpha (tol 1e-8)"),
    )
}

fn main() {
    let start = Instant::now();
    let disk = ConvexBody::disk(1.0);
    let t = Instant::now();
    let fine_disk = membrane(&disk, FINE, 4);
    let fine_disk_secs = t.elapsed().as_secs_f64();
    let m = Membrane {
        disk: [membrane(&disk, COARSE, 4), fine_disk],
        oval: [membrane(&oval(), COARSE, 4), membrane(&oval(), FINE, 4)],
        fine_disk_secs,
    };
    debug_assert_eq!(spectral_2d::default_spacing(&disk), COARSE);

    let checks: [(&str, &dyn Fn() -> Outcome); 12] = [
        ("interval: J_j(b) = 2/b", &c1_interval_consequence),
        ("interval identity on (1,2)", &c2_interval_identity),
        ("disk membrane spectrum", &|| c3_disk_spectrum(&m)),
        ("basic relation, rhs 2", &|| c4_basic_relation(&m)),
        ("eigenvalue from boundary data", &|| {
            c5_boundary_eigenvalue(&m)
        }),
        ("shape derivative", &|| c6_shape_derivative(&m)),
        ("scaling laws", &c7_scaling),
        (
            "additivity and mixed-integral symmetry",
            &c8_lemma_and_symmetry,
        ),
        ("plate identity, rhs 4", &c9_plate_identity),
        ("inverse round trip", &|| c10_round_trip(&m)),
        ("plate inverse", &c11_plate_inverse),
        ("index-split residual", &|| c12_index_split(&m)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let (pass, detail) = check();
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of 12 passed in {:.1} s",
        12 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
