//! Acceptance suite: one test per certification criterion, each printing a
//! single pass/fail line beside its asserts.

use std::f64::consts::PI;
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};

use moebius_check::checks::grid_points;
use moebius_check::scenario::{RunOptions, Scenario};
use moebius_geom::congruence::{
    congruence_metric_gap, quotient_point, rank_from_singular_values, sphere_map_singular_values,
    Section, RANK_SIGMA_DROP, RANK_SIGMA_KEEP,
};
use moebius_geom::deform::{
    bend_pair, decompose_splitting, finalkey_residual, j_symmetry_defect, resolve_finalkey_signs,
    splitting_tensors, theta_form_from_parts,
};
use moebius_geom::gallery::{make_example, ExampleId, ExampleSpec};
use moebius_geom::hypersurface::{principal_structure, ImmersionPatch, CLUSTER_REL_TOL};
use moebius_geom::lorentz::LightConeChart;
use moebius_geom::moebius::{
    blaschke_form, blaschke_two_route_gap, blaschke_via_curvature, conformal_codazzi_residual,
    conformal_gauss_residual, moebius_data,
};

fn patch(id: ExampleId, theta: f64) -> (ImmersionPatch, Vec<Vec<f64>>) {
    let spec = ExampleSpec::with_theta(id, theta);
    let windows = spec.default_window();
    let grid = grid_points(&windows, &[3; 5]);
    (make_example(&spec), grid)
}

fn verdict(number: u32, name: &str, pass: bool) {
    println!(
        "criterion {number:02} {name}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_01_moebius_invariants() {
    let mut worst_trace: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for id in [
        ExampleId::RoundCylinder,
        ExampleId::MinimalCylinder,
        ExampleId::ConeCylinder,
        ExampleId::CartanExample,
    ] {
        let (p, grid) = patch(id, 0.0);
        for u in &grid {
            let d = moebius_data(&p, u).expect("regular point");
            let s = d.moebius_shape.value();
            worst_trace = worst_trace.max(s.trace().abs());
            worst_norm = worst_norm.max(((&s * &s).trace() - 0.8).abs());
        }
    }
    let pass = worst_trace <= 1e-9 && worst_norm <= 1e-8;
    verdict(1, "moebius_invariants", pass);
    assert!(pass, "trace {worst_trace:e}, norm defect {worst_norm:e}");
}

#[test]
fn criterion_02_round_cylinder_table() {
    let (p, grid) = patch(ExampleId::RoundCylinder, 0.0);
    let s_table = DMatrix::from_diagonal(&DVector::from_vec(vec![0.8, -0.2, -0.2, -0.2, -0.2]));
    let psi_table =
        DMatrix::from_diagonal(&DVector::from_vec(vec![0.18, -0.02, -0.02, -0.02, -0.02]));
    let mut worst: f64 = 0.0;
    for u in &grid {
        let d = moebius_data(&p, u).expect("regular point");
        worst = worst.max((d.phi.value() - 1.0).abs());
        worst = worst.max((d.moebius_shape.value() - &s_table).amax());
        let b = blaschke_form(&d);
        worst = worst.max((&b.psi - &psi_table).amax());
        worst = worst.max(b.omega.amax());
        worst = worst.max(blaschke_via_curvature(&d).norm_scal.abs());
    }
    let pass = worst <= 1e-10;
    verdict(2, "round_cylinder_table", pass);
    assert!(pass, "worst table deviation {worst:e}");
}

fn structure_grids() -> Vec<(ImmersionPatch, Vec<Vec<f64>>)> {
    vec![
        patch(ExampleId::RoundCylinder, 0.0),
        patch(ExampleId::MinimalCylinder, 0.0),
        patch(ExampleId::MinimalCylinder, PI / 3.0),
        patch(ExampleId::CartanExample, 0.0),
    ]
}

#[test]
fn criterion_03_conformal_gauss_codazzi() {
    let mut worst_gauss: f64 = 0.0;
    let mut worst_codazzi: f64 = 0.0;
    for (p, grid) in structure_grids() {
        for u in &grid {
            let d = moebius_data(&p, u).expect("regular point");
            worst_gauss = worst_gauss.max(conformal_gauss_residual(&d));
            worst_codazzi = worst_codazzi.max(conformal_codazzi_residual(&d));
        }
    }
    let pass = worst_gauss <= 1e-6 && worst_codazzi <= 1e-6;
    verdict(3, "conformal_gauss_codazzi", pass);
    assert!(pass, "gauss {worst_gauss:e}, codazzi {worst_codazzi:e}");
}

#[test]
fn criterion_04_blaschke_two_routes() {
    let mut worst: f64 = 0.0;
    for (p, grid) in structure_grids() {
        for u in &grid {
            let d = moebius_data(&p, u).expect("regular point");
            worst = worst.max(blaschke_two_route_gap(&d));
        }
    }
    let pass = worst <= 1e-6;
    verdict(4, "blaschke_two_routes", pass);
    assert!(pass, "two-route gap {worst:e}");
}

#[test]
fn criterion_05_moebius_invariance() {
    let scenario: Scenario = serde_json::from_str(
        r#"{"schema": 1, "examples": [{"id": "cartan_example"}],
            "transform": {"random_similarity_inversion": {"seed": 20260822}},
            "checks": ["wang"]}"#,
    )
    .expect("scenario parses");
    let report = moebius_check::run_scenario(
        &scenario,
        &RunOptions { with_time: false, ..RunOptions::default() },
    )
    .expect("scenario valid");
    let wang = &report.checks[0];
    let worst = wang
        .residuals
        .iter()
        .filter(|s| s.name == "metric" || s.name == "shape")
        .map(|s| s.max.0)
        .fold(0.0f64, f64::max);
    let pass = wang.pass && worst <= 1e-7;
    verdict(5, "moebius_invariance", pass);
    assert!(pass, "invariance residual {worst:e}, check pass {}", wang.pass);
}

fn bend_grid() -> Vec<Vec<f64>> {
    let windows = ExampleSpec::new(ExampleId::MinimalCylinder).default_window();
    grid_points(&windows, &[3, 3, 2, 2, 2])
}

#[test]
fn criterion_06_bendability_witness() {
    let base = make_example(&ExampleSpec::new(ExampleId::MinimalCylinder));
    let grid = bend_grid();
    let mut pass = true;
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
        let bent = make_example(&ExampleSpec::with_theta(ExampleId::MinimalCylinder, theta));
        let mut metric: f64 = 0.0;
        let mut shape = f64::INFINITY;
        let mut flat: f64 = 0.0;
        let mut nullity = f64::INFINITY;
        for u in &grid {
            let d1 = moebius_data(&base, u).expect("regular point");
            let d2 = moebius_data(&bent, u).expect("regular point");
            let bp = bend_pair(&d1, &d2).expect("frame exists");
            metric = metric.max(bp.metric_gap);
            shape = shape.min(bp.shape_gap);
            flat = flat.max(bp.flatness);
            nullity = nullity.min(bp.nullity);
        }
        let ok = metric <= 1e-9 && shape >= 0.1 && flat <= 1e-7 && nullity >= 0.01;
        pass &= ok;
        assert!(
            ok,
            "theta {theta}: metric {metric:e}, shape {shape:e}, flat {flat:e}, nullity {nullity:e}"
        );
    }
    verdict(6, "bendability_witness", pass);
    assert!(pass);
}

#[test]
fn criterion_07_central_sphere_congruence() {
    let (p, grid) = patch(ExampleId::MinimalCylinder, 0.0);
    let chart = LightConeChart::standard(5);
    let mut relmetr: f64 = 0.0;
    let mut rank_ok = true;
    for u in &grid {
        let d = moebius_data(&p, u).expect("regular point");
        let sigma = sphere_map_singular_values(&d, &chart);
        rank_ok &= rank_from_singular_values(&sigma, RANK_SIGMA_KEEP, RANK_SIGMA_DROP) == Some(2);
        relmetr = relmetr.max(congruence_metric_gap(&d, &chart));
    }
    let section = Section {
        base: vec![0.2, -0.3, 0.1, 0.4, -0.2],
        dir1: DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]),
        dir2: DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0]),
    };
    let mut minimality: f64 = 0.0;
    let mut spacelike = true;
    for ab in grid_points(&[(-0.15, 0.15), (-0.15, 0.15)], &[5, 5]) {
        let q = quotient_point(&p, &chart, &section, &[ab[0], ab[1]]).expect("quotient point");
        minimality = minimality.max(q.minimality_residual);
        let m = &q.induced_metric;
        spacelike &= m[(0, 0)] > 0.0 && m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] > 0.0;
    }
    let pass = rank_ok && relmetr <= 1e-8 && minimality <= 1e-6 && spacelike;
    verdict(7, "central_sphere_congruence", pass);
    assert!(
        pass,
        "rank_ok {rank_ok}, relmetr {relmetr:e}, minimality {minimality:e}, spacelike {spacelike}"
    );
}

#[test]
fn criterion_08_associated_family_rotation() {
    let base = make_example(&ExampleSpec::new(ExampleId::MinimalCylinder));
    let grid = bend_grid();
    let mut pass = true;
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
        let bent = make_example(&ExampleSpec::with_theta(ExampleId::MinimalCylinder, theta));
        let mut signs = None;
        let mut worst: f64 = 0.0;
        for u in &grid {
            let d1 = moebius_data(&base, u).expect("regular point");
            let d2 = moebius_data(&bent, u).expect("regular point");
            let ps = principal_structure(&d1.shape.point(), CLUSTER_REL_TOL).expect("rank two");
            let (j_sign, flip) = match signs {
                Some(s) => s,
                None => {
                    let s = resolve_finalkey_signs(&d1, &ps, &d2, theta).expect("conformal pair");
                    signs = Some(s);
                    s
                }
            };
            let fk = finalkey_residual(&d1, &ps, &d2, theta, j_sign, flip).expect("conformal pair");
            worst = worst.max(fk.residual);
        }
        pass &= worst <= 1e-8;
        assert!(worst <= 1e-8, "theta {theta}: rotation residual {worst:e}");
    }

    // theta = 0 compares the immersion with itself and must be exact.
    let u = &grid[0];
    let d = moebius_data(&base, u).expect("regular point");
    let ps = principal_structure(&d.shape.point(), CLUSTER_REL_TOL).expect("rank two");
    let fk = finalkey_residual(&d, &ps, &d, 0.0, 1.0, 1.0).expect("identity pair");
    pass &= fk.residual == 0.0;
    verdict(8, "associated_family_rotation", pass);
    assert!(pass, "theta = 0 residual {:e}", fk.residual);
}

#[test]
fn criterion_09_cartan_structure() {
    let (p, grid) = patch(ExampleId::CartanExample, 0.0);
    let chart = LightConeChart::standard(5);
    let target = (0.4f64).sqrt();
    let mut eig_dev: f64 = 0.0;
    let mut omega_delta: f64 = 0.0;
    let mut rank_ok = true;
    let mut sym: f64 = 0.0;
    let mut jdef: f64 = 0.0;
    let mut rot_witness: f64 = 0.0;
    for u in &grid {
        let d = moebius_data(&p, u).expect("regular point");
        let ps = principal_structure(&d.shape.point(), CLUSTER_REL_TOL).expect("clean spectrum");

        let mut star: Vec<f64> = ps
            .eigenvalues
            .iter()
            .map(|k| (k - d.shape.mean_curv.value()) / d.phi.value())
            .collect();
        star.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in star.iter().zip([target, 0.0, 0.0, 0.0, -target]) {
            eig_dev = eig_dev.max((got - want).abs());
        }

        let omega = blaschke_form(&d).omega;
        for t in 0..3 {
            let mut pairing = 0.0;
            for i in 0..5 {
                pairing += omega[i] * ps.delta_basis[(i, t)];
            }
            omega_delta = omega_delta.max(pairing.abs());
        }

        let sigma = sphere_map_singular_values(&d, &chart);
        rank_ok &= rank_from_singular_values(&sigma, RANK_SIGMA_KEEP, RANK_SIGMA_DROP) == Some(2);

        let st = splitting_tensors(&d, &ps);
        jdef = jdef.max(j_symmetry_defect(&ps));
        for c in &st.c_star {
            let dec = decompose_splitting(c);
            sym = sym.max(dec.sym_residual);
            rot_witness = rot_witness.max(dec.b.abs());
        }
    }
    let section = Section {
        base: vec![1.0, 0.1, 0.8, 0.5, 0.45],
        dir1: DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0]),
        dir2: DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0, 0.0]),
    };
    let mut minimality: f64 = 0.0;
    let mut spacelike = true;
    for ab in grid_points(&[(-0.15, 0.15), (-0.15, 0.15)], &[5, 5]) {
        let q = quotient_point(&p, &chart, &section, &[ab[0], ab[1]]).expect("quotient point");
        minimality = minimality.max(q.minimality_residual);
        let m = &q.induced_metric;
        spacelike &= m[(0, 0)] > 0.0 && m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] > 0.0;
    }
    let elliptic = sym <= 1e-7 && jdef <= 1e-7 && rot_witness >= 1e-3;
    let pass = eig_dev <= 1e-6
        && omega_delta <= 1e-6
        && rank_ok
        && minimality <= 1e-5
        && spacelike
        && elliptic;
    verdict(9, "cartan_structure", pass);
    assert!(
        pass,
        "eig {eig_dev:e}, omega|delta {omega_delta:e}, rank_ok {rank_ok}, minimality {minimality:e}, spacelike {spacelike}, sym {sym:e}, jdef {jdef:e}, |b| {rot_witness:e}"
    );
}

#[test]
fn criterion_10_error_paths() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let run = |name: &str, body: &str, expected: &str| -> bool {
        let path = dir.join(name);
        std::fs::write(&path, body).expect("scenario written");
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_moebius-check"))
            .args(["run", path.to_str().unwrap(), "--no-timestamp"])
            .output()
            .expect("binary runs");
        let report: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("report parses");
        let named = report["checks"]
            .as_array()
            .unwrap()
            .iter()
            .any(|c| {
                c["pass"] == serde_json::Value::Bool(false)
                    && c["error"]
                        .as_str()
                        .is_some_and(|e| e.starts_with(expected))
            });
        out.status.code() == Some(1) && named
    };

    let umbilic = run(
        "acc_umbilic.json",
        r#"{"schema": 1, "examples": [{"id": "unit_sphere"}],
            "grid": {"counts": [1, 1, 1, 1, 1]}, "checks": ["invariants"]}"#,
        "UmbilicPoint",
    );
    let multiplicity = run(
        "acc_multiplicity.json",
        r#"{"schema": 1, "examples": [{"id": "round_cylinder"}],
            "grid": {"counts": [1, 1, 1, 1, 1]}, "checks": ["splitting"]}"#,
        "NoMultiplicityN2",
    );
    let u: [f64; 5] = [0.8, 0.3, -0.2, 0.4, 0.7];
    let windows: Vec<String> = u.iter().map(|c| format!("[{c}, {c}]")).collect();
    let center = format!(
        "[{}, {}, {}, {}, {}, {}]",
        u[0].cos(),
        u[0].sin(),
        u[1],
        u[2],
        u[3],
        u[4]
    );
    let inversion = run(
        "acc_inversion.json",
        &format!(
            r#"{{"schema": 1, "examples": [{{"id": "round_cylinder"}}],
                "grid": {{"windows": [{}], "counts": [1, 1, 1, 1, 1]}},
                "transform": {{"steps": [{{"inversion": {center}}}]}},
                "checks": ["wang"]}}"#,
            windows.join(", "),
        ),
        "InversionCenterOnImage",
    );
    let pass = umbilic && multiplicity && inversion;
    verdict(10, "error_paths", pass);
    assert!(pass, "umbilic {umbilic}, multiplicity {multiplicity}, inversion {inversion}");
}

#[test]
fn criterion_11_flatness_negative_control() {
    let base = make_example(&ExampleSpec::new(ExampleId::MinimalCylinder));
    let bent = make_example(&ExampleSpec::with_theta(ExampleId::MinimalCylinder, PI / 3.0));
    let u = [0.2, -0.3, 0.1, 0.4, -0.2];
    let d1 = moebius_data(&base, &u).expect("regular point");
    let d2 = moebius_data(&bent, &u).expect("regular point");
    let gstar = d1.moebius_metric.value();
    let s1 = d1.moebius_shape.value();
    let psi1 = blaschke_form(&d1).psi;
    let psi2 = blaschke_form(&d2).psi;
    let clean = theta_form_from_parts(&gstar, &s1, &psi1, &d2.moebius_shape.value(), &psi2)
        .expect("frame exists")
        .0;

    let mut perturbation = DMatrix::zeros(5, 5);
    perturbation[(0, 0)] = 1e-2;
    perturbation[(1, 1)] = -1e-2;
    let s2 = d2.moebius_shape.value() + perturbation;
    let tainted = theta_form_from_parts(&gstar, &s1, &psi1, &s2, &psi2)
        .expect("frame exists")
        .0;

    let pass = clean <= 1e-7 && tainted >= 1e-3;
    verdict(11, "flatness_negative_control", pass);
    assert!(pass, "clean {clean:e}, perturbed {tainted:e}");
}
