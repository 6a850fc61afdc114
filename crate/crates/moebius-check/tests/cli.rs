//! End-to-end tests of the command-line interface.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moebius-check"))
}

fn tmp() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
}

fn write_scenario(name: &str, body: &str) -> PathBuf {
    let path = tmp().join(name);
    std::fs::write(&path, body).expect("scenario written");
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(out)).expect("report parses")
}

const TINY_GRID: &str = r#""grid": {"counts": [1, 1, 1, 1, 1]}"#;

#[test]
fn report_is_byte_stable_without_timestamp() {
    let path = write_scenario(
        "stable.json",
        &format!(
            r#"{{"schema": 1, "examples": [{{"id": "cartan_example"}}], {TINY_GRID},
                "transform": {{"random_similarity_inversion": {{"seed": 11}}}},
                "checks": ["wang", "invariants"]}}"#
        ),
    );
    let first = run(&["run", path.to_str().unwrap(), "--no-timestamp"]);
    let second = run(&["run", path.to_str().unwrap(), "--no-timestamp"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let rep = report(&first);
    assert_eq!(rep["pass"], serde_json::Value::Bool(true));
    assert!(rep.get("timestamp").is_none());
    for check in rep["checks"].as_array().unwrap() {
        assert_eq!(check["wall_ms"], 0);
    }
}

#[test]
fn timestamp_appears_by_default() {
    let path = write_scenario(
        "timed.json",
        &format!(
            r#"{{"schema": 1, "examples": [{{"id": "round_cylinder"}}], {TINY_GRID},
                "checks": ["invariants"]}}"#
        ),
    );
    let out = run(&["run", path.to_str().unwrap()]);
    assert!(out.status.success());
    let rep = report(&out);
    assert!(rep["timestamp"].as_u64().is_some());
}

#[test]
fn geometric_failure_exits_one_with_named_error() {
    let path = write_scenario(
        "umbilic.json",
        &format!(
            r#"{{"schema": 1, "examples": [{{"id": "unit_sphere"}}], {TINY_GRID},
                "checks": ["invariants"]}}"#
        ),
    );
    let out = run(&["run", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = report(&out);
    assert_eq!(rep["pass"], serde_json::Value::Bool(false));
    let error = rep["checks"][0]["error"].as_str().unwrap();
    assert!(error.starts_with("UmbilicPoint"), "{error}");
}

#[test]
fn invalid_input_exits_two() {
    let path = write_scenario(
        "bad_example.json",
        r#"{"schema": 1, "examples": [{"id": "torus"}], "checks": ["gauss"]}"#,
    );
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown example"));

    let path = write_scenario("not_json.json", "{this is not json");
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["run", tmp().join("absent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tol_scale_loosens_upper_bounds() {
    let path = write_scenario(
        "tight.json",
        &format!(
            r#"{{"schema": 1, "examples": [{{"id": "round_cylinder"}}], {TINY_GRID},
                "checks": ["invariants"], "tolerances": {{"shape_norm": 1e-17}}}}"#
        ),
    );
    let strict = run(&["run", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(strict.status.code(), Some(1));
    let loose = run(&["run", path.to_str().unwrap(), "--no-timestamp", "--tol-scale", "1000"]);
    assert_eq!(loose.status.code(), Some(0));
}

#[test]
fn inversion_center_on_the_image_is_reported() {
    let u: [f64; 5] = [0.8, 0.3, -0.2, 0.4, 0.7];
    let center = [
        u[0].cos(),
        u[0].sin(),
        u[1],
        u[2],
        u[3],
        u[4],
    ];
    let windows: Vec<String> = u.iter().map(|c| format!("[{c}, {c}]")).collect();
    let center_str: Vec<String> = center.iter().map(|c| format!("{c}")).collect();
    let path = write_scenario(
        "on_image.json",
        &format!(
            r#"{{"schema": 1, "examples": [{{"id": "round_cylinder"}}],
                "grid": {{"windows": [{}], "counts": [1, 1, 1, 1, 1]}},
                "transform": {{"steps": [{{"inversion": [{}]}}]}},
                "checks": ["wang"]}}"#,
            windows.join(", "),
            center_str.join(", "),
        ),
    );
    let out = run(&["run", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = report(&out);
    let error = rep["checks"][0]["error"].as_str().unwrap();
    assert!(error.starts_with("InversionCenterOnImage"), "{error}");
}

#[test]
fn seed_override_is_deterministic() {
    let path = write_scenario(
        "seeded.json",
        &format!(
            r#"{{"schema": 1, "examples": [{{"id": "round_cylinder"}}], {TINY_GRID},
                "transform": {{"random_similarity_inversion": {{"seed": 3}}}},
                "checks": ["wang"]}}"#
        ),
    );
    let a = run(&["run", path.to_str().unwrap(), "--no-timestamp", "--seed", "99"]);
    let b = run(&["run", path.to_str().unwrap(), "--no-timestamp", "--seed", "99"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report_file() {
    let scenario = write_scenario(
        "to_file.json",
        &format!(
            r#"{{"schema": 1, "examples": [{{"id": "round_cylinder"}}], {TINY_GRID},
                "checks": ["gauss"]}}"#
        ),
    );
    let report_path = tmp().join("report_out.json");
    let out = run(&[
        "run",
        scenario.to_str().unwrap(),
        "--no-timestamp",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout_str(&out).is_empty());
    let text = std::fs::read_to_string(&report_path).expect("report file");
    let rep: serde_json::Value = serde_json::from_str(&text).expect("file parses");
    assert_eq!(rep["checks"][0]["name"], "gauss");
}

#[test]
fn list_examples_shows_the_gallery() {
    let out = run(&["list-examples"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    for id in [
        "round_cylinder",
        "minimal_cylinder",
        "cone_cylinder",
        "unit_sphere",
        "cartan_example",
    ] {
        assert!(text.contains(id), "{text}");
    }

    let out = run(&["list-examples", "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout_str(&out)).expect("json list");
    assert_eq!(rows.as_array().unwrap().len(), 5);
    assert_eq!(rows[1]["takes_theta"], serde_json::Value::Bool(true));
}
