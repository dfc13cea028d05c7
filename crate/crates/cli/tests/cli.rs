use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use cone_deform::fixtures;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cone-deform"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn analyze_fixtures() {
    let o = run(&["analyze", "table2.tri"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).lines().next().unwrap(),
        "|T|=5 |E|=4 |V|=2 genera=[1,2] rank(B)=2 dimTAS=8"
    );
    let o = run(&["analyze", "table1"]);
    assert!(stdout(&o).starts_with("|T|=7 |E|=7 |V|=1 genera=[1] rank(B)=6"));
}

#[test]
fn analyze_from_disk_and_parse_errors() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "t.tri", fixtures::TABLE2_TRI);
    let o = run(&["--json", "analyze", &good]);
    let v = json(&o);
    assert_eq!(v["neumann_rank"], 2);
    assert_eq!(v["genera"], serde_json::json!([1, 2]));
    let bad = write(&dir, "garbage.tri", "this is not a triangulation\n");
    assert_eq!(run(&["analyze", &bad]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "/no/such/file.tri"]).status.code(), Some(2));
    let unpaired = write(&dir, "u.tri", "0 | 0 (013) | - | 0 (012) | 0 (123)\n");
    assert_eq!(run(&["analyze", &unpaired]).status.code(), Some(2));
}

#[test]
fn verify_commands() {
    let o = run(&["verify", "table2.tri", "--curves", "table2_curves.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = run(&["verify", "table1.tri"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("SKIP curve checks"));

    let o = run(&["--json", "verify", "random", "--seed", "7", "--count", "25"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["all_pass"], true);
    let names: Vec<&str> = v["report"]["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.starts_with("random[24]")));
}

#[test]
fn verify_reports_failures_with_exit_1() {
    // A curve that is not a longitude system: one curve where three are needed.
    let dir = TempDir::new().unwrap();
    let curves = write(
        &dir,
        "one.json",
        r#"{"curves": [{"name": "a", "format": "indvector",
            "entries": [{"tet": 3, "quad": "z", "coefficient": 1}, {"tet": 4, "quad": "z", "coefficient": -1}]}]}"#,
    );
    let o = run(&["verify", "table2", "--curves", &curves]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL longitude count"));
}

#[test]
fn solve_recovers_z0() {
    let dir = TempDir::new().unwrap();
    let target = write(&dir, "u0_t0.json", fixtures::TABLE2_U0_T0);
    let start = write(&dir, "near_z0.json", fixtures::TABLE2_NEAR_Z0);
    let o = run(&["--json", "solve", "table2.tri", "--target", &target, "--start", &start]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["converged"], true);
    assert!(v["residual_norm"].as_f64().unwrap() < 1e-10);
    for k in 0..5 {
        let (re, im) = complex(&v["shapes"][k.to_string()]);
        assert!((re - 0.5).abs() < 1e-10 && (im - 3f64.sqrt() / 2.0).abs() < 1e-10);
    }
    // Human output carries the same numbers.
    let h = stdout(&run(&["solve", "table2.tri", "--target", &target, "--start", &start]));
    let (re, im) = complex(&v["shapes"]["2"]);
    assert!(h.contains(&format!("z2 = {re:.12}{im:+.12}i")), "{h}");
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    let infeasible = write(
        &dir,
        "bad.json",
        r#"{"u": [[0, 1], [0, 1], [0, 1], [0, 1]], "t": [[0, 0], [0, 0], [0, 3.14]]}"#,
    );
    let o = run(&["solve", "table2", "--target", &infeasible, "--start", "near_z0"]);
    assert_eq!(o.status.code(), Some(3));

    let far = write(
        &dir,
        "far.json",
        r#"{"0": [0.4, 1.5], "1": [0.4, 1.5], "2": [0.4, 1.5], "3": [0.4, 1.5], "4": [0.4, 1.5]}"#,
    );
    let o = run(&[
        "solve",
        "table2",
        "--target",
        "u0_t0",
        "--start",
        &far,
        "--max-iter",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["solve", "table2", "--target", "u0_t0", "--start", "/missing.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_reports_displayed_values() {
    let o = run(&[
        "--json",
        "eval",
        "table2.tri",
        "--shapes",
        "z0.json",
        "--curves",
        "table2_curves.json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let pi = std::f64::consts::PI;
    let h: Vec<(f64, f64)> = v["holonomy"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| complex(&x["value"]))
        .collect();
    assert!(h[0].0.abs() < 1e-12 && h[0].1.abs() < 1e-12);
    assert!(h[1].0.abs() < 1e-12 && h[1].1.abs() < 1e-12);
    assert!((h[2].1 - pi).abs() < 1e-12);
    let g: f64 = v["log_curvature"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| complex(x).1)
        .sum();
    assert!((g - 10.0 * pi).abs() < 1e-12);
    assert_eq!(v["exp_log_matches"], true);
    assert!(v["gauss_bonnet"].as_array().unwrap().iter().all(|r| r["ok"] == true));
}

#[test]
fn trace_and_left_domain() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "path.json",
        r#"{"u": [[0, 5.235987755982989], [0, 6.283185307179586], [0, 18.84955592153876], [0, 1.0471975511965976]],
            "path": [[[0, 0], [0.05, 0], [0, 3.141592653589793]], [[0, 0], [0.1, 0], [0, 3.141592653589793]]]}"#,
    );
    let o = run(&["--json", "trace", "table2", "--path", &path, "--start", "z0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 2);

    let steps: Vec<String> = (1..=400)
        .map(|k| format!("[[0, 0], [0, {}], [0, 3.141592653589793]]", 0.02 * k as f64))
        .collect();
    let far = write(
        &dir,
        "far.json",
        &format!(
            r#"{{"u": [[0, 5.235987755982989], [0, 6.283185307179586], [0, 18.84955592153876], [0, 1.0471975511965976]], "path": [{}]}}"#,
            steps.join(",")
        ),
    );
    let o = run(&["trace", "table2", "--path", &far, "--start", "z0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("last valid point"));
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        &["--json", "verify", "random", "--seed", "3", "--count", "5"][..],
        &["--json", "solve", "table2", "--target", "u0_t0", "--start", "near_z0"][..],
        &["--json", "tas", "table2"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout);
    }
}

#[test]
fn equations_and_tas() {
    let o = run(&["equations", "table2"]);
    let text = stdout(&o);
    assert!(text.contains("c(e3) = z1'"));
    assert!(text.contains("exp H(lambda2) = z3 / z4"));
    let v = json(&run(&["--json", "tas", "table2"]));
    assert_eq!(v["tas_dimension"], 8);
    assert_eq!(v["stas_dimension"], 5);
    assert_eq!(v["combined_span"]["equal"], true);
    let v = json(&run(&["--json", "tas", "table1"]));
    assert_eq!(v["edge_span"]["dimension"], 6);
    assert!(v["stas_dimension"].is_null());
}

#[test]
fn base_edge_override_keeps_invariants() {
    let v = json(&run(&["--json", "analyze", "table2", "--base-edge", "01"]));
    assert_eq!(v["neumann_rank"], 2);
    let o = run(&["verify", "table2", "--base-edge", "03"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(run(&["analyze", "table2", "--base-edge", "44"]).status.code(), Some(2));
}

#[test]
fn fixture_listing() {
    let text = stdout(&run(&["fixtures"]));
    for name in ["table1", "table2", "phi0"] {
        assert!(text.contains(name));
    }
    assert_eq!(stdout(&run(&["fixtures", "table2"])), fixtures::TABLE2_TRI);
    let v = json(&run(&["--json", "fixtures", "phi0"]));
    assert_eq!(v["region"]["simply_connected"], true);
    assert_eq!(run(&["fixtures", "nope"]).status.code(), Some(2));
}
