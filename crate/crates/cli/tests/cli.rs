use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn levi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levi"))
        .args(args)
        .env_remove("LEVI_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn df_gamma_one_prints_one_third() {
    let o = levi(&["df", "--gamma", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("0.333333"), "{}", stdout(&o));
    let j = json(&levi(&["df", "--gamma", "2", "--format", "json"]));
    assert!((j["eta"].as_f64().unwrap() - (1.0 - 2.0 / 6.0)).abs() < 1e-15);
}

#[test]
fn verify_oka_ball_passes() {
    let o = levi(&["verify", "oka", "ball", "--samples", "100", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let j = json(&o);
    assert!(j["min_slack"].as_f64().unwrap() >= -1e-8);
    assert_eq!(j["pass"], Value::Bool(true));
    assert_eq!(j["samples"], 100);
    assert!(j["runtime_secs"].is_number());
    assert_eq!(j["defaults"]["gamma_cap"], 1000.0);
}

#[test]
fn unknown_domain_is_usage_error() {
    let o = levi(&["analyze", "no-such-domain"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no-such-domain"));
}

#[test]
fn failing_verification_exits_one() {
    let o = levi(&["verify", "oka", "non-pseudoconvex-graph", "--samples", "40"]);
    assert_eq!(code(&o), 1);
    let j = json(&o);
    assert_eq!(j["pass"], Value::Bool(false));
    assert!(j["min_slack"].as_f64().unwrap() < 0.0);
    assert_eq!(j["argmin_point"].as_array().unwrap().len(), 4);
    assert!(stderr(&o).starts_with("FAIL"));
}

#[test]
fn uncertified_df_exits_one() {
    let o = levi(&["df", "parabolic-slab", "--samples", "20", "--boundary-samples", "8"]);
    assert_eq!(code(&o), 1);
    let j = json(&o);
    assert_eq!(j["gamma_star"], 0.0);
    assert_eq!(j["certified"], Value::Bool(false));
}

#[test]
fn numerical_errors_exit_three() {
    let o = levi(&["analyze", "real-ellipsoid", "--point", "0", "0", "0", "0"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("ambiguous"));
    let o = levi(&["verify", "oka", "ball", "--shell", "1e-13", "--samples", "1"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("sampling"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "oka"][..],
        &["verify", "nope", "ball"],
        &["verify", "gamma", "ball"],
        &["verify", "oka", "ball", "--samples", "0"],
        &["verify", "oka", "ball", "--tol", "-1"],
        &["verify", "oka", "ball", "--side", "left"],
        &["verify", "psh", "ball", "--side", "outside"],
        &["df"],
        &["df", "ball", "--gamma", "1"],
        &["df", "--gamma", "-1"],
        &["df", "--gamma", "1", "--format", "csv"],
        &["analyze", "ball", "--point", "1", "0"],
        &["analyze", "ball", "--point", "5", "0", "0", "0"],
        &["analyze", "model", "--n", "3", "--point", "0", "0", "0", "0"],
        &["classify", "ball", "--param", "radius=2"],
        &["classify", "ball", "--param", "novalue"],
        &["frobnicate"],
    ] {
        let o = levi(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn help_and_version_exit_zero() {
    for a in ["--help", "--version"] {
        let o = levi(&[a]);
        assert_eq!(code(&o), 0);
        assert!(!stdout(&o).is_empty());
    }
    assert_eq!(code(&levi(&["verify", "--help"])), 0);
}

#[test]
fn catalog_lists_every_entry() {
    let o = levi(&["catalog"]);
    assert_eq!(code(&o), 0);
    for id in ["ball", "complex-ellipsoid", "real-ellipsoid", "model", "parabolic-slab", "ball-image"] {
        assert!(stdout(&o).contains(id));
    }
    let j = json(&levi(&["catalog", "--format", "json"]));
    assert_eq!(j.as_array().unwrap().len(), levi_core::catalog::IDS.len());
}

#[test]
fn analyze_reports_distance_data() {
    let o = levi(&["analyze", "ball", "--point", "0.5", "0", "0", "0"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert!((j["delta"].as_f64().unwrap() + 0.5).abs() < 1e-10);
    assert!((j["gradient"][0].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((j["hessian_delta"][1][1].as_f64().unwrap() - 2.0).abs() < 1e-5);
    assert_eq!(j["boundary"]["pseudoconvex"], Value::Bool(true));
}

#[test]
fn no_meta_output_is_byte_identical() {
    let args = ["verify", "convex", "real-ellipsoid", "--samples", "60", "--seed", "3", "--no-meta"];
    let a = levi(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_levi"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&a), 0);
    assert!(!stdout(&a).contains("runtime_secs"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_csv_header() {
    let o = levi(&["sweep", "model", "--samples", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(levi_cli::SWEEP_CSV_VERSION));
    assert_eq!(lines.next(), Some("x1,x2,x3,x4,min_eig_L_CT,min_eig_H_RT,max_gamma,eta"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let cols: Vec<f64> = r.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 8);
        assert!((cols[6] - 1.0).abs() < 1e-3);
        assert!((cols[7] - 1.0 / 3.0).abs() < 1e-3);
    }
}

#[test]
fn verify_rows_as_csv() {
    let o = levi(&["verify", "oka", "ball", "--samples", "10", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], levi_cli::ROWS_CSV_VERSION);
    assert_eq!(lines[1], "index,x1,x2,x3,x4,delta,slack");
    assert_eq!(lines.len(), 12);
    assert!(lines[2].starts_with("0,"));
}

#[test]
fn classify_counts_flags() {
    let o = levi(&["classify", "ball", "--samples", "12"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["convex"], 12);
    assert_eq!(j["chain_violations"], 0);
    assert_eq!(j["points"].as_array().unwrap().len(), 12);
}

#[test]
fn catalog_params_are_honoured() {
    let o = levi(&["sweep", "model", "--param", "beta=8", "--samples", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let g = json(&o)["rows"][0]["max_gamma"].as_f64().unwrap();
    assert!((g - 0.5).abs() < 1e-3);
    let o = levi(&["classify", "ball", "--n", "3", "--samples", "2"]);
    assert_eq!(json(&o)["points"][0]["point"].as_array().unwrap().len(), 6);
}

#[test]
fn output_file_and_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eta.txt");
    let o = levi(&["df", "--gamma", "1", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("0.333333"));

    let o = Command::new(env!("CARGO_BIN_EXE_levi"))
        .args(["df", "--gamma", "2", "--output", "rel.txt"])
        .env("LEVI_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(dir.path().join("rel.txt")).unwrap().starts_with("0.666666"));

    let o = levi(&["df", "--gamma", "1", "--output", dir.path().join("missing/x").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn spec_file_ball_matches_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "ball.json", r#"{"version": 1, "catalog": "ball", "n": 2}"#);
    let args = |d: &str| ["verify", "oka", d, "--samples", "30", "--no-meta"].map(String::from);
    let a = Command::new(env!("CARGO_BIN_EXE_levi")).args(args(&p)).output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_levi")).args(args("ball")).output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn spec_file_expression() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(
        dir.path(),
        "ell.json",
        r#"{"version": 1, "name": "ell", "n": 2, "expression": "2*abs2(z1) + abs2(z2) - 1",
            "bbox": [[-1.2, 1.2], [-1.2, 1.2], [-1.2, 1.2], [-1.2, 1.2]]}"#,
    );
    let o = levi(&["verify", "oka", &p, "--samples", "40"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let j = json(&o);
    assert_eq!(j["domain"], "ell");
    assert_eq!(j["source"]["type"], "expression");
}

#[test]
fn spec_file_graph_is_model() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(
        dir.path(),
        "model.json",
        r#"{"version": 1, "name": "graph-model", "n": 2, "graph": "abs2(z1) - 2*im(z2)^2",
            "bbox": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]],
            "sample_box": [[-1e-4, 1e-4], [-1e-4, 1e-4], [-1e-4, 1e-4], [-1e-4, 1e-4]],
            "scale": 0.25}"#,
    );
    let o = levi(&["df", &p, "--samples", "100", "--boundary-samples", "16"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let j = json(&o);
    assert!((j["eta"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-3);
}

#[test]
fn malformed_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", "{\n  \"catalog\": \"ball\",\n  \"n\": \n", "line 4"),
        ("unknown.json", r#"{"catalog": "ball", "radius": 2}"#, "`radius`"),
        ("version.json", r#"{"version": 7, "catalog": "ball"}"#, "`version`"),
        ("nobox.json", r#"{"n": 2, "expression": "abs2(z1) - 1"}"#, "`bbox`"),
        ("expr.json", r#"{"n": 1, "expression": "abs2(z1) - ", "bbox": [[-2, 2], [-2, 2]]}"#, "`expression`"),
        ("param.json", r#"{"catalog": "model", "params": {"beta": -1}}"#, "`params.beta`"),
        (
            "empty.json",
            r#"{"n": 2, "expression": "abs2(z1) + abs2(z2) - 1", "bbox": [[-0.3, 0.3], [-0.3, 0.3], [-0.3, 0.3], [-0.3, 0.3]]}"#,
            "zero set",
        ),
    ];
    for (name, text, needle) in cases {
        let p = write_spec(dir.path(), name, text);
        let o = levi(&["classify", &p, "--samples", "2"]);
        assert_eq!(code(&o), 2, "{name}");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let p = write_spec(dir.path(), "ok.json", r#"{"catalog": "ball"}"#);
    assert_eq!(code(&levi(&["classify", &p, "--n", "3", "--samples", "2"])), 2);
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let c = levi_cli::run(["levi", "df", "--gamma", "1"], &mut out, &mut err);
    assert_eq!(c, levi_cli::EXIT_PASS);
    assert_eq!(out, levi(&["df", "--gamma", "1"]).stdout);
}
