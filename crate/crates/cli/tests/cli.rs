use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parahyp")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn cone_config_is_parabolic_by_t1a() {
    let out = run(&["classify", "--config", &config("cone.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"], "parabolic");
    assert_eq!(v["certificate"]["rule"], "T1A");
}

#[test]
fn cmc_config_is_hyperbolic_by_t2b() {
    let out = run(&["classify", "--config", &config("cmc-h3.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"], "hyperbolic");
    assert_eq!(v["certificate"]["rule"], "T2B");
}

#[test]
fn toml_configs_are_accepted() {
    let out = run(&["classify", "--config", &config("cor3.toml")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certificate"]["rule"], "Cor3");
}

#[test]
fn fitted_tail_near_the_threshold_exits_two() {
    let out = run(&["classify", "--config", &config("fitted-boundary.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["outcome"], "inconclusive");
}

#[test]
fn capacity_of_a_spherical_shell() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("cap.json");
    let out = run(&["capacity", "--config", &config("capacity-r3.json"), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let value = v["value"].as_f64().unwrap();
    let err = v["abs_error"].as_f64().unwrap();
    assert!((value - 16.0 * PI / 3.0).abs() <= err.max(1e-12) * 10.0);
    assert_eq!(v["method"], "closed_form");
}

#[test]
fn plane_potential_is_one_half_at_two() {
    let out = run(&["potential", "--config", &config("potential-plane.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,psi"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (r, p) = l.split_once(',').unwrap();
            (r.parse().unwrap(), p.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 257);
    let (_, psi) = rows.iter().find(|(r, _)| (r - 2.0).abs() < 1e-12).unwrap();
    assert!((psi - 0.5).abs() <= 1e-9);
}

#[test]
fn plane_simulation_matches_the_potential() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.json");
    std::fs::write(
        &cfg,
        r#"{
  "problem": { "m": 2, "warping": { "family": "space_form", "curvature": 0.0 }, "rho": 1.0, "intrinsic": true },
  "outer_radius": 4.0, "start": 2.0, "n_paths": 20000, "dt_max": 0.002, "seed": 3,
  "exit_log": "exits.csv"
}"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let p = v["estimate"]["p_hat"].as_f64().unwrap();
    let se = v["estimate"]["std_err"].as_f64().unwrap();
    assert!((p - 0.5).abs() <= 3.0 * se);
    assert_eq!(v["closed_form"].as_f64().unwrap(), 0.5);
    let log = std::fs::read_to_string(dir.path().join("exits.csv")).unwrap();
    assert_eq!(log.lines().count(), 20_001);
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    std::fs::write(
        &cfg,
        r#"outer_radius = 4.0
start = 2.0
n_paths = 500
dt_max = 0.002
seed = 1

[problem]
m = 2
rho = 1.0
intrinsic = true
warping = { family = "space_form", curvature = 0.0 }
"#,
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let a = json(&run(&["simulate", "--config", path, "--seed", "9"]));
    let b = json(&run(&["simulate", "--config", path, "--seed", "9"]));
    assert_eq!(a, b);
    assert_eq!(a["seed"], 9);
}

#[test]
fn network_study_and_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("net.json");
    std::fs::write(
        &cfg,
        r#"{
  "dimension": 2,
  "warping": { "family": "space_form", "curvature": -1.0 },
  "inner_radius": 1.0,
  "outer_radius": 3.0,
  "schedule": [ { "radial": 16, "angular": 16 }, { "radial": 64, "angular": 32 } ],
  "edge_list": "edges.txt"
}"#,
    )
    .unwrap();
    let out = run(&["network", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1]["relative_gap"].as_f64().unwrap() < 0.03);
    let edges = std::fs::read_to_string(dir.path().join("edges.txt")).unwrap();
    // 65 rings of 32 angular edges plus 64 shells of 32 radial edges.
    assert_eq!(edges.lines().count(), 65 * 32 + 64 * 32);
}

#[test]
fn catalog_examples() {
    for (name, outcome) in [("cone:0.7854", "parabolic"), ("paraboloid:1.0", "parabolic"), ("cmc-h3:0.4", "hyperbolic")] {
        let out = run(&["catalog", name]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json(&out);
        assert_eq!(v["verdict"]["outcome"], outcome, "{name}");
    }
    let cone = json(&run(&["catalog", "cone:0.7854"]));
    assert!(cone["h"].as_array().unwrap().iter().all(|p| p[1] == 0.0));
    assert!(cone["g"].as_array().unwrap().iter().all(|p| p[1] == 1.0));
    let out = run(&["catalog", "torus:2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_profiles_export_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("paraboloid.csv");
    let out = run(&["catalog", "paraboloid:1.0", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("r,h,g\n"));
    assert_eq!(text.lines().count(), 92);
}

#[test]
fn unknown_keys_are_rejected_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"catalog\": \"cone:0.5\",\n  \"colour\": 3\n}").unwrap();
    let out = run(&["classify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("colour") && err.contains("line 3"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["classify"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--config", &config("cone.json"), "--tolerance", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
