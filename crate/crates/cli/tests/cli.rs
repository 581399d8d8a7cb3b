use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spraylab"));
    c.env_remove("SPRAYLAB_SEED");
    c
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(format!("{name}.json")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn check_go_exit_codes() {
    let ok = run(&[
        "check-go",
        "--config",
        &config("so3_sphere_zero_eta"),
        "--samples",
        "16",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["verdict"], "go_evidence");

    let bad = run(&[
        "check-go",
        "--config",
        &config("so3_sphere_radial_eta"),
        "--samples",
        "16",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let cert = json(&bad);
    assert_eq!(cert["verdict"], "not_go");
    assert!(cert["max_residual"].as_f64().unwrap() > 0.9);
}

#[test]
fn compare_two_routes() {
    let out = run(&[
        "compare",
        "--config",
        &config("so3_sphere_tangential_eta"),
        "--y0",
        "1,0",
        "--t1",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!(r["max_point_deviation"].as_f64().unwrap() <= 1e-6);
    assert_eq!(r["claim_a"]["verdict"], "pass");
    assert!((r["witness"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn compare_with_chart() {
    let out = run(&[
        "compare",
        "--config",
        &config("sphere_chart"),
        "--y0",
        "0,1",
        "--t1",
        "1.5707963267948966",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["chart"]["max_deviation"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn compare_refuses_closed_form_off_the_orbit_condition() {
    let out = run(&["compare", "--config", &config("so3_sphere_radial_eta"), "--t1", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["notes"][0].as_str().unwrap().contains("not homogeneous"));
}

#[test]
fn shipped_configs_match_registry_dumps() {
    for name in [
        "so3_group",
        "so3_sphere_zero_eta",
        "so3_sphere_radial_eta",
        "so3_sphere_tangential_eta",
        "su2_group",
        "sphere_chart",
    ] {
        let dump = run(&["examples", "--dump", name]);
        assert_eq!(dump.status.code(), Some(0));
        let shipped = std::fs::read(configs().join(format!("{name}.json"))).unwrap();
        assert_eq!(dump.stdout, shipped, "{name}");
    }
    let list = run(&["examples"]);
    assert_eq!(String::from_utf8(list.stdout).unwrap().lines().count(), 6);
    assert_eq!(run(&["examples", "--dump", "torus"]).status.code(), Some(2));
}

#[test]
fn dumped_config_reproduces_certificates() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["so3_sphere_tangential_eta", "so3_group"] {
        let path = dir.path().join(format!("{name}.json"));
        let path = path.to_str().unwrap();
        assert!(run(&["examples", "--dump", name, "--out", path]).status.success());
        for cmd in ["check-go", "check-ws"] {
            let a = run(&[cmd, "--config", path, "--samples", "8", "--seed", "11"]);
            let b = run(&[cmd, "--config", &config(name), "--samples", "8", "--seed", "11"]);
            assert!(!a.stdout.is_empty());
            assert_eq!(a.stdout, b.stdout, "{name} {cmd}");
            assert_eq!(a.status.code(), b.status.code());
        }
    }
}

#[test]
fn seed_flag_and_env_fallback() {
    let cfg = config("so3_sphere_tangential_eta");
    let flag = run(&["check-go", "--config", &cfg, "--samples", "4", "--seed", "99"]);
    let env = bin()
        .args(["check-go", "--config", &cfg, "--samples", "4"])
        .env("SPRAYLAB_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(json(&flag)["seed"], 99);
    let other = run(&["check-go", "--config", &cfg, "--samples", "4", "--seed", "100"]);
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn invalid_config_lists_all_violations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(configs().join("so3_sphere_zero_eta.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["algebra"]["structure_constants"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!([2, 1, 3, 1.0]));
    v["eta"] = serde_json::json!({"kind": "components", "components": ["y1"]});
    v["numerics"]["step"] = serde_json::json!(-1.0);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("antisymmetry violation: c[1][2][3] = 1 and c[2][1][3] = 1"),
        "{err}"
    );
    assert!(err.contains("numerics.step"), "{err}");

    std::fs::write(&path, "{ \"algebra\": ").unwrap();
    let out = run(&["check-go", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1"));
}

#[test]
fn eta_count_mismatch_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(configs().join("so3_sphere_zero_eta.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["eta"] = serde_json::json!({"kind": "components", "components": ["y1"]});
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["check-go", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("components needs 2"));
}

#[test]
fn blow_up_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grow.json");
    let text = std::fs::read_to_string(configs().join("so3_sphere_radial_eta.json")).unwrap();
    std::fs::write(&path, text.replace("norm()*y", "-norm()*y")).unwrap();
    let out = run(&[
        "geodesic",
        "--config",
        path.to_str().unwrap(),
        "--y0",
        "1,0",
        "--t1",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("numerical failure"));
}

#[test]
fn geodesic_csv_and_json() {
    let cfg = config("so3_group");
    let out = run(&["geodesic", "--config", &cfg, "--t1", "0.01", "--step", "0.005"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 3 + 9 + 9);
    assert_eq!(header[4], "c_1");
    assert_eq!(header[13], "point_1");
    assert_eq!(text.lines().count(), 4);

    let out = run(&[
        "geodesic", "--config", &cfg, "--t1", "0.01", "--step", "0.005", "--format", "json",
    ]);
    let v = json(&out);
    assert_eq!(v["trajectory"]["times"].as_array().unwrap().len(), 3);
    assert!(v["lifting_residual"].as_f64().unwrap() < 1e-6);

    let out = run(&["geodesic", "--config", &cfg, "--y0", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check-go", "--config", &cfg, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theorem3_and_ws_commands() {
    let ok = run(&[
        "verify-thm3",
        "--config",
        &config("so3_sphere_zero_eta"),
        "--samples",
        "8",
        "--t1",
        "1",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["verdict"], "pass");

    let refused = run(&[
        "verify-thm3",
        "--config",
        &config("so3_sphere_radial_eta"),
        "--samples",
        "8",
    ]);
    assert_eq!(refused.status.code(), Some(1));
    assert_eq!(json(&refused)["ws_verdict"], "not_ws");

    let ws = run(&["check-ws", "--config", &config("so3_group"), "--samples", "4"]);
    assert_eq!(ws.status.code(), Some(1));
    let cert = json(&ws);
    assert_eq!(cert["verdict"], "inconclusive");
    assert!(cert["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n == "algebraic condition fails at all samples"));
}

#[test]
fn validate_reports_residuals() {
    let out = run(&["validate", "--config", &config("su2_group")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["jacobi_residual"].as_f64().unwrap() <= 1e-12);
    assert!(v["representation_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["dim_h"], 0);
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(run(&["check-go"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["geodesic", "--config", &config("so3_group"), "--step", "0"])
            .status
            .code(),
        Some(2)
    );
}
