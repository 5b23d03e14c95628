use std::process::{Command, Output};

fn flatdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatdiv")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn census_lists_torus_cylinders() {
    let o = flatdiv(&["--surface", "torus", "census", "--bound", "2"]);
    assert_eq!(o.status.code(), Some(0));
    // primitive vectors of length at most 2, up to sign: (1,0), (0,1), (1,1), (1,-1)
    assert_eq!(json(&o)["count"], 4);
}

#[test]
fn census_sector_filters() {
    let all = json(&flatdiv(&["--surface", "torus", "census", "--bound", "3"]));
    let part = json(&flatdiv(&["--surface", "torus", "census", "--bound", "3", "--sector", "0.1", "1.4"]));
    let (a, p) = (all["count"].as_u64().unwrap(), part["count"].as_u64().unwrap());
    assert!(p > 0 && p < a, "{p} of {a}");
}

#[test]
fn missing_config_is_exit_2() {
    let o = flatdiv(&["--config", "/definitely/not/here.json", "run"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cfg.json");
    std::fs::write(&p, r#"{"depht": 3}"#).unwrap();
    let o = flatdiv(&["--config", p.to_str().unwrap(), "census"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_surface_and_tolerance_are_exit_2() {
    assert_eq!(flatdiv(&["--surface", "no_such_surface", "census"]).status.code(), Some(2));
    assert_eq!(flatdiv(&["--tolerance", "3", "census"]).status.code(), Some(2));
}

#[test]
fn unparsable_arguments_are_exit_2() {
    assert_eq!(flatdiv(&["census", "--bound", "lots"]).status.code(), Some(2));
}

#[test]
fn enforced_hypothesis_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let g = flatdiv(&["--out", out, "grow", "--depth", "1", "--branch-cap", "1"]);
    assert_eq!(g.status.code(), Some(0), "{}", String::from_utf8_lossy(&g.stderr));
    let tree = dir.path().join("tree.json");
    let o = flatdiv(&["audit-l2", "--tree", tree.to_str().unwrap(), "--enforce"]);
    assert_eq!(o.status.code(), Some(3));
    let o = flatdiv(&["audit-l2", "--tree", tree.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pass"], true);
}

#[test]
fn dimension_reads_a_stored_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    flatdiv(&["--out", out, "grow", "--depth", "2", "--branch-cap", "2"]);
    let tree = dir.path().join("tree.json");
    let o = flatdiv(&["dimension", "--tree", tree.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = json(&o)["report"]["s_lower"].as_f64().unwrap();
    assert!(s > 0.0 && s <= 1.0, "{s}");
}

#[test]
fn trace_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = flatdiv(&["--out", out, "trace", "--theta", "0.4", "--horizon", "2", "--step", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["samples"], 5);
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(std::fs::read_to_string(dir.path().join("systole.svg")).unwrap().starts_with("<svg"));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn paper_constants_reports_infeasible() {
    let o = flatdiv(&["paper-constants"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["constants"]["t1"], 3);
    assert_eq!(v["constants"]["desk_feasible"], false);
}

#[test]
fn run_writes_a_manifest_that_matches() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"depth": 2, "branch_cap": 2, "diagnostics": {"controls": 1, "branch_depth": 2}}"#).unwrap();
    let out = dir.path().join("out");
    let o = flatdiv(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "7", "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 7);
    for f in m["files"].as_array().unwrap() {
        let data = std::fs::read(out.join(f["file"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), flatdiv::pipeline::output::sha256_hex(&data));
    }
}
