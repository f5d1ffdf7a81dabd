use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crossing-forest"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn grid_run_meets_the_bound() {
    let report = json(&run(&["run", "--gen", "grid:25", "--mode", "randomized", "--seed", "7"]));
    assert_eq!(report["n"], 25);
    assert_eq!(report["tree"].as_array().unwrap().len(), 24);
    assert!(report["total_crossing"].as_u64().unwrap() <= 20);
    for key in ["levels", "seed", "mode", "timings_ms"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["mode"], "randomized");
}

#[test]
fn identical_configs_print_identical_bytes() {
    let args = ["run", "--gen", "uniform:12", "--seed", "3", "--no-timings"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn planar_run_with_svg() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.json");
    let svg = dir.path().join("out.svg");
    let gen = run(&["gen", "uniform:10", "--seed", "4", "--out", pts.to_str().unwrap()]);
    assert!(gen.status.success());
    let report = json(&run(&[
        "run",
        "--in",
        pts.to_str().unwrap(),
        "--mode",
        "deterministic-planar",
        "--svg",
        svg.to_str().unwrap(),
        "--lines",
        "3",
    ]));
    assert_eq!(report["mode"], "deterministic-planar");
    let picture = fs::read_to_string(&svg).unwrap();
    assert_eq!(picture.matches("<circle").count(), 10);
    assert_eq!(picture.matches("<text").count(), 3);
}

#[test]
fn abstract_set_system() {
    let dir = tempfile::tempdir().unwrap();
    let sets = dir.path().join("sets.json");
    fs::write(&sets, r#"{"ground": 5, "sets": [[0, 1], [1, 2, 3], [4]]}"#).unwrap();
    let report = json(&run(&["run", "--in", sets.to_str().unwrap(), "--abstract", "--verify"]));
    assert_eq!(report["tree"].as_array().unwrap().len(), 4);
    assert_eq!(report["verification"]["passed"], true);
}

#[test]
fn verify_and_oracle_subcommands() {
    let block = json(&run(&["verify", "--gen", "uniform:6", "--seed", "2"]));
    assert_eq!(block["passed"], true);
    assert!(block["oracle"]["t_opt"].as_u64().unwrap() >= 1);
    let oracle = json(&run(&["oracle", "--gen", "circle:5"]));
    assert_eq!(oracle["witness"].as_array().unwrap().len(), 4);
    assert_eq!(oracle["examined"], 125);
}

#[test]
fn lp_dump_and_trials() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("p.lp");
    let out = run(&["lp", "--gen", "grid:4", "--program", "dual", "--out", lp.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.starts_with("minimize") && text.trim_end().ends_with("end"));

    let reports = json(&run(&["run", "--gen", "uniform:8", "--trials", "3", "--seed", "10", "--dump-lp", lp.to_str().unwrap()]));
    let seeds: Vec<u64> = reports.as_array().unwrap().iter().map(|r| r["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, vec![10, 11, 12]);
    assert!(fs::read_to_string(&lp).unwrap().contains("subject to"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["run", "--nope"]).status.code(), Some(1));
    assert_eq!(run(&["run"]).status.code(), Some(1));
    assert_eq!(run(&["oracle", "--gen", "uniform:9"]).status.code(), Some(1));
    // a threshold below one leaves the primal infeasible
    assert_eq!(run(&["run", "--gen", "uniform:6", "--t", "1/2"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("collinear.json");
    fs::write(&pts, "[[0, 0], [1, 1], [2, 2], [0, 1]]").unwrap();
    let p = pts.to_str().unwrap();
    assert_eq!(run(&["run", "--in", p]).status.code(), Some(2));
    assert!(run(&["run", "--in", p, "--perturb"]).status.success());
}

#[test]
fn thread_cap_is_honored() {
    let out = bin().env("CROSSING_FOREST_THREADS", "1").args(["oracle", "--gen", "uniform:6"]).output().unwrap();
    assert!(out.status.success());
    let out = bin().env("CROSSING_FOREST_THREADS", "many").args(["oracle", "--gen", "uniform:6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
