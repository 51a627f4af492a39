use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ideal-theta"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn build(dir: &Path, ell: u64, p: u64) -> std::path::PathBuf {
    let path = dir.join(format!("lat_{ell}_{p}.json"));
    let o = run(&["build", "--ell", &ell.to_string(), "--p", &p.to_string(), "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_writes_rank_eight_unimodular_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), 1, 5);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["gram"].as_array().unwrap().len(), 8);
    assert_eq!(v["p"], 5);
    assert_eq!(v["ell_norm"], 4);
    assert!(path.with_extension("json.manifest.jsonl").exists());
}

#[test]
fn invalid_pairs_exit_three_with_reason() {
    for (ell, p, needle) in [("5", "5", "divides"), ("1", "7", "not congruent to 1 mod 4"), ("1", "4", "not prime"), ("0", "5", "positive")] {
        let o = run(&["build", "--ell", ell, "--p", p]);
        assert_eq!(code(&o), 3, "ell={ell} p={p}");
        assert!(stderr(&o).contains(needle), "{}", stderr(&o));
    }
}

#[test]
fn unknown_flags_and_missing_input_exit_three() {
    assert_eq!(code(&run(&["build", "--nonsense"])), 3);
    assert_eq!(code(&run(&["verify"])), 3);
    assert_eq!(code(&run(&["sweep", "--pairs", "1-5"])), 3);
    assert_eq!(code(&run(&["verify", "--in", "/nonexistent/lattice.json"])), 3);
}

#[test]
fn round_trip_verify_theta_transform() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), 1, 5);

    // refused before verification
    let o = run(&["theta", "--in", s(&path), "--bound", "6"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("verify"));

    let o = run(&["verify", "--in", s(&path)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["failed_checks"].as_array().unwrap().len(), 0);
    assert_eq!(rep["unimodularity"]["det"], "1");

    let o = run(&["theta", "--in", s(&path), "--bound", "6"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,count,residue");
    assert_eq!(lines[1], "0,1,1");
    assert_eq!(lines[2], "1,240,0");
    assert_eq!(lines.len(), 8);
    assert!(lines[2..].iter().all(|l| l.ends_with(",0")));

    let o = run(&["theta", "--in", s(&path), "--bound", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "m,count,residue\n0,1,1\n");

    let csv_path = dir.path().join("g2.csv");
    let o = run(&["theta", "--in", s(&path), "--genus", "2", "--diag-bound", "1", "--out", s(&csv_path)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["congruence"]["verdict"], true);
    assert!(std::fs::read_to_string(&csv_path).unwrap().starts_with("diag,offdiag,count,residue\n"));

    let o = run(&["transform-check", "--in", s(&path)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep["transform"]["max_relative_error"].as_f64().unwrap() < 1e-8);
    let at_one = &rep["transform"]["per_y"][0];
    assert_eq!(at_one["y"], 1.0);
    assert_eq!(at_one["relative_error"], 0.0);

    let o = run(&["transform-check", "--in", s(&path), "--precision", "1e-300", "--bound", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("achievable"), "{}", stderr(&o));

    let manifest = std::fs::read_to_string(path.with_extension("json.manifest.jsonl")).unwrap();
    let commands: Vec<String> =
        manifest.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()["command"].as_str().unwrap().to_string()).collect();
    assert_eq!(commands[0], "build");
    assert_eq!(commands[1], "verify");
    assert!(commands.iter().any(|c| c == "transform-check"));
}

#[test]
fn corrupted_files_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), 3, 5);
    let text = std::fs::read_to_string(&path).unwrap();

    let mut v: Value = serde_json::from_str(&text).unwrap();
    let g = v["gram"][0][1].as_i64().unwrap();
    v["gram"][0][1] = Value::from(g + 2);
    let bad = dir.path().join("bad_gram.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = run(&["verify", "--in", s(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("failed check: consistency.gram"), "{}", stderr(&o));
    // a failed verify does not unlock theta
    assert_eq!(code(&run(&["theta", "--in", s(&bad)])), 3);

    let mut v: Value = serde_json::from_str(&text).unwrap();
    let n = v["zeta_matrix"].as_array().unwrap().len();
    v["zeta_matrix"] = Value::from((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect::<Vec<_>>()).collect::<Vec<_>>());
    let bad = dir.path().join("bad_zeta.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = run(&["verify", "--in", s(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("zeta.nontrivial"), "{}", stderr(&o));

    let bad = dir.path().join("garbage.json");
    std::fs::write(&bad, "{\"gram\": 3}").unwrap();
    assert_eq!(code(&run(&["verify", "--in", s(&bad)])), 3);

    // editing a verified file invalidates the manifest entry
    assert_eq!(code(&run(&["verify", "--in", s(&path)])), 0);
    std::fs::write(&path, text.replace("\n", "\n\n")).unwrap();
    assert_eq!(code(&run(&["theta", "--in", s(&path)])), 3);
}

#[test]
fn output_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(code(&run(&["build", "--ell", "7", "--p", "5", "--threads", "1", "--out", s(&a)])), 0);
    assert_eq!(code(&run(&["build", "--ell", "7", "--p", "5", "--threads", "4", "--out", s(&b)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.json");
    assert_eq!(code(&run(&["build", "--ell", "7", "--p", "5", "--sequential", "--out", s(&c)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn sweep_and_e8check() {
    let o = run(&["sweep", "--pairs", "1:5,3:5,7:5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows, ["1,5,8,true,true,true,240,", "3,5,8,true,true,true,240,", "7,5,8,true,true,true,240,"]);

    let o = run(&["sweep", "--pairs", "1:5,5:5"]);
    assert_eq!(code(&o), 1);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.lines().nth(2).unwrap().starts_with("5,5,,false,false,,,"));

    let o = run(&["sweep"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);

    let o = run(&["e8check", "--ell", "11", "--p", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["e8"]["root_count"], 240);
}
