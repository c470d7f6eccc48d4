use std::path::Path;
use std::process::{Command, Output};

fn jacobi(args: &[&str], cache: Option<&Path>, out_dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jacobi"));
    cmd.args(args).arg("--out-dir").arg(out_dir).env_remove("JACOBI_CACHE_DIR");
    if let Some(c) = cache {
        cmd.env("JACOBI_CACHE_DIR", c);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn lie_dimension_on_two_strands() {
    let dir = tempfile::tempdir().unwrap();
    let o = jacobi(&["dim", "--space", "L", "--strands", "2", "--degree", "1"], None, dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn section_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = jacobi(&["verify", "--check", "pi-section", "--strands", "1", "--degree", "3"], None, dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS pi-section"));
}

#[test]
fn three_chord_diagrams_in_degree_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = jacobi(&["enumerate", "--strands", "1", "--degree", "2", "--chords"], None, dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
    let j = jacobi(&["enumerate", "-m", "1", "-n", "2", "--chords", "--format", "json"], None, dir.path());
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(jacobi(&["dim", "--bogus"], None, dir.path()).status.code(), Some(2));
    assert_eq!(jacobi(&["frobnicate"], None, dir.path()).status.code(), Some(2));
    let o = jacobi(&["verify", "--check", "no-such-check", "-m", "1", "-n", "2"], None, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = jacobi(&["dim", "--space", "F", "-m", "1", "-n", "2"], None, dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn caps_exit_three_with_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = jacobi(&["enumerate", "-m", "2", "-n", "3", "--cap", "10"], None, dir.path());
    assert_eq!(o.status.code(), Some(3));
    let text = std::fs::read_to_string(dir.path().join("partial-manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "incomplete");
    assert_eq!(v["cap"], 10);
    let o = jacobi(&["dim", "--space", "A", "-m", "1", "-n", "7"], None, dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn cache_hits_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = ["export", "--what", "basis", "--space", "F", "--size", "2", "-m", "2", "-n", "3"];
    let cold = jacobi(&args, Some(&cache), dir.path());
    assert!(cold.status.success());
    let warm = jacobi(&args, Some(&cache), dir.path());
    assert_eq!(cold.stdout, warm.stdout);
    assert!(String::from_utf8_lossy(&warm.stderr).contains("cache hit"));
    let uncached = jacobi(&args, None, dir.path());
    assert_eq!(cold.stdout, uncached.stdout);
    let files: Vec<_> = std::fs::read_dir(cache.join("v0.1.0")).unwrap().collect();
    assert_eq!(files.len(), 1);
}

#[test]
fn seeded_checks_log_and_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--check", "path-independence,hopf-axioms", "-m", "2", "-n", "3", "--seed", "7"];
    let a = jacobi(&args, None, dir.path());
    let b = jacobi(&args, None, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("seed 7"));
    assert!(stdout(&a).contains("seed 7"));
}

#[test]
fn relation_matrices_export_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = jacobi(
        &["export", "--what", "relations", "--kind", "4T", "-m", "1", "-n", "2", "--format", "csv"],
        None,
        dir.path(),
    );
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("row,col,numerator,denominator\n"));
    assert!(text.lines().count() > 1);
    let out = dir.path().join("stu2.json");
    let o = jacobi(
        &["export", "--what", "relations", "--kind", "STU2", "--size", "2", "-m", "2", "-n", "3", "--out"],
        None,
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_jacobi"))
        .args(["export", "--what", "relations", "--kind", "STU2", "--size", "2", "-m", "2", "-n", "3", "--out"])
        .arg(&out)
        .env_remove("JACOBI_CACHE_DIR")
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["kind"], "STU2");
    assert!(!v["matrix"]["entries"].as_array().unwrap().is_empty());
}

#[test]
fn brackets_and_structure_constants() {
    let dir = tempfile::tempdir().unwrap();
    let chord = "2; strand 0: [0]; strand 1: [1]; chord (0,1)";
    let o = jacobi(&["bracket", "-m", "2", "-n", "2", chord, chord], None, dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n");
    let o = jacobi(&["bracket", "-m", "2", "-n", "3"], None, dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["basis"]["1"].as_array().unwrap().len(), 1);
    let o = jacobi(&["bracket", "-m", "2", "-n", "2", chord], None, dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn forest_graph_as_dot() {
    let dir = tempfile::tempdir().unwrap();
    let f = "1; strand 0: [0,1,2,3]; chord (0,1); chord (2,3)";
    let o = jacobi(&["export", "--what", "graph", "-m", "1", "-n", "2", "--forest", f], None, dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("--"));
}

#[test]
fn report_runs_everything() {
    let dir = tempfile::tempdir().unwrap();
    let o = jacobi(&["report", "-m", "1", "-n", "3", "--format", "json"], None, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 13);
    assert!(v["filtration"]["primitives_are_trees"].as_bool().unwrap());
}
