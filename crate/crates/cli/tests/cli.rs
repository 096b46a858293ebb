use std::path::Path;
use std::process::Command;

fn lcsp(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lcsp")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

#[test]
fn exit_codes() {
    let (code, out) = lcsp(&["solve", &fixture("free_bad.lcsp")]);
    assert_eq!(code, 0);
    assert!(out.contains("cost 5"));
    let dir = tempfile::tempdir().unwrap();
    let infeasible = dir.path().join("inf.lcsp");
    std::fs::write(&infeasible, "vertices 2\nsource 0\ntarget 1\narc 0 0 1 1\np cnf 0 1\n0\n").unwrap();
    assert_eq!(lcsp(&["solve", infeasible.to_str().unwrap()]).0, 2);
    assert_eq!(lcsp(&["oracle", infeasible.to_str().unwrap()]).0, 2);
    assert_eq!(lcsp(&["solve", "--node-limit", "1", &fixture("free_bad.lcsp")]).0, 3);
    assert_eq!(lcsp(&["solve", "--branch", "nonsense", &fixture("free_bad.lcsp")]).0, 64);
    assert_eq!(lcsp(&["frobnicate"]).0, 64);
    assert_eq!(lcsp(&["solve", dir.path().join("missing.lcsp").to_str().unwrap()]).0, 1);
}

#[test]
fn generate_then_bench() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.lcsp");
    let (code, text) = lcsp(&["generate", "--seed", "4"]);
    assert_eq!(code, 0);
    std::fs::write(&inst, &text).unwrap();
    assert_eq!(lcsp(&["generate", "--seed", "4"]).1, text);
    let rows = dir.path().join("rows.csv");
    let summary = dir.path().join("summary.csv");
    let (code, _) = lcsp(&[
        "bench",
        inst.to_str().unwrap(),
        "--configs",
        "best-first/sup/graph",
        "--out",
        rows.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let rows = std::fs::read_to_string(rows).unwrap();
    assert!(rows.starts_with("instance,config,status,cost,nodes,sp_searches,arc_relaxations,time_total_s,time_sp_s"));
    // baseline is always included
    assert_eq!(rows.lines().count(), 3);
}

#[test]
fn compile_flight_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = lcsp(&[
        "compile-flight",
        "--dataset",
        &fixture("flight/central"),
        "--origin",
        "LFPG",
        "--destination",
        "EDDM",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--solve",
        "--node-rule",
        "best-first",
        "--branch",
        "sup",
        "--conflict",
        "graph",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("ELMAR@4"), "{out}");
    let written = dir.path().join("LFPG-EDDM.lcsp");
    assert_eq!(lcsp(&["solve", written.to_str().unwrap()]).0, 0);
}
