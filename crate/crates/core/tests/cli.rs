use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lengthforge(args: &[&str]) -> Output {
    lengthforge_env(args, &[])
}

fn lengthforge_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lengthforge"));
    cmd.args(args).env_remove("LENGTHFORGE_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn realize_writes_trace_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let r = lengthforge(&["realize", "--lengths", "2,3", "--counts", "1,1", "--json", path_str(&out)]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let trace: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(trace["target"], "777");
    assert_eq!(trace["scale"], "777");
    assert!(String::from_utf8_lossy(&r.stderr).contains("verified"));

    let v = lengthforge(&["verify", "--input", path_str(&out)]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout_json(&v)["passed"], true);
}

#[test]
fn realize_to_stdout() {
    let r = lengthforge(&["realize", "--lengths", "4", "--counts", "1", "--no-verify"]);
    assert_eq!(r.status.code(), Some(0));
    let trace = stdout_json(&r);
    assert_eq!(trace["target"], "1324");
    assert_eq!(trace["steps"][0]["prime"], "331");
}

#[test]
fn realize_rejects_small_lengths() {
    let r = lengthforge(&["realize", "--lengths", "1,3", "--counts", "1,1"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("lengths must be ≥ 2"));
}

#[test]
fn realize_rejects_malformed_requests() {
    for args in [
        &["realize", "--lengths", "2,3", "--counts", "1"][..],
        &["realize", "--lengths", "2", "--counts", "0"],
        &["realize", "--lengths", "2,x", "--counts", "1,1"],
        &["realize", "--lengths", "-2", "--counts", "1"],
        &["realize", "--lengths", "2,2", "--counts", "1,1"],
        &["realize", "--lengths", "13", "--counts", "1"],
        &["realize", "--lengths", "2"],
        &["frobnicate"],
    ] {
        assert_eq!(lengthforge(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn realize_gap_export() {
    let dir = tempfile::tempdir().unwrap();
    let gap = dir.path().join("out.g");
    let r = lengthforge(&["realize", "--lengths", "2", "--counts", "1", "--gap", path_str(&gap)]);
    assert_eq!(r.status.code(), Some(0));
    let text = std::fs::read_to_string(&gap).unwrap();
    assert!(text.contains("NumericalSemigroup(3,4);"));
    for line in text.lines().filter(|l| !l.starts_with("NumericalSemigroup")) {
        assert!(line.starts_with('#'), "{line}");
    }
    assert!(text.contains("# target: 7"));
}

#[test]
fn analyze_examples() {
    let r = lengthforge(&["analyze", "--generators", "2,3", "--element", "6"]);
    assert_eq!(r.status.code(), Some(0));
    let a = stdout_json(&r);
    assert_eq!(a["lengths"], serde_json::json!([2, 3]));
    assert_eq!(a["delta"], serde_json::json!([1]));
    assert_eq!(a["factorizations"]["vectors"], serde_json::json!([[0, 2], [3, 0]]));
    assert_eq!(a["squarefree"]["paper_literal"], false);
    assert_eq!(a["squarefree"]["strong"], false);

    // the modes disagree only on a repeated atom in a length-2 factorization
    let a = stdout_json(&lengthforge(&["analyze", "--generators", "2,3", "--element", "4"]));
    assert_eq!(a["squarefree"]["paper_literal"], true);
    assert_eq!(a["squarefree"]["strong"], false);

    let r = lengthforge(&["analyze", "--generators", "3,4", "--element", "7"]);
    let a = stdout_json(&r);
    assert_eq!(a["lengths"], serde_json::json!([2]));
    assert_eq!(a["squarefree"]["paper_literal"], true);
    assert_eq!(a["counts"]["2"], 1);

    assert_eq!(lengthforge(&["analyze", "--generators", "2,4", "--element", "6"]).status.code(), Some(2));
    assert_eq!(lengthforge(&["analyze", "--generators", "2,3", "--element", "-1"]).status.code(), Some(2));
    assert_eq!(lengthforge(&["analyze", "--generators", "2,3,5", "--element", "6"]).status.code(), Some(2));
}

#[test]
fn analyze_budget_excess() {
    let r = lengthforge_env(
        &["analyze", "--generators", "2,3", "--element", "1000"],
        &[("LENGTHFORGE_BUDGET", "10")],
    );
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("budget"));
    let r = lengthforge_env(&["analyze", "--generators", "2,3", "--element", "1"], &[("LENGTHFORGE_BUDGET", "lots")]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn verify_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("out.json");
    let r = lengthforge(&["realize", "--lengths", "2,3", "--counts", "1,1", "--json", path_str(&good)]);
    assert_eq!(r.status.code(), Some(0));
    let text = std::fs::read_to_string(&good).unwrap();

    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, text.replace(r#""counts":{"2":1,"3":1}"#, r#""counts":{"2":1,"3":2}"#)).unwrap();
    let v = lengthforge(&["verify", "--input", path_str(&tampered)]);
    assert_eq!(v.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&v.stderr);
    assert!(stderr.contains("counts"), "{stderr}");
    assert_eq!(stdout_json(&v)["counts_ok"], false);

    // a tight budget turns enumeration into recorded failures, never a pass
    let v = lengthforge_env(&["verify", "--input", path_str(&good)], &[("LENGTHFORGE_BUDGET", "3")]);
    assert_eq!(v.status.code(), Some(1));

    assert_eq!(lengthforge(&["verify", "--input", path_str(&dir.path().join("missing.json"))]).status.code(), Some(2));
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"lengths\": [2").unwrap();
    assert_eq!(lengthforge(&["verify", "--input", path_str(&broken)]).status.code(), Some(2));
    std::fs::write(&broken, text.replace("\"3/7\"", "\"6/14\"")).unwrap();
    assert_eq!(lengthforge(&["verify", "--input", path_str(&broken)]).status.code(), Some(2));
}

#[test]
fn delta_examples() {
    for (d, lengths) in [("1", serde_json::json!([2, 3])), ("1,2", serde_json::json!([2, 3, 5]))] {
        let r = lengthforge(&["delta", "--distances", d]);
        assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
        assert_eq!(stdout_json(&r)["lengths"], lengths);
        assert!(String::from_utf8_lossy(&r.stderr).contains("[ok] delta"));
    }
    assert_eq!(lengthforge(&["delta", "--distances", "0"]).status.code(), Some(2));
}

#[test]
fn realize_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (lengths, counts) in [("2", "3"), ("3,5", "1,2"), ("2,4", "2,1")] {
        let out = dir.path().join("t.json");
        let r = lengthforge(&["realize", "--lengths", lengths, "--counts", counts, "--json", path_str(&out)]);
        assert_eq!(r.status.code(), Some(0));
        assert_eq!(lengthforge(&["verify", "--input", path_str(&out)]).status.code(), Some(0));
    }
}

#[test]
fn help_exits_zero() {
    let r = lengthforge(&["--help"]);
    assert_eq!(r.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&r.stdout).contains("realize"));
}
