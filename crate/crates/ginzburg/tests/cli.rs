use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}.q", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ginzburg")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ginzburg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn a2_minimal_model_has_no_violations() {
    let out = run(&["minimal-model", "--quiver", &fixture("a2"), "--wmax", "4", "--nmax", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["table"]["counts"]["4"], 0);
    assert!(v["table"]["counts"]["3"].as_u64().unwrap() > 0);
}

#[test]
fn a3_normalized_model_reports_the_obstruction() {
    let out = run(&["minimal-model", "--quiver", &fixture("a3"), "--wmax", "4", "--nmax", "6", "--normalize"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["obstructed_arities"], serde_json::json!([4]));
    assert_eq!(v["table"]["counts"]["4"], 2);
}

#[test]
fn bad_inputs_exit_with_two() {
    let broken = scratch("broken.q");
    std::fs::write(&broken, "vertex 1\narrow a 1 -> 2\n").unwrap();
    let broken = broken.to_string_lossy().into_owned();
    let (lp, empty, a2, kr) = (fixture("loop"), fixture("empty"), fixture("a2"), fixture("kronecker"));
    let cases: Vec<Vec<&str>> = vec![
        vec!["minimal-model", "--quiver", &lp],
        vec!["minimal-model", "--quiver", &empty],
        vec!["minimal-model", "--quiver", &broken],
        vec!["minimal-model", "--quiver", "/nonexistent/q.q"],
        vec!["compare", "--mode", "thm55", "--quiver", &kr],
        vec!["ar-quiver", "--depth", "0", "--quiver", &a2],
        vec!["hilbert", "--of", "twisted", "--quiver", &kr],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
    // clap rejects arguments with its own usage error.
    assert_eq!(run(&["minimal-model", "--wmax", "0"]).status.code(), Some(2));
}

#[test]
fn stored_table_is_rechecked() {
    let out = run(&["minimal-model", "--quiver", &fixture("a2"), "--wmax", "3", "--nmax", "4"]);
    let good = scratch("a2-table.json");
    std::fs::write(&good, &out.stdout).unwrap();
    let ok = run(&["check", "--quiver", &fixture("a2"), "--wmax", "3", "--nmax", "4", "--table", good.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["ok"], true);

    let mut v = json(&out);
    v["table"]["entries"][0]["output"][0]["coeff"] = Value::from("2/1");
    let bad = scratch("a2-corrupt.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let res = run(&["check", "--quiver", &fixture("a2"), "--wmax", "3", "--nmax", "4", "--table", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let r = json(&res);
    assert_eq!(r["ok"], false);
    assert!(r["relations"]["violations"].as_u64().unwrap() > 0);
}

#[test]
fn kronecker_homology_is_preprojective() {
    let h = run(&["hilbert", "--quiver", &fixture("kronecker"), "--wmax", "4", "--of", "homology"]);
    let p = run(&["hilbert", "--quiver", &fixture("kronecker"), "--wmax", "4", "--of", "preprojective"]);
    assert_eq!(h.status.code(), Some(0));
    let (h, p) = (json(&h), json(&p));
    assert_eq!(h, p);
    assert!(h["blocks"].as_array().unwrap().iter().all(|b| b["d"] == 0));
    let out = run(&["compare", "--mode", "thm42", "--quiver", &fixture("kronecker"), "--wmax", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn dynkin_comparisons_pass() {
    for q in ["a2", "a3", "d4"] {
        for mode in ["thm42", "thm55"] {
            let out = run(&["compare", "--mode", mode, "--quiver", &fixture(q), "--wmax", "4"]);
            assert_eq!(out.status.code(), Some(0), "{q} {mode}: {}", String::from_utf8_lossy(&out.stdout));
            let v = json(&out);
            assert_eq!(v["mismatches"], serde_json::json!([]));
        }
    }
}

#[test]
fn ar_quiver_counts() {
    let a2 = json(&run(&["ar-quiver", "--quiver", &fixture("a2"), "--depth", "4"]));
    assert_eq!(a2["unshifted"], 3);
    assert_eq!(a2["transjective"].as_array().unwrap().len(), 5);
    assert_eq!(a2["objects"].as_array().unwrap().len(), 10);
    let a3 = json(&run(&["ar-quiver", "--quiver", &fixture("a3"), "--depth", "4"]));
    assert_eq!(a3["unshifted"], 6);
    let dot = run(&["ar-quiver", "--quiver", &fixture("a2"), "--depth", "2", "--format", "text"]);
    let dot = String::from_utf8(dot.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.trim_end().ends_with('}'));
}

#[test]
fn reads_stdin_and_writes_out() {
    use std::io::Write;
    let out_path = scratch("hilbert.json");
    let mut child = Command::new(env!("CARGO_BIN_EXE_ginzburg"))
        .args(["hilbert", "--of", "chains", "--wmax", "2", "--out", out_path.to_str().unwrap()])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(std::fs::read(fixture("a2")).unwrap().as_slice()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert!(!v["blocks"].as_array().unwrap().is_empty());
}

#[test]
fn runs_are_byte_identical() {
    let a3 = fixture("a3");
    let args = ["minimal-model", "--quiver", &a3, "--wmax", "4", "--nmax", "5", "--format", "text"];
    let (a, b) = (run(&args), run(&args));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}
