use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koszul-kit"))
        .args(args)
        .env_remove("KOSZUL_SEED")
        .output()
        .expect("binary runs")
}

fn run_file(cmd: &str, file: &str, extra: &[&str]) -> Output {
    let path = data(file);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn pbw_heisenberg_passes() {
    let o = run_file("pbw", "heisenberg.json", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn pbw_failure_exits_one() {
    let o = run_file("pbw", "nonpbw.json", &["--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["result"]["cond1"], true);
    assert_eq!(v["result"]["cond3"], false);
}

#[test]
fn cdga_two_point_golden_values() {
    let o = run_file("cdga", "twopoint.json", &[]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("c = 2·x*²"), "{s}");
    assert!(s.contains("d(x*) = -3·x*²"), "{s}");
}

#[test]
fn tor_of_trivial_heisenberg_module() {
    let o = run_file("tor", "heisenberg.json", &["--module", "k", "--range", "0..3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let dims: Vec<u64> = (0..=3)
        .map(|p| {
            v["result"]["entries"]
                .as_array()
                .unwrap()
                .iter()
                .filter(|e| e["degree"] == p)
                .map(|e| e["dim"].as_u64().unwrap())
                .sum()
        })
        .collect();
    assert_eq!(dims, vec![1, 2, 2, 1]);
}

#[test]
fn golden_outputs() {
    for (args, golden) in [
        (vec!["cdga", "twopoint.json"], "cdga_twopoint.txt"),
        (vec!["tor", "heisenberg.json", "--module", "k", "--range", "0..3"], "tor_heisenberg.txt"),
        (vec!["pbw", "heisenberg.json", "--json"], "pbw_heisenberg.json"),
    ] {
        let o = run_file(args[0], args[1], &args[2..]);
        let want = std::fs::read_to_string(data("golden").join(golden)).unwrap();
        assert_eq!(stdout(&o), want, "{golden}");
    }
}

#[test]
fn reports_reparse_to_equal_objects() {
    for args in [
        vec!["truncate", "sym2.json"],
        vec!["cdga", "heisenberg.json"],
        vec!["minimize", "sym2.json", "--complex", "pair"],
        vec!["null-free", "dualnum.json", "--complex", "periodic"],
        vec!["regrade", "sym2.json", "--cdg-module", "E", "--r", "0"],
    ] {
        let mut extra = args[2..].to_vec();
        extra.push("--json");
        let o = run_file(args[0], args[1], &extra);
        let text = stdout(&o);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text, "{args:?}");
    }
}

#[test]
fn dual_output_is_a_problem_file() {
    let o = run_file("dual", "sym2.json", &["--json"]);
    assert_eq!(o.status.code(), Some(0));
    let dual = json(&o)["result"]["dual"].clone();
    assert_eq!(dual["generators"], serde_json::json!(["x*", "y*"]));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dual.json");
    std::fs::write(&path, serde_json::to_string(&dual).unwrap()).unwrap();
    let again = run(&["dual", path.to_str().unwrap(), "--json"]);
    assert_eq!(again.status.code(), Some(0));
    let back = json(&again)["result"]["dual"].clone();
    assert_eq!(back["generators"], serde_json::json!(["x", "y"]));
    // S(2) again: one relation spanning xy - yx.
    let rel = back["relations"].as_array().unwrap();
    assert_eq!(rel.len(), 1);
    assert_eq!(rel[0][1], serde_json::json!(-rel[0][2].as_i64().unwrap()));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["selftest", "--json"]);
    let b = run(&["selftest", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run_file("ext", "sym2.json", &["--json"]);
    let d = run_file("ext", "sym2.json", &["--json"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn seed_comes_from_flag_or_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_koszul-kit"))
        .args(["selftest", "--json"])
        .env("KOSZUL_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(json(&o)["result"]["seed"], 7);
    let o = run(&["selftest", "--seed", "11", "--json"]);
    assert_eq!(json(&o)["result"]["seed"], 11);
    assert_eq!(json(&o)["provenance"]["flags"]["seed"], "11");
}

#[test]
fn corrupted_signs_fail_selftest() {
    let o = run(&["selftest", "--corrupt-signs", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let items = json(&o)["result"]["items"].as_array().unwrap().clone();
    let first = items.iter().find(|i| i["pass"] == false).unwrap();
    assert_eq!(first["name"], "cdga-leibniz");
}

#[test]
fn malformed_input_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"field\": \"Q\",\n  \"generators\": [\"x\"\n}\n").unwrap();
    let o = run(&["pbw", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn semantic_errors_exit_two_with_context() {
    let o = run_file("apply-g", "sym2.json", &["--complex", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("nope"));

    // k is not a module over a non-augmented algebra.
    let o = run_file("minimize", "twopoint.json", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("complex k"));

    // The two-point algebra is curved, so minimization refuses it.
    let o = run_file("minimize", "twopoint.json", &["--complex", "one"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("minimization") && err.contains("curv"), "{err}");

    let o = run(&["pbw", "/nonexistent/problem.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn null_tests_separate_acyclic_from_null() {
    let o = run_file("null-free", "dualnum.json", &["--complex", "periodic", "--homotopy", "--json"]);
    let r = &json(&o)["result"];
    assert_eq!(r["acyclic"], true);
    assert_eq!(r["in_null_system"], false);
    assert_eq!(r["nullhomotopic"], false);

    let o = run(&["null-cofree", "--spliced", "3", "--window=-2..2", "--json"]);
    let r = &json(&o)["result"];
    assert_eq!(r["acyclic"], true);
    assert_eq!(r["test_acyclic"], false);
    assert_eq!(r["in_null_system"], false);
}

#[test]
fn functor_commands_on_symmetric_algebra() {
    for args in [
        vec!["unit", "sym2.json"],
        vec!["counit", "sym2.json"],
        vec!["adjoint-check", "sym2.json", "--complex", "pair"],
        vec!["ce", "heisenberg.json"],
        vec!["koszul-check", "sym2.json"],
        vec!["build-u", "heisenberg.json"],
    ] {
        let o = run_file(args[0], args[1], &args[2..]);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
    let o = run_file("ext", "sym2.json", &["--json"]);
    let dims: Vec<u64> = json(&o)["result"]["entries"].as_array().unwrap().iter().map(|e| e["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 2, 1, 0]);
}
