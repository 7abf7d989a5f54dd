use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use linklogic::cli::main_with_args;
use serde_json::Value;

fn netlist(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/netlists")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["linklogic"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn assert_diagnostic(err: &str, category: &str) {
    assert_eq!(err.lines().count(), 1, "{err:?}");
    assert!(err.starts_with(&format!("error[{category}]: ")), "{err:?}");
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let dir = tempfile::tempdir().unwrap();

    let (code, _, err) = run(&["truth-table", write(dir.path(), "bad.lnl", "dualrail A sideways\n").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_diagnostic(&err, "parse");
    assert!(err.contains("1:12: SyntaxError"), "{err}");

    let (code, _, err) = run(&["run", &netlist("bad_clock.lnl")]);
    assert_eq!(code, 3);
    assert_diagnostic(&err, "validation");

    let forbid = "dualrail A in\ndualrail X out\ndualrail Y out\n\
                  route copy c0 A.0 -> X.0 Y.1\nroute copy c1 A.1 -> X.1 Y.0\nlock l X.0 Y.1\n";
    let (code, _, err) = run(&["truth-table", write(dir.path(), "forbid.lnl", forbid).to_str().unwrap()]);
    assert_eq!(code, 4);
    assert_diagnostic(&err, "simulation");

    let (code, _, err) = run(&["run", dir.path().join("missing.lnl").to_str().unwrap()]);
    assert_eq!(code, 5);
    assert_diagnostic(&err, "io");

    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert_diagnostic(&err, "usage");
}

#[test]
fn truth_table_json_lines() {
    let (code, out, _) = run(&["--json-lines", "truth-table", &netlist("fulladder.lnl")]);
    assert_eq!(code, 0);
    let rows: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let bit = |v: &Value, k: &str| v[k].as_str().unwrap() == "1";
        let total = ["a", "b", "cin"].iter().filter(|k| bit(&row["inputs"], k)).count();
        assert_eq!(bit(&row["outputs"], "s"), total % 2 == 1, "{row}");
        assert_eq!(bit(&row["outputs"], "cout"), total >= 2, "{row}");
    }
}

#[test]
fn trace_records_are_ordered_in_time() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let (code, out, _) = run(&["run", &netlist("shift_register.lnl"), "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let mut last = f64::NEG_INFINITY;
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.lines().count() > 40);
    for line in text.lines() {
        let record: Value = serde_json::from_str(line).unwrap();
        let obj = record.as_object().unwrap();
        assert_eq!(obj.len(), 3);
        let t = obj["t"].as_f64().unwrap();
        assert!(t >= last);
        last = t;
        assert!(obj["element"].is_string() && obj["state"].is_string());
    }
}

#[test]
fn register_delivers_the_stream() {
    let (code, out, _) = run(&["--json-lines", "run", &netlist("shift_register.lnl")]);
    assert_eq!(code, 0);
    let outs: Vec<String> = out
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["outputs"]["out"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(&outs[..4], ["1", "0", "1", "1"]);
}

#[test]
fn reverse_recovers_inputs_and_restores_chains() {
    let (code, out, _) = run(&["--json-lines", "reverse", &netlist("fredkin.lnl")]);
    assert_eq!(code, 0);
    let row: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(row["inputs"]["c"], "1");
    assert_eq!(row["inputs"]["a"], "1");
    assert_eq!(row["inputs"]["b"], "0");

    let (code, out, _) = run(&["reverse", &netlist("shift_register.lnl")]);
    assert_eq!(code, 0);
    assert!(out.contains("restored  yes"), "{out}");
}

#[test]
fn check_reports_the_isolation_bound() {
    let (code, out, _) = run(&["check", &netlist("shift_register.lnl")]);
    assert_eq!(code, 0);
    assert!(out.contains("isolation  PASS max_cells=2"), "{out}");
    let (code, out, _) = run(&["check", &netlist("bad_clock.lnl")]);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn energy_presets() {
    let (_, out, _) = run(&["energy", "mems"]);
    assert!(out.contains("2288"));
    let (_, out, _) = run(&["--json-lines", "energy", "drag"]);
    let per_joint = out
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .find(|v| v["quantity"] == "energy_per_joint")
        .unwrap();
    assert_eq!(per_joint["unit"], "J");
    assert!((per_joint["value"].as_f64().unwrap() / 2.4e-27 - 1.0).abs() < 1e-9);
    let (code, _, err) = run(&["energy", "landauer", "--temperature=-1"]);
    assert_eq!(code, 3);
    assert_diagnostic(&err, "validation");
}

#[test]
fn identical_invocations_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let render = |sub: &str| {
        let out = dir.path().join(sub);
        let (code, _, err) = run(&["render", &netlist("shift_register.lnl"), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let (a, b) = (render("a"), render("b"));
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(run(&["run", &netlist("nand.lnl")]), run(&["run", &netlist("nand.lnl")]));
}

#[test]
fn binary_reports_errors_on_stderr() {
    let bin = env!("CARGO_BIN_EXE_linklogic");
    let ok = Command::new(bin).args(["truth-table", &netlist("nand.lnl")]).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("X"));
    let missing = Command::new(bin).args(["check", "/nonexistent/x.lnl"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(5));
    assert_diagnostic(&String::from_utf8_lossy(&missing.stderr), "io");
}
