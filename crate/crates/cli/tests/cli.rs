use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const EXPR: &str = "sample_id\tg1\tg2\tg3\n\
    s1\t-5\t0\t1\ns2\t-4.5\t1\t0\ns3\t-5.5\t-1\t2\ns4\t5\t0\t1\ns5\t4.5\t1\t0\ns6\t5.5\t-1\t2\n";

fn vsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsplit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn duplicate_sample_id_exits_2_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let e = file(dir.path(), "e.csv", "id,g1\nA7,1\nB2,2\nA7,3\n");
    let out = vsplit(&["ingest-check", "--expression", s(&e)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("A7"), "{}", stderr(&out));
}

#[test]
fn ingest_check_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let e = file(dir.path(), "e.tsv", EXPR);
    let out = vsplit(&["ingest-check", "--expression", s(&e), "--zscore"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n_samples"], 6);
    assert_eq!(v["normalization_applied"], true);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(vsplit(&["replay"]).status.code(), Some(1));
    assert_eq!(vsplit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(vsplit(&["--help"]).status.code(), Some(0));
}

#[test]
fn empty_script_gives_one_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let e = file(dir.path(), "e.tsv", EXPR);
    let script = file(dir.path(), "empty.jsonl", "# nothing recorded\n\n");
    let out_dir = dir.path().join("out");
    let out = vsplit(&["replay", "--expression", s(&e), "--script", s(&script), "--out-dir", s(&out_dir)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["clusters"].as_array().unwrap().len(), 1);
    assert_eq!(summary["clusters"][0]["size"], 6);
    let model: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("model.json")).unwrap()).unwrap();
    assert_eq!(model["nodes"].as_array().unwrap().len(), 1);
}

#[test]
fn zero_rule_model_assigns_root() {
    let dir = tempfile::tempdir().unwrap();
    let e = file(dir.path(), "e.tsv", EXPR);
    let model = dir.path().join("model.json");
    assert!(vsplit(&["export-model", "--expression", s(&e), "--model", s(&model)]).status.success());
    let other = file(dir.path(), "new.csv", "id,g3,g1,g2\nx1,0,0,0\nx2,9,-9,9\n");
    let out = vsplit(&["classify", "--expression", s(&other), "--model", s(&model)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "sample_id\tcluster\nx1\tn0\nx2\tn0\n");
}

#[test]
fn all_censored_survival_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let e = file(dir.path(), "e.tsv", EXPR);
    let c = file(
        dir.path(),
        "c.csv",
        "sample_id,time_days,event\ns1,10,0\ns2,20,0\ns3,30,0\ns4,40,0\ns5,50,0\ns6,60,0\n",
    );
    let out = vsplit(&["survival", "--expression", s(&e), "--clinical", s(&c)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "cluster\ttime\tsurvival\tn_at_risk_initial\nn0\t0\t1\t6\nBASELINE\t0\t1\t6\n"
    );
}

#[test]
fn script_errors_exit_3_with_index() {
    let dir = tempfile::tempdir().unwrap();
    let e = file(dir.path(), "e.tsv", EXPR);
    let split = r#"{"op":"split","node":"n0","pcx":0,"pcy":1,"line":{"point":[0,0],"normal":[1,0]}}"#;
    let script = file(dir.path(), "s.jsonl", &format!("{split}\n{{\"op\":\"prune\",\"node\":\"n1\"}}\n"));
    let out = vsplit(&["replay", "--expression", s(&e), "--script", s(&script), "--out-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("command 2"), "{}", stderr(&out));
    assert!(stderr(&out).contains("NotInternal"), "{}", stderr(&out));

    let garbled = file(dir.path(), "g.jsonl", &format!("{split}\n{{\"op\":\"spilt\"}}\n"));
    let out = vsplit(&["replay", "--expression", s(&e), "--script", s(&garbled), "--out-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("command 2"), "{}", stderr(&out));
}

#[test]
fn compare_against_labels_and_models() {
    let dir = tempfile::tempdir().unwrap();
    let e = file(dir.path(), "e.tsv", EXPR);
    let c = file(
        dir.path(),
        "c.csv",
        "sample_id,time_days,event,label\ns1,1,1,L\ns2,2,1,L\ns3,3,0,L\ns4,4,1,R\ns5,5,0,R\ns6,6,1,R\n",
    );
    let script = file(
        dir.path(),
        "s.jsonl",
        r#"{"op":"split","node":"n0","pcx":0,"pcy":1,"line":{"point":[0,0],"normal":[1,0]}}"#,
    );
    let model = dir.path().join("m.json");
    let out = vsplit(&["export-model", "--expression", s(&e), "--script", s(&script), "--model", s(&model)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = vsplit(&["compare", "--expression", s(&e), "--clinical", s(&c), "--model", s(&model)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).ends_with("ARI\t1\n"), "{}", stdout(&out));
    let out = vsplit(&["compare", "--expression", s(&e), "--model", s(&model), "--against", s(&model)]);
    assert!(stdout(&out).ends_with("ARI\t1\n"), "{}", stdout(&out));
}
