use std::process::{Command, Output};

use serde_json::Value;

fn aca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aca")).args(args).env("ACA_COLOR", "0").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn compile_strict_manifest() {
    let o = aca(&["compile", "--tm", "zigzag", "--construction", "1"]);
    assert!(o.status.success());
    let m = json(&o);
    assert_eq!(m["radius"], 1);
    assert_eq!(m["construction"], 1);
    assert_eq!(m["machine"], "zigzag");
    assert_eq!(m["alphabet"]["ctl"], serde_json::json!([0, 1, 2]));
    assert!(!m["test_vectors"].as_array().unwrap().is_empty());
}

#[test]
fn compile_scattered_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rule.json");
    let o = aca(&["compile", "--tm", "zigzag", "--construction", "3", "--gap", "2", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(m["radius"], 2);
    assert_eq!(m["test_vectors"][0]["neighborhood"].as_array().unwrap().len(), 5);
}

#[test]
fn gap_flag_rules() {
    let o = aca(&["compile", "--construction", "3", "--tm", "zigzag"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("requires --gap"));
    let o = aca(&["compile", "--construction", "1", "--gap", "2", "--tm", "zigzag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn machine_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.tm");
    let src = "machine flip\nblank _\ninput a\nwork a _\nstates s t\ninitial s\nfinal t\n\
               delta s a -> s _ R\ndelta s _ -> t a L\ndelta t a -> t a L\ndelta t _ -> t _ L\n";
    std::fs::write(&path, src).unwrap();
    let o = aca(&["verify", "--tm", path.to_str().unwrap(), "--input", "aa", "--tm-steps", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = aca(&["verify", "--tm", "/nonexistent.tm", "--tm-steps", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn first_step_diagram() {
    let o = aca(&["run", "--tm", "zigzag", "--construction", "1", "--seq", "cyclic:0,-1,0,1", "--steps", "3", "--format", "ascii"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(
        rows,
        [
            "t       |-1  0 ",
            "0       |[_] _ ",
            "1 @   0 |[_](1)",
            "2 @  -1 | _ (1)",
            "3 @   0 | _ [1]",
        ]
    );
}

#[test]
fn zero_steps_prints_initial_row() {
    let o = aca(&["run", "--tm", "zigzag", "--steps", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn random_walk_trace_is_reproducible() {
    let args = ["run", "--tm", "zigzag", "--seq", "randomwalk:seed=42", "--steps", "1000", "--format", "json"];
    let a = aca(&args);
    let b = aca(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let t = json(&a);
    let updates = t["updates"].as_array().unwrap();
    assert_eq!(updates.len(), 1000);
    assert_eq!(updates[0][1], 0);
    assert_eq!(t["background_period"], 1);
}

#[test]
fn finite_sequence_exhausts() {
    let o = aca(&["run", "--tm", "zigzag", "--seq", "explicit:0,-1", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exhausted"));
}

#[test]
fn verify_exit_codes() {
    let o = aca(&["verify", "--tm", "zigzag", "--input", "", "--construction", "1", "--seq", "quadratic", "--tm-steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["verdict"], "PASS");
    assert_eq!(r["matches"][1], serde_json::json!([1, 3]));
    assert_eq!(r["bound"]["ok"], true);
    for key in ["budget_used", "initial_ok", "monotone_ok"] {
        assert!(r.get(key).is_some(), "{key}");
    }

    let o = aca(&["verify", "--tm", "zigzag", "--seq", "cyclic:0", "--tm-steps", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["verdict"], "BUDGET_EXCEEDED");

    let o = aca(&["verify", "--tm", "zigzag", "--construction", "3", "--gap", "2", "--seq", "scattered:p=2", "--tm-steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tape_only_matching_is_not_monotone_on_zigzag() {
    let o = aca(&["verify", "--tm", "zigzag", "--tm-steps", "3", "--match", "tape"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["monotone_ok"], false);
}

#[test]
fn bench_rows() {
    let o = aca(&["bench", "--tm", "zigzag", "--construction", "1", "--seq", "quadratic", "--range", "1..30"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T,tprime,bound,construction,seq,ok"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r.ends_with(",true")));

    let o = aca(&["bench", "--tm", "zigzag", "--construction", "2", "--seq", "sweep", "--range", "10..10"]);
    let row = stdout(&o).lines().nth(1).unwrap().to_owned();
    assert_eq!(row.split(',').nth(2), Some("66"));

    let o = aca(&["bench", "--tm", "zigzag", "--construction", "3", "--gap", "1", "--seq", "scattered:p=1", "--range", "1..1"]);
    let row = stdout(&o).lines().nth(1).unwrap().to_owned();
    assert_eq!(row.split(',').nth(2), Some("15"));
}

#[test]
fn bench_quotes_sequence_specs() {
    let o = aca(&["bench", "--tm", "zigzag", "--seq", "cyclic:0,-1,0,1", "--range", "1..1", "--slack", "10"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"cyclic:0,-1,0,1\""));
}

#[test]
fn analyze_outputs() {
    let o = aca(&["analyze", "--seq", "quadratic", "--prefix", "13", "--window", "-2..2", "--format", "json"]);
    assert!(o.status.success());
    let a = json(&o);
    let counts: Vec<u64> = (-2..=2).map(|k| a["per_cell_counts"][k.to_string()].as_u64().unwrap()).collect();
    let tally: Vec<u64> = (-2..=2)
        .map(|k| [0, -1, 0, -1, 1, 0, -1, 1, -2, 0, 2, -1, 1].iter().filter(|&&p| p == k).count() as u64)
        .collect();
    assert_eq!(counts, tally);
    assert_eq!(a["min_count"], 1);

    let o = aca(&["analyze", "--seq", "scattered:p=2", "--prefix", "100", "--window", "-6..6"]);
    assert!(stdout(&o).contains("support_gap 2"));
}

#[test]
fn analyze_empty_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::write(&empty, "").unwrap();
    let spec = format!("explicit:@{}", empty.display());
    let o = aca(&["analyze", "--seq", &spec]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty sequence"));
}
