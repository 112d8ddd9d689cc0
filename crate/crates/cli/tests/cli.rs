use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn permstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permstat")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn inv_strong_witness_exits_one() {
    let out = permstat(&["check", "shuffle", "--stat", "inv", "--mode", "strong", "--upto", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["schema"], "permstat/1");
    assert_eq!(v["holds"], false);
    assert_eq!(v["witness_text"], "12\u{29e2}3 vs 13\u{29e2}2");
    assert_eq!(v["witness"]["reference_classes"][0], serde_json::json!([0, 1, 2]));
    assert_eq!(v["witness"]["violating_classes"][0], serde_json::json!([0, 1, 1]));
}

#[test]
fn holds_exits_zero() {
    let out = permstat(&["check", "shuffle", "--stat", "inv", "--mode", "weak", "--upto", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["holds"], true);
    let out = permstat(&["check", "bicompat", "--stat", "Pk", "--upto", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "shuffle", "--stat", "bogus"][..],
        &["check", "shuffle", "--stat", "Des", "--mode", "sideways"],
        &["check", "shuffle", "--stat", "Des", "--frobnicate"],
        &["search", "enumerate", "--n", "5"],
        &["search", "enumerate", "--n", "4", "--lengths", "2"],
        &["reproduce", "theorem-progress", "--upto", "7"],
        &["qsym", "verify", "--upto", "7"],
    ] {
        let out = permstat(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(!err.trim().is_empty(), "{args:?}");
    }
}

#[test]
fn incompatible_statistic_is_a_negative_verdict() {
    let out = permstat(&["algebra", "coproduct", "--stat", "maj", "--a", "1243"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["holds"], false);
    let out = permstat(&["algebra", "quotient", "--fine", "Des", "--coarse", "dK", "--upto", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn des_product_has_three_terms() {
    let out = permstat(&["algebra", "product", "--stat", "Des", "--a", "12", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["op"], "product");
    let terms = v["terms"].as_object().unwrap();
    assert_eq!(terms.len(), 3);
    assert!(terms.values().all(|c| c == 1));
    // 12 shuffled with 3 gives 123, 132, 312: descent sets {}, {2}, {1}
    let mut reps: Vec<&str> = terms.keys().map(|k| v["representatives"][k].as_str().unwrap()).collect();
    reps.sort();
    assert_eq!(reps, ["123", "132", "213"]);
}

#[test]
fn stat_eval_reports_raw_values() {
    let v = json(&permstat(&["stat", "eval", "--stat", "Des", "29546"]));
    assert_eq!(v["values"][0]["value"], serde_json::json!([2, 3]));
    let v = json(&permstat(&["stat", "eval", "--stat", "inv", "2,9,5,4,6"]));
    assert_eq!(v["values"][0]["value"], 4);
}

#[test]
fn table_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("des.json");
    let out = permstat(&["stat", "build", "--stat", "Des", "--max", "5", "--out", path_arg(&file)]);
    assert_eq!(out.status.code(), Some(0));
    let loaded = permstat_core::StatisticTable::load(&file).unwrap();
    assert!(loaded == permstat_core::StatisticTable::builtin(permstat_core::Builtin::Des, 5));
    let out = permstat(&["check", "bicompat", "--stat", path_arg(&file), "--upto", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["stat"], "Des");
}

fn edited(dir: &Path, edit: impl FnOnce(&mut Value)) -> String {
    let file = dir.join("edited.json");
    let mut v: Value = serde_json::from_str(&permstat_core::StatisticTable::builtin(permstat_core::Builtin::Des, 4).to_json()).unwrap();
    edit(&mut v);
    std::fs::write(&file, v.to_string()).unwrap();
    path_arg(&file).to_string()
}

#[test]
fn malformed_tables_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let permuted = edited(dir.path(), |v| {
        let level = v["levels"][3].as_array_mut().unwrap();
        for x in level.iter_mut() {
            let c = x.as_u64().unwrap();
            *x = Value::from(match c {
                0 => 1,
                1 => 0,
                c => c,
            });
        }
    });
    let out = permstat(&["check", "substring", "--stat", &permuted, "--upto", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("canonical"));

    let missing = edited(dir.path(), |v| {
        v["levels"].as_array_mut().unwrap().remove(3);
    });
    let out = permstat(&["check", "substring", "--stat", &missing, "--upto", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_is_byte_identical() {
    for args in [&["reproduce", "theorem-progress", "--upto", "4"][..], &["reproduce", "lemma-n3"], &["reproduce", "pk-case"]] {
        let a = permstat(args);
        let b = permstat(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn theorem_progress_counts() {
    let v = json(&permstat(&["reproduce", "theorem-progress", "--upto", "4", "--jobs", "2"]));
    assert_eq!(v["counts"], serde_json::json!({"n3": 5, "n4": 11}));
    assert_eq!(v["levels"][1]["viable"], serde_json::json!(["triv"]));
    assert_eq!(v["bound"]["only_trivial"], true);
}

#[test]
fn pk_case_separates_split_peaks() {
    let v = json(&permstat(&["reproduce", "pk-case"]));
    let ext = v["extensions"].as_array().unwrap();
    let names: Vec<&str> = ext.iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 2);
    for e in ext {
        let viable = e["viability"][0]["holds"].as_bool().unwrap();
        assert_eq!(viable, e["name"] == "Pk");
    }
}

#[test]
fn enumerate_log_feeds_filter() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("n4.txt");
    let v = json(&permstat(&["search", "enumerate", "--n", "4", "--log", path_arg(&log)]));
    assert_eq!(v["solutions"], 11);
    assert_eq!(v["nontrivial"], 10);
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), 11);
    let f = json(&permstat(&["search", "filter", "--n", "4", "--solutions", path_arg(&log)]));
    assert_eq!(f["solutions"], 11);
    assert_eq!(f["viable"], v["viable"]);
}

#[test]
fn checkpointed_enumeration_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.log");
    let args = ["search", "enumerate", "--n", "4", "--split-depth", "2", "--checkpoint", path_arg(&ck)];
    let first = json(&permstat(&args));
    let second = json(&permstat(&args));
    assert_eq!(first["solutions"], second["solutions"]);
}

#[test]
fn dimacs_export_writes_header() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("n3.cnf");
    let v = json(&permstat(&["search", "dimacs", "--n", "3", "--out", path_arg(&cnf)]));
    let text = std::fs::read_to_string(&cnf).unwrap();
    let header = text.lines().find(|l| l.starts_with("p cnf")).unwrap();
    assert_eq!(header, format!("p cnf {} {}", v["variables"], v["clauses"]));
}

#[test]
fn qsym_expand_text_lines() {
    let out = permstat(&["qsym", "expand", "--comp", "(2,1)", "--text"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "[0,2,1]: 1\n[1,1,1]: 1\n[2,0,1]: 1\n[2,1,0]: 1\n");
}

#[test]
fn bound_values() {
    let v = json(&permstat(&["search", "bound", "--n", "9"]));
    assert_eq!(v["class_count_bound"], 3);
    assert_eq!(v["class_size_divisor"], 120960);
}
