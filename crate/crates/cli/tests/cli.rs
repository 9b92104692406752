use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn zinbiel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zinbiel"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn zinbiel")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn family(dir: &Path, out: &str, args: &[&str]) {
    let mut all = vec!["family"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", out]);
    let o = zinbiel(dir, &all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn ex31_verify_and_charseq() {
    let tmp = TempDir::new().unwrap();
    family(tmp.path(), "a.json", &["--name", "EX31"]);
    let v = zinbiel(tmp.path(), &["verify", "a.json"]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).starts_with("Zinbiel: OK"));
    let c = zinbiel(tmp.path(), &["charseq", "a.json", "--grid-height", "2"]);
    assert_eq!(code(&c), 0);
    assert_eq!(stdout(&c).lines().next(), Some("(3,1)"));
}

#[test]
fn family_prints_table_without_out() {
    let tmp = TempDir::new().unwrap();
    let o = zinbiel(
        tmp.path(),
        &[
            "family", "--name", "A1", "--n", "8", "--p", "3", "--beta1", "-1",
        ],
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
}

#[test]
fn charseq_of_classified_family() {
    let tmp = TempDir::new().unwrap();
    family(
        tmp.path(),
        "a.json",
        &["--name", "A4", "--n", "9", "--p", "4"],
    );
    let c = zinbiel(tmp.path(), &["charseq", "a.json"]);
    assert_eq!(stdout(&c).lines().next(), Some("(5,4)"));
}

#[test]
fn verify_reports_defects() {
    let tmp = TempDir::new().unwrap();
    family(tmp.path(), "a.json", &["--name", "NF", "--n", "3"]);
    let text = std::fs::read_to_string(tmp.path().join("a.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    // the identity forces e2∘e1 = 2 e3
    for p in v["products"].as_array_mut().unwrap() {
        if p["i"] == 2 && p["j"] == 1 {
            p["terms"][0]["coeff"] = "3".into();
        }
    }
    std::fs::write(tmp.path().join("b.json"), v.to_string()).unwrap();
    let o = zinbiel(tmp.path(), &["verify", "b.json"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("Zinbiel: FAIL"));
}

#[test]
fn grade_writes_degrees() {
    let tmp = TempDir::new().unwrap();
    family(
        tmp.path(),
        "a.json",
        &["--name", "A3", "--n", "8", "--p", "3"],
    );
    let o = zinbiel(tmp.path(), &["grade", "a.json", "--out", "g.json"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("component dims"));
    let g: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(g["degrees"].as_array().unwrap().len(), 8);
    assert_eq!(code(&zinbiel(tmp.path(), &["verify", "g.json"])), 0);
}

#[test]
fn iso_exit_codes() {
    let tmp = TempDir::new().unwrap();
    family(
        tmp.path(),
        "a.json",
        &["--name", "A3", "--n", "8", "--p", "3"],
    );
    family(
        tmp.path(),
        "b.json",
        &["--name", "A1", "--n", "8", "--p", "3", "--beta1", "0"],
    );
    let same = zinbiel(tmp.path(), &["iso", "a.json", "a.json"]);
    assert_eq!(code(&same), 0);
    assert!(stdout(&same).starts_with("yes"));
    let diff = zinbiel(tmp.path(), &["iso", "a.json", "b.json", "--height", "3"]);
    assert_eq!(code(&diff), 1);
    assert!(stdout(&diff).starts_with("no"));
}

const PARTIAL: &str = r#"{"dim": 3, "unknowns": ["a"], "unspecified": "zero",
 "products": [{"i": 1, "j": 1, "terms": [{"k": 2, "coeff": "1"}]},
              {"i": 1, "j": 2, "terms": [{"k": 3, "coeff": "1"}]},
              {"i": 2, "j": 1, "terms": [{"k": 3, "coeff": "COEFF"}]}]}"#;

#[test]
fn deduce_finds_constraint_and_contradiction() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("p.json"), PARTIAL.replace("COEFF", "a")).unwrap();
    let o = zinbiel(
        tmp.path(),
        &["deduce", "--table", "p.json", "--budget", "100"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("a - 2 = 0"), "{}", stdout(&o));
    std::fs::write(tmp.path().join("q.json"), PARTIAL.replace("COEFF", "3")).unwrap();
    let o = zinbiel(
        tmp.path(),
        &["deduce", "--table", "q.json", "--budget", "100"],
    );
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("contradiction"));
}

#[test]
fn nonexist_text_and_json() {
    let tmp = TempDir::new().unwrap();
    let o = zinbiel(
        tmp.path(),
        &["nonexist", "--p", "3", "--json-out", "c.json"],
    );
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("det M (order 4) = 1"));
    assert!(out.contains("status: infeasible"));
    let j: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(j["p"], 3);
    assert_eq!(j["verified"], true);
}

#[test]
fn identity_suite_runs() {
    let tmp = TempDir::new().unwrap();
    let o = zinbiel(tmp.path(), &["identity-suite", "--max", "12"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("all zero"));
}

#[test]
fn error_exit_codes() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&zinbiel(tmp.path(), &["frobnicate"])), 64);
    assert_eq!(code(&zinbiel(tmp.path(), &["--help"])), 0);
    std::fs::write(tmp.path().join("bad.json"), "{not json").unwrap();
    assert_eq!(code(&zinbiel(tmp.path(), &["verify", "bad.json"])), 64);
    let o = zinbiel(
        tmp.path(),
        &["family", "--name", "A3", "--n", "5", "--p", "3"],
    );
    assert_eq!(code(&o), 65);
    assert_eq!(
        code(&zinbiel(
            tmp.path(),
            &["family", "--name", "A1", "--n", "8", "--p", "3", "--beta1", "x/"]
        )),
        64
    );
    assert_eq!(code(&zinbiel(tmp.path(), &["nonexist", "--p", "1"])), 65);
}
