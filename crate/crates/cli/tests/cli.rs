use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn ex(name: &str) -> String {
    examples().join(name).to_string_lossy().into_owned()
}

fn hocalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hocalc")).args(args).output().unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn betti(rs: &[Value], table: &str) -> Vec<(i64, u64)> {
    rs.iter()
        .filter(|r| r["record"] == "betti" && r["table"] == table)
        .map(|r| (r["degree"].as_i64().unwrap(), r["dim"].as_u64().unwrap()))
        .collect()
}

#[test]
fn derivative_of_identity_over_com() {
    let out = hocalc(&["derivative", "--operad", &ex("com3.op"), "--functor", "Id", "--arity", "2", "--window", "0..6", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = records(&out);
    assert_eq!(betti(&rs, "derivative"), vec![(0, 1)]);
    let meta = &rs[0];
    assert_eq!(meta["record"], "meta");
    assert_eq!(meta["field"], "Q");
    assert_eq!(meta["window"], serde_json::json!([0, 6]));
    assert_eq!(meta["truncation"], 3);
    let st = rs.iter().find(|r| r["record"] == "stabilization").unwrap();
    assert_eq!(st["next"].as_i64().unwrap(), st["p"].as_i64().unwrap() + 1);
}

#[test]
fn broken_operad_fails_validation_with_location() {
    let out = hocalc(&["validate", "--operad", &ex("broken.op")]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("broken.op: equivariance failure"), "{text}");
    assert!(text.contains("verdict operad axioms: FAIL"));
}

#[test]
fn shipped_files_validate() {
    for op in ["com3.op", "assoc3.op", "com3_f2.op"] {
        let out = hocalc(&["validate", "--operad", &ex(op)]);
        assert_eq!(out.status.code(), Some(0), "{op}");
    }
    for alg in ["free_x0.alg", "free_x0_y0.alg", "dyxx.alg"] {
        let out = hocalc(&["validate", "--operad", &ex("com3.op"), "--algebra", &ex(alg)]);
        assert_eq!(out.status.code(), Some(0), "{alg}");
    }
}

#[test]
fn zero_complex_has_empty_table() {
    let out = hocalc(&["homology", "--complex", &ex("zero.cx"), "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = records(&out);
    assert!(rs.iter().all(|r| r["record"] != "betti"));
    assert_eq!(rs.last().unwrap()["code"], 0);
}

#[test]
fn one_record_for_a_single_class() {
    let out = hocalc(&["homology", "--complex", &ex("k1.cx"), "--format", "jsonl"]);
    let rs = records(&out);
    let b: Vec<_> = rs.iter().filter(|r| r["record"] == "betti").collect();
    assert_eq!(b.len(), 1);
    assert_eq!((b[0]["degree"].as_i64(), b[0]["dim"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn parse_errors_carry_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.cx");
    std::fs::write(&p, "complex c field Q\ngen a deg 0\nd q = 1*a\n").unwrap();
    let out = hocalc(&["homology", "--complex", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.cx:3:"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(hocalc(&["homology", "--window", "3..1"]).status.code(), Some(2));
    assert_eq!(hocalc(&["homology", "--complex", "/nonexistent.cx"]).status.code(), Some(2));
    assert_eq!(hocalc(&["chain-rule", "--functor", "Id"]).status.code(), Some(2));
    assert_eq!(hocalc(&["derivative", "--functor", "Nope"]).status.code(), Some(2));
    assert_eq!(hocalc(&["homology", "--complex", &ex("k1.cx"), "--field", "F4"]).status.code(), Some(2));
}

#[test]
fn output_is_byte_identical() {
    let args = ["cross-effect", "--operad", &ex("com3.op"), "--functor", "Tensor(2)", "--complex", &ex("k1.cx"), "--arity", "2", "--window", "0..5"];
    for fmt in ["text", "jsonl"] {
        let mut a = args.to_vec();
        a.extend(["--format", fmt]);
        let (x, y) = (hocalc(&a), hocalc(&a));
        assert_eq!(x.status.code(), Some(0));
        assert_eq!(x.stdout, y.stdout);
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.jsonl");
    let out = hocalc(&["bar", "--operad", &ex("com3.op"), "--arity", "2", "--format", "jsonl", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let s = std::fs::read_to_string(&p).unwrap();
    assert!(s.contains(r#""degree":1,"dim":1"#), "{s}");
}

#[test]
fn field_flag_overrides_the_file() {
    let out = hocalc(&["cobar-check", "--operad", &ex("com3.op"), "--field", "F2", "--arity", "3", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = records(&out);
    assert_eq!(rs[0]["field"], "F2");
    assert_eq!(rs.iter().filter(|r| r["record"] == "verdict" && r["ok"] == true).count(), 3);
}

#[test]
fn builtin_operads_by_name() {
    let out = hocalc(&["bar", "--operad", "builtin:Assoc:3", "--arity", "3", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(betti(&records(&out), "B(O)(3)"), vec![(2, 6)]);
}
