//! End-to-end tests of the installed binary: argument handling, exit
//! codes, output shapes, and the bundled data files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfold"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn verify_single_identity_passes() {
    let out = qfold(&["verify", "nandi-1", "--order", "40"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("nandi-1"), "{text}");
    assert!(text.contains("pass"), "{text}");
}

#[test]
fn verify_all_reports_every_entry() {
    let out = qfold(&["verify", "--all", "--order", "25"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("35/35 identities pass"), "{text}");
}

#[test]
fn verify_json_is_parseable_with_expected_fields() {
    let out = qfold(&["verify", "capparelli", "--order", "30", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let arr = v.as_array().expect("array of reports");
    assert_eq!(arr.len(), 1);
    let rec = &arr[0];
    assert_eq!(rec["id"], "capparelli");
    assert_eq!(rec["status"], "theorem");
    assert_eq!(rec["result"], "pass");
    assert_eq!(rec["order"], 30);
    assert!(rec["first_mismatch"].is_null());
    assert!(rec["wall_ms"].is_number());
}

#[test]
fn mismatch_exits_one_and_names_the_exponent() {
    let dir = std::env::temp_dir().join("qfold-cli-test-badcat");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        dir.join("bad.cat"),
        "[identity]\nid = wrong\nstatus = theorem\nnote = wrong on purpose\n\
         matrix = [[2]]\ndenoms = [1]\nlinear = [0]\nproduct = 1 / poch(2;1)\n",
    )
    .unwrap();
    let out = qfold(&["verify", "--all", "--catalog", dir.to_str().unwrap(), "--order", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL at q^3"), "{text}");
}

#[test]
fn unknown_identity_exits_two() {
    let out = qfold(&["verify", "no-such-id"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn unknown_set_exits_two() {
    let out = qfold(&["partitions", "count", "N9", "--order", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("N9"));
}

#[test]
fn usage_error_exits_two() {
    let out = qfold(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fold_prints_matrix_and_minimal_scale() {
    let out = qfold(&["fold", "D4^3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("D4^3"), "{text}");
    assert!(text.contains("3*A^(-1)"), "{text}");
}

#[test]
fn fold_json_carries_both_matrices() {
    let out = qfold(&["fold", "E6^2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["dim"], 4);
    assert_eq!(v["scale"], 2);
    assert_eq!(v["scaled_inverse"][0][0], 4);
}

#[test]
fn certify_checks_target_and_numeric_order() {
    let out = qfold(&[
        "certify",
        "three-copy-n1",
        "--target",
        "n1(0,0,0,0)",
        "--numeric-order",
        "25",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("matches exactly"), "{text}");
    assert!(text.contains("pass"), "{text}");
}

#[test]
fn certify_wrong_target_exits_one() {
    let out = qfold(&["certify", "three-copy-n1", "--target", "n2(0,0,0,0)"]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
}

#[test]
fn certify_reads_explicit_path() {
    let dir = std::env::temp_dir().join("qfold-cli-test-certs");
    std::fs::create_dir_all(&dir).unwrap();
    let file: PathBuf = dir.join("tiny.cert");
    std::fs::write(&file, "# tiny\nnh1(0,0,0,0)\n").unwrap();
    let out = qfold(&["certify", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("1 terms") || stdout(&out).contains("1 term"));
}

#[test]
fn partitions_count_respects_x_degree_filter() {
    let out = qfold(&["partitions", "count", "N1", "--order", "12", "--x-degree", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["set"], "N1");
    assert_eq!(v["x_degree"], 2);
    let counts = v["counts"].as_array().unwrap();
    assert_eq!(counts.len(), 13);
}

#[test]
fn partitions_witness_lists_members() {
    let out = qfold(&["partitions", "witness", "N2", "19"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("29 members"), "{text}");
}
