use std::process::Command;

fn qcf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcf"))
}

#[test]
fn gauss_and_decode() {
    let out = qcf().args(["gauss", "7", "3"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "11811");

    let out = qcf().args(["decode", "0102004"]).output().unwrap();
    assert!(out.status.success());
    let lines: Vec<String> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(lines, vec!["0100000", "0001000", "0000001"]);

    let out = qcf().args(["decode", "0000000"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn group_info_and_orbits() {
    let out = qcf().args(["group-info", "G_{8,4}"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("order: 8"));
    assert!(text.contains("abstract type: Q_8"));

    let out = qcf()
        .args(["orbits", "G_{14,1}", "--k", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("1^1 2^4 7^30 14^828"));
}

#[test]
fn verify_code_on_a_temp_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.txt");
    std::fs::write(&path, "0102004\n1012460\n").unwrap();
    let out = qcf()
        .args([
            "verify-code",
            path.to_str().unwrap(),
            "--expect-distance",
            "4",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("code size: expected 2"));

    // duplicated row is a hard failure naming the duplicate
    let dup = dir.path().join("dup.txt");
    std::fs::write(&dup, "0102004\n0102004\n").unwrap();
    let out = qcf()
        .args(["verify-code", dup.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("0102004"));
}

#[test]
fn export_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("model.lp");
    let out = qcf()
        .args(["export-lp", "G_{14,1}", "--out", lp.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = qcf()
        .args([
            "solve",
            "--model",
            lp.to_str().unwrap(),
            "--target",
            "100",
            "--budget",
            "60s",
            "--json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "FeasibleAtTarget");
    assert!(v["objective"].as_u64().unwrap() >= 100);
}

#[test]
fn normalizer_verb_reports_slices() {
    let out = qcf()
        .args(["normalizer", "--group", "G_{14,1}"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("normalizer order 168"));
    assert!(text.contains("slice"));
}
