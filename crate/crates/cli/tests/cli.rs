//! Exit-code and output-shape behavior of the binary beyond the acceptance
//! command set.

use std::process::Command;

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_dickson"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn unknown_flags_are_usage_errors() {
    let (_, _, code) = run(&["witness", "--seq", "const(0)", "--l", "2", "--bogus"]);
    assert_eq!(code, 4);
}

#[test]
fn dsl_parse_errors_exit_4() {
    let (_, err, code) = run(&["witness", "--seq", "prefix(1,2)", "--l", "2"]);
    assert_eq!(code, 4);
    assert!(err.contains("parse error"), "{err}");
}

#[test]
fn certify_rejects_a_tampered_certificate() {
    let dir = std::env::temp_dir().join("dickson-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tampered.json");
    let path_arg = path.to_str().unwrap();

    let (_, _, code) = run(&["witness", "--seq", "dec(5)", "--l", "2", "--out", path_arg]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    // drop the bound below the witness indices
    let tampered = text.replace("\"bound\":6", "\"bound\":4");
    assert_ne!(text, tampered);
    std::fs::write(&path, tampered).unwrap();

    let (out, _, code) = run(&["certify", "--in", path_arg, "--seq", "dec(5)"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("\"pass\":false"), "{out}");
    assert!(out.contains("bound"), "{out}");
}

#[test]
fn certify_checks_against_the_right_sequences() {
    let dir = std::env::temp_dir().join("dickson-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mismatched.json");
    let path_arg = path.to_str().unwrap();
    let (_, _, code) = run(&["witness", "--seq", "dec(5)", "--l", "2", "--out", path_arg]);
    assert_eq!(code, 0);
    // same certificate, different sequence
    let (out, _, code) = run(&["certify", "--in", path_arg, "--seq", "dec(6)"]);
    assert_eq!(code, 1);
    assert!(out.contains("\"pass\":false"));
}

#[test]
fn dichotomy_requires_two_sequences() {
    let (_, err, code) = run(&["dichotomy", "--seq", "const(0)", "--M", "1", "--l", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("exactly two"), "{err}");
}

#[test]
fn pigeonhole_rejects_non_colorings() {
    let (_, err, code) = run(&["pigeonhole", "--seq", "const(2)", "--l", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("colors must be 0 or 1"), "{err}");
}

#[test]
fn out_file_receives_the_document() {
    let dir = std::env::temp_dir().join("dickson-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let path_arg = path.to_str().unwrap();
    let (stdout, _, code) = run(&[
        "tightness",
        "--family",
        "const",
        "--params",
        "0,3",
        "--l",
        "3",
        "--out",
        path_arg,
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("family,param,l,extracted_bound,minimal_last_index,tight,evals\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn gap_family_rows_match_the_construction() {
    let (csv, _, code) = run(&[
        "tightness",
        "--family",
        "gap",
        "--params",
        "1..4",
        "--l",
        "2",
    ]);
    assert_eq!(code, 0);
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], "gap");
        assert_eq!(fields[3], "1", "window-sum bound is always 1: {line}");
        assert_eq!(fields[4], "1", "minimal index is always 1: {line}");
        assert_eq!(fields[5], "true");
    }
}

#[test]
fn witness_documents_recheck_through_python_style_consumers() {
    // the emitted document is plain JSON consumable by any parser
    let (out, _, code) = run(&["witness", "--seq", "periodic(0,1)", "--l", "3"]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(parsed["kind"], "dl1l");
    assert_eq!(parsed["k"], 1);
    let indices = parsed["indices"].as_array().unwrap();
    assert_eq!(indices.len(), 3);
}
