//! End to end tests driving the compiled binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treehopf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn coproduct_of_the_ladder_matches_the_golden_line() {
    let out = run(&["coproduct", "[[]]"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1 (x) [[]] + [[]] (x) 1 + [] (x) []\n");
}

#[test]
fn dimension_table_prints_the_known_columns() {
    let out = run(&["dims", "8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    let h = [1, 1, 1, 2, 3, 8, 16, 41];
    let r = [1, 2, 4, 9, 20, 48, 115, 286];
    for (i, line) in lines.iter().enumerate() {
        let n = i + 1;
        assert!(
            line.starts_with(&format!("{n}: {} | {}", r[i], h[i])),
            "row {n} was {line}",
        );
    }
}

#[test]
fn element_goldens() {
    let graft = run(&["graft", "1 [[]]", "1 [][]"]);
    assert_eq!(stdout(&graft), "1 [[[]]] []\n");

    let bracket = run(&["bracket", "[]", "[[]]"]);
    assert_eq!(stdout(&bracket), "2 Z[[][]]\n");

    let pair = run(&["pair", "[].[[]]", "[[[]]]"]);
    assert_eq!(stdout(&pair), "1\n");

    let shuffle = run(&["shuffle", "1:0", "1:0"]);
    assert_eq!(stdout(&shuffle), "2 1:0>1:0\n");

    let degp = run(&["degp", "1 [] []"]);
    assert_eq!(stdout(&degp), "2\n");
    let undefined = run(&["degp", "0"]);
    assert_eq!(stdout(&undefined), "undefined\n");
}

#[test]
fn renorm_goldens() {
    let counterterm = run(&["renorm", "[]", "--form", "counterterm"]);
    assert_eq!(stdout(&counterterm), "x_[](c)\n");

    let renormalized = run(&["renorm", "[[[]]]"]);
    assert_eq!(
        stdout(&renormalized),
        "x_[[[]]](c) - [x_[[[]]](c)] - [x_[[]](c)]x_[](c) - [x_[](c)]x_[[]](c) \
         + [x_[](c) x_[](c)]x_[](c) + [[x_[[]](c)]x_[](c)] + [[x_[](c)]x_[[]](c)] \
         - [[x_[](c) x_[](c)]x_[](c)]\n",
    );
}

#[test]
fn parse_errors_exit_two_with_a_position() {
    let out = run(&["antipode", "[["]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("byte 2"), "stderr: {}", stderr(&out));

    let suite = run(&["check", "nonsense"]);
    assert_eq!(suite.status.code(), Some(2));
}

#[test]
fn axiom_suite_passes() {
    let out = run(&["check", "hopf-axioms", "--max-weight", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("suite hopf-axioms (max weight 3): passed"));
}

#[test]
fn randomized_suites_print_the_seed_and_repeat_exactly() {
    let first = run(&["check", "roundtrip", "--max-weight", "4", "--seed", "11"]);
    let second = run(&["check", "roundtrip", "--max-weight", "4", "--seed", "11"]);
    assert!(first.status.success());
    assert!(stdout(&first).contains("seed: 11"));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn json_records_are_versioned() {
    let out = run(&["coproduct", "[[]]", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["format"], "treehopf/1");
    assert_eq!(v["kind"], "tensor");
    assert_eq!(v["terms"].as_array().map(Vec::len), Some(3));
}

#[test]
fn comodule_pipeline_roundtrips_through_files() {
    let family = tmp("family.json");
    fs::write(
        &family,
        r#"{"format":"treehopf/1","kind":"family","n":4,"entries":[
            {"i":1,"j":1,"element":"1 []"},
            {"i":1,"j":2,"element":"1 [[]] + -1/2 [] []"},
            {"i":1,"j":3,"element":"1 []"},
            {"i":2,"j":3,"element":"1 []"},
            {"i":3,"j":4,"element":"1 []"}]}"#,
    )
    .unwrap();
    let family = family.to_str().unwrap();

    let built = run(&["comodule", "build", family, "--format", "json"]);
    assert!(built.status.success());
    let structure = tmp("structure.json");
    fs::write(&structure, stdout(&built)).unwrap();
    let structure = structure.to_str().unwrap();

    let verify = run(&["comodule", "verify", structure]);
    assert!(verify.status.success());
    assert_eq!(stdout(&verify), "coassociative\n");

    let extract = run(&["comodule", "extract", structure, "--format", "json"]);
    let got: serde_json::Value = serde_json::from_str(&stdout(&extract)).unwrap();
    let want: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp("family.json")).unwrap()).unwrap();
    assert_eq!(got["entries"], want["entries"]);

    let flag = run(&["comodule", "flag", structure]);
    assert_eq!(stdout(&flag), "dims: 1 3 5\ntype: 1 2 2\n");

    let profile = run(&["comodule", "type", family]);
    assert_eq!(stdout(&profile), "1 2 2\n");
}

#[test]
fn verify_rejects_a_broken_structure_with_exit_one() {
    let path = tmp("broken.json");
    fs::write(
        &path,
        r#"{"format":"treehopf/1","kind":"structure","n":2,"entries":[
            {"i":2,"j":0,"element":"1 [[]]"}]}"#,
    )
    .unwrap();
    let out = run(&["comodule", "verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "not coassociative\n");
}

#[test]
fn endo_recover_reads_the_identity_off_its_images() {
    let path = tmp("identity.json");
    fs::write(
        &path,
        r#"{"format":"treehopf/1","kind":"morphism","bound":2,"images":{
            "[]":"1 []","[[]]":"1 [[]]"}}"#,
    )
    .unwrap();
    let out = run(&["endo", "recover", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "bound: 2\n[[]] => 0\n[] => 1 []\n");
}

#[test]
fn xi_verification_passes() {
    let out = run(&["xi", "--max-weight", "3", "--verify"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("invertible: true"));
    assert!(text.contains("coproduct commutes: true"));
}
