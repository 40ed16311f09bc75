//! End-to-end runs of the binary: every verb, the documented exit codes,
//! and the JSON mode's fixture round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn apart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.push("fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn eval_prints_the_normal_form() {
    let o = apart(&["eval", "fst (pair 2 5)"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2");

    let o = apart(&["eval", "rec 0 (fn n:N. fn r:N. succ r) 3"]);
    assert_eq!(stdout(&o), "3");
}

#[test]
fn eval_rejects_bad_input_with_exit_2() {
    let o = apart(&["eval", "(pair zero"]);
    assert_eq!(o.status.code(), Some(2));
    let o = apart(&["eval", "succ unit"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn type_prints_the_inferred_type() {
    let o = apart(&["type", "succ"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "N -> N");
    let o = apart(&["type", "pair zero unit"]);
    assert_eq!(stdout(&o), "N * Unit");
}

#[test]
fn translate_prints_plus_and_minus_types() {
    let o = apart(&["translate", "N -> N"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "(N -> N) * (N -> N -> N -> N)\nN * N");
    // The empty type has no translation.
    let o = apart(&["translate", "Empty"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ce0_prints_the_witness() {
    let o = apart(&["ce0", "--fixtures", &fixture("ce0-least-difference.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "0");

    let o = apart(&["ce0", "--fixtures", &fixture("ce0-shifted-difference.json")]);
    assert_eq!(stdout(&o), "3");
}

#[test]
fn ce0_json_round_trips_through_the_fixture_parser() {
    let o = apart(&[
        "--json",
        "ce0",
        "--fixtures",
        &fixture("ce0-least-difference.json"),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["witness"], 0);
    // The embedded fixture parses again as the same instance.
    let embedded = serde_json::to_string(&v["fixture"]).unwrap();
    let original = std::fs::read_to_string(fixture("ce0-least-difference.json")).unwrap();
    let a = apart_core::fixtures::parse_ce_fixture(&embedded).unwrap();
    let b = apart_core::fixtures::parse_ce_fixture(&original).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ce1_prints_the_witness_table() {
    let o = apart(&["ce1", "--fixtures", &fixture("ce1-first-hit.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["table"]["0"], 1);
    assert_eq!(v["default"], 0);
}

#[test]
fn ce_fixture_errors_exit_2() {
    let o = apart(&["ce0", "--fixtures", "/nonexistent.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = apart(&["ce1", "--fixtures", &fixture("ce0-least-difference.json")]);
    assert_eq!(o.status.code(), Some(2), "a ce0 fixture lacks moduli");
}

#[test]
fn check_apartness_reports_per_axiom() {
    let o = apart(&["check-apartness", "N"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = stdout(&o);
    for axiom in ["reflexivity", "symmetry", "transitivity"] {
        assert!(text.contains(axiom), "{text}");
    }
    assert!(!text.contains("FAIL"), "{text}");

    let o = apart(&[
        "check-apartness",
        "N -> N",
        "--samples",
        &fixture("samples-nat-functions.txt"),
        "--seed",
        "7",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn check_hyperdoctrine_runs_the_battery() {
    let o = apart(&[
        "check-hyperdoctrine",
        "--fixtures",
        &fixture("hyperdoctrine-collapse.json"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = stdout(&o);
    assert!(text.contains("exists-adjunction"), "{text}");
    assert!(text.contains("forall-adjunction"), "{text}");
    assert!(text.contains("beck-chevalley"), "{text}");
    assert!(text.contains("round trip"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn identical_inputs_give_identical_output() {
    let a = apart(&["check-apartness", "N * N", "--seed", "11"]);
    let b = apart(&["check-apartness", "N * N", "--seed", "11"]);
    assert_eq!(stdout(&a), stdout(&b));
}
