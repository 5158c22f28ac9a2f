//! End-to-end runs of the `telx` binary and of the library entry point.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clap::Parser;
use proptest::prelude::*;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn telx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telx")).args(args).output().expect("run telx")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn run_json(args: &[&str]) -> Value {
    let mut full = vec!["telx", "--json"];
    full.extend_from_slice(args);
    telx::run(&telx::Cli::parse_from(full)).to_json()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn alice_is_happy_in_2028_only() {
    let (t, a) = (data("alice.tel"), data("alice.abox"));
    let o = telx(&["taqa", p(&t), p(&a), "--query", "Happy(alice,2028)"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "Yes\n");
    for year in [2026, 2027] {
        let q = format!("Happy(alice,{year})");
        assert_eq!(stdout(&telx(&["taqa", p(&t), p(&a), "--query", &q])), "No\n");
    }
    let v = telx(&["taqa", p(&t), p(&a), "--query", "Happy(alice,2028)", "--verbose"]);
    let text = stdout(&v);
    assert!(text.contains("nonterminal: ") && text.contains("length: 3"), "{text}");
}

#[test]
fn jez_grammar_accepts_c16() {
    let o = telx(&["member", p(&data("jez.cg")), "--nt", "N1", "--word", "c^16"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("Yes\n"));
    let o = telx(&["member", p(&data("jez.cg")), "--nt", "N1", "--word", "c^15", "--no-trace"]);
    assert_eq!(stdout(&o), "No\n");
}

#[test]
fn grammar_output_reparses_and_answers_membership() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("alice.cg");
    let o = telx(&["to-grammar", p(&data("alice.tel"))]);
    assert!(o.status.success());
    std::fs::write(&out, &o.stdout).unwrap();
    assert_eq!(stdout(&telx(&["member", p(&out), "--nt", "N_Prof_Happy", "--word", "c^2", "--no-trace"])), "No\n");
    assert_eq!(stdout(&telx(&["member", p(&out), "--nt", "N_Prof_Happy", "--word", "c^3", "--no-trace"])), "Yes\n");
}

#[test]
fn tbox_output_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("four.tel");
    let o = telx(&["to-tbox", p(&data("four.cg"))]);
    assert!(o.status.success());
    std::fs::write(&out, &o.stdout).unwrap();
    let c = run_json(&["classify", p(&out)]);
    assert_eq!(c["payload"]["is_future"], true);
    assert_eq!(c["payload"]["rigid_only"], true);
    let s = run_json(&["shift-set", p(&out), "--lhs", "A", "--rhs", "B_1", "--bound", "10"]);
    assert_eq!(s["payload"]["shifts"], serde_json::json!([1, 4]));
    assert_eq!(s["diagnostics"], serde_json::json!([]));
}

#[test]
fn json_output_is_deterministic() {
    let t = data("alice.tel");
    let a = data("alice.abox");
    for args in [
        vec!["--json", "trace", p(&t), p(&a), "--fact", "Happy(alice, 2028)"],
        vec!["--json", "to-grammar", p(&t)],
        vec!["--json", "emit-datalog", p(&data("linear.tel"))],
        vec!["--json", "saturate", p(&t), p(&a)],
    ] {
        let first = telx(&args);
        let second = telx(&args);
        assert!(first.status.success(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        let v: Value = serde_json::from_slice(&first.stdout).unwrap();
        assert_eq!(v["status"], "ok");
    }
}

#[test]
fn errors_exit_nonzero_with_locations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tel");
    std::fs::write(&bad, "A [= B\nA [= X^y B\n").unwrap();
    let o = telx(&["classify", p(&bad)]);
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.tel:2:"), "{err}");

    let v = run_json(&["to-grammar", p(&data("linear.tel"))]);
    assert_eq!(v["status"], "error");
    assert_eq!(v["payload"]["error"]["kind"], "not_future_fragment");
    assert!(v["payload"]["error"]["message"].as_str().unwrap().contains("B [= X^-2 C"));

    let v = run_json(&["emit-datalog", p(&data("alice.tel"))]);
    assert_eq!(v["payload"]["error"]["kind"], "not_linear_fragment");

    assert!(!telx(&["classify", "/definitely/missing.tel"]).status.success());
    let v = run_json(&["member", p(&data("jez.cg")), "--nt", "Nope", "--word", "c"]);
    assert_eq!(v["payload"]["error"]["kind"], "usage");
}

#[test]
fn incomplete_answers_carry_diagnostics() {
    let lin = data("linear.tel");
    // Bound-limited saturation.
    let dir = tempfile::tempdir().unwrap();
    let abox = dir.path().join("a.abox");
    std::fs::write(&abox, "A(a, 0)\n").unwrap();
    let v = run_json(&["taqa", p(&lin), p(&abox), "--query", "E(a, 3)"]);
    assert_eq!(v["payload"]["answer"], "UnknownAtBound");
    assert_eq!(v["diagnostics"].as_array().unwrap().len(), 1);
    let v = run_json(&["taqa", p(&lin), p(&abox), "--query", "E(a, 2)"]);
    assert_eq!(v["payload"]["answer"], "Yes");

    // Budget-limited shift search.
    let cfg = dir.path().join("lin.cg");
    std::fs::write(&cfg, stdout(&telx(&["to-cfg", p(&lin)]))).unwrap();
    let v = run_json(&["exists-shift", p(&cfg), "--nt", "N_A_E", "--shift", "2", "--budget", "10"]);
    assert_eq!(v["payload"]["witness"], "ddcccc");
    let v = run_json(&["exists-shift", p(&cfg), "--nt", "N_A_E", "--shift", "3", "--budget", "12"]);
    assert_eq!(v["payload"]["answer"], "NoWithinBudget");
    assert_eq!(v["diagnostics"].as_array().unwrap().len(), 1);

    // Approximate linear rigidisation.
    let v = run_json(&["to-cfg", p(&data("local.tel"))]);
    assert_eq!(v["payload"]["exact"], false);
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());
    let v = run_json(&["to-cfg", p(&lin)]);
    assert_eq!(v["payload"]["exact"], true);
    assert_eq!(v["diagnostics"], serde_json::json!([]));
}

#[test]
fn datalog_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("p.dl");
    let abox = dir.path().join("a.abox");
    std::fs::write(&prog, stdout(&telx(&["emit-datalog", p(&data("linear.tel"))]))).unwrap();
    std::fs::write(&abox, "A(a, 0)\n").unwrap();
    let v = run_json(&["eval-datalog", p(&prog), p(&abox), "--lo", "-5", "--hi", "5"]);
    let facts = v["payload"]["facts"].as_array().unwrap();
    assert!(facts.iter().any(|f| f["concept"] == "E" && f["time"] == 2), "{v}");
    assert!(!facts.iter().any(|f| f["concept"] == "E" && f["time"] == 3));
}

#[test]
fn detect_period_reports_fits_and_absence() {
    let v = run_json(&["detect-period", "--samples", "2,5,8,11,14,17,20", "--bound", "20"]);
    assert_eq!(v["payload"]["periodic"]["future"]["period"], 3);
    let v = run_json(&["detect-period", "--grammar", p(&data("jez.cg")), "--nt", "N1", "--bound", "100"]);
    assert_eq!(v["payload"]["periodic"], Value::Null);
    assert_eq!(v["diagnostics"].as_array().unwrap().len(), 1);
}

#[test]
fn classify_and_validate() {
    let v = run_json(&["classify", p(&data("linear.tel"))]);
    assert_eq!(v["payload"]["is_linear"], true);
    assert_eq!(v["payload"]["is_future"], false);
    let v = run_json(&["validate", p(&data("alice.tel"))]);
    assert_eq!(v["payload"]["valid"], true);
    let v = run_json(&["entails", p(&data("linear.tel")), "--ci", "A [= X^2 E"]);
    assert_eq!(v["payload"]["answer"], "Yes");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn member_agrees_with_the_diagonal(i in 0usize..6, j in 0usize..6, k in 0usize..6) {
        let word = format!("a^{i}b^{j}c^{k}");
        let v = run_json(&["member", p(&data("anbncn.cg")), "--word", &word, "--no-trace"]);
        let expected = if i == j && j == k { "Yes" } else { "No" };
        prop_assert_eq!(&v["payload"]["answer"], expected);
    }
}

/// The `required` keys of a committed schema.
fn schema_required(name: &str) -> Vec<String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    schema["required"].as_array().unwrap().iter().map(|k| k.as_str().unwrap().to_string()).collect()
}

#[test]
fn outputs_carry_the_schema_keys() {
    let has_all = |v: &Value, schema: &str| {
        for key in schema_required(schema) {
            assert!(v.get(&key).is_some(), "{schema}: missing `{key}` in {v}");
        }
    };
    let t = data("alice.tel");
    let r = run_json(&["trace", p(&t), p(&data("alice.abox")), "--fact", "Happy(alice, 2028)"]);
    has_all(&r, "command-result");
    has_all(&r["payload"]["trace"], "trace");
    has_all(&run_json(&["to-grammar", p(&t)])["payload"]["grammar"], "grammar");
    has_all(&run_json(&["member", p(&data("jez.cg")), "--nt", "N1", "--word", "c^4"])["payload"]["trace"], "grammar-trace");
    has_all(&run_json(&["emit-datalog", p(&data("linear.tel"))])["payload"]["program"], "program");
}
