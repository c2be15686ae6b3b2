use serde_json::Value;
use spinor_workbench::cli::{render, run, Outcome};

const E3: &str = "E/GF(3): y^2=x^3-x";

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("spinor-workbench").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["--json"];
    argv.extend_from_slice(args);
    let out = cli(&argv);
    (out.code, serde_json::from_str(&out.stdout).expect("valid json"))
}

const COMMANDS: &[&[&str]] = &[
    &["picard", E3],
    &["rr", E3, "3*[O]"],
    &["div", "P1/GF(3)", "x^2/(x^2+1)"],
    &["principal", "P1/GF(3)", "[0] + [1] - 2*[inf]"],
    &["sections", "order P1/GF(3) [2*[inf]; 0]"],
    &["order-conj", "P1/GF(3)", "2*[inf]", "[0] + [inf]"],
    &["spinor-group", E3, "--family", "orders", "--n", "2"],
    &["restrict", "P1/GF(3)", "[x^2+1]"],
    &["nonsplit-bound", E3, "--n", "2"],
    &["represent", "qlat P1/GF(3) n=4 B=2*[inf]"],
    &["split-reps", "P1/GF(3)", "--n", "2"],
    &["places", "P1/GF(3)", "--max-degree", "2"],
    &["factor", "GF(3)", "x^3-x"],
    &["example", "b", "--q", "3", "--degB", "2"],
    &["selftest", "--filter", "riemann-roch"],
];

#[test]
fn json_output_is_deterministic() {
    for args in COMMANDS {
        let mut argv = vec!["--json"];
        argv.extend_from_slice(args);
        let a = cli(&argv);
        let b = cli(&argv);
        assert_eq!(a, b, "{args:?}");
        assert_eq!(a.code, 0, "{args:?}: {}", a.stderr);
    }
}

#[test]
fn text_and_json_agree() {
    for args in COMMANDS {
        let text = cli(args).stdout;
        let (_, doc) = json(args);
        for (k, v) in doc["results"].as_object().unwrap() {
            let line = format!("{k}: {}", render(v));
            assert!(text.lines().any(|l| l == line), "{args:?}: missing {line:?}");
        }
        let checks = doc["checks"].as_array().unwrap();
        let passed = checks.iter().filter(|c| c["pass"] == Value::Bool(true)).count();
        if !checks.is_empty() {
            assert!(text.contains(&format!("PASS {passed}/{} checks", checks.len())), "{args:?}");
        }
        assert_eq!(doc["pass"], Value::Bool(true));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["picard", E3]).code, 0);
    // domain error: quadratic families need odd characteristic
    let out = cli(&["spinor-group", "P1/GF(2)", "--family", "quadratic", "--n", "4"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty() && out.stderr.starts_with("error:"));
    // usage errors
    assert_eq!(cli(&["frobnicate"]).code, 2);
    assert_eq!(cli(&["rr", E3]).code, 2);
    assert_eq!(cli(&["rr", E3, "3*[Q]"]).code, 2);
    assert_eq!(cli(&["spinor-group", E3, "--n", "1"]).code, 2);
}

#[test]
fn json_errors_are_a_single_object() {
    let (code, doc) = json(&["rr", E3, "3*[Q]"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["kind"], "parse");
    assert_eq!(doc["exit_code"], 2);
    assert!(doc.get("results").is_none());
    let (code, doc) = json(&["spinor-group", "P1/GF(2)", "--family", "quadratic", "--n", "4"]);
    assert_eq!(code, 1);
    assert_eq!(doc["exit_code"], 1);
    assert_eq!(doc.as_object().unwrap().len(), 2);
}

#[test]
fn rr_on_the_elliptic_curve() {
    let (code, doc) = json(&["rr", E3, "3*[O]"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["dim"], 3);
    assert_eq!(doc["results"]["basis"], serde_json::json!(["1", "x", "y"]));
}

#[test]
fn elliptic_example_passes() {
    let out = cli(&["example", "elliptic"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("PASS"));
    assert!(!out.stdout.contains("FAIL"));
}

#[test]
fn obstruction_example() {
    let (code, doc) = json(&["example", "b", "--q", "3", "--degB", "2"]);
    assert_eq!(code, 0);
    let r = &doc["results"];
    assert_eq!(r["verdict"], "Obstructed");
    assert_eq!(r["radical"].as_array().unwrap().len(), 3);
    let text = cli(&["example", "b", "--q", "3", "--degB", "2"]).stdout;
    assert!(text.contains("Obstructed"));
}

#[test]
fn all_examples_pass() {
    for ex in ["a", "b", "m2", "elliptic", "p1"] {
        let out = cli(&["example", ex]);
        assert_eq!(out.code, 0, "example {ex}:\n{}", out.stdout);
    }
}

#[test]
fn selftest_filter_selects_a_group() {
    let (code, doc) = json(&["selftest", "--filter", "riemann-roch"]);
    assert_eq!(code, 0);
    let scopes: std::collections::BTreeSet<String> =
        doc["checks"].as_array().unwrap().iter().map(|c| c["scope"].as_str().unwrap().to_string()).collect();
    assert!(!scopes.is_empty());
    assert!(scopes.iter().all(|s| s.starts_with("riemann-roch")), "{scopes:?}");
    assert_eq!(cli(&["selftest", "--filter", "no-such-group"]).code, 2);
}

#[test]
fn seed_is_reported() {
    let out = cli(&["selftest", "--filter", "riemann-roch"]);
    assert!(out.stdout.contains("seed"));
}
