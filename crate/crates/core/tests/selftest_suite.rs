//! The invariant suite behind `selftest`, group by group.

use spinor_workbench::checks::{seed_from_env, Scenario};
use spinor_workbench::selftest::run;

fn assert_group(name: &str) {
    let scenarios: Vec<Scenario> = run(Some(name), seed_from_env());
    assert!(!scenarios.is_empty());
    for s in &scenarios {
        for c in s.failures() {
            eprintln!("{} / {}: expected {}, got {}", s.id, c.claim, c.expected, c.got);
        }
        assert!(s.passed(), "{} failed", s.id);
    }
}

#[test]
fn galois_field() {
    assert_group("galois-field");
}

#[test]
fn curve_function_field() {
    assert_group("curve-function-field");
}

#[test]
fn divisor_picard() {
    assert_group("divisor-picard");
}

#[test]
fn riemann_roch() {
    assert_group("riemann-roch");
}

#[test]
fn sheaf_lattice() {
    assert_group("sheaf-lattice");
}

#[test]
fn quadratic_forms() {
    assert_group("quadratic-forms");
}

#[test]
fn spinor_classfield() {
    assert_group("spinor-classfield");
}
