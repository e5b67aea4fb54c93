//! The numbered acceptance checks, one test per criterion, each printing a
//! single pass/fail line. Run with `--nocapture` to see the lines.

use vbetti::pipeline::PipelineConfig;
use vbetti::selftest::run_criterion;

fn check(id: u32) {
    let cfg = PipelineConfig::default();
    let r = run_criterion(id, &cfg);
    println!(
        "criterion {}: {} — {} ({})",
        r.id,
        if r.pass { "PASS" } else { "FAIL" },
        r.name,
        r.details
    );
    assert!(r.pass, "criterion {} failed: {}", r.id, r.details);
}

#[test]
fn criterion_01_grid_cover_invariants() {
    check(1);
}

#[test]
fn criterion_02_case1_headline() {
    check(2);
}

#[test]
fn criterion_03_formula_oracle_agreement() {
    check(3);
}

#[test]
fn criterion_04_lifting_lemma_suite() {
    check(4);
}

#[test]
fn criterion_05_case2_n3() {
    check(5);
}

#[test]
fn criterion_06_multi_puncture() {
    check(6);
}

#[test]
fn criterion_07_symplectic_invariance() {
    check(7);
}

#[test]
fn criterion_08_subgroup_monotonicity() {
    check(8);
}

#[test]
fn criterion_09_reduction_suite() {
    check(9);
}

#[test]
fn criterion_10_determinism() {
    check(10);
}
