//! One test per acceptance criterion; each prints a PASS/FAIL line.

use su11net_core::verify::{self, CriterionOutcome};

fn report(outcome: CriterionOutcome) {
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_1_single_mode_displacement() {
    report(verify::criterion_1());
}

#[test]
fn criterion_2_single_mode_phase() {
    report(verify::criterion_2());
}

#[test]
fn criterion_3_displacement_network() {
    report(verify::criterion_3());
}

#[test]
fn criterion_4_phase_network() {
    report(verify::criterion_4());
}

#[test]
fn criterion_5_homodyne() {
    report(verify::criterion_5());
}

#[test]
fn criterion_6_qfi_oracle() {
    report(verify::criterion_6());
}

#[test]
fn criterion_7_property_suites() {
    report(verify::criterion_7());
}
