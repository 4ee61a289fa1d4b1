//! Acceptance suite: runs the reference battery once and asserts every
//! criterion. Run with `--nocapture` to see one pass/fail line per check.

use qcf::report::{run_battery, BatteryOptions, VerificationReport};
use std::sync::OnceLock;

fn report() -> &'static VerificationReport {
    static REPORT: OnceLock<VerificationReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let r = run_battery(&BatteryOptions::default()).expect("battery runs to completion");
        print!("{}", r.render_text());
        r
    })
}

fn assert_checks(names: &[&str]) {
    let r = report();
    for name in names {
        let check = r
            .checks
            .iter()
            .find(|c| c.name == *name)
            .unwrap_or_else(|| panic!("battery is missing the check {name:?}"));
        assert!(
            check.pass,
            "{}: expected {}, observed {}",
            check.name, check.expected, check.observed
        );
    }
}

#[test]
fn criterion_01_counting_identities() {
    assert_checks(&["gauss(7,2,2)", "anticode bound floor(2667/7)"]);
}

#[test]
fn criterion_02_witness_code() {
    assert_checks(&[
        "witness size",
        "witness minimum distance",
        "witness orbit type under G_{4,6}",
        "witness is G_{4,6}-invariant",
        "a hyperplane holds exactly 35 witness codewords",
        "witness affine complement size",
        "bundled code re-encodes identically",
    ]);
}

#[test]
fn criterion_03_automorphism_group() {
    assert_checks(&[
        "witness automorphism group order",
        "witness automorphism group type",
        "automorphism group equals closure(G_{4,6})",
    ]);
}

#[test]
fn criterion_04_bundled_group_integrity() {
    assert_checks(&[
        "all 33 groups close to their stated orders",
        "group order multiset",
        "abstract types consistent with fingerprints",
        "alternative G_{4,6} presentation generates the same subgroup or a conjugate",
        "G_{16,1} contains a conjugate of G_{4,6}",
    ]);
}

#[test]
fn criterion_05_involution_census() {
    assert_checks(&[
        "involution count in GL(7,2)",
        "involution formula matches brute force (n=2,3)",
        "order-2 classes and their fixed-space dimensions",
    ]);
}

#[test]
fn criterion_06_cyclic_subgroup_classes() {
    assert_checks(&["cyclic subgroup classes (m -> count)"]);
}

#[test]
fn criterion_07_orbit_types() {
    assert_checks(&[
        "order-31 orbit types (3- and 2-subspaces)",
        "G_{5,1} orbit types (3- and 2-subspaces)",
        "G_{14,1} full and pruned variable orbit types",
    ]);
}

#[test]
fn criterion_08_normalizer_and_subproblems() {
    assert_checks(&[
        "normalizer order of the order-14 cyclic group",
        "subproblem count and class type",
    ]);
}

#[test]
fn criterion_09_solver_positive_results() {
    assert_checks(&[
        "order-127 model proven optimum",
        "order-127 solution decodes to a distance-4 code",
        "normalizer decomposition reproduces the order-127 optimum",
        "protocol rejects the order-127 group at kappa=328",
        "order-31 incumbent reaches 279 in decision mode",
        "protocol accepts the order-31 group at kappa=278",
        "order-31 optimum proven at 279 (no 280 exists)",
    ]);
}

#[test]
fn criterion_10_solver_oracle_equivalence() {
    assert_checks(&[
        "branch-and-bound equals exhaustive enumeration (200 random models)",
        "root bound dominates the true optimum on all random models",
    ]);
}

#[test]
fn criterion_11_ladder() {
    assert_checks(&[
        "order-9 ladder produces exactly the types Z_9 and Z_3 x Z_3",
        "ladder matches brute-force subgroup enumeration in an order-168 ambient",
    ]);
}

#[test]
fn criterion_12_improvement_protocol() {
    assert_checks(&[
        "witness is feasible for its own model with closeness c=333",
        "deleting one length-4 orbit and re-solving at c=329 recovers 333",
    ]);
}

#[test]
fn out_of_scope_items_are_documented_as_skipped() {
    let r = report();
    assert_eq!(r.skipped(), 3, "three documented skips expected");
    assert!(r
        .checks
        .iter()
        .any(|c| c.skipped && c.name.contains("exclusion campaigns")));
}

#[test]
fn battery_has_no_failures_at_all() {
    let r = report();
    assert!(r.all_passed(), "\n{}", r.render_text());
}
