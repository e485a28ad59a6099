mod common;

use bpv::engine::{Check, InstanceParams};
use bpv::harness::corpus;
use bpv::harness::oracle::{check_all, OracleError, DEFAULT_CAP};
use bpv::lang::load;

#[test]
fn verifier_agrees_with_enumeration_on_small_domains() {
    let rows = common::compare_corpus();
    let bad: Vec<_> = rows.iter().filter(|c| !c.agrees()).collect();
    assert!(bad.is_empty(), "{bad:#?}");
    // Both verdicts occur, so the comparison is not vacuous.
    assert!(rows.iter().any(|c| c.oracle_violated));
    assert!(rows.iter().any(|c| !c.oracle_violated && c.runs > 0));
}

fn tri() -> InstanceParams {
    InstanceParams::new().bound("i", 0, 4).bound("j", 0, 4).bound("k", 0, 4)
}

#[test]
fn tritype_ko_violations_include_the_degenerate_isosceles() {
    let p = load(corpus::get("tritypeKO").unwrap().source).unwrap();
    let r = check_all(&p, "tritypeKO", &tri(), DEFAULT_CAP).unwrap();
    assert_eq!(r.checked, 125);
    assert!(r.violated());
    let one = InstanceParams::new().bound("i", 1, 1).bound("j", 1, 1).bound("k", 2, 2);
    assert!(check_all(&p, "tritypeKO", &one, DEFAULT_CAP).unwrap().violated());
    let (_, first) = r.first.unwrap();
    assert!(matches!(first, Check::Violated(_)));
}

#[test]
fn tritype_has_no_violation() {
    let p = load(corpus::get("tritype").unwrap().source).unwrap();
    let r = check_all(&p, "tritype", &tri(), DEFAULT_CAP).unwrap();
    assert_eq!((r.checked, r.violations), (125, 0));
}

#[test]
fn binary_search_length_two_has_no_violation() {
    let p = load(corpus::get("binarySearch").unwrap().source).unwrap();
    let inst = InstanceParams::new().len("tab", 2).bound("tab", 0, 2).bound("x", 0, 2);
    let r = check_all(&p, "binarySearch", &inst, DEFAULT_CAP).unwrap();
    assert_eq!(r.checked, 27);
    assert!(!r.violated());
}

#[test]
fn oversized_space_is_refused() {
    let p = load(corpus::get("tritype").unwrap().source).unwrap();
    let err = check_all(&p, "tritype", &InstanceParams::new(), DEFAULT_CAP).unwrap_err();
    assert!(matches!(err, OracleError::CapExceeded { .. }), "{err}");
}
