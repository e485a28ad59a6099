use bpv::engine::*;
use bpv::harness::corpus;
use bpv::lang::{load, TypedProgram};
use bpv::solver::Budget;
use bpv::translate::{Inputs, ViolationKind};

fn program(name: &str) -> TypedProgram {
    load(corpus::get(name).unwrap().source).unwrap()
}

fn run(p: &TypedProgram, f: &str, inst: &InstanceParams) -> Outcome {
    verify_function(p, f, inst).unwrap()
}

fn counterexample(o: &Outcome) -> &Counterexample {
    match &o.verdict {
        Verdict::Counterexample(c) => c,
        v => panic!("expected a counterexample, got {v}"),
    }
}

fn scalars(vs: &[(&str, i64)]) -> Inputs {
    Inputs { scalars: vs.iter().map(|&(n, v)| (n.to_string(), v)).collect(), arrays: Vec::new() }
}

/// The interpreter on the witness must follow the same branches and
/// break the contract.
fn assert_valid(p: &TypedProgram, f: &str, c: &Counterexample) {
    let chk = check_input(p, f, &c.witness.inputs, DEFAULT_STEPS).unwrap();
    assert!(chk.is_violation(), "{}: witness {} does not violate: {chk:?}", f, c.witness.inputs);
    if let Check::Violated(run) = &chk {
        assert_eq!(run.decisions, c.decisions, "{f}: path differs for {}", c.witness.inputs);
    }
}

#[test]
fn tritype_has_ten_feasible_paths() {
    let o = verify(&program("tritype"), &InstanceParams::new()).unwrap();
    assert_eq!(o.verdict.label(), "Verified");
    assert_eq!(o.stats.feasible_paths, 10);
}

#[test]
fn tritype_ko_witness_is_isosceles_degenerate() {
    let p = program("tritypeKO");
    let o = verify(&p, &InstanceParams::new()).unwrap();
    let c = counterexample(&o);
    let w = &c.witness;
    let (i, j, k) = (w.inputs.scalar("i").unwrap(), w.inputs.scalar("j").unwrap(), w.inputs.scalar("k").unwrap());
    assert!(i == j && i + j <= k, "({i},{j},{k})");
    assert_eq!(w.last_value("trityp"), Some(2));
    let r = interpret(&p, "tritypeKO", &w.inputs, DEFAULT_STEPS).unwrap();
    assert_eq!(r.result, Some(2));
    assert_valid(&p, "tritypeKO", c);
}

#[test]
fn identity_has_one_path() {
    let p = load("/*@ ensures \\result == x; @*/ int id(int x){ return x; }").unwrap();
    let o = verify(&p, &InstanceParams::new()).unwrap();
    assert_eq!(o.verdict, Verdict::Verified { feasible_paths: 1, nodes: o.stats.nodes });
}

#[test]
fn constant_condition_takes_one_branch() {
    let p = load("/*@ ensures \\result == 1; @*/ int f(int x){ if (true) { return 1; } else { return 2; } }").unwrap();
    let o = verify(&p, &InstanceParams::new()).unwrap();
    assert_eq!(o.verdict.label(), "Verified");
    assert_eq!(o.stats.feasible_paths, 1);
}

#[test]
fn binary_search_loop_exit_is_forced() {
    let p = program("binarySearch");
    for (len, k) in [(8usize, 3u32), (16, 4)] {
        let o = run(&p, "binarySearch", &InstanceParams::new().len("tab", len));
        assert_eq!(o.verdict.label(), "Verified", "length {len}");
        assert!(o.stats.max_loop_iterations <= k + 1, "length {len}: {} iterations", o.stats.max_loop_iterations);
    }
}

#[test]
fn binary_search_ko_witness_misses_present_value() {
    let p = program("binarySearchKO");
    let o = run(&p, "binarySearch", &InstanceParams::new().len("tab", 8));
    let c = counterexample(&o);
    let x = c.witness.inputs.scalar("x").unwrap();
    let tab = c.witness.inputs.array("tab").unwrap();
    assert!(tab.contains(&x), "{}", c.witness.inputs);
    let r = interpret(&p, "binarySearch", &c.witness.inputs, DEFAULT_STEPS).unwrap();
    assert_eq!(r.result, Some(-1));
    assert_valid(&p, "binarySearch", c);
}

#[test]
fn every_corpus_counterexample_replays() {
    for e in corpus::CORPUS {
        let p = load(e.source).unwrap();
        let f = e.entry.map_or_else(|| p.entry().name.clone(), str::to_string);
        let size = e.sizes.first().copied();
        let o = run(&p, &f, &e.instance(size, &InstanceParams::new()));
        assert_eq!(o.verdict.label(), e.expected.label(), "{}", e.name);
        if let Verdict::Counterexample(c) = &o.verdict {
            assert_valid(&p, &f, c);
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let p = program("binarySearchKO");
    let inst = InstanceParams::new().len("tab", 16);
    let a = run(&p, "binarySearch", &inst);
    let b = run(&p, "binarySearch", &inst);
    assert_eq!(a.verdict, b.verdict);
    assert_eq!(a.stats, b.stats);
    let p = program("tritype");
    let a = verify(&p, &InstanceParams::new()).unwrap();
    let b = verify(&p, &InstanceParams::new()).unwrap();
    assert_eq!((a.verdict, a.stats), (b.verdict, b.stats));
}

#[test]
fn tritype_paths_match_concrete_runs() {
    // Same body, contract that every run violates: the witness then shows
    // every SSA value of the unique path through each fixed input.
    let src = corpus::get("tritype").unwrap().source;
    let body = &src[src.find("int tritype").unwrap()..];
    let p = load(&format!("/*@ ensures \\result == 100; @*/ {body}")).unwrap();
    for i in 0..=4 {
        for j in 0..=4 {
            for k in 0..=4 {
                let inst = InstanceParams::new().bound("i", i, i).bound("j", j, j).bound("k", k, k);
                let o = verify(&p, &inst).unwrap();
                let c = counterexample(&o);
                let inputs = scalars(&[("i", i), ("j", j), ("k", k)]);
                let run = interpret(&p, "tritype", &inputs, DEFAULT_STEPS).unwrap();
                assert_eq!(run.decisions, c.decisions, "({i},{j},{k})");
                let mut traced: Vec<(u32, i64)> = c
                    .witness
                    .entries
                    .iter()
                    .filter(|e| e.ident == "trityp" && e.slot.is_none())
                    .map(|e| (e.version, e.value.0))
                    .collect();
                traced.sort();
                let traced: Vec<i64> = traced.into_iter().map(|(_, v)| v).collect();
                let concrete: Vec<i64> =
                    run.assignments.iter().filter(|(n, _)| n == "trityp").map(|&(_, v)| v).collect();
                assert_eq!(traced, concrete, "({i},{j},{k})");
                assert_eq!(c.witness.last_value("trityp"), run.result, "({i},{j},{k})");
            }
        }
    }
}

const FIND_MIN: &str = "
/*@ requires 0<=l && l<t.length
 @ ensures  (l<=\\result) && (\\result<t.length)
 @       && (\\forall int k; l<=k && k<t.length;t[\\result]<=t[k]) @*/
  static int findMin(int[] t,int l) {
    int idx = l;
    for (int j = l+1; j < t.length;j++)
        if (t[idx]>t[j])
           idx = j;
    return idx; }
";

#[test]
fn call_at_precondition_boundary_is_entailed() {
    let src = format!(
        "/*@ ensures \\result == 0; @*/ int last(int[] t) {{ int k = findMin(t, t.length - 1); return k - t.length + 1; }}\n{FIND_MIN}"
    );
    let p = load(&src).unwrap();
    let o = run(&p, "last", &InstanceParams::new().len("t", 5));
    assert_eq!(o.verdict.label(), "Verified", "{}", o.verdict);
}

#[test]
fn call_below_precondition_is_reported() {
    let src = format!("/*@ ensures \\result >= 0; @*/ int bad(int[] t) {{ int k = findMin(t, -1); return k; }}\n{FIND_MIN}");
    let p = load(&src).unwrap();
    let o = run(&p, "bad", &InstanceParams::new().len("t", 5));
    let c = counterexample(&o);
    assert_eq!(c.kind, ViolationKind::PreconditionNotEntailed { callee: "findMin".into() });
}

#[test]
fn selection_sort_is_one_path() {
    let p = program("selectionSort");
    let o = run(&p, "selectionSort", &InstanceParams::new().len("t", 40));
    assert_eq!(o.verdict.label(), "Verified");
    assert_eq!(o.stats.feasible_paths, 1);
}

#[test]
fn runaway_loop_exhausts_unwind_budget() {
    let p = load("/*@ ensures \\result >= 0; @*/ int f(int n){ int i = 0; while (i < n) { i = i + 1; } return i; }").unwrap();
    let mut inst = InstanceParams::new();
    inst.max_unwind = Some(20);
    let o = verify(&p, &inst).unwrap();
    assert_eq!(o.verdict, Verdict::ResourceExceeded(Budget::Unwind));
}

#[test]
fn node_budget_is_honoured() {
    let p = program("binarySearch");
    let mut inst = InstanceParams::new().len("tab", 16);
    inst.max_nodes = Some(5);
    let o = run(&p, "binarySearch", &inst);
    assert_eq!(o.verdict, Verdict::ResourceExceeded(Budget::Nodes));
}

#[test]
fn missing_length_names_the_array() {
    let err = verify(&program("binarySearch"), &InstanceParams::new()).unwrap_err();
    assert_eq!(err, EngineError::MissingLength("tab".into()));
}

#[test]
fn unchecked_index_is_a_counterexample() {
    let p = load("/*@ ensures \\result >= 0; @*/ int get(int[] t, int i){ return t[i] * 0; }").unwrap();
    let o = verify(&p, &InstanceParams::new().len("t", 3)).unwrap();
    let c = counterexample(&o);
    assert_eq!(c.kind, ViolationKind::IndexOutOfBounds { array: "t".into() });
    let i = c.witness.inputs.scalar("i").unwrap();
    assert!(!(0..3).contains(&i));
    assert_valid(&p, "get", c);
}

#[test]
fn guarded_read_is_safe_only_in_the_right_order() {
    let ok = "/*@ ensures \\result >= 0 && \\result <= t.length; @*/
        int find(int[] t, int x) { int i = 0; while (i < t.length && t[i] != x) { i = i + 1; } return i; }";
    let ko = "/*@ ensures \\result >= 0 && \\result <= t.length; @*/
        int find(int[] t, int x) { int i = 0; while (t[i] != x && i < t.length) { i = i + 1; } return i; }";
    let inst = InstanceParams::new().len("t", 3);
    let o = verify(&load(ok).unwrap(), &inst).unwrap();
    assert_eq!(o.verdict.label(), "Verified", "{}", o.verdict);
    assert_eq!(o.stats.feasible_paths, 4);
    let p = load(ko).unwrap();
    let o = verify(&p, &inst).unwrap();
    let c = counterexample(&o);
    assert_eq!(c.kind, ViolationKind::IndexOutOfBounds { array: "t".into() });
    assert_valid(&p, "find", c);
}

#[test]
fn guarded_division_is_safe_only_when_guarded() {
    let ok = "/*@ ensures \\result >= 0; @*/ int q(int d) { int r = 0;
        if (d != 0 && 10 / d > 2) { r = 1; } if (d == 0 || 10 / d < 0) { r = r + 2; } return r; }";
    let ko = "/*@ ensures \\result >= 0; @*/ int q(int d) { int r = 0;
        if (d != 1 && 10 / d > 2) { r = 1; } return r; }";
    let o = verify(&load(ok).unwrap(), &InstanceParams::new()).unwrap();
    assert_eq!(o.verdict.label(), "Verified", "{}", o.verdict);
    let p = load(ko).unwrap();
    let o = verify(&p, &InstanceParams::new()).unwrap();
    let c = counterexample(&o);
    assert_eq!(c.kind, ViolationKind::DivisionByZero);
    assert_eq!(c.witness.inputs.scalar("d"), Some(0));
    assert_valid(&p, "q", c);
}

#[test]
fn interpreter_examples() {
    let r = interpret(&program("squareSum"), "somme", &scalars(&[("n", 8)]), DEFAULT_STEPS).unwrap();
    assert_eq!(r.result, Some(8 * 9 * 17 / 6));
    let r = interpret(&program("tritype"), "tritype", &scalars(&[("i", 0), ("j", 1), ("k", 1)]), DEFAULT_STEPS).unwrap();
    assert_eq!(r.result, Some(4));
    let r = interpret(&program("tritypeKO"), "tritypeKO", &scalars(&[("i", 1), ("j", 1), ("k", 2)]), DEFAULT_STEPS).unwrap();
    assert_eq!(r.result, Some(2));
}

#[test]
fn interpreter_reports_faults() {
    let p = load("int f(int n){ while (n >= 0) { n = n + 0; } return n; }").unwrap();
    assert_eq!(interpret(&p, "f", &scalars(&[("n", 1)]), 1000), Err(InterpError::StepBudgetExceeded));
    let p = load("int g(int[] t, int i){ return t[i]; }").unwrap();
    let inputs = Inputs { scalars: vec![("i".into(), 3)], arrays: vec![("t".into(), vec![1, 2, 3])] };
    assert!(matches!(interpret(&p, "g", &inputs, 1000), Err(InterpError::OutOfBounds { index: 3, .. })));
}
