use bpv::solver::*;

fn lin(terms: &[(i64, VarId)], rel: Rel, rhs: i64) -> Constraint {
    Constraint::Linear(Linear::new(terms.iter().copied(), rel, rhs))
}

#[test]
fn new_var_bounds() {
    let mut s = Store::new();
    let v = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    assert_eq!((s.min(v), s.max(v)), (-2147483647, 2147483646));
    let f = s.new_var(5, 5).unwrap();
    assert_eq!(s.value(f), Some(5));
    assert_eq!(s.new_var(3, 2), Err(SolverError::InvalidDomain { lo: 3, hi: 2 }));
}

#[test]
fn sum_then_lower_bound_is_inconsistent() {
    let mut s = Store::new();
    let x = s.new_var(0, 10).unwrap();
    let y = s.new_var(0, 10).unwrap();
    assert!(s.post(lin(&[(1, x), (1, y)], Rel::Eq, 3)).unwrap().is_consistent());
    assert_eq!(s.post(lin(&[(-1, x)], Rel::Le, -5)).unwrap(), Consistency::Inconsistent);
}

#[test]
fn square_prunes_to_interval() {
    let mut s = Store::new();
    let x = s.new_var(0, 8).unwrap();
    let z = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    s.post(Constraint::Mult { x, y: x, z }).unwrap();
    assert_eq!((s.min(z), s.max(z)), (0, 64));
}

#[test]
fn midpoint_division() {
    let mut s = Store::new();
    let l = s.constant(0);
    let u = s.constant(7);
    let sum = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    let two = s.constant(2);
    let m = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    s.post(lin(&[(1, l), (1, u), (-1, sum)], Rel::Eq, 0)).unwrap();
    s.post(Constraint::Div { x: sum, y: two, z: m }).unwrap();
    assert_eq!(s.value(m), Some(3));
}

#[test]
fn element_prunes_index_by_value() {
    let mut s = Store::new();
    let t: Vec<VarId> = [5, 7, 6, 9].iter().map(|&v| s.constant(v)).collect();
    let k = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    let v = s.constant(6);
    s.post(Constraint::Element { index: k, table: t, value: v }).unwrap();
    assert_eq!(s.value(k), Some(2));
}

#[test]
fn element_fixed_index_intersects() {
    let mut s = Store::new();
    let t0 = s.new_var(0, 10).unwrap();
    let t1 = s.new_var(3, 6).unwrap();
    let k = s.constant(1);
    let v = s.new_var(5, 20).unwrap();
    s.post(Constraint::Element { index: k, table: vec![t0, t1], value: v }).unwrap();
    assert_eq!((s.min(v), s.max(v)), (5, 6));
    assert_eq!((s.min(t1), s.max(t1)), (5, 6));
}

#[test]
fn alldifferent_removes_fixed_value() {
    let mut s = Store::new();
    let x = s.constant(1);
    let y = s.new_var(1, 2).unwrap();
    s.post(Constraint::AllDifferent(vec![x, y])).unwrap();
    assert_eq!(s.value(y), Some(2));
}

#[test]
fn push_pop_restores() {
    let mut s = Store::new();
    let x = s.new_var(0, 10).unwrap();
    let before = s.snapshot();
    let m = s.push();
    s.post(lin(&[(1, x)], Rel::Eq, 3)).unwrap();
    assert_eq!(s.value(x), Some(3));
    s.pop(m).unwrap();
    assert_eq!(s.snapshot(), before);

    let m = s.push();
    assert!(!s.post(lin(&[(1, x)], Rel::Le, -1)).unwrap().is_consistent());
    s.pop(m).unwrap();
    assert!(!s.is_failed());
    assert!(s.propagate().is_consistent());
}

#[test]
fn nested_push_pop_is_exact() {
    let mut s = Store::new();
    let x = s.new_var(0, 100).unwrap();
    let y = s.new_var(0, 100).unwrap();
    s.post(lin(&[(1, x), (-1, y)], Rel::Le, -1)).unwrap();
    let before = s.snapshot();
    let a = s.push();
    s.exclude(x, 5).unwrap();
    let mid = s.snapshot();
    let b = s.push();
    let z = s.new_var(0, 3).unwrap();
    s.post(lin(&[(1, y), (-1, z)], Rel::Eq, 0)).unwrap();
    s.pop(b).unwrap();
    assert_eq!(s.snapshot(), mid);
    s.pop(a).unwrap();
    assert_eq!(s.snapshot(), before);
}

#[test]
fn pop_out_of_order_is_rejected() {
    let mut s = Store::new();
    let a = s.push();
    let _b = s.push();
    assert!(matches!(s.pop(a), Err(SolverError::MarkOrderViolation { .. })));
}

#[test]
fn foreign_variable_is_rejected() {
    let mut s = Store::new();
    let mut other = Store::new();
    let v = other.new_var(0, 1).unwrap();
    let _ = s.new_var(0, 1).unwrap();
    assert_eq!(s.post(lin(&[(1, v)], Rel::Le, 0)), Err(SolverError::ForeignVariable(v)));
}

#[test]
fn antisymmetry_has_no_solution() {
    let mut s = Store::new();
    let x = s.new_var(1, 3).unwrap();
    let y = s.new_var(1, 3).unwrap();
    s.post(Constraint::AllDifferent(vec![x, y])).unwrap();
    s.post(lin(&[(1, x), (-1, y)], Rel::Le, -1)).unwrap();
    let r = s.post(lin(&[(1, y), (-1, x)], Rel::Le, -1)).unwrap();
    assert_eq!(r, Consistency::Inconsistent);
}

#[test]
fn pigeonhole_needs_search() {
    let mut s = Store::new();
    let xs: Vec<VarId> = (0..3).map(|_| s.new_var(1, 2).unwrap()).collect();
    assert!(s.post(Constraint::AllDifferent(xs.clone())).unwrap().is_consistent());
    let r = solve(&mut s, &xs, &Limits::unlimited(), &mut SearchStats::default()).unwrap();
    assert!(r.is_none());
}

#[test]
fn difference_cycle_over_default_range_fails_fast() {
    let mut s = Store::new();
    let x = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    let y = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    s.post(lin(&[(1, x), (-1, y)], Rel::Le, -1)).unwrap();
    let r = s.post(lin(&[(1, y), (-1, x)], Rel::Le, -1)).unwrap();
    assert_eq!(r, Consistency::Inconsistent);
}

#[test]
fn forced_equality_refutes_disequality() {
    let mut s = Store::new();
    let i = s.new_var(1, DEFAULT_MAX).unwrap();
    let j = s.new_var(1, DEFAULT_MAX).unwrap();
    let k = s.new_var(1, DEFAULT_MAX).unwrap();
    s.post(lin(&[(1, i), (-1, j)], Rel::Eq, 0)).unwrap();
    s.post(lin(&[(1, j), (-1, k)], Rel::Eq, 0)).unwrap();
    assert!(!s.post(lin(&[(1, i), (-1, k)], Rel::Ne, 0)).unwrap().is_consistent());
}

#[test]
fn triangle_inequalities_refuted_by_relaxation() {
    let mut s = Store::new();
    let i = s.new_var(1, DEFAULT_MAX).unwrap();
    let j = s.new_var(1, DEFAULT_MAX).unwrap();
    let k = s.new_var(1, DEFAULT_MAX).unwrap();
    s.post(lin(&[(1, i), (1, j), (-1, k)], Rel::Le, 0)).unwrap();
    let r = s.post(lin(&[(1, i), (1, k), (-1, j)], Rel::Le, 0)).unwrap();
    assert_eq!(r, Consistency::Inconsistent);
}

#[test]
fn solve_returns_satisfying_assignment() {
    let mut s = Store::new();
    let x = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    let y = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    let z = s.new_var(DEFAULT_MIN, DEFAULT_MAX).unwrap();
    s.post(Constraint::Mult { x, y, z }).unwrap();
    s.post(lin(&[(1, z)], Rel::Eq, 12)).unwrap();
    s.post(lin(&[(1, x), (-1, y)], Rel::Le, -1)).unwrap();
    s.post(lin(&[(-1, x)], Rel::Le, -2)).unwrap();
    let a = solve(&mut s, &[x, y], &Limits::unlimited(), &mut SearchStats::default()).unwrap().unwrap();
    assert_eq!(a.get(x) * a.get(y), 12);
    assert!(a.get(x) < a.get(y) && a.get(x) >= 2);
    for c in s.constraints() {
        assert!(c.is_satisfied(|v| a.get(v)));
    }
}
