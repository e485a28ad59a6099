//! Random small stores checked against brute-force enumeration.

#![allow(dead_code)]

use bpv::solver::*;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

#[derive(Clone, Debug)]
pub enum C {
    Lin(Vec<(i64, usize)>, Rel, i64),
    Mult(usize, usize, usize),
    Div(usize, usize, usize),
    Element(usize, Vec<usize>, usize),
    AllDiff(Vec<usize>),
    NotEq(usize, usize),
    Reif(usize, Vec<(i64, usize)>, Rel, i64),
    Bool(usize, bool, Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Problem {
    ints: Vec<(i64, i64)>,
    bools: usize,
    cons: Vec<C>,
}

fn rel() -> impl Strategy<Value = Rel> {
    prop_oneof![Just(Rel::Le), Just(Rel::Eq), Just(Rel::Ne)]
}

fn terms() -> impl Strategy<Value = Vec<(i64, usize)>> {
    prop::collection::vec((-3i64..=3, 0usize..8), 1..4)
}

fn cons() -> impl Strategy<Value = C> {
    let i = || 0usize..8;
    prop_oneof![
        3 => (terms(), rel(), -6i64..=6).prop_map(|(t, r, c)| C::Lin(t, r, c)),
        1 => (i(), i(), i()).prop_map(|(x, y, z)| C::Mult(x, y, z)),
        1 => (i(), i(), i()).prop_map(|(x, y, z)| C::Div(x, y, z)),
        2 => (i(), prop::collection::vec(i(), 1..5), i()).prop_map(|(k, t, v)| C::Element(k, t, v)),
        1 => prop::collection::vec(i(), 2..4).prop_map(C::AllDiff),
        1 => (i(), i()).prop_map(|(x, y)| C::NotEq(x, y)),
        2 => (0usize..3, terms(), rel(), -6i64..=6).prop_map(|(b, t, r, c)| C::Reif(b, t, r, c)),
        1 => (0usize..3, any::<bool>(), prop::collection::vec(0usize..3, 1..3))
            .prop_map(|(b, and, a)| C::Bool(b, and, a)),
    ]
}

pub fn problem() -> impl Strategy<Value = Problem> {
    (
        prop::collection::vec((-3i64..=3, 1i64..=5).prop_map(|(lo, w)| (lo, lo + w)), 2..=5),
        0usize..=3,
        prop::collection::vec(cons(), 1..5),
    )
        .prop_map(|(ints, bools, cons)| Problem { ints, bools, cons })
}

/// Store variables: ints first, then 0/1 variables.
struct Built {
    store: Store,
    vars: Vec<VarId>,
    posted: Vec<Constraint>,
}

impl Problem {
    fn int(&self, i: usize) -> usize {
        i % self.ints.len()
    }

    fn boolean(&self, i: usize) -> Option<usize> {
        (self.bools > 0).then(|| self.ints.len() + i % self.bools)
    }

    fn width(&self) -> usize {
        self.ints.len() + self.bools
    }

    fn linear(&self, t: &[(i64, usize)], r: Rel, c: i64, vars: &[VarId]) -> Linear {
        Linear::new(t.iter().map(|&(k, i)| (k, vars[self.int(i)])), r, c)
    }

    /// Constraints in store terms; those needing absent 0/1 variables are dropped.
    fn constraints(&self, vars: &[VarId]) -> Vec<Constraint> {
        let v = |i: usize| vars[self.int(i)];
        self.cons
            .iter()
            .filter_map(|c| {
                Some(match c {
                    C::Lin(t, r, k) => Constraint::Linear(self.linear(t, *r, *k, vars)),
                    C::Mult(x, y, z) => Constraint::Mult { x: v(*x), y: v(*y), z: v(*z) },
                    C::Div(x, y, z) => Constraint::Div { x: v(*x), y: v(*y), z: v(*z) },
                    C::Element(k, t, val) => {
                        Constraint::Element { index: v(*k), table: t.iter().map(|&i| v(i)).collect(), value: v(*val) }
                    }
                    C::AllDiff(xs) => Constraint::AllDifferent(xs.iter().map(|&i| v(i)).collect()),
                    C::NotEq(x, y) => Constraint::NotEq(v(*x), v(*y)),
                    C::Reif(b, t, r, k) => {
                        Constraint::Reif { b: vars[self.boolean(*b)?], lin: self.linear(t, *r, *k, vars) }
                    }
                    C::Bool(b, and, a) => Constraint::Bool {
                        b: vars[self.boolean(*b)?],
                        op: if *and { BoolOp::And } else { BoolOp::Or },
                        args: a.iter().map(|&i| self.boolean(i).map(|j| vars[j])).collect::<Option<_>>()?,
                    },
                })
            })
            .collect()
    }

    fn build(&self) -> Built {
        let mut store = Store::new();
        let mut vars: Vec<VarId> = self.ints.iter().map(|&(lo, hi)| store.new_var(lo, hi).unwrap()).collect();
        for _ in 0..self.bools {
            vars.push(store.new_var(0, 1).unwrap());
        }
        let posted = self.constraints(&vars);
        Built { store, vars, posted }
    }

    fn initial(&self, k: usize) -> (i64, i64) {
        self.ints.get(k).copied().unwrap_or((0, 1))
    }

    /// Every total assignment over the initial domains that satisfies `cs`.
    fn solutions(&self, vars: &[VarId], cs: &[Constraint]) -> Vec<Vec<i64>> {
        let n = self.width();
        let mut cur: Vec<i64> = (0..n).map(|k| self.initial(k).0).collect();
        let mut out = Vec::new();
        loop {
            let val = |x: VarId| cur[vars.iter().position(|&y| y == x).unwrap()];
            if cs.iter().all(|c| holds(c, &val)) {
                out.push(cur.clone());
            }
            let mut k = 0;
            loop {
                if k == n {
                    return out;
                }
                if cur[k] < self.initial(k).1 {
                    cur[k] += 1;
                    break;
                }
                cur[k] = self.initial(k).0;
                k += 1;
            }
        }
    }
}

/// Written from the constraint definitions, independent of the store.
fn holds(c: &Constraint, val: &dyn Fn(VarId) -> i64) -> bool {
    let lin = |l: &Linear| {
        let s: i64 = l.terms.iter().map(|&(k, v)| k * val(v)).sum();
        match l.rel {
            Rel::Le => s <= l.rhs,
            Rel::Eq => s == l.rhs,
            Rel::Ne => s != l.rhs,
        }
    };
    match c {
        Constraint::Linear(l) => lin(l),
        Constraint::Mult { x, y, z } => val(*x) * val(*y) == val(*z),
        Constraint::Div { x, y, z } => val(*y) != 0 && val(*x) / val(*y) == val(*z),
        Constraint::Element { index, table, value } => {
            let k = val(*index);
            k >= 0 && (k as usize) < table.len() && val(table[k as usize]) == val(*value)
        }
        Constraint::AllDifferent(xs) => {
            let vs: Vec<i64> = xs.iter().map(|&x| val(x)).collect();
            (0..vs.len()).all(|i| (i + 1..vs.len()).all(|j| vs[i] != vs[j]))
        }
        Constraint::NotEq(x, y) => val(*x) != val(*y),
        Constraint::Reif { b, lin: l } => (val(*b) == 1) == lin(l),
        Constraint::Bool { b, op, args } => {
            let r = match op {
                BoolOp::And => args.iter().all(|&a| val(a) == 1),
                BoolOp::Or => args.iter().any(|&a| val(a) == 1),
            };
            (val(*b) == 1) == r
        }
    }
}

fn subset(inner: &Domain, outer: &Domain) -> bool {
    inner.iter().all(|v| outer.contains(v))
}

/// Post everything; `false` once the store is inconsistent.
fn post_all(b: &mut Built) -> bool {
    for c in b.posted.clone() {
        if !b.store.post(c).unwrap().is_consistent() {
            return false;
        }
    }
    true
}

pub fn propagation_only_shrinks(s: &Problem) -> Result<(), TestCaseError> {
    let mut b = s.build();
    let mut before = b.store.snapshot();
    for c in b.posted.clone() {
        let ok = b.store.post(c).unwrap().is_consistent();
        if !ok {
            break;
        }
        let after = b.store.snapshot();
        for (x, y) in after.iter().zip(&before) {
            prop_assert!(subset(x, y), "{x:?} not within {y:?}");
        }
        before = after;
    }
    Ok(())
}

pub fn propagation_keeps_every_solution(s: &Problem) -> Result<(), TestCaseError> {
    let mut b = s.build();
    let sols = s.solutions(&b.vars, &b.posted);
    if !post_all(&mut b) {
        prop_assert!(sols.is_empty(), "pruned to failure but {} solutions exist", sols.len());
        return Ok(());
    }
    for sol in &sols {
        for (k, &x) in b.vars.iter().enumerate() {
            prop_assert!(b.store.domain(x).contains(sol[k]), "solution {sol:?} lost at var {k}");
        }
    }
    Ok(())
}

pub fn propagate_is_idempotent(s: &Problem) -> Result<(), TestCaseError> {
    let mut b = s.build();
    if post_all(&mut b) {
        let once = b.store.snapshot();
        prop_assert!(b.store.propagate().is_consistent());
        prop_assert_eq!(b.store.snapshot(), once);
    }
    Ok(())
}

pub fn pop_restores_snapshot(s: &Problem, split: usize) -> Result<(), TestCaseError> {
    let mut b = s.build();
    let split = split.min(b.posted.len());
    let (head, tail) = b.posted.split_at(split);
    let (head, tail) = (head.to_vec(), tail.to_vec());
    let mut ok = true;
    for c in head {
        ok = ok && b.store.post(c).unwrap().is_consistent();
    }
    if !ok {
        return Ok(());
    }
    let base = b.store.snapshot();
    let ncons = b.store.constraints().len();
    let outer = b.store.push();
    let mid = tail.len() / 2;
    for c in &tail[..mid] {
        if !b.store.post(c.clone()).unwrap().is_consistent() {
            break;
        }
    }
    let between = b.store.snapshot();
    let failed_between = b.store.is_failed();
    let inner = b.store.push();
    for c in &tail[mid..] {
        if !b.store.post(c.clone()).unwrap().is_consistent() {
            break;
        }
    }
    b.store.pop(inner).unwrap();
    prop_assert_eq!(b.store.is_failed(), failed_between);
    if !failed_between {
        prop_assert_eq!(b.store.snapshot(), between);
    }
    b.store.pop(outer).unwrap();
    prop_assert!(!b.store.is_failed());
    prop_assert_eq!(b.store.snapshot(), base);
    prop_assert_eq!(b.store.constraints().len(), ncons);
    Ok(())
}

pub fn element_index_keeps_only_compatible_slots(s: &Problem) -> Result<(), TestCaseError> {
    let mut b = s.build();
    if post_all(&mut b) {
        for c in &b.posted {
            if let Constraint::Element { index, table, value } = c {
                for i in b.store.domain(*index).iter() {
                    prop_assert!(i >= 0 && (i as usize) < table.len(), "index {i} out of table");
                    let slot = b.store.domain(table[i as usize]);
                    prop_assert!(slot.intersects(b.store.domain(*value)), "slot {i} cannot hold the value");
                }
            }
        }
    }
    Ok(())
}

pub fn solve_agrees_with_enumeration(s: &Problem) -> Result<(), TestCaseError> {
    let mut b = s.build();
    let sols = s.solutions(&b.vars, &b.posted);
    let found = if post_all(&mut b) {
        let mut st = SearchStats::default();
        solve(&mut b.store, &b.vars, &Limits::unlimited(), &mut st).unwrap()
    } else {
        None
    };
    prop_assert_eq!(found.is_some(), !sols.is_empty());
    if let Some(a) = found {
        let val = |x: VarId| a.get(x);
        for c in &b.posted {
            prop_assert!(holds(c, &val), "{c:?} violated");
        }
        for (k, &x) in b.vars.iter().enumerate() {
            let (lo, hi) = s.initial(k);
            prop_assert!((lo..=hi).contains(&a.get(x)));
        }
    }
    Ok(())
}

/// A larger exhaustive instance near the enumeration ceiling; returns the
/// number of solutions.
pub fn wide_store_agrees() -> usize {
    let s = Problem {
        ints: vec![(0, 9); 6],
        bools: 0,
        cons: vec![
            C::Lin(vec![(1, 0), (1, 1), (1, 2)], Rel::Eq, 13),
            C::Mult(3, 3, 4),
            C::Lin(vec![(1, 4), (-1, 5)], Rel::Eq, 0),
            C::AllDiff(vec![0, 1, 2, 3]),
            C::Element(3, vec![0, 1, 2], 5),
        ],
    };
    let mut b = s.build();
    let sols = s.solutions(&b.vars, &b.posted);
    assert!(post_all(&mut b) || sols.is_empty());
    let mut st = SearchStats::default();
    let found = solve(&mut b.store, &b.vars, &Limits::unlimited(), &mut st).unwrap();
    assert_eq!(found.is_some(), !sols.is_empty());
    sols.len()
}

