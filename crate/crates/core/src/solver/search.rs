//! Depth-first labeling.

use std::time::Instant;

use super::constraint::VarId;
use super::store::Store;
use super::{Budget, SolverError};

/// Domains at most this large are labeled value by value; larger ones are
/// split in half.
pub const ENUMERATE_BELOW: u64 = 64;

/// One value per store variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<i64>,
}

impl Assignment {
    pub fn get(&self, v: VarId) -> i64 {
        self.values[v.index()]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// Search limits shared across calls.
#[derive(Clone, Debug)]
pub struct Limits {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Limits {
    pub fn unlimited() -> Self {
        Limits { max_nodes: None, deadline: None }
    }
}

/// Node counter carried across several searches.
#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub nodes: u64,
}

impl SearchStats {
    pub(crate) fn tick(&mut self, limits: &Limits) -> Result<(), SolverError> {
        self.nodes += 1;
        if let Some(m) = limits.max_nodes {
            if self.nodes > m {
                return Err(SolverError::ResourceExceeded(Budget::Nodes));
            }
        }
        if self.nodes.is_multiple_of(256) {
            if let Some(d) = limits.deadline {
                if Instant::now() >= d {
                    return Err(SolverError::ResourceExceeded(Budget::Time));
                }
            }
        }
        Ok(())
    }
}

/// Find an assignment of every store variable, labeling `order` first and
/// the remaining variables in creation order. The store is left as it was.
pub fn solve(
    store: &mut Store,
    order: &[VarId],
    limits: &Limits,
    stats: &mut SearchStats,
) -> Result<Option<Assignment>, SolverError> {
    for &v in order {
        store.check(v)?;
    }
    if !store.propagate().is_consistent() {
        return Ok(None);
    }
    let mut seq: Vec<VarId> = order.to_vec();
    let mut seen = vec![false; store.num_vars()];
    seq.retain(|v| !std::mem::replace(&mut seen[v.index()], true));
    let rest: Vec<VarId> = store.var_ids().filter(|v| !seen[v.index()]).collect();
    seq.extend(rest);
    let mark = store.push();
    let r = dfs(store, &seq, 0, limits, stats);
    store.pop(mark)?;
    r
}

fn dfs(
    store: &mut Store,
    seq: &[VarId],
    mut pos: usize,
    limits: &Limits,
    stats: &mut SearchStats,
) -> Result<Option<Assignment>, SolverError> {
    while pos < seq.len() && store.is_fixed(seq[pos]) {
        pos += 1;
    }
    if pos == seq.len() {
        let values: Vec<i64> = store.var_ids().map(|v| store.min(v)).collect();
        let ok = store.constraints().iter().all(|c| c.is_satisfied(|v| values[v.index()]));
        return Ok(ok.then_some(Assignment { values }));
    }
    let v = seq[pos];
    let d = store.domain(v);
    let (lo, hi) = (d.min(), d.max());
    let small = d.size() <= ENUMERATE_BELOW;
    let mid = lo + ((hi as i128 - lo as i128) / 2) as i64;
    for left in [true, false] {
        stats.tick(limits)?;
        let mark = store.push();
        let r = match (small, left) {
            (true, true) => store.restrict(v, lo, lo)?,
            (true, false) => store.exclude(v, lo)?,
            (false, true) => store.restrict(v, lo, mid)?,
            (false, false) => store.restrict(v, mid + 1, hi)?,
        };
        let found = if r.is_consistent() { dfs(store, seq, pos, limits, stats) } else { Ok(None) };
        store.pop(mark)?;
        if let Some(a) = found? {
            return Ok(Some(a));
        }
    }
    Ok(None)
}
