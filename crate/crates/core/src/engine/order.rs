//! Labeling order for refuting one negated ensures case.

use std::collections::VecDeque;

use crate::solver::{VarId, ENUMERATE_BELOW};
use crate::translate::Ctx;

/// Small unfixed domains by distance from the variables of constraints
/// posted since `since`, then program variables in creation order.
pub(super) fn labeling(ctx: &Ctx, since: usize) -> Vec<VarId> {
    let store = &ctx.store;
    let n = store.num_vars();
    let cs = store.constraints();
    let mut dist = vec![usize::MAX; n];
    let mut seen_c = vec![false; cs.len()];
    let mut queue = VecDeque::new();
    for (ci, c) in cs.iter().enumerate().skip(since) {
        seen_c[ci] = true;
        for v in c.vars() {
            if dist[v.index()] == usize::MAX {
                dist[v.index()] = 0;
                queue.push_back(v);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v.index()];
        if store.is_fixed(v) {
            // a fixed variable carries no information between constraints
            continue;
        }
        for &ci in store.watchers(v) {
            let ci = ci as usize;
            if std::mem::replace(&mut seen_c[ci], true) {
                continue;
            }
            for w in cs[ci].vars() {
                if dist[w.index()] == usize::MAX {
                    dist[w.index()] = d + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut small: Vec<VarId> = store
        .var_ids()
        .filter(|&v| !store.is_fixed(v) && dist[v.index()] != usize::MAX && store.domain(v).size() <= ENUMERATE_BELOW)
        .collect();
    small.sort_by_key(|v| (dist[v.index()], v.index()));
    small.extend(ctx.ssa_vars());
    small
}
