//! Relational consistency: the linear rows active under the current domains
//! are checked together, which catches cycles that bounds propagation would
//! only refute after walking the whole integer range.
//!
//! Difference rows (`x - y <= c`) go to a negative-cycle check over a
//! constraint graph with persistent potentials. Disequalities are refuted
//! when the graph forces the difference they exclude. Other linear rows are
//! checked per connected component by an exact rational simplex.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use super::constraint::{Constraint, Linear, Rel, VarId};
use super::domain::Empty;
use super::propagators::floor_div;
use super::simplex::{self, LpRow};
use super::store::{Store, VarState};

const POTENTIAL_LIMIT: i64 = 1 << 60;
const ZERO: usize = 0;
const ABSENT: usize = usize::MAX;

/// A row over unfixed variables, fixed ones folded into `rhs`. Its terms
/// live in a shared buffer.
#[derive(Clone, Copy, Debug)]
struct Row {
    start: usize,
    len: usize,
    rel: Rel,
    rhs: i128,
}

impl Row {
    fn terms<'a>(&self, all: &'a [(i64, VarId)]) -> &'a [(i64, VarId)] {
        &all[self.start..self.start + self.len]
    }
}

/// Adjacency in compressed form; `out(u)` lists `(v, w)` for edges
/// `u -> v` meaning `v - u <= w`.
#[derive(Clone, Debug, Default)]
struct Csr {
    off: Vec<usize>,
    to: Vec<(usize, i64)>,
}

impl Csr {
    fn build(&mut self, n: usize, edges: &[(usize, usize, i64)], reversed: bool) {
        self.off.clear();
        self.off.resize(n + 1, 0);
        for &(u, v, _) in edges {
            self.off[if reversed { v } else { u } + 1] += 1;
        }
        for k in 0..n {
            self.off[k + 1] += self.off[k];
        }
        self.to.clear();
        self.to.resize(edges.len(), (0, 0));
        let mut fill = self.off[..n].to_vec();
        for &(u, v, w) in edges {
            let (a, b) = if reversed { (v, u) } else { (u, v) };
            self.to[fill[a]] = (b, w);
            fill[a] += 1;
        }
    }

    fn out(&self, u: usize) -> &[(usize, i64)] {
        &self.to[self.off[u]..self.off[u + 1]]
    }

    fn len(&self) -> usize {
        self.off.len() - 1
    }
}

/// Buffers reused across checks.
#[derive(Clone, Debug, Default)]
pub(crate) struct Scratch {
    terms: Vec<(i64, VarId)>,
    rows: Vec<Row>,
    /// graph node of each store variable, `ABSENT` when not in the graph
    node: Vec<usize>,
    /// variable of node `k + 1`
    vars: Vec<VarId>,
    edges: Vec<(usize, usize, i64)>,
    fwd: Csr,
    rev: Csr,
    dist: Vec<i64>,
    parent: Vec<usize>,
    in_queue: Vec<bool>,
    relaxed: Vec<u32>,
    queue: VecDeque<usize>,
    search: Search,
}

impl Scratch {
    fn node(&mut self, v: VarId) -> usize {
        let i = v.index();
        if self.node[i] == ABSENT {
            self.node[i] = self.vars.len() + 1;
            self.vars.push(v);
        }
        self.node[i]
    }

    /// `x - y <= c`
    fn le(&mut self, x: VarId, y: VarId, c: i128) {
        let (nx, ny) = (self.node(x), self.node(y));
        let c = c.clamp(-(POTENTIAL_LIMIT as i128), POTENTIAL_LIMIT as i128) as i64;
        self.edges.push((ny, nx, c));
    }

    fn push_row(&mut self, vs: &VarState, terms: impl Iterator<Item = (i64, VarId)>, rel: Rel, rhs: i64) {
        let start = self.terms.len();
        let mut rhs = rhs as i128;
        for (c, v) in terms {
            match vs.fixed(v) {
                Some(x) => rhs -= c as i128 * x as i128,
                None => self.terms.push((c, v)),
            }
        }
        let len = self.terms.len() - start;
        if len >= 2 {
            self.rows.push(Row { start, len, rel, rhs });
        } else {
            self.terms.truncate(start);
        }
    }

    fn push_linear(&mut self, vs: &VarState, lin: &Linear, negate: bool) {
        let terms = lin.terms.iter().copied();
        match (negate, lin.rel) {
            (false, rel) => self.push_row(vs, terms, rel, lin.rhs),
            // ¬(Σ ≤ c)  ⇔  -Σ ≤ -c-1
            (true, Rel::Le) => self.push_row(vs, terms.map(|(c, v)| (-c, v)), Rel::Le, -lin.rhs - 1),
            (true, Rel::Eq) => self.push_row(vs, terms, Rel::Ne, lin.rhs),
            (true, Rel::Ne) => self.push_row(vs, terms, Rel::Eq, lin.rhs),
        }
    }

    fn active_rows(&mut self, store: &Store) {
        let vs = &store.vars;
        self.terms.clear();
        self.rows.clear();
        for c in store.constraints() {
            match c {
                Constraint::Linear(l) => self.push_linear(vs, l, false),
                Constraint::Reif { b, lin } => match vs.fixed(*b) {
                    Some(1) => self.push_linear(vs, lin, false),
                    Some(_) => self.push_linear(vs, lin, true),
                    None => {}
                },
                Constraint::Element { index, table, value } => {
                    if let Some(m) = vs.fixed(*index) {
                        if let Some(&slot) = table.get(m as usize) {
                            self.push_row(vs, [(1, slot), (-1, *value)].into_iter(), Rel::Eq, 0);
                        }
                    }
                }
                Constraint::Mult { x, y, z } if x != y => {
                    if let Some(a) = vs.fixed(*x) {
                        self.push_row(vs, [(a, *y), (-1, *z)].into_iter(), Rel::Eq, 0);
                    } else if let Some(a) = vs.fixed(*y) {
                        self.push_row(vs, [(a, *x), (-1, *z)].into_iter(), Rel::Eq, 0);
                    }
                }
                Constraint::NotEq(x, y) => self.push_row(vs, [(1, *x), (-1, *y)].into_iter(), Rel::Ne, 0),
                Constraint::AllDifferent(xs) => {
                    for (i, &x) in xs.iter().enumerate() {
                        if vs.fixed(x).is_some() {
                            continue;
                        }
                        for &y in &xs[i + 1..] {
                            if vs.fixed(y).is_none() {
                                self.push_row(vs, [(1, x), (-1, y)].into_iter(), Rel::Ne, 0);
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }
}

/// `x - y rel c` when the row has that shape.
fn as_difference(terms: &[(i64, VarId)], r: &Row) -> Option<(VarId, VarId, i128, bool)> {
    if terms.len() != 2 {
        return None;
    }
    let (a, x) = terms[0];
    let (b, y) = terms[1];
    if a != -b {
        return None;
    }
    // a·(x - y) rel rhs
    let (x, y, a) = if a > 0 { (x, y, a as i128) } else { (y, x, -(a as i128)) };
    match r.rel {
        Rel::Le => Some((x, y, floor_div(r.rhs, a), true)),
        Rel::Eq | Rel::Ne => {
            if r.rhs % a != 0 {
                // no integer difference meets it
                Some((x, y, i128::MAX, false))
            } else {
                Some((x, y, r.rhs / a, true))
            }
        }
    }
}

/// Check the active rows together. On success returns index values of
/// `Element` constraints that the difference graph refutes.
pub(crate) fn check(store: &mut Store) -> Result<Vec<(VarId, i64)>, Empty> {
    let mut sc = std::mem::take(&mut store.scratch);
    let r = check_with(store, &mut sc);
    for v in sc.vars.drain(..) {
        sc.node[v.index()] = ABSENT;
    }
    store.scratch = sc;
    r
}

fn check_with(store: &mut Store, sc: &mut Scratch) -> Result<Vec<(VarId, i64)>, Empty> {
    sc.active_rows(store);
    if sc.rows.is_empty() {
        return Ok(Vec::new());
    }
    sc.node.resize(store.num_vars(), ABSENT);
    sc.edges.clear();
    let mut diseqs = Vec::new();
    let mut other = Vec::new();
    for k in 0..sc.rows.len() {
        let r = sc.rows[k];
        match (as_difference(r.terms(&sc.terms), &r), r.rel) {
            (Some((_, _, _, false)), Rel::Eq) => return Err(Empty),
            (Some((_, _, _, false)), _) => {}
            (Some((x, y, c, true)), Rel::Le) => sc.le(x, y, c),
            (Some((x, y, c, true)), Rel::Eq) => {
                sc.le(x, y, c);
                sc.le(y, x, -c);
            }
            (Some((x, y, c, true)), Rel::Ne) => diseqs.push((x, y, c)),
            (None, Rel::Ne) => {}
            (None, _) => other.push(k),
        }
    }
    let mut prune = Vec::new();
    if !sc.vars.is_empty() {
        for (k, &v) in sc.vars.iter().enumerate() {
            let (lo, hi) = (store.min(v), store.max(v));
            sc.edges.push((ZERO, k + 1, hi));
            sc.edges.push((k + 1, ZERO, -lo));
        }
        let n = sc.vars.len() + 1;
        let mut fwd = std::mem::take(&mut sc.fwd);
        fwd.build(n, &sc.edges, false);
        let mut r = potentials(store, sc, &fwd);
        if r.is_ok() && !diseqs.is_empty() {
            r = check_diseqs(sc, &fwd, &diseqs);
        }
        if r.is_ok() {
            prune = element_filter(store, sc, &fwd);
        }
        sc.fwd = fwd;
        r?;
    }
    if !other.is_empty() {
        check_lp(store, &sc.terms, &sc.rows, &other)?;
    }
    Ok(prune)
}

/// Shortest-path potentials (SPFA seeded with the previous potentials) in
/// `sc.dist`; `Err` on a negative cycle.
fn potentials(store: &mut Store, sc: &mut Scratch, g: &Csr) -> Result<(), Empty> {
    let n = g.len();
    sc.dist.clear();
    sc.dist.resize(n, 0);
    for (k, v) in sc.vars.iter().enumerate() {
        let p = store.potentials[v.index()];
        sc.dist[k + 1] = if p.abs() > POTENTIAL_LIMIT { 0 } else { p };
    }
    sc.parent.clear();
    sc.parent.resize(n, ABSENT);
    sc.in_queue.clear();
    sc.in_queue.resize(n, true);
    sc.relaxed.clear();
    sc.relaxed.resize(n, 0);
    sc.queue.clear();
    sc.queue.extend(0..n);
    let d = &mut sc.dist;
    let mut pops: u64 = 0;
    while let Some(u) = sc.queue.pop_front() {
        sc.in_queue[u] = false;
        pops += 1;
        for &(v, w) in g.out(u) {
            let nd = d[u].saturating_add(w);
            if nd < d[v] {
                d[v] = nd;
                sc.parent[v] = u;
                sc.relaxed[v] += 1;
                if sc.relaxed[v] as usize > n || (pops.is_multiple_of(n as u64) && on_cycle(&sc.parent, v)) {
                    return Err(Empty);
                }
                if !sc.in_queue[v] {
                    sc.in_queue[v] = true;
                    sc.queue.push_back(v);
                }
            }
        }
    }
    let reset = d.iter().any(|x| x.abs() > POTENTIAL_LIMIT / 2);
    for (k, v) in sc.vars.iter().enumerate() {
        store.potentials[v.index()] = if reset { 0 } else { d[k + 1] - d[ZERO] };
    }
    Ok(())
}

/// Whether walking parent links from `v` returns to `v`.
fn on_cycle(parent: &[usize], v: usize) -> bool {
    let mut u = parent[v];
    for _ in 0..parent.len() {
        if u == ABSENT {
            return false;
        }
        if u == v {
            return true;
        }
        u = parent[u];
    }
    false
}

/// A difference is forced exactly when both endpoints lie on a common
/// zero-weight cycle, i.e. in one strongly connected component of the
/// edges that are tight under the shortest-path potentials.
fn check_diseqs(sc: &Scratch, g: &Csr, diseqs: &[(VarId, VarId, i128)]) -> Result<(), Empty> {
    let d = &sc.dist;
    let tight: Vec<Vec<usize>> = (0..g.len())
        .map(|u| {
            g.out(u)
                .iter()
                .filter(|&&(v, w)| d[u] as i128 + w as i128 == d[v] as i128)
                .map(|&(v, _)| v)
                .collect()
        })
        .collect();
    let comp = scc(&tight);
    for &(x, y, c) in diseqs {
        let (nx, ny) = (sc.node[x.index()], sc.node[y.index()]);
        if nx == ABSENT || ny == ABSENT {
            continue;
        }
        if comp[nx] == comp[ny] && d[nx] as i128 - d[ny] as i128 == c {
            return Err(Empty);
        }
    }
    Ok(())
}

/// Index values `j` of an element whose value cannot equal slot `j`: the
/// equality would close a negative cycle with the difference rows.
fn element_filter(store: &Store, sc: &mut Scratch, g: &Csr) -> Vec<(VarId, i64)> {
    let vs = &store.vars;
    let mut out = Vec::new();
    let mut have_rev = false;
    let mut slots = Vec::new();
    let mut targets = Vec::new();
    let mut dead = Vec::new();
    for c in store.constraints() {
        let Constraint::Element { index, table, value } = c else { continue };
        if vs.fixed(*index).is_some() {
            continue;
        }
        let node = &sc.node;
        let at = |v: VarId| match vs.fixed(v) {
            // a fixed variable sits at an offset from the zero node
            Some(k) => Some((ZERO, k as i128)),
            None => match node[v.index()] {
                ABSENT => None,
                n => Some((n, 0)),
            },
        };
        let Some((nv, off)) = at(*value) else { continue };
        let d = store.domain(*index);
        // (index value, slot node, required node_s - node_v)
        slots.clear();
        for j in d.min().max(0)..=d.max().min(table.len() as i64 - 1) {
            if !d.contains(j) {
                continue;
            }
            if let Some((ns, soff)) = at(table[j as usize]) {
                if ns != nv {
                    slots.push((j, ns, off - soff));
                }
            }
        }
        if slots.is_empty() {
            continue;
        }
        dead.clear();
        dead.resize(slots.len(), false);
        // node_s - node_v >= k is refuted when dist(v -> s) < k
        targets.clear();
        targets.extend(slots.iter().map(|&(_, ns, k)| (ns, k)));
        sc.search.below(g, &sc.dist, nv, false, &targets, &mut dead);
        if !have_rev {
            sc.rev.build(g.len(), &sc.edges, true);
            have_rev = true;
        }
        targets.clear();
        targets.extend(slots.iter().map(|&(_, ns, k)| (ns, -k)));
        sc.search.below(&sc.rev, &sc.dist, nv, true, &targets, &mut dead);
        for (i, &(j, _, _)) in slots.iter().enumerate() {
            if dead[i] {
                out.push((*index, j));
            }
        }
    }
    out
}

/// Dijkstra on reduced costs, reusing its buffers across calls.
#[derive(Clone, Debug, Default)]
struct Search {
    dist: Vec<i128>,
    touched: Vec<usize>,
    thr: Vec<i128>,
    heap: BinaryHeap<Reverse<(i128, usize)>>,
}

impl Search {
    /// Mark `dead[i]` when the shortest distance from `src` to `targets[i].0`
    /// is below `targets[i].1`. On the reversed graph distances bound
    /// `src - t` instead of `t - src`.
    fn below(
        &mut self,
        g: &Csr,
        pot: &[i64],
        src: usize,
        reversed: bool,
        targets: &[(usize, i128)],
        dead: &mut [bool],
    ) {
        let p = |u: usize| if reversed { -(pot[u] as i128) } else { pot[u] as i128 };
        // thresholds in reduced costs; reduced distances are never negative
        self.thr.clear();
        self.thr.extend(targets.iter().map(|&(t, k)| k + p(src) - p(t)));
        let cut = self.thr.iter().zip(dead.iter()).filter(|(_, &d)| !d).map(|(t, _)| *t).max();
        let Some(cut) = cut.filter(|&c| c > 0) else { return };
        if self.dist.len() < g.len() {
            self.dist.resize(g.len(), i128::MAX);
        }
        self.dist[src] = 0;
        self.touched.push(src);
        self.heap.push(Reverse((0, src)));
        while let Some(Reverse((du, u))) = self.heap.pop() {
            if du >= cut {
                break;
            }
            if self.dist[u] != du {
                continue;
            }
            for &(v, w) in g.out(u) {
                let nd = du + w as i128 + p(u) - p(v);
                if nd < self.dist[v] {
                    if self.dist[v] == i128::MAX {
                        self.touched.push(v);
                    }
                    self.dist[v] = nd;
                    self.heap.push(Reverse((nd, v)));
                }
            }
        }
        for (i, &(t, _)) in targets.iter().enumerate() {
            if self.dist[t] < self.thr[i] {
                dead[i] = true;
            }
        }
        for &u in &self.touched {
            self.dist[u] = i128::MAX;
        }
        self.touched.clear();
        self.heap.clear();
    }
}

/// Iterative Tarjan; returns a component id per node.
fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        while let Some(&mut (u, ref mut i)) = work.last_mut() {
            if *i == 0 && index[u] == usize::MAX {
                index[u] = next;
                low[u] = next;
                next += 1;
                stack.push(u);
                on_stack[u] = true;
            }
            if *i < adj[u].len() {
                let v = adj[u][*i];
                *i += 1;
                if index[v] == usize::MAX {
                    work.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            work.pop();
            if let Some(&(p, _)) = work.last() {
                low[p] = low[p].min(low[u]);
            }
            if low[u] == index[u] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if w == u {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    comp
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

/// Simplex over each connected component that holds a non-difference row.
fn check_lp(store: &Store, terms: &[(i64, VarId)], rows: &[Row], other: &[usize]) -> Result<(), Empty> {
    let nv = store.num_vars();
    let mut parent: Vec<usize> = (0..nv).collect();
    let first = |k: usize| rows[k].terms(terms)[0].1.index();
    let lp_rows: Vec<usize> = (0..rows.len()).filter(|&k| rows[k].rel != Rel::Ne).collect();
    for &k in &lp_rows {
        for &(_, v) in &rows[k].terms(terms)[1..] {
            let (a, b) = (find(&mut parent, first(k)), find(&mut parent, v.index()));
            parent[a] = b;
        }
    }
    let mut roots: Vec<usize> = other.iter().map(|&k| find(&mut parent, first(k))).collect();
    roots.sort_unstable();
    roots.dedup();
    let max = store.config().lp_max_vars;
    for root in roots {
        let comp: Vec<usize> = lp_rows.iter().copied().filter(|&k| find(&mut parent, first(k)) == root).collect();
        if !lp_feasible(store, terms, rows, &comp, max) {
            return Err(Empty);
        }
    }
    Ok(())
}

/// `true` when feasible or too large to check.
fn lp_feasible(store: &Store, terms: &[(i64, VarId)], rows: &[Row], comp: &[usize], max: usize) -> bool {
    let mut col: Vec<VarId> = Vec::new();
    let mut build = |sel: &[usize]| -> Option<(Vec<(i64, i64)>, Vec<LpRow>)> {
        col.clear();
        let mut out = Vec::with_capacity(sel.len());
        for &k in sel {
            let ts = rows[k].terms(terms);
            let mut coefs = Vec::with_capacity(ts.len());
            for &(c, v) in ts {
                let j = match col.iter().position(|&w| w == v) {
                    Some(j) => j,
                    None => {
                        col.push(v);
                        col.len() - 1
                    }
                };
                coefs.push((j, c));
            }
            out.push(LpRow { coefs, eq: rows[k].rel == Rel::Eq, rhs: rows[k].rhs });
        }
        if col.len() > max {
            return None;
        }
        let bounds = col.iter().map(|&v| (store.min(v), store.max(v))).collect();
        Some((bounds, out))
    };
    if let Some((bounds, lp)) = build(comp) {
        return simplex::feasible(&bounds, &lp);
    }
    // component too large: check the non-difference rows on their own
    let nondiff: Vec<usize> =
        comp.iter().copied().filter(|&k| as_difference(rows[k].terms(terms), &rows[k]).is_none()).collect();
    match build(&nondiff) {
        Some((bounds, lp)) => simplex::feasible(&bounds, &lp),
        None => true,
    }
}
