//! The backtrackable constraint store.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU32, Ordering};

use super::constraint::{Constraint, VarId};
use super::domain::{Domain, Empty};
use super::propagators;
use super::relational;
use super::SolverError;

static NEXT_TAG: AtomicU32 = AtomicU32::new(1);

/// Result of posting or propagating.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
}

impl Consistency {
    pub fn is_consistent(self) -> bool {
        self == Consistency::Consistent
    }
}

/// Choice-point handle returned by [`Store::push`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    tag: u32,
    depth: usize,
}

#[derive(Clone, Debug)]
pub struct StoreConfig {
    /// Run the relational (difference-logic / linear relaxation) check after
    /// bounds propagation reaches its fixpoint.
    pub relational: bool,
    /// Largest linear relaxation (variables) handed to the simplex check.
    pub lp_max_vars: usize,
    /// Bounds-propagation steps before an intermediate relational check.
    pub slow_convergence_steps: u64,
    /// Steps after which one propagation call gives up and reports the
    /// store consistent. Search re-checks every constraint at its leaves.
    pub max_propagation_steps: u64,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            relational: true,
            lp_max_vars: 64,
            slow_convergence_steps: 500,
            max_propagation_steps: 4_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub propagations: u64,
    pub relational_checks: u64,
    pub failures: u64,
    pub truncated: u64,
}

#[derive(Clone, Debug)]
struct Frame {
    trail_len: usize,
    constraints: usize,
    vars: usize,
    failed: bool,
}

/// Variable domains plus the undo trail. Split from [`Store`] so that
/// propagators can borrow a constraint and mutate domains at once.
#[derive(Clone, Debug, Default)]
pub(crate) struct VarState {
    pub(crate) doms: Vec<Domain>,
    saved_epoch: Vec<u64>,
    epoch: u64,
    trail: Vec<(u32, Domain)>,
    trailing: bool,
    pub(crate) changed: Vec<u32>,
    changed_flag: Vec<bool>,
}

impl VarState {
    #[inline]
    pub(crate) fn dom(&self, v: VarId) -> &Domain {
        &self.doms[v.index()]
    }

    #[inline]
    pub(crate) fn min(&self, v: VarId) -> i64 {
        self.doms[v.index()].min()
    }

    #[inline]
    pub(crate) fn max(&self, v: VarId) -> i64 {
        self.doms[v.index()].max()
    }

    #[inline]
    pub(crate) fn fixed(&self, v: VarId) -> Option<i64> {
        self.doms[v.index()].value()
    }

    fn save(&mut self, i: usize) {
        if self.trailing && self.saved_epoch[i] != self.epoch {
            self.saved_epoch[i] = self.epoch;
            self.trail.push((i as u32, self.doms[i].clone()));
        }
    }

    fn touched(&mut self, i: usize) {
        if !self.changed_flag[i] {
            self.changed_flag[i] = true;
            self.changed.push(i as u32);
        }
    }

    fn update(
        &mut self,
        v: VarId,
        f: impl FnOnce(&mut Domain) -> Result<bool, Empty>,
    ) -> Result<bool, Empty> {
        let i = v.index();
        let mut d = self.doms[i].clone();
        if f(&mut d)? {
            self.save(i);
            self.doms[i] = d;
            self.touched(i);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub(crate) fn set_min(&mut self, v: VarId, lo: i128) -> Result<bool, Empty> {
        if lo <= self.min(v) as i128 {
            return Ok(false);
        }
        if lo > self.max(v) as i128 {
            return Err(Empty);
        }
        self.update(v, |d| d.set_min(lo as i64))
    }

    pub(crate) fn set_max(&mut self, v: VarId, hi: i128) -> Result<bool, Empty> {
        if hi >= self.max(v) as i128 {
            return Ok(false);
        }
        if hi < self.min(v) as i128 {
            return Err(Empty);
        }
        self.update(v, |d| d.set_max(hi as i64))
    }

    pub(crate) fn assign(&mut self, v: VarId, val: i64) -> Result<bool, Empty> {
        if self.fixed(v) == Some(val) {
            return Ok(false);
        }
        self.update(v, |d| d.assign(val))
    }

    pub(crate) fn remove(&mut self, v: VarId, val: i64) -> Result<bool, Empty> {
        if !self.dom(v).contains(val) {
            return Ok(false);
        }
        self.update(v, |d| d.remove(val))
    }

    pub(crate) fn intersect(&mut self, v: VarId, other: &Domain) -> Result<bool, Empty> {
        self.update(v, |d| d.intersect(other))
    }
}

/// A finite-domain constraint store with a choice-point trail.
///
/// Variables created after a [`push`](Store::push) and constraints posted
/// after it are discarded by the matching [`pop`](Store::pop).
#[derive(Clone, Debug)]
pub struct Store {
    tag: u32,
    pub(crate) vars: VarState,
    initial: Vec<(i64, i64)>,
    constraints: Vec<Constraint>,
    watches: Vec<Vec<u32>>,
    frames: Vec<Frame>,
    queue: VecDeque<u32>,
    queued: Vec<bool>,
    failed: bool,
    pub(crate) potentials: Vec<i64>,
    pub(crate) scratch: relational::Scratch,
    config: StoreConfig,
    stats: StoreStats,
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

impl Store {
    pub fn new() -> Self {
        Store::with_config(StoreConfig::default())
    }

    pub fn with_config(config: StoreConfig) -> Self {
        Store {
            tag: NEXT_TAG.fetch_add(1, Ordering::Relaxed),
            vars: VarState::default(),
            initial: Vec::new(),
            constraints: Vec::new(),
            watches: Vec::new(),
            frames: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
            failed: false,
            potentials: Vec::new(),
            scratch: Default::default(),
            config,
            stats: StoreStats::default(),
        }
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    pub fn stats(&self) -> &StoreStats {
        &self.stats
    }

    /// Create a variable with domain `[lo, hi]`.
    pub fn new_var(&mut self, lo: i64, hi: i64) -> Result<VarId, SolverError> {
        let dom = Domain::new(lo, hi).ok_or(SolverError::InvalidDomain { lo, hi })?;
        let index = self.vars.doms.len() as u32;
        self.vars.doms.push(dom);
        self.vars.saved_epoch.push(u64::MAX);
        self.vars.changed_flag.push(false);
        self.initial.push((lo, hi));
        self.watches.push(Vec::new());
        if self.potentials.len() <= index as usize {
            self.potentials.push(0);
        }
        Ok(VarId { store: self.tag, index })
    }

    pub fn new_bool(&mut self) -> VarId {
        self.new_var(0, 1).expect("0 <= 1")
    }

    pub fn constant(&mut self, v: i64) -> VarId {
        self.new_var(v, v).expect("singleton")
    }

    pub fn num_vars(&self) -> usize {
        self.vars.doms.len()
    }

    /// All live variables in creation order.
    pub fn var_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.doms.len() as u32).map(move |index| VarId { store: self.tag, index })
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        self.vars.dom(v)
    }

    pub fn min(&self, v: VarId) -> i64 {
        self.vars.min(v)
    }

    pub fn max(&self, v: VarId) -> i64 {
        self.vars.max(v)
    }

    pub fn value(&self, v: VarId) -> Option<i64> {
        self.vars.fixed(v)
    }

    pub fn is_fixed(&self, v: VarId) -> bool {
        self.vars.dom(v).is_fixed()
    }

    /// Bounds the variable was created with.
    pub fn initial_bounds(&self, v: VarId) -> (i64, i64) {
        self.initial[v.index()]
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Indices of the constraints mentioning `v`.
    pub fn watchers(&self, v: VarId) -> &[u32] {
        &self.watches[v.index()]
    }

    /// Copy of every domain, for exact state comparison.
    pub fn snapshot(&self) -> Vec<Domain> {
        self.vars.doms.clone()
    }

    pub(crate) fn check(&self, v: VarId) -> Result<(), SolverError> {
        if v.store != self.tag || v.index() >= self.vars.doms.len() {
            return Err(SolverError::ForeignVariable(v));
        }
        Ok(())
    }

    /// Register a constraint and propagate to fixpoint.
    pub fn post(&mut self, c: Constraint) -> Result<Consistency, SolverError> {
        for v in c.vars() {
            self.check(v)?;
        }
        if self.failed {
            return Ok(Consistency::Inconsistent);
        }
        let cid = self.constraints.len() as u32;
        let mut vs = c.vars();
        vs.sort_unstable();
        vs.dedup();
        for v in &vs {
            self.watches[v.index()].push(cid);
        }
        self.constraints.push(c);
        self.queued.push(false);
        self.enqueue(cid);
        Ok(self.propagate())
    }

    /// Post several constraints, propagating once at the end.
    pub fn post_all(
        &mut self,
        cs: impl IntoIterator<Item = Constraint>,
    ) -> Result<Consistency, SolverError> {
        for c in cs {
            for v in c.vars() {
                self.check(v)?;
            }
            let cid = self.constraints.len() as u32;
            let mut vs = c.vars();
            vs.sort_unstable();
            vs.dedup();
            for v in &vs {
                self.watches[v.index()].push(cid);
            }
            self.constraints.push(c);
            self.queued.push(false);
            self.enqueue(cid);
        }
        Ok(self.propagate())
    }

    /// Restrict `v` to `[lo, hi]` and propagate.
    pub fn restrict(&mut self, v: VarId, lo: i64, hi: i64) -> Result<Consistency, SolverError> {
        self.check(v)?;
        if self.failed {
            return Ok(Consistency::Inconsistent);
        }
        let r = self
            .vars
            .set_min(v, lo as i128)
            .and_then(|_| self.vars.set_max(v, hi as i128));
        if r.is_err() {
            return Ok(self.fail());
        }
        self.flush_changes(None);
        Ok(self.propagate())
    }

    /// Remove one value from `v` and propagate.
    pub fn exclude(&mut self, v: VarId, val: i64) -> Result<Consistency, SolverError> {
        self.check(v)?;
        if self.failed {
            return Ok(Consistency::Inconsistent);
        }
        if self.vars.remove(v, val).is_err() {
            return Ok(self.fail());
        }
        self.flush_changes(None);
        Ok(self.propagate())
    }

    fn enqueue(&mut self, cid: u32) {
        if !self.queued[cid as usize] {
            self.queued[cid as usize] = true;
            self.queue.push_back(cid);
        }
    }

    fn flush_changes(&mut self, _source: Option<u32>) {
        let changed = std::mem::take(&mut self.vars.changed);
        for &i in &changed {
            self.vars.changed_flag[i as usize] = false;
            for k in 0..self.watches[i as usize].len() {
                let w = self.watches[i as usize][k];
                self.enqueue(w);
            }
        }
        let mut changed = changed;
        changed.clear();
        self.vars.changed = changed;
    }

    fn fail(&mut self) -> Consistency {
        self.failed = true;
        self.stats.failures += 1;
        for cid in self.queue.drain(..) {
            self.queued[cid as usize] = false;
        }
        for &i in &self.vars.changed {
            self.vars.changed_flag[i as usize] = false;
        }
        self.vars.changed.clear();
        Consistency::Inconsistent
    }

    /// Relational check plus the index values it prunes; `false` on failure.
    fn relational_step(&mut self) -> bool {
        match relational::check(self) {
            Err(_) => false,
            Ok(prune) => {
                for (v, j) in prune {
                    if self.vars.remove(v, j).is_err() {
                        return false;
                    }
                }
                self.flush_changes(None);
                true
            }
        }
    }

    /// Run every queued propagator to fixpoint, then the relational check.
    pub fn propagate(&mut self) -> Consistency {
        if self.failed {
            return Consistency::Inconsistent;
        }
        let mut steps: u64 = 0;
        let mut next_check = self.config.slow_convergence_steps;
        loop {
            while let Some(cid) = self.queue.pop_front() {
                self.queued[cid as usize] = false;
                self.stats.propagations += 1;
                steps += 1;
                let r = propagators::propagate(&self.constraints[cid as usize], &mut self.vars);
                if r.is_err() {
                    return self.fail();
                }
                self.flush_changes(Some(cid));
                if steps >= self.config.max_propagation_steps {
                    self.stats.truncated += 1;
                    for cid in self.queue.drain(..) {
                        self.queued[cid as usize] = false;
                    }
                    return Consistency::Consistent;
                }
                if self.config.relational && steps >= next_check {
                    // bounds reasoning is creeping; look for a relational refutation
                    next_check = steps.saturating_mul(2);
                    self.stats.relational_checks += 1;
                    if !self.relational_step() {
                        return self.fail();
                    }
                }
            }
            if self.config.relational {
                self.stats.relational_checks += 1;
                if !self.relational_step() {
                    return self.fail();
                }
            }
            if self.queue.is_empty() {
                return Consistency::Consistent;
            }
        }
    }

    /// Open a choice point.
    pub fn push(&mut self) -> Mark {
        self.frames.push(Frame {
            trail_len: self.vars.trail.len(),
            constraints: self.constraints.len(),
            vars: self.vars.doms.len(),
            failed: self.failed,
        });
        self.vars.trailing = true;
        self.vars.epoch += 1;
        Mark { tag: self.tag, depth: self.frames.len() }
    }

    /// Undo everything since the matching [`push`](Store::push).
    pub fn pop(&mut self, mark: Mark) -> Result<(), SolverError> {
        if mark.tag != self.tag || mark.depth != self.frames.len() || mark.depth == 0 {
            return Err(SolverError::MarkOrderViolation {
                expected: self.frames.len(),
                got: mark.depth,
            });
        }
        let frame = self.frames.pop().expect("non-empty");
        while self.vars.trail.len() > frame.trail_len {
            let (i, d) = self.vars.trail.pop().expect("non-empty");
            self.vars.doms[i as usize] = d;
        }
        for cid in (frame.constraints..self.constraints.len()).rev() {
            let mut vs = self.constraints[cid].vars();
            vs.sort_unstable();
            vs.dedup();
            for v in vs {
                let w = self.watches[v.index()].pop();
                debug_assert_eq!(w, Some(cid as u32));
            }
        }
        for cid in self.queue.drain(..) {
            if let Some(q) = self.queued.get_mut(cid as usize) {
                *q = false;
            }
        }
        self.constraints.truncate(frame.constraints);
        self.queued.truncate(frame.constraints);
        self.vars.doms.truncate(frame.vars);
        self.vars.saved_epoch.truncate(frame.vars);
        self.vars.changed_flag.truncate(frame.vars);
        self.initial.truncate(frame.vars);
        self.watches.truncate(frame.vars);
        self.vars.changed.clear();
        self.failed = frame.failed;
        self.vars.epoch += 1;
        self.vars.trailing = !self.frames.is_empty();
        Ok(())
    }

    /// Text dump, one `name[min:max]` line per variable.
    pub fn dump(&self, name: impl Fn(VarId) -> String) -> String {
        let mut out = String::new();
        for v in self.var_ids() {
            let d = self.domain(v);
            out.push_str(&format!("{}[{}:{}]\n", name(v), d.min(), d.max()));
        }
        out
    }
}
