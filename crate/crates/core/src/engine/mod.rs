//! Depth-first symbolic execution with per-path contract checks.

pub mod interp;
mod order;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::lang::{ExprKind, Formula, Function, Span, Stmt, StmtKind, Type, TypedProgram};
use crate::solver::{BoolOp, Budget, Limits, SolverError, StoreConfig, VarId};
use crate::translate::{
    BoolRep, Ctx, Lin, Scope, SsaEnv, TranslateError, Violation, ViolationKind, Witness,
};

pub use interp::{check_input, interpret, Check, InterpError, Run, DEFAULT_STEPS};

/// Per-run instance: array lengths, input bounds and budgets.
#[derive(Clone, Debug, Default)]
pub struct InstanceParams {
    pub lengths: BTreeMap<String, usize>,
    /// Domain overrides for scalar parameters, or every slot of an array.
    pub bounds: BTreeMap<String, (i64, i64)>,
    pub max_unwind: Option<u32>,
    pub max_nodes: Option<u64>,
    pub budget: Option<Duration>,
    pub config: StoreConfig,
}

impl InstanceParams {
    pub fn new() -> Self {
        InstanceParams::default()
    }

    pub fn len(mut self, name: &str, n: usize) -> Self {
        self.lengths.insert(name.to_string(), n);
        self
    }

    pub fn bound(mut self, name: &str, lo: i64, hi: i64) -> Self {
        self.bounds.insert(name.to_string(), (lo, hi));
        self
    }

    /// Iterations allowed per loop entry: twice the largest array length or
    /// scalar bound, plus eight.
    pub fn unwind(&self) -> u32 {
        if let Some(u) = self.max_unwind {
            return u;
        }
        let arrays = self.lengths.values().copied().max().unwrap_or(0) as i64;
        let scalars = self
            .bounds
            .values()
            .map(|&(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs()).min(1000) as i64)
            .max()
            .unwrap_or(0);
        (2 * arrays.max(scalars) + 8) as u32
    }
}

/// A branch taken at a condition, identified by its statement position.
#[derive(Clone, Copy, Debug)]
pub struct Decision {
    pub span: Span,
    pub taken: bool,
}

impl PartialEq for Decision {
    fn eq(&self, o: &Decision) -> bool {
        (self.span.line, self.span.col, self.taken) == (o.span.line, o.span.col, o.taken)
    }
}

impl Eq for Decision {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: ViolationKind,
    pub span: Span,
    pub witness: Witness,
    /// Conditions along the violating path.
    pub decisions: Vec<Decision>,
}

impl Counterexample {
    /// The trace in the `name_version[lo:hi] : value` format.
    pub fn trace(&self) -> String {
        let mut s = String::from("Counter-example found\n");
        for e in &self.witness.entries {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified { feasible_paths: u64, nodes: u64 },
    Counterexample(Box<Counterexample>),
    ResourceExceeded(Budget),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Verified { .. } => "Verified",
            Verdict::Counterexample(_) => "Counterexample",
            Verdict::ResourceExceeded(_) => "ResourceExceeded",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified { feasible_paths, .. } => write!(f, "Verified ({feasible_paths} feasible paths)"),
            Verdict::Counterexample(c) => write!(f, "Counterexample: {} at {}", c.kind, c.span),
            Verdict::ResourceExceeded(b) => write!(f, "ResourceExceeded: {b}"),
        }
    }
}

/// Counters of one verification run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub feasible_paths: u64,
    /// Branch points plus labeling nodes.
    pub nodes: u64,
    /// Most iterations of one loop entry on any feasible path.
    pub max_loop_iterations: u32,
    pub propagations: u64,
    pub truncated: u64,
    pub relational_checks: u64,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub stats: Stats,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("no function `{0}`")]
    UnknownFunction(String),
    #[error("missing length for array parameter `{0}` (use --len {0}=N)")]
    MissingLength(String),
    #[error("invalid bounds for `{0}`")]
    InvalidBounds(String),
    #[error(transparent)]
    Translate(TranslateError),
}

/// Verify the first function of `p`.
pub fn verify(p: &TypedProgram, inst: &InstanceParams) -> Result<Outcome, EngineError> {
    verify_function(p, &p.entry().name, inst)
}

pub fn verify_function(p: &TypedProgram, name: &str, inst: &InstanceParams) -> Result<Outcome, EngineError> {
    let func = p.function(name).ok_or_else(|| EngineError::UnknownFunction(name.to_string()))?;
    for (n, &(lo, hi)) in &inst.bounds {
        if lo > hi {
            return Err(EngineError::InvalidBounds(n.clone()));
        }
    }
    let start = Instant::now();
    let limits = Limits { max_nodes: inst.max_nodes, deadline: inst.budget.map(|d| start + d) };
    let mut ex = Explorer {
        prog: p,
        func,
        ctx: Ctx::new(inst.config.clone(), limits),
        unwind: inst.unwind().max(1),
        inputs: SsaEnv::new(),
        decisions: Vec::new(),
        stats: Stats::default(),
    };
    let mut env = SsaEnv::new();
    for prm in &func.params {
        let bounds = inst.bounds.get(&prm.name).copied();
        let r = match prm.ty {
            Type::IntArray => {
                let n = *inst.lengths.get(&prm.name).ok_or_else(|| EngineError::MissingLength(prm.name.clone()))?;
                ex.ctx.input_array(&mut env, &prm.name, n, bounds)
            }
            ty => ex.ctx.input_scalar(&mut env, &prm.name, ty, bounds).map(|_| ()),
        };
        r.map_err(EngineError::Translate)?;
    }
    ex.inputs = env.clone();
    let r = ex.start(env);
    ex.stats.nodes = ex.ctx.stats.nodes;
    ex.stats.propagations = ex.ctx.store.stats().propagations;
    ex.stats.truncated = ex.ctx.store.stats().truncated;
    ex.stats.relational_checks = ex.ctx.store.stats().relational_checks;
    let verdict = match r {
        Ok(()) => Verdict::Verified { feasible_paths: ex.stats.feasible_paths, nodes: ex.stats.nodes },
        Err(Stop::Found(c)) => Verdict::Counterexample(c),
        Err(Stop::Budget(b)) => Verdict::ResourceExceeded(b),
        Err(Stop::Error(e)) => return Err(EngineError::Translate(e)),
    };
    Ok(Outcome { verdict, stats: ex.stats, elapsed: start.elapsed() })
}

enum Stop {
    Found(Box<Counterexample>),
    Budget(Budget),
    Error(TranslateError),
}

#[derive(Clone, Copy)]
enum Work<'p> {
    Stmt(&'p Stmt),
    /// Loop head about to evaluate its condition for iteration `iter`.
    Loop { stmt: &'p Stmt, iter: u32 },
}

struct Explorer<'p> {
    prog: &'p TypedProgram,
    func: &'p Function,
    ctx: Ctx,
    unwind: u32,
    /// Version-0 parameters.
    inputs: SsaEnv,
    decisions: Vec<Decision>,
    stats: Stats,
}

/// Outcome of a translation step on the current path.
enum Step<T> {
    Go(T),
    Pruned,
}

impl<'p> Explorer<'p> {
    fn stop(&self, e: TranslateError) -> Stop {
        match e {
            TranslateError::Violation(v) => {
                let Violation { kind, span, witness } = *v;
                Stop::Found(Box::new(Counterexample { kind, span, witness, decisions: self.decisions.clone() }))
            }
            TranslateError::Solver(SolverError::ResourceExceeded(b)) => Stop::Budget(b),
            e => Stop::Error(e),
        }
    }

    fn lift<T>(&self, r: Result<T, TranslateError>) -> Result<Step<T>, Stop> {
        match r {
            Ok(x) => Ok(Step::Go(x)),
            Err(TranslateError::Infeasible) => Ok(Step::Pruned),
            Err(e) => Err(self.stop(e)),
        }
    }

    fn start(&mut self, env: SsaEnv) -> Result<(), Stop> {
        let sc = Scope::contract(&env, None);
        for f in &self.func.contract.requires {
            let r = self.ctx.assert_formula(&sc, f, true);
            if let Step::Pruned = self.lift(r)? {
                return Ok(());
            }
        }
        let work: Vec<Work<'p>> = self.func.body.iter().rev().map(Work::Stmt).collect();
        self.run(env, work, 0)
    }

    fn ty(&self, name: &str) -> Type {
        self.prog
            .locals
            .get(&self.func.name)
            .and_then(|m| m.get(name))
            .copied()
            .unwrap_or(Type::Int)
    }

    fn value(&mut self, env: &SsaEnv, e: &crate::lang::Expr, ty: Type) -> Result<Lin, TranslateError> {
        let sc = Scope::stmt(env);
        if ty == Type::Bool {
            let b = self.ctx.bool_expr(&sc, e)?;
            Ok(self.ctx.bool_lin(b))
        } else {
            self.ctx.int_expr(&sc, e)
        }
    }

    /// Execute `work` to the end of the path, branching where the store
    /// leaves a condition open. `peak` is the largest loop count so far.
    fn run(&mut self, mut env: SsaEnv, mut work: Vec<Work<'p>>, mut peak: u32) -> Result<(), Stop> {
        while let Some(w) = work.pop() {
            let (s, iter) = match w {
                Work::Stmt(s) => (s, None),
                Work::Loop { stmt, iter } => (stmt, Some(iter)),
            };
            match &s.kind {
                StmtKind::Block(v) => work.extend(v.iter().rev().map(Work::Stmt)),
                StmtKind::Decl { name, ty, init } => {
                    let r = match init {
                        Some(e) => self.value(&env, e, *ty),
                        None => Ok(Lin::constant(0)),
                    };
                    let r = r.and_then(|l| self.ctx.define(&mut env, name, *ty, l));
                    if let Step::Pruned = self.lift(r)? {
                        return Ok(());
                    }
                }
                StmtKind::Assign { name, value } => {
                    let ty = self.ty(name);
                    let r = self.value(&env, value, ty).and_then(|l| self.ctx.define(&mut env, name, ty, l));
                    if let Step::Pruned = self.lift(r)? {
                        return Ok(());
                    }
                }
                StmtKind::ArrayAssign { name, index, value } => {
                    let r = self.value(&env, index, Type::Int).and_then(|i| {
                        let v = self.value(&env, value, Type::Int)?;
                        self.ctx.write(&mut env, name, i, v, s.span)
                    });
                    if let Step::Pruned = self.lift(r)? {
                        return Ok(());
                    }
                }
                StmtKind::Call { target, callee, args, .. } => {
                    let r = self.call(&mut env, target, callee, args, s.span);
                    if let Step::Pruned = self.lift(r)? {
                        return Ok(());
                    }
                }
                StmtKind::Return(e) => {
                    let r = match e {
                        Some(e) => {
                            let ty = self.func.result;
                            self.value(&env, e, ty).and_then(|l| self.ctx.define(&mut env, "JMLResult", ty, l)).map(Some)
                        }
                        None => Ok(None),
                    };
                    return match self.lift(r)? {
                        Step::Go(res) => self.decide(&env, res, peak),
                        Step::Pruned => Ok(()),
                    };
                }
                StmtKind::If { cond, then, els } => {
                    let b = self.ctx.bool_expr(&Scope::stmt(&env), cond);
                    let b = match self.lift(b)? {
                        Step::Go(b) => b,
                        Step::Pruned => return Ok(()),
                    };
                    let on_true = vec![Work::Stmt(then)];
                    let on_false: Vec<Work<'p>> = els.iter().map(|e| Work::Stmt(e)).collect();
                    match self.ctx.bool_value(b) {
                        Some(v) => {
                            self.decisions.push(Decision { span: s.span, taken: v });
                            work.extend(if v { on_true } else { on_false });
                        }
                        None => return self.branch(env, work, b, s.span, on_true, on_false, None, peak),
                    }
                }
                StmtKind::While { cond, body } => {
                    let Some(iter) = iter else {
                        work.push(Work::Loop { stmt: s, iter: 0 });
                        continue;
                    };
                    let b = self.ctx.bool_expr(&Scope::stmt(&env), cond);
                    let b = match self.lift(b)? {
                        Step::Go(b) => b,
                        Step::Pruned => return Ok(()),
                    };
                    let on_true = vec![Work::Loop { stmt: s, iter: iter + 1 }, Work::Stmt(body)];
                    match self.ctx.bool_value(b) {
                        Some(true) => {
                            if iter >= self.unwind {
                                return Err(Stop::Budget(Budget::Unwind));
                            }
                            self.decisions.push(Decision { span: s.span, taken: true });
                            peak = peak.max(iter + 1);
                            work.extend(on_true);
                        }
                        Some(false) => self.decisions.push(Decision { span: s.span, taken: false }),
                        None => return self.branch(env, work, b, s.span, on_true, Vec::new(), Some(iter), peak),
                    }
                }
                StmtKind::For { .. } => unreachable!("desugared"),
            }
        }
        // fell off the end of a void function
        self.decide(&env, None, peak)
    }

    #[allow(clippy::too_many_arguments)]
    fn branch(
        &mut self,
        env: SsaEnv,
        work: Vec<Work<'p>>,
        b: BoolRep,
        span: Span,
        on_true: Vec<Work<'p>>,
        on_false: Vec<Work<'p>>,
        loop_iter: Option<u32>,
        peak: u32,
    ) -> Result<(), Stop> {
        for taken in [true, false] {
            if let Err(e) = self.ctx.stats.tick(&self.ctx.limits) {
                return Err(self.stop(e.into()));
            }
            let m = self.ctx.push();
            let r = match self.ctx.fix_bool(b, taken) {
                Ok(()) => {
                    let mut peak = peak;
                    let mut work = work.clone();
                    if taken {
                        if let Some(iter) = loop_iter {
                            if iter >= self.unwind {
                                let _ = self.ctx.pop(m);
                                return Err(Stop::Budget(Budget::Unwind));
                            }
                            peak = peak.max(iter + 1);
                        }
                        work.extend(on_true.iter().copied());
                    } else {
                        work.extend(on_false.iter().copied());
                    }
                    let depth = self.decisions.len();
                    self.decisions.push(Decision { span, taken });
                    let r = self.run(env.clone(), work, peak);
                    // forced conditions below this branch were recorded too
                    self.decisions.truncate(depth);
                    r
                }
                Err(TranslateError::Infeasible) => Ok(()),
                Err(e) => Err(self.stop(e)),
            };
            if let Err(e) = self.ctx.pop(m) {
                return Err(self.stop(e));
            }
            r?;
        }
        Ok(())
    }

    /// Substitute the callee's contract: check its precondition is
    /// entailed, then assume its postcondition for a fresh result.
    fn call(&mut self, env: &mut SsaEnv, target: &str, callee: &str, args: &[crate::lang::Expr], span: Span) -> Result<(), TranslateError> {
        let f = self
            .prog
            .function(callee)
            .ok_or_else(|| TranslateError::UnboundIdentifier(callee.to_string()))?;
        let mut cenv = SsaEnv::new();
        for (prm, a) in f.params.iter().zip(args) {
            if prm.ty == Type::IntArray {
                let ExprKind::Var(n) = &a.kind else {
                    return Err(TranslateError::Unsupported(format!("{span}: array argument must be a variable")));
                };
                let arr = env.array(n).ok_or_else(|| TranslateError::UnboundIdentifier(n.clone()))?.clone();
                cenv.bind_array(&prm.name, arr);
            } else {
                let l = self.value(env, a, prm.ty)?;
                let v = self.ctx.materialize(l)?;
                cenv.bind_scalar(&prm.name, 0, v);
            }
        }
        let sc = Scope::contract(&cenv, None);
        if !f.contract.requires.is_empty() {
            let m = self.ctx.push();
            let w = self.negate_all(&sc, &f.contract.requires).and_then(|()| self.ctx.witness());
            self.ctx.pop(m)?;
            let w = match w {
                Err(TranslateError::Infeasible) => None,
                r => r?,
            };
            if let Some(witness) = w {
                let kind = ViolationKind::PreconditionNotEntailed { callee: callee.to_string() };
                return Err(TranslateError::Violation(Box::new(Violation { kind, span, witness })));
            }
        }
        let r = if f.result == Type::Void { None } else { Some(self.ctx.define_free(env, target)?) };
        let sc = Scope::contract(&cenv, r);
        for g in &f.contract.ensures {
            self.ctx.assert_formula(&sc, g, true)?;
        }
        Ok(())
    }

    /// Post `¬(f₁ ∧ … ∧ fₙ)`.
    fn negate_all(&mut self, sc: &Scope, fs: &[Formula]) -> Result<(), TranslateError> {
        if let [f] = fs {
            return self.ctx.assert_formula(sc, f, false);
        }
        let mut args = Vec::new();
        for f in fs {
            let r = self.ctx.reify_formula(sc, f)?;
            args.push(self.ctx.not(r)?);
        }
        self.ctx.assert_op(BoolOp::Or, args)
    }

    /// Check a complete path against each negated ensures case, then count
    /// it if the path itself has a solution.
    fn decide(&mut self, env: &SsaEnv, result: Option<VarId>, peak: u32) -> Result<(), Stop> {
        let mut post_env = self.inputs.clone();
        for prm in self.func.array_params() {
            if let Some(a) = env.array(&prm.name) {
                post_env.bind_array(&prm.name, a.clone());
            }
        }
        let sc = Scope::contract(&post_env, result);
        let func = self.func;
        let ensures = &func.contract.ensures;
        let cases = self.ctx.cases(&sc, ensures);
        let cases = match self.lift(cases)? {
            Step::Go(c) => c,
            Step::Pruned => return Ok(()),
        };
        for (i, case) in cases.iter().enumerate() {
            let m = self.ctx.push();
            let before = self.ctx.store.constraints().len();
            let r = self.ctx.assert_case(&sc, case).and_then(|()| {
                let order = order::labeling(&self.ctx, before);
                self.ctx.witness_with(&order)
            });
            if let Err(e) = self.ctx.pop(m) {
                return Err(self.stop(e));
            }
            let w = match self.lift(r)? {
                Step::Go(w) => w,
                Step::Pruned => None,
            };
            if let Some(witness) = w {
                let kind = ViolationKind::Postcondition { case: i };
                return Err(Stop::Found(Box::new(Counterexample {
                    kind,
                    span: self.func.span,
                    witness,
                    decisions: self.decisions.clone(),
                })));
            }
        }
        let w = self.ctx.witness();
        let feasible = match self.lift(w)? {
            Step::Go(w) => w.is_some(),
            Step::Pruned => false,
        };
        if feasible {
            self.stats.feasible_paths += 1;
            self.stats.max_loop_iterations = self.stats.max_loop_iterations.max(peak);
        }
        Ok(())
    }
}
