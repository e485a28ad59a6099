//! Path translation: program state along one path as store variables under
//! SSA renaming.

mod env;
mod formula;

use std::collections::HashMap;
use std::fmt;

use crate::lang::{BinOp, Expr, ExprKind, Span, Type, UnOp};
use crate::solver::{
    solve, Assignment, BoolOp, Constraint, Limits, Linear, Mark, Rel, SearchStats, SolverError,
    Store, StoreConfig, VarId, DEFAULT_MAX, DEFAULT_MIN,
};

pub use env::{ArrayVersion, SsaEnv};
pub use formula::Case;

/// What a store variable stands for in the program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarName {
    Scalar { ident: String, version: u32 },
    Slot { ident: String, version: u32, slot: usize },
    /// Intermediate value or reification literal.
    Aux,
}

/// One line of a counterexample trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub ident: String,
    pub version: u32,
    pub slot: Option<usize>,
    /// Bounds the variable was created with.
    pub lo: i64,
    pub hi: i64,
    /// Domain left by the witness; a single value when fixed.
    pub value: (i64, i64),
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.ident, self.version)?;
        if let Some(s) = self.slot {
            write!(f, "[{s}]")?;
        }
        write!(f, "[{}:{}] : ", self.lo, self.hi)?;
        if self.value.0 == self.value.1 {
            write!(f, "{}", self.value.0)
        } else {
            write!(f, "[{}..{}]", self.value.0, self.value.1)
        }
    }
}

/// Concrete values of the entry function's parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Inputs {
    pub scalars: Vec<(String, i64)>,
    pub arrays: Vec<(String, Vec<i64>)>,
}

impl Inputs {
    pub fn scalar(&self, name: &str) -> Option<i64> {
        self.scalars.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    pub fn array(&self, name: &str) -> Option<&[i64]> {
        self.arrays.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

impl fmt::Display for Inputs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.scalars.iter().map(|(n, v)| format!("{n} = {v}")).collect();
        for (n, vs) in &self.arrays {
            let vs: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
            parts.push(format!("{n} = [{}]", vs.join(", ")));
        }
        f.write_str(&parts.join(", "))
    }
}

/// A solved store: trace lines plus the input projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub entries: Vec<TraceEntry>,
    pub inputs: Inputs,
}

impl Witness {
    /// Final value of `ident` among the traced scalars.
    pub fn last_value(&self, ident: &str) -> Option<i64> {
        self.entries
            .iter()
            .filter(|e| e.ident == ident && e.slot.is_none())
            .max_by_key(|e| e.version)
            .map(|e| e.value.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// The `case`-th negated ensures conjunct is satisfiable.
    Postcondition { case: usize },
    IndexOutOfBounds { array: String },
    DivisionByZero,
    /// A call site whose arguments may violate the callee's requires.
    PreconditionNotEntailed { callee: String },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::Postcondition { case } => write!(f, "postcondition violated (case {case})"),
            ViolationKind::IndexOutOfBounds { array } => write!(f, "index out of bounds on `{array}`"),
            ViolationKind::DivisionByZero => f.write_str("division by zero"),
            ViolationKind::PreconditionNotEntailed { callee } => {
                write!(f, "precondition of `{callee}` not entailed")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub span: Span,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
    #[error("{0}: quantifier bound is not constant")]
    NonConstantQuantifierBound(Span),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    /// The store became inconsistent: the current path or case is empty.
    #[error("inconsistent store")]
    Infeasible,
    #[error("{}", .0.kind)]
    Violation(Box<Violation>),
}

pub type TResult<T> = Result<T, TranslateError>;

/// `Σ coef·var + c`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lin {
    pub terms: Vec<(i64, VarId)>,
    pub c: i64,
}

fn overflow() -> TranslateError {
    TranslateError::Unsupported("constant arithmetic overflows 64 bits".into())
}

impl Lin {
    pub fn constant(c: i64) -> Lin {
        Lin { terms: Vec::new(), c }
    }

    pub fn var(v: VarId) -> Lin {
        Lin { terms: vec![(1, v)], c: 0 }
    }

    pub fn as_const(&self) -> Option<i64> {
        self.terms.is_empty().then_some(self.c)
    }

    fn normalized(mut self) -> Lin {
        let l = Linear::new(std::mem::take(&mut self.terms), Rel::Eq, 0);
        self.terms = l.terms;
        self
    }

    pub fn add(self, other: Lin, sign: i64) -> TResult<Lin> {
        let mut terms = self.terms;
        for (k, v) in other.terms {
            terms.push((k.checked_mul(sign).ok_or_else(overflow)?, v));
        }
        let c = other.c.checked_mul(sign).and_then(|o| self.c.checked_add(o)).ok_or_else(overflow)?;
        Ok(Lin { terms, c }.normalized())
    }

    pub fn scale(self, k: i64) -> TResult<Lin> {
        let terms = self
            .terms
            .into_iter()
            .map(|(a, v)| a.checked_mul(k).map(|a| (a, v)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(overflow)?;
        let c = self.c.checked_mul(k).ok_or_else(overflow)?;
        Ok(Lin { terms, c }.normalized())
    }

    /// `self rel 0` as a store constraint.
    fn relation(&self, rel: Rel) -> TResult<Linear> {
        Ok(Linear::new(self.terms.iter().copied(), rel, self.c.checked_neg().ok_or_else(overflow)?))
    }
}

/// A translated boolean: decided already, or a 0/1 store variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolRep {
    Const(bool),
    Var(VarId),
}

/// Statement expressions check array bounds and divisors; contract
/// expressions read out-of-range slots as unconstrained values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Stmt,
    Contract,
}

/// What identifiers mean while translating one expression or formula.
#[derive(Clone, Debug)]
pub struct Scope<'e> {
    pub env: &'e SsaEnv,
    pub result: Option<VarId>,
    /// Quantified variables bound to a concrete value.
    pub bound: Vec<(String, i64)>,
    pub mode: Mode,
    /// Values the left operands of enclosing `&&`/`||` must take for this
    /// expression to be evaluated at all.
    pub guards: Vec<(BoolRep, bool)>,
}

impl<'e> Scope<'e> {
    pub fn stmt(env: &'e SsaEnv) -> Self {
        Scope { env, result: None, bound: Vec::new(), mode: Mode::Stmt, guards: Vec::new() }
    }

    pub fn contract(env: &'e SsaEnv, result: Option<VarId>) -> Self {
        Scope { env, result, bound: Vec::new(), mode: Mode::Contract, guards: Vec::new() }
    }

    fn with(&self, var: &str, k: i64) -> Scope<'e> {
        let mut s = self.clone();
        s.bound.push((var.to_string(), k));
        s
    }

    fn array(&self, name: &str) -> TResult<&'e ArrayVersion> {
        self.env.array(name).ok_or_else(|| TranslateError::UnboundIdentifier(name.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Const(i64),
    Lin(Lin),
    Reif(Linear),
    Mul(VarId, VarId),
    Div(VarId, VarId),
    Read(u32, VarId),
    SafeRead(u32, VarId),
    OutOfRange(u32, i64),
    Bool(BoolOp, Vec<VarId>),
    Not(VarId),
}

/// Store plus naming and common-subexpression tables, kept in step with
/// the store's choice points.
#[derive(Debug)]
pub struct Ctx {
    pub store: Store,
    names: Vec<VarName>,
    memo: HashMap<Key, VarId>,
    memo_log: Vec<Key>,
    frames: Vec<(Mark, usize)>,
    next_uid: u32,
    pub limits: Limits,
    pub stats: SearchStats,
    inputs: Vec<(String, Vec<VarId>, bool)>,
}

/// Handle returned by [`Ctx::push`].
#[derive(Debug)]
#[must_use]
pub struct CtxMark(usize);

impl Ctx {
    pub fn new(config: StoreConfig, limits: Limits) -> Self {
        Ctx {
            store: Store::with_config(config),
            names: Vec::new(),
            memo: HashMap::new(),
            memo_log: Vec::new(),
            frames: Vec::new(),
            next_uid: 0,
            limits,
            stats: SearchStats::default(),
            inputs: Vec::new(),
        }
    }

    pub fn push(&mut self) -> CtxMark {
        let m = self.store.push();
        self.frames.push((m, self.memo_log.len()));
        CtxMark(self.frames.len())
    }

    pub fn pop(&mut self, mark: CtxMark) -> TResult<()> {
        if mark.0 != self.frames.len() {
            return Err(SolverError::MarkOrderViolation { expected: self.frames.len(), got: mark.0 }.into());
        }
        let (m, log) = self.frames.pop().expect("open frame");
        self.store.pop(m)?;
        for k in self.memo_log.drain(log..) {
            self.memo.remove(&k);
        }
        self.names.truncate(self.store.num_vars());
        Ok(())
    }

    pub fn name(&self, v: VarId) -> &VarName {
        &self.names[v.index()]
    }

    /// Variables bound to program identifiers, in creation order.
    pub fn ssa_vars(&self) -> Vec<VarId> {
        self.store.var_ids().filter(|v| self.names[v.index()] != VarName::Aux).collect()
    }

    fn remember(&mut self, k: Key, v: VarId) {
        self.memo.insert(k.clone(), v);
        self.memo_log.push(k);
    }

    fn new_var(&mut self, lo: i64, hi: i64, name: VarName) -> TResult<VarId> {
        let v = self.store.new_var(lo, hi)?;
        self.names.push(name);
        debug_assert_eq!(self.names.len(), self.store.num_vars());
        Ok(v)
    }

    fn aux(&mut self) -> TResult<VarId> {
        self.new_var(DEFAULT_MIN, DEFAULT_MAX, VarName::Aux)
    }

    fn aux_bool(&mut self) -> TResult<VarId> {
        self.new_var(0, 1, VarName::Aux)
    }

    fn uid(&mut self) -> u32 {
        self.next_uid += 1;
        self.next_uid
    }

    /// Post and fail with [`TranslateError::Infeasible`] on inconsistency.
    pub fn post(&mut self, c: Constraint) -> TResult<()> {
        if self.store.post(c)?.is_consistent() {
            Ok(())
        } else {
            Err(TranslateError::Infeasible)
        }
    }

    pub fn restrict(&mut self, v: VarId, lo: i64, hi: i64) -> TResult<()> {
        if self.store.restrict(v, lo, hi)?.is_consistent() {
            Ok(())
        } else {
            Err(TranslateError::Infeasible)
        }
    }

    pub fn fix_bool(&mut self, b: BoolRep, value: bool) -> TResult<()> {
        match b {
            BoolRep::Const(c) if c == value => Ok(()),
            BoolRep::Const(_) => Err(TranslateError::Infeasible),
            BoolRep::Var(v) => self.restrict(v, value as i64, value as i64),
        }
    }

    /// Current truth value, if the store decides it.
    pub fn bool_value(&self, b: BoolRep) -> Option<bool> {
        match b {
            BoolRep::Const(c) => Some(c),
            BoolRep::Var(v) => self.store.value(v).map(|x| x == 1),
        }
    }

    // ---- inputs and SSA versions

    /// Bind parameter `name` to a fresh version-0 variable.
    pub fn input_scalar(&mut self, env: &mut SsaEnv, name: &str, ty: Type, bounds: Option<(i64, i64)>) -> TResult<VarId> {
        let (lo, hi) = match ty {
            Type::Bool => (0, 1),
            _ => bounds.unwrap_or((DEFAULT_MIN, DEFAULT_MAX)),
        };
        let version = env.next_version(name);
        let v = self.new_var(lo, hi, VarName::Scalar { ident: name.to_string(), version })?;
        env.bind_scalar(name, version, v);
        self.inputs.push((name.to_string(), vec![v], false));
        Ok(v)
    }

    pub fn input_array(&mut self, env: &mut SsaEnv, name: &str, len: usize, bounds: Option<(i64, i64)>) -> TResult<()> {
        let (lo, hi) = bounds.unwrap_or((DEFAULT_MIN, DEFAULT_MAX));
        let version = env.next_version(name);
        let slots = (0..len)
            .map(|slot| self.new_var(lo, hi, VarName::Slot { ident: name.to_string(), version, slot }))
            .collect::<TResult<Vec<_>>>()?;
        self.inputs.push((name.to_string(), slots.clone(), true));
        let uid = self.uid();
        env.bind_array(name, ArrayVersion { version, uid, slots });
        Ok(())
    }

    /// New SSA version of a scalar holding `value`.
    pub fn define(&mut self, env: &mut SsaEnv, name: &str, ty: Type, value: Lin) -> TResult<VarId> {
        let version = env.next_version(name);
        let (lo, hi) = if ty == Type::Bool { (0, 1) } else { (DEFAULT_MIN, DEFAULT_MAX) };
        let v = self.new_var(lo, hi, VarName::Scalar { ident: name.to_string(), version })?;
        env.bind_scalar(name, version, v);
        let eq = value.add(Lin::var(v), -1)?;
        self.post(Constraint::Linear(eq.relation(Rel::Eq)?))?;
        Ok(v)
    }

    /// Fresh unconstrained SSA version, used for call results.
    pub fn define_free(&mut self, env: &mut SsaEnv, name: &str) -> TResult<VarId> {
        let version = env.next_version(name);
        let v = self.new_var(DEFAULT_MIN, DEFAULT_MAX, VarName::Scalar { ident: name.to_string(), version })?;
        env.bind_scalar(name, version, v);
        Ok(v)
    }

    pub fn bool_lin(&self, b: BoolRep) -> Lin {
        match b {
            BoolRep::Const(c) => Lin::constant(c as i64),
            BoolRep::Var(v) => Lin::var(v),
        }
    }

    // ---- linear forms

    /// Replace fixed variables by their values.
    pub fn fold(&self, lin: Lin) -> TResult<Lin> {
        let mut out = Lin::constant(lin.c);
        for (k, v) in lin.terms {
            match self.store.value(v) {
                Some(x) => {
                    let t = k.checked_mul(x).ok_or_else(overflow)?;
                    out.c = out.c.checked_add(t).ok_or_else(overflow)?;
                }
                None => out.terms.push((k, v)),
            }
        }
        Ok(out)
    }

    fn lin_bounds(&self, lin: &Lin) -> (i128, i128) {
        let mut lo = lin.c as i128;
        let mut hi = lo;
        for &(k, v) in &lin.terms {
            let (a, b) = (k as i128 * self.store.min(v) as i128, k as i128 * self.store.max(v) as i128);
            lo += a.min(b);
            hi += a.max(b);
        }
        (lo, hi)
    }

    pub fn constant(&mut self, c: i64) -> VarId {
        if let Some(&v) = self.memo.get(&Key::Const(c)) {
            return v;
        }
        let v = self.store.constant(c);
        self.names.push(VarName::Aux);
        self.remember(Key::Const(c), v);
        v
    }

    /// A variable equal to `lin`.
    pub fn materialize(&mut self, lin: Lin) -> TResult<VarId> {
        let lin = self.fold(lin)?;
        if let Some(c) = lin.as_const() {
            return Ok(self.constant(c));
        }
        if lin.c == 0 && lin.terms.len() == 1 && lin.terms[0].0 == 1 {
            return Ok(lin.terms[0].1);
        }
        let key = Key::Lin(lin.clone());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let z = self.aux()?;
        self.remember(key, z);
        let eq = lin.add(Lin::var(z), -1)?;
        self.post(Constraint::Linear(eq.relation(Rel::Eq)?))?;
        Ok(z)
    }

    // ---- booleans

    /// `b ⇔ lin`
    pub fn reify(&mut self, lin: Linear) -> TResult<BoolRep> {
        if lin.terms.is_empty() {
            return Ok(BoolRep::Const(lin.holds(|_| 0)));
        }
        if let Some(&b) = self.memo.get(&Key::Reif(lin.clone())) {
            return Ok(BoolRep::Var(b));
        }
        let b = self.aux_bool()?;
        self.remember(Key::Reif(lin.clone()), b);
        self.post(Constraint::Reif { b, lin })?;
        Ok(BoolRep::Var(b))
    }

    pub fn not(&mut self, b: BoolRep) -> TResult<BoolRep> {
        let v = match b {
            BoolRep::Const(c) => return Ok(BoolRep::Const(!c)),
            BoolRep::Var(v) => v,
        };
        if let Some(x) = self.store.value(v) {
            return Ok(BoolRep::Const(x == 0));
        }
        if let Some(&n) = self.memo.get(&Key::Not(v)) {
            return Ok(BoolRep::Var(n));
        }
        let n = self.aux_bool()?;
        self.remember(Key::Not(v), n);
        self.remember(Key::Not(n), v);
        self.post(Constraint::Linear(Linear::new([(1, v), (1, n)], Rel::Eq, 1)))?;
        Ok(BoolRep::Var(n))
    }

    pub fn bool_op(&mut self, op: BoolOp, args: Vec<BoolRep>) -> TResult<BoolRep> {
        let absorbing = op == BoolOp::Or;
        let mut vs = Vec::with_capacity(args.len());
        for a in args {
            match self.bool_value(a) {
                Some(c) if c == absorbing => return Ok(BoolRep::Const(absorbing)),
                Some(_) => {}
                None => {
                    if let BoolRep::Var(v) = a {
                        vs.push(v);
                    }
                }
            }
        }
        vs.sort_unstable();
        vs.dedup();
        match vs.len() {
            0 => return Ok(BoolRep::Const(!absorbing)),
            1 => return Ok(BoolRep::Var(vs[0])),
            _ => {}
        }
        let key = Key::Bool(op, vs.clone());
        if let Some(&b) = self.memo.get(&key) {
            return Ok(BoolRep::Var(b));
        }
        let b = self.aux_bool()?;
        self.remember(key, b);
        self.post(Constraint::Bool { b, op, args: vs })?;
        Ok(BoolRep::Var(b))
    }

    /// Post `op(args)` as holding, without a literal for the whole.
    pub fn assert_op(&mut self, op: BoolOp, args: Vec<BoolRep>) -> TResult<()> {
        let b = self.bool_op(op, args)?;
        self.fix_bool(b, true)
    }

    // ---- expressions

    pub fn int_expr(&mut self, sc: &Scope, e: &Expr) -> TResult<Lin> {
        match &e.kind {
            ExprKind::Int(v) => Ok(Lin::constant(*v)),
            ExprKind::Bool(b) => Ok(Lin::constant(*b as i64)),
            ExprKind::Var(n) => {
                if let Some(&(_, k)) = sc.bound.iter().rev().find(|(m, _)| m == n) {
                    return Ok(Lin::constant(k));
                }
                sc.env.scalar(n).map(Lin::var).ok_or_else(|| TranslateError::UnboundIdentifier(n.clone()))
            }
            ExprKind::Result => sc
                .result
                .map(Lin::var)
                .ok_or_else(|| TranslateError::UnboundIdentifier("\\result".into())),
            ExprKind::Length(a) => Ok(Lin::constant(sc.array(a)?.slots.len() as i64)),
            ExprKind::Index(a, i) => {
                let idx = self.int_expr(sc, i)?;
                let v = self.read(sc, a, idx, e.span)?;
                Ok(Lin::var(v))
            }
            ExprKind::Unary(UnOp::Neg, x) => self.int_expr(sc, x)?.scale(-1),
            ExprKind::Unary(UnOp::Not, _) => {
                let b = self.bool_expr(sc, e)?;
                Ok(self.bool_lin(b))
            }
            ExprKind::Binary(op, a, b) => match op {
                BinOp::Add | BinOp::Sub => {
                    let x = self.int_expr(sc, a)?;
                    let y = self.int_expr(sc, b)?;
                    x.add(y, if *op == BinOp::Add { 1 } else { -1 })
                }
                BinOp::Mul => {
                    let x = self.int_expr(sc, a)?;
                    let x = self.fold(x)?;
                    let y = self.int_expr(sc, b)?;
                    let y = self.fold(y)?;
                    if let Some(k) = x.as_const() {
                        return y.scale(k);
                    }
                    if let Some(k) = y.as_const() {
                        return x.scale(k);
                    }
                    let (x, y) = (self.materialize(x)?, self.materialize(y)?);
                    let (x, y) = (x.min(y), x.max(y));
                    if let Some(&z) = self.memo.get(&Key::Mul(x, y)) {
                        return Ok(Lin::var(z));
                    }
                    let z = self.aux()?;
                    self.remember(Key::Mul(x, y), z);
                    self.post(Constraint::Mult { x, y, z })?;
                    Ok(Lin::var(z))
                }
                BinOp::Div => self.div(sc, a, b, e.span),
                _ => {
                    let r = self.bool_expr(sc, e)?;
                    Ok(self.bool_lin(r))
                }
            },
        }
    }

    fn div(&mut self, sc: &Scope, a: &Expr, b: &Expr, span: Span) -> TResult<Lin> {
        let x = self.int_expr(sc, a)?;
        let x = self.fold(x)?;
        let y = self.int_expr(sc, b)?;
        let y = self.fold(y)?;
        let (ylo, yhi) = self.lin_bounds(&y);
        let mut y = y;
        if ylo <= 0 && yhi >= 0 {
            match sc.mode {
                Mode::Stmt if sc.guards.is_empty() => self.check_nonzero(y.clone(), span)?,
                Mode::Stmt => {
                    self.check_guarded(sc, |ctx| ctx.restrict_lin_zero(&y), ViolationKind::DivisionByZero, span)?;
                    y = Lin::var(self.nonzero_proxy(y)?);
                }
                Mode::Contract => {
                    return Err(TranslateError::Unsupported(format!(
                        "{span}: division by a possibly zero value in a contract"
                    )))
                }
            }
        }
        let (x, y) = (self.fold(x)?, self.fold(y)?);
        if let (Some(p), Some(q)) = (x.as_const(), y.as_const()) {
            return Ok(Lin::constant(p.checked_div(q).ok_or_else(overflow)?));
        }
        let (x, y) = (self.materialize(x)?, self.materialize(y)?);
        if let Some(&z) = self.memo.get(&Key::Div(x, y)) {
            return Ok(Lin::var(z));
        }
        let z = self.aux()?;
        self.remember(Key::Div(x, y), z);
        self.post(Constraint::Div { x, y, z })?;
        Ok(Lin::var(z))
    }

    pub fn bool_expr(&mut self, sc: &Scope, e: &Expr) -> TResult<BoolRep> {
        match &e.kind {
            ExprKind::Bool(b) => Ok(BoolRep::Const(*b)),
            ExprKind::Var(_) => {
                let l = self.int_expr(sc, e)?;
                match self.fold(l)? {
                    Lin { terms, c: 0 } if terms.len() == 1 && terms[0].0 == 1 => Ok(BoolRep::Var(terms[0].1)),
                    l => match l.as_const() {
                        Some(c) => Ok(BoolRep::Const(c != 0)),
                        None => Err(TranslateError::Unsupported(format!("{}: not a boolean", e.span))),
                    },
                }
            }
            ExprKind::Unary(UnOp::Not, x) => {
                let b = self.bool_expr(sc, x)?;
                self.not(b)
            }
            ExprKind::Binary(op @ (BinOp::And | BinOp::Or), _, _) => {
                let mut leaves = Vec::new();
                flatten(e, *op, &mut leaves);
                let mut args = Vec::with_capacity(leaves.len());
                let mut inner = sc.clone();
                for l in leaves {
                    let b = self.bool_expr(&inner, l)?;
                    args.push(b);
                    if sc.mode == Mode::Stmt {
                        inner.guards.push((b, *op == BinOp::And));
                    }
                }
                let op = if *op == BinOp::And { BoolOp::And } else { BoolOp::Or };
                self.bool_op(op, args)
            }
            ExprKind::Binary(op, a, b) if op.is_comparison() => {
                let lin = self.comparison(sc, *op, a, b)?;
                let lin = self.fold_linear(lin);
                self.reify(lin)
            }
            _ => Err(TranslateError::Unsupported(format!("{}: not a boolean expression", e.span))),
        }
    }

    fn fold_linear(&self, lin: Linear) -> Linear {
        let mut rhs = lin.rhs as i128;
        let mut terms = Vec::with_capacity(lin.terms.len());
        for (k, v) in lin.terms {
            match self.store.value(v) {
                Some(x) => rhs -= k as i128 * x as i128,
                None => terms.push((k, v)),
            }
        }
        match i64::try_from(rhs) {
            Ok(rhs) => Linear::new(terms, lin.rel, rhs),
            Err(_) if terms.is_empty() => {
                // decided either way; keep the sign of the comparison
                let holds = match lin.rel {
                    Rel::Le => rhs >= 0,
                    Rel::Eq => false,
                    Rel::Ne => true,
                };
                Linear::new([], Rel::Le, if holds { 0 } else { -1 })
            }
            Err(_) => Linear::new(terms, lin.rel, rhs.clamp(i64::MIN as i128, i64::MAX as i128) as i64),
        }
    }

    /// `a op b` as `Σ rel rhs`.
    pub fn comparison(&mut self, sc: &Scope, op: BinOp, a: &Expr, b: &Expr) -> TResult<Linear> {
        let x = self.int_expr(sc, a)?;
        let y = self.int_expr(sc, b)?;
        let d = x.add(y, -1)?;
        Ok(match op {
            BinOp::Lt => d.add(Lin::constant(1), 1)?.relation(Rel::Le)?,
            BinOp::Le => d.relation(Rel::Le)?,
            BinOp::Gt => d.scale(-1)?.add(Lin::constant(1), 1)?.relation(Rel::Le)?,
            BinOp::Ge => d.scale(-1)?.relation(Rel::Le)?,
            BinOp::Eq => d.relation(Rel::Eq)?,
            BinOp::Ne => d.relation(Rel::Ne)?,
            _ => unreachable!("not a comparison"),
        })
    }

    // ---- arrays

    fn read(&mut self, sc: &Scope, name: &str, idx: Lin, span: Span) -> TResult<VarId> {
        let arr = sc.array(name)?;
        let len = arr.slots.len() as i64;
        let idx = self.fold(idx)?;
        if let Some(c) = idx.as_const() {
            if (0..len).contains(&c) {
                return Ok(arr.slots[c as usize]);
            }
            return match sc.mode {
                Mode::Stmt if sc.guards.is_empty() => {
                    Err(self.violation(ViolationKind::IndexOutOfBounds { array: name.into() }, span))
                }
                Mode::Stmt => {
                    let kind = ViolationKind::IndexOutOfBounds { array: name.into() };
                    self.check_guarded(sc, |_| Ok(true), kind, span)?;
                    self.aux()
                }
                Mode::Contract => {
                    let key = Key::OutOfRange(arr.uid, c);
                    if let Some(&v) = self.memo.get(&key) {
                        return Ok(v);
                    }
                    let v = self.aux()?;
                    self.remember(key, v);
                    Ok(v)
                }
            };
        }
        let iv = self.materialize(idx)?;
        let in_range = self.store.min(iv) >= 0 && self.store.max(iv) < len;
        if !in_range && sc.mode == Mode::Contract {
            return self.safe_read(arr, iv);
        }
        if !in_range && !sc.guards.is_empty() {
            for (lo, hi) in [(i64::MIN, -1), (len, i64::MAX)] {
                let kind = ViolationKind::IndexOutOfBounds { array: name.into() };
                self.check_guarded(sc, |ctx| Ok(ctx.store.restrict(iv, lo, hi)?.is_consistent()), kind, span)?;
            }
            return self.safe_read(arr, iv);
        }
        if !in_range {
            self.check_index(name, iv, len, span)?;
        }
        if let Some(x) = self.store.value(iv) {
            return Ok(arr.slots[x as usize]);
        }
        self.element(arr, iv)
    }

    fn element(&mut self, arr: &ArrayVersion, iv: VarId) -> TResult<VarId> {
        let key = Key::Read(arr.uid, iv);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let v = self.aux()?;
        self.remember(key, v);
        self.post(Constraint::Element { index: iv, table: arr.slots.clone(), value: v })?;
        Ok(v)
    }

    /// Read whose index may be out of range: an in-range proxy index that
    /// follows the real one whenever the real one is in range.
    fn safe_read(&mut self, arr: &ArrayVersion, iv: VarId) -> TResult<VarId> {
        let key = Key::SafeRead(arr.uid, iv);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let len = arr.slots.len() as i64;
        let v = if len == 0 {
            self.aux()?
        } else {
            let k = self.new_var(0, len - 1, VarName::Aux)?;
            let lo = self.reify(Linear::new([(-1, iv)], Rel::Le, 0))?;
            let hi = self.reify(Linear::new([(1, iv)], Rel::Le, len - 1))?;
            let same = self.reify(Linear::diff(k, iv, Rel::Eq, 0))?;
            let (nlo, nhi) = (self.not(lo)?, self.not(hi)?);
            self.assert_op(BoolOp::Or, vec![nlo, nhi, same])?;
            let v = self.aux()?;
            self.post(Constraint::Element { index: k, table: arr.slots.clone(), value: v })?;
            v
        };
        self.remember(key, v);
        Ok(v)
    }

    /// Report a reachable out-of-range index, then confine it.
    fn check_index(&mut self, name: &str, iv: VarId, len: i64, span: Span) -> TResult<()> {
        for (lo, hi) in [(i64::MIN, -1), (len, i64::MAX)] {
            if self.store.max(iv) < lo || self.store.min(iv) > hi {
                continue;
            }
            let m = self.push();
            let w = if self.store.restrict(iv, lo, hi)?.is_consistent() { self.witness() } else { Ok(None) };
            self.pop(m)?;
            if let Some(w) = w? {
                let kind = ViolationKind::IndexOutOfBounds { array: name.into() };
                return Err(TranslateError::Violation(Box::new(Violation { kind, span, witness: w })));
            }
        }
        if len == 0 {
            return Err(TranslateError::Infeasible);
        }
        self.restrict(iv, 0, len - 1)
    }

    /// Under the scope's guards, look for a witness of the fault that
    /// `fault` assumes (it returns `false` when the fault is impossible).
    fn check_guarded(
        &mut self,
        sc: &Scope,
        fault: impl FnOnce(&mut Self) -> TResult<bool>,
        kind: ViolationKind,
        span: Span,
    ) -> TResult<()> {
        let m = self.push();
        let w = (|| {
            for &(b, v) in &sc.guards {
                match self.fix_bool(b, v) {
                    Ok(()) => {}
                    Err(TranslateError::Infeasible) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            if !fault(self)? {
                return Ok(None);
            }
            self.witness()
        })();
        self.pop(m)?;
        match w? {
            Some(witness) => Err(TranslateError::Violation(Box::new(Violation { kind, span, witness }))),
            None => Ok(()),
        }
    }

    fn restrict_lin_zero(&mut self, y: &Lin) -> TResult<bool> {
        if let Some(c) = y.as_const() {
            return Ok(c == 0);
        }
        let yv = self.materialize(y.clone())?;
        Ok(self.store.restrict(yv, 0, 0)?.is_consistent())
    }

    /// A nonzero divisor equal to `y` whenever `y` is nonzero.
    fn nonzero_proxy(&mut self, y: Lin) -> TResult<VarId> {
        let yv = self.materialize(y)?;
        let (lo, hi) = match (self.store.min(yv), self.store.max(yv)) {
            (0, 0) => (1, 1),
            b => b,
        };
        let k = self.new_var(lo, hi, VarName::Aux)?;
        if !self.store.exclude(k, 0)?.is_consistent() {
            return Err(TranslateError::Infeasible);
        }
        let zero = self.reify(Linear::new([(1, yv)], Rel::Eq, 0))?;
        let same = self.reify(Linear::diff(k, yv, Rel::Eq, 0))?;
        self.assert_op(BoolOp::Or, vec![zero, same])?;
        Ok(k)
    }

    fn check_nonzero(&mut self, y: Lin, span: Span) -> TResult<()> {
        if let Some(c) = y.as_const() {
            return if c == 0 { Err(self.violation(ViolationKind::DivisionByZero, span)) } else { Ok(()) };
        }
        let yv = self.materialize(y)?;
        let m = self.push();
        let w = if self.store.restrict(yv, 0, 0)?.is_consistent() { self.witness() } else { Ok(None) };
        self.pop(m)?;
        if let Some(w) = w? {
            let kind = ViolationKind::DivisionByZero;
            return Err(TranslateError::Violation(Box::new(Violation { kind, span, witness: w })));
        }
        if self.store.exclude(yv, 0)?.is_consistent() {
            Ok(())
        } else {
            Err(TranslateError::Infeasible)
        }
    }

    /// A violation witnessed by the current store, or an empty path.
    fn violation(&mut self, kind: ViolationKind, span: Span) -> TranslateError {
        match self.witness() {
            Ok(Some(witness)) => TranslateError::Violation(Box::new(Violation { kind, span, witness })),
            Ok(None) => TranslateError::Infeasible,
            Err(e) => e,
        }
    }

    /// New version of array `name` with `value` written at `idx`.
    pub fn write(&mut self, env: &mut SsaEnv, name: &str, idx: Lin, value: Lin, span: Span) -> TResult<()> {
        let arr = env.array(name).ok_or_else(|| TranslateError::UnboundIdentifier(name.into()))?.clone();
        let len = arr.slots.len() as i64;
        let idx = self.fold(idx)?;
        let (iv, fixed) = match idx.as_const() {
            Some(c) if (0..len).contains(&c) => (None, Some(c)),
            Some(_) => return Err(self.violation(ViolationKind::IndexOutOfBounds { array: name.into() }, span)),
            None => {
                let iv = self.materialize(idx)?;
                if self.store.min(iv) < 0 || self.store.max(iv) >= len {
                    self.check_index(name, iv, len, span)?;
                }
                (Some(iv), self.store.value(iv))
            }
        };
        let version = env.next_version(name);
        let mut slots = arr.slots.clone();
        let fresh = |ctx: &mut Ctx, slot: usize| {
            ctx.new_var(DEFAULT_MIN, DEFAULT_MAX, VarName::Slot { ident: name.to_string(), version, slot })
        };
        match (iv, fixed) {
            (_, Some(c)) => {
                let s = fresh(self, c as usize)?;
                slots[c as usize] = s;
                let eq = value.add(Lin::var(s), -1)?;
                self.post(Constraint::Linear(eq.relation(Rel::Eq)?))?;
            }
            (Some(iv), None) => {
                let val = self.materialize(value)?;
                let cands: Vec<i64> = self.store.domain(iv).iter().collect();
                for &j in &cands {
                    slots[j as usize] = fresh(self, j as usize)?;
                }
                self.post(Constraint::Element { index: iv, table: slots.clone(), value: val })?;
                for &j in &cands {
                    let hit = self.reify(Linear::new([(1, iv)], Rel::Eq, j))?;
                    let keep = self.reify(Linear::diff(slots[j as usize], arr.slots[j as usize], Rel::Eq, 0))?;
                    self.assert_op(BoolOp::Or, vec![hit, keep])?;
                }
            }
            (None, None) => unreachable!("constant index"),
        }
        let uid = self.uid();
        env.bind_array(name, ArrayVersion { version, uid, slots });
        Ok(())
    }

    // ---- witnesses

    /// Solve the store, labeling program variables first.
    pub fn witness(&mut self) -> TResult<Option<Witness>> {
        let order = self.ssa_vars();
        self.witness_with(&order)
    }

    pub fn witness_with(&mut self, order: &[VarId]) -> TResult<Option<Witness>> {
        let a = solve(&mut self.store, order, &self.limits, &mut self.stats)?;
        Ok(a.map(|a| self.describe(&a)))
    }

    /// Trace lines and input values under `a`; scalars before array slots.
    pub fn describe(&self, a: &Assignment) -> Witness {
        let mut scalars = Vec::new();
        let mut slots = Vec::new();
        for v in self.store.var_ids() {
            let (lo, hi) = self.store.initial_bounds(v);
            let x = a.get(v);
            match &self.names[v.index()] {
                VarName::Scalar { ident, version } => scalars.push(TraceEntry {
                    ident: ident.clone(),
                    version: *version,
                    slot: None,
                    lo,
                    hi,
                    value: (x, x),
                }),
                VarName::Slot { ident, version, slot } => slots.push(TraceEntry {
                    ident: ident.clone(),
                    version: *version,
                    slot: Some(*slot),
                    lo,
                    hi,
                    value: (x, x),
                }),
                VarName::Aux => {}
            }
        }
        scalars.extend(slots);
        let mut inputs = Inputs::default();
        for (name, vs, is_array) in &self.inputs {
            if *is_array {
                inputs.arrays.push((name.clone(), vs.iter().map(|&v| a.get(v)).collect()));
            } else {
                inputs.scalars.push((name.clone(), a.get(vs[0])));
            }
        }
        Witness { entries: scalars, inputs }
    }
}

fn flatten<'a>(e: &'a Expr, op: BinOp, out: &mut Vec<&'a Expr>) {
    match &e.kind {
        ExprKind::Binary(o, a, b) if *o == op => {
            flatten(a, op, out);
            flatten(b, op, out);
        }
        _ => out.push(e),
    }
}
