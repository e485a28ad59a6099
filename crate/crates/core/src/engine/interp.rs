//! Concrete big-step interpreter. Shares nothing with the translator, so it
//! serves as an independent check of verdicts and witnesses.

use std::collections::HashMap;

use super::Decision;
use crate::lang::{BinOp, Expr, ExprKind, Formula, Function, Span, Stmt, StmtKind, Type, TypedProgram, UnOp};
use crate::solver::{DEFAULT_MAX, DEFAULT_MIN};
use crate::translate::Inputs;

pub const DEFAULT_STEPS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("step budget exceeded")]
    StepBudgetExceeded,
    #[error("{span}: index {index} out of bounds for `{array}`")]
    OutOfBounds { array: String, index: i128, span: Span },
    #[error("{0}: division by zero")]
    DivisionByZero(Span),
    #[error("{0}: value outside the integer domain")]
    Overflow(Span),
    #[error("{span}: precondition of `{callee}` violated")]
    PreconditionViolated { callee: String, span: Span },
    #[error("missing input `{0}`")]
    MissingInput(String),
    #[error("no function `{0}`")]
    UnknownFunction(String),
}

/// One execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub result: Option<i64>,
    /// Final contents of the array parameters.
    pub arrays: Vec<(String, Vec<i64>)>,
    pub decisions: Vec<Decision>,
    /// Every scalar assignment in execution order.
    pub assignments: Vec<(String, i64)>,
}

#[derive(Clone, Debug)]
enum Val {
    Int(i64),
    Arr(Vec<i64>),
}

type Frame = HashMap<String, Val>;

enum Flow {
    Normal,
    Return(Option<i64>),
}

struct Machine<'p> {
    prog: &'p TypedProgram,
    steps: u64,
    max_steps: u64,
    decisions: Vec<Decision>,
    assignments: Vec<(String, i64)>,
}

fn in_domain(v: i128, span: Span) -> Result<i64, InterpError> {
    if v < DEFAULT_MIN as i128 || v > DEFAULT_MAX as i128 {
        Err(InterpError::Overflow(span))
    } else {
        Ok(v as i64)
    }
}

fn int(frame: &Frame, name: &str) -> i128 {
    match frame.get(name) {
        Some(Val::Int(v)) => *v as i128,
        _ => panic!("`{name}` is not a scalar; the program was type checked"),
    }
}

fn arr<'f>(frame: &'f Frame, name: &str) -> &'f [i64] {
    match frame.get(name) {
        Some(Val::Arr(v)) => v,
        _ => panic!("`{name}` is not an array; the program was type checked"),
    }
}

/// Evaluation context of contract formulas.
struct Post<'a> {
    frame: &'a Frame,
    result: Option<i64>,
    bound: Vec<(String, i64)>,
}

impl<'p> Machine<'p> {
    fn tick(&mut self) -> Result<(), InterpError> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(InterpError::StepBudgetExceeded);
        }
        Ok(())
    }

    fn eval(&mut self, frame: &Frame, e: &Expr, post: Option<&Post>) -> Result<i128, InterpError> {
        Ok(match &e.kind {
            ExprKind::Int(v) => *v as i128,
            ExprKind::Bool(b) => *b as i128,
            ExprKind::Var(n) => match post.and_then(|p| p.bound.iter().rev().find(|(m, _)| m == n)) {
                Some(&(_, k)) => k as i128,
                None => int(frame, n),
            },
            ExprKind::Result => post.and_then(|p| p.result).expect("\\result outside ensures") as i128,
            ExprKind::Length(a) => arr(frame, a).len() as i128,
            ExprKind::Index(a, i) => {
                let i = self.eval(frame, i, post)?;
                let t = arr(frame, a);
                if i < 0 || i >= t.len() as i128 {
                    return Err(InterpError::OutOfBounds { array: a.clone(), index: i, span: e.span });
                }
                t[i as usize] as i128
            }
            ExprKind::Unary(UnOp::Neg, x) => -self.eval(frame, x, post)?,
            ExprKind::Unary(UnOp::Not, x) => (self.eval(frame, x, post)? == 0) as i128,
            ExprKind::Binary(BinOp::And, a, b) => {
                (self.eval(frame, a, post)? != 0 && self.eval(frame, b, post)? != 0) as i128
            }
            ExprKind::Binary(BinOp::Or, a, b) => {
                (self.eval(frame, a, post)? != 0 || self.eval(frame, b, post)? != 0) as i128
            }
            ExprKind::Binary(op, a, b) => {
                let x = self.eval(frame, a, post)?;
                let y = self.eval(frame, b, post)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x.checked_mul(y).ok_or(InterpError::Overflow(e.span))?,
                    BinOp::Div => {
                        if y == 0 {
                            return Err(InterpError::DivisionByZero(e.span));
                        }
                        x / y
                    }
                    BinOp::Eq => (x == y) as i128,
                    BinOp::Ne => (x != y) as i128,
                    BinOp::Lt => (x < y) as i128,
                    BinOp::Le => (x <= y) as i128,
                    BinOp::Gt => (x > y) as i128,
                    BinOp::Ge => (x >= y) as i128,
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        })
    }

    fn formula(&mut self, f: &Formula, post: &Post) -> Result<bool, InterpError> {
        Ok(match f {
            Formula::Atom(e) => self.eval(post.frame, e, Some(post))? != 0,
            Formula::Not(g) => !self.formula(g, post)?,
            Formula::And(a, b) => self.formula(a, post)? && self.formula(b, post)?,
            Formula::Or(a, b) => self.formula(a, post)? || self.formula(b, post)?,
            Formula::Implies(a, b) => !self.formula(a, post)? || self.formula(b, post)?,
            Formula::ForAll { var, lo, hi, body, .. } => {
                let lo = self.eval(post.frame, lo, Some(post))?;
                let hi = self.eval(post.frame, hi, Some(post))?;
                let mut k = lo;
                while k < hi {
                    let mut inner = Post { frame: post.frame, result: post.result, bound: post.bound.clone() };
                    inner.bound.push((var.clone(), k as i64));
                    if !self.formula(body, &inner)? {
                        return Ok(false);
                    }
                    k += 1;
                }
                true
            }
            Formula::AllDifferent(a, _) => {
                let mut t = arr(post.frame, a).to_vec();
                t.sort_unstable();
                t.windows(2).all(|w| w[0] != w[1])
            }
        })
    }

    fn holds(&mut self, fs: &[Formula], frame: &Frame, result: Option<i64>) -> Result<bool, InterpError> {
        let post = Post { frame, result, bound: Vec::new() };
        for f in fs {
            if !self.formula(f, &post)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn call(&mut self, f: &Function, mut frame: Frame) -> Result<Option<i64>, InterpError> {
        for s in &f.body {
            if let Flow::Return(v) = self.exec(&mut frame, s)? {
                return Ok(v);
            }
        }
        Ok(None)
    }

    fn assign(&mut self, frame: &mut Frame, name: &str, v: i128, span: Span) -> Result<(), InterpError> {
        let v = in_domain(v, span)?;
        self.assignments.push((name.to_string(), v));
        frame.insert(name.to_string(), Val::Int(v));
        Ok(())
    }

    fn exec(&mut self, frame: &mut Frame, s: &Stmt) -> Result<Flow, InterpError> {
        self.tick()?;
        match &s.kind {
            StmtKind::Block(v) => {
                for t in v {
                    if let Flow::Return(r) = self.exec(frame, t)? {
                        return Ok(Flow::Return(r));
                    }
                }
            }
            StmtKind::Decl { name, init, .. } => {
                let v = match init {
                    Some(e) => self.eval(frame, e, None)?,
                    None => 0,
                };
                self.assign(frame, name, v, s.span)?;
            }
            StmtKind::Assign { name, value } => {
                let v = self.eval(frame, value, None)?;
                self.assign(frame, name, v, s.span)?;
            }
            StmtKind::ArrayAssign { name, index, value } => {
                let i = self.eval(frame, index, None)?;
                let v = self.eval(frame, value, None)?;
                let v = in_domain(v, s.span)?;
                let Some(Val::Arr(t)) = frame.get_mut(name) else { panic!("`{name}` is not an array") };
                if i < 0 || i >= t.len() as i128 {
                    return Err(InterpError::OutOfBounds { array: name.clone(), index: i, span: s.span });
                }
                t[i as usize] = v;
            }
            StmtKind::If { cond, then, els } => {
                let c = self.eval(frame, cond, None)? != 0;
                self.decisions.push(Decision { span: s.span, taken: c });
                if c {
                    return self.exec(frame, then);
                } else if let Some(e) = els {
                    return self.exec(frame, e);
                }
            }
            StmtKind::While { cond, body } => loop {
                self.tick()?;
                let c = self.eval(frame, cond, None)? != 0;
                self.decisions.push(Decision { span: s.span, taken: c });
                if !c {
                    break;
                }
                if let Flow::Return(r) = self.exec(frame, body)? {
                    return Ok(Flow::Return(r));
                }
            },
            StmtKind::For { init, cond, step, body } => {
                // same shape as the desugared loop, for undesugared input
                if let Some(i) = init {
                    self.exec(frame, i)?;
                }
                loop {
                    self.tick()?;
                    let c = match cond {
                        Some(c) => self.eval(frame, c, None)? != 0,
                        None => true,
                    };
                    self.decisions.push(Decision { span: s.span, taken: c });
                    if !c {
                        break;
                    }
                    if let Flow::Return(r) = self.exec(frame, body)? {
                        return Ok(Flow::Return(r));
                    }
                    if let Some(st) = step {
                        self.exec(frame, st)?;
                    }
                }
            }
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => Some(in_domain(self.eval(frame, e, None)?, s.span)?),
                    None => None,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Call { target, callee, args, .. } => {
                let f = self.prog.function(callee).ok_or_else(|| InterpError::UnknownFunction(callee.clone()))?;
                let mut inner = Frame::new();
                for (p, a) in f.params.iter().zip(args) {
                    let v = match (&p.ty, &a.kind) {
                        (Type::IntArray, ExprKind::Var(n)) => Val::Arr(arr(frame, n).to_vec()),
                        _ => Val::Int(in_domain(self.eval(frame, a, None)?, a.span)?),
                    };
                    inner.insert(p.name.clone(), v);
                }
                if !self.holds(&f.contract.requires, &inner, None)? {
                    return Err(InterpError::PreconditionViolated { callee: callee.clone(), span: s.span });
                }
                let r = self.call(f, inner)?;
                self.assign(frame, target, r.unwrap_or(0) as i128, s.span)?;
            }
        }
        Ok(Flow::Normal)
    }
}

fn entry_frame(f: &Function, inputs: &Inputs) -> Result<Frame, InterpError> {
    let mut frame = Frame::new();
    for p in &f.params {
        let v = if p.ty == Type::IntArray {
            Val::Arr(inputs.array(&p.name).ok_or_else(|| InterpError::MissingInput(p.name.clone()))?.to_vec())
        } else {
            Val::Int(inputs.scalar(&p.name).ok_or_else(|| InterpError::MissingInput(p.name.clone()))?)
        };
        frame.insert(p.name.clone(), v);
    }
    Ok(frame)
}

/// Run function `name` on `inputs`.
pub fn interpret(p: &TypedProgram, name: &str, inputs: &Inputs, max_steps: u64) -> Result<Run, InterpError> {
    let f = p.function(name).ok_or_else(|| InterpError::UnknownFunction(name.to_string()))?;
    let frame = entry_frame(f, inputs)?;
    let mut m = Machine { prog: p, steps: 0, max_steps, decisions: Vec::new(), assignments: Vec::new() };
    let mut out = frame.clone();
    let mut result = None;
    for s in &f.body {
        if let Flow::Return(v) = m.exec(&mut out, s)? {
            result = v;
            break;
        }
    }
    let arrays = f
        .array_params()
        .map(|prm| (prm.name.clone(), arr(&out, &prm.name).to_vec()))
        .collect();
    Ok(Run { result, arrays, decisions: m.decisions, assignments: m.assignments })
}

/// Verdict of the contract on one concrete input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    /// The input does not satisfy requires.
    Vacuous,
    Holds(Run),
    /// Ensures is false after the run.
    Violated(Run),
    /// A runtime fault: bad index, zero divisor, callee precondition.
    Fault(InterpError),
    /// Execution left the integer domain or ran out of steps.
    Excluded(InterpError),
}

impl Check {
    pub fn is_violation(&self) -> bool {
        matches!(self, Check::Violated(_) | Check::Fault(_))
    }
}

/// Evaluate requires, run, then evaluate ensures with scalar parameters in
/// their initial state and arrays in their final state.
pub fn check_input(p: &TypedProgram, name: &str, inputs: &Inputs, max_steps: u64) -> Result<Check, InterpError> {
    let f = p.function(name).ok_or_else(|| InterpError::UnknownFunction(name.to_string()))?;
    let frame = entry_frame(f, inputs)?;
    let mut m = Machine { prog: p, steps: 0, max_steps, decisions: Vec::new(), assignments: Vec::new() };
    match m.holds(&f.contract.requires, &frame, None) {
        Ok(true) => {}
        Ok(false) => return Ok(Check::Vacuous),
        Err(e) => return Ok(Check::Excluded(e)),
    }
    let run = match interpret(p, name, inputs, max_steps) {
        Ok(r) => r,
        Err(e @ (InterpError::Overflow(_) | InterpError::StepBudgetExceeded)) => return Ok(Check::Excluded(e)),
        Err(e @ (InterpError::MissingInput(_) | InterpError::UnknownFunction(_))) => return Err(e),
        Err(e) => return Ok(Check::Fault(e)),
    };
    let mut post = frame;
    for (n, t) in &run.arrays {
        post.insert(n.clone(), Val::Arr(t.clone()));
    }
    Ok(match m.holds(&f.contract.ensures, &post, run.result) {
        Ok(true) => Check::Holds(run),
        Ok(false) => Check::Violated(run),
        Err(e @ InterpError::Overflow(_)) => Check::Excluded(e),
        Err(_) => Check::Violated(run),
    })
}
