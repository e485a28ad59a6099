//! Static checks: scoping, types, return coverage,
//! contract well-formedness and call discipline.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::ast::*;
use super::desugar::desugar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

/// A checked, desugared program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedProgram {
    pub program: Program,
    /// Declared type of every local and parameter, per function.
    pub locals: BTreeMap<String, BTreeMap<String, Type>>,
}

impl TypedProgram {
    pub fn function(&self, name: &str) -> Option<&Function> {
        self.program.function(name)
    }

    pub fn entry(&self) -> &Function {
        &self.program.functions[0]
    }
}

/// Type of `e` under `lookup`, or a message.
pub fn expr_type(e: &Expr, lookup: &dyn Fn(&str) -> Option<Type>, result: Option<Type>) -> Result<Type, String> {
    let scalar = |name: &str| -> Result<Type, String> {
        match lookup(name) {
            None => Err(format!("undeclared identifier `{name}`")),
            Some(Type::IntArray) => Err(format!("array `{name}` used as a scalar")),
            Some(t) => Ok(t),
        }
    };
    let array = |name: &str| -> Result<(), String> {
        match lookup(name) {
            None => Err(format!("undeclared identifier `{name}`")),
            Some(Type::IntArray) => Ok(()),
            Some(_) => Err(format!("`{name}` is not an array")),
        }
    };
    let want = |e: &Expr, t: Type| -> Result<(), String> {
        let got = expr_type(e, lookup, result)?;
        if got == t {
            Ok(())
        } else {
            Err(format!("expected {t}, found {got} in `{}`", super::pretty::expr(e)))
        }
    };
    match &e.kind {
        ExprKind::Int(_) => Ok(Type::Int),
        ExprKind::Bool(_) => Ok(Type::Bool),
        ExprKind::Var(n) => scalar(n),
        ExprKind::Index(a, i) => {
            array(a)?;
            want(i, Type::Int)?;
            Ok(Type::Int)
        }
        ExprKind::Length(a) => {
            array(a)?;
            Ok(Type::Int)
        }
        ExprKind::Result => match result {
            None => Err("`\\result` is only allowed in `ensures`".into()),
            Some(Type::Void) => Err("`\\result` in a void function".into()),
            Some(t) => Ok(t),
        },
        ExprKind::Unary(UnOp::Neg, x) => want(x, Type::Int).map(|_| Type::Int),
        ExprKind::Unary(UnOp::Not, x) => want(x, Type::Bool).map(|_| Type::Bool),
        ExprKind::Binary(op, a, b) => {
            if op.is_arith() {
                want(a, Type::Int)?;
                want(b, Type::Int)?;
                Ok(Type::Int)
            } else if matches!(op, BinOp::And | BinOp::Or) {
                want(a, Type::Bool)?;
                want(b, Type::Bool)?;
                Ok(Type::Bool)
            } else if matches!(op, BinOp::Eq | BinOp::Ne) {
                let t = expr_type(a, lookup, result)?;
                want(b, t)?;
                Ok(Type::Bool)
            } else {
                want(a, Type::Int)?;
                want(b, Type::Int)?;
                Ok(Type::Bool)
            }
        }
    }
}

struct Checker<'a> {
    program: &'a Program,
    errors: Vec<TypeError>,
    scopes: Vec<HashMap<String, Type>>,
    all: BTreeMap<String, Type>,
    result: Type,
    calls: BTreeSet<String>,
}

impl Checker<'_> {
    fn err(&mut self, span: Span, msg: impl Into<String>) {
        self.errors.push(TypeError { span, message: msg.into() });
    }

    fn lookup(&self, name: &str) -> Option<Type> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn check_expr(&mut self, e: &Expr, want: Type) {
        let scopes = &self.scopes;
        let lookup = |n: &str| scopes.iter().rev().find_map(|s| s.get(n).copied());
        match expr_type(e, &lookup, None) {
            Ok(t) if t == want => {}
            Ok(t) => {
                let msg = format!("expected {want}, found {t} in `{}`", super::pretty::expr(e));
                self.err(e.span, msg)
            }
            Err(m) => self.err(e.span, m),
        }
    }

    fn declare(&mut self, span: Span, name: &str, ty: Type) {
        if self.lookup(name).is_some() {
            self.err(span, format!("`{name}` is already declared"));
        }
        if matches!(ty, Type::IntArray | Type::Void) {
            self.err(span, format!("local `{name}` must be int or boolean"));
        }
        if let Some(prev) = self.all.get(name) {
            if *prev != ty {
                self.err(span, format!("`{name}` redeclared with a different type"));
            }
        }
        self.all.insert(name.to_string(), ty);
        self.scopes.last_mut().expect("scope").insert(name.to_string(), ty);
    }

    /// Returns whether the statement list always returns.
    fn block(&mut self, stmts: &[Stmt]) -> bool {
        self.scopes.push(HashMap::new());
        let mut returns = false;
        for s in stmts {
            if returns {
                self.err(s.span, "unreachable statement");
                break;
            }
            returns = self.stmt(s);
        }
        self.scopes.pop();
        returns
    }

    fn stmt(&mut self, s: &Stmt) -> bool {
        match &s.kind {
            StmtKind::Decl { name, ty, init } => {
                if let Some(e) = init {
                    self.check_expr(e, *ty);
                }
                self.declare(s.span, name, *ty);
                false
            }
            StmtKind::Assign { name, value } => {
                match self.lookup(name) {
                    None => self.err(s.span, format!("undeclared identifier `{name}`")),
                    Some(Type::IntArray) => self.err(s.span, format!("cannot assign to array `{name}`")),
                    Some(t) => self.check_expr(value, t),
                }
                false
            }
            StmtKind::ArrayAssign { name, index, value } => {
                match self.lookup(name) {
                    Some(Type::IntArray) => {}
                    None => self.err(s.span, format!("undeclared identifier `{name}`")),
                    Some(_) => self.err(s.span, format!("`{name}` is not an array")),
                }
                self.check_expr(index, Type::Int);
                self.check_expr(value, Type::Int);
                false
            }
            StmtKind::If { cond, then, els } => {
                self.check_expr(cond, Type::Bool);
                let rt = self.block(std::slice::from_ref(then));
                let re = match els {
                    Some(e) => self.block(std::slice::from_ref(e)),
                    None => false,
                };
                rt && re
            }
            StmtKind::While { cond, body } => {
                self.check_expr(cond, Type::Bool);
                self.block(std::slice::from_ref(body));
                false
            }
            StmtKind::For { .. } => unreachable!("desugared before checking"),
            StmtKind::Return(e) => {
                match (e, self.result) {
                    (None, Type::Void) => {}
                    (None, t) => self.err(s.span, format!("missing return value of type {t}")),
                    (Some(e), Type::Void) => self.err(e.span, "void function returns a value"),
                    (Some(e), t) => self.check_expr(e, t),
                }
                true
            }
            StmtKind::Call { target, declare, callee, args } => {
                self.call(s.span, callee, args);
                if *declare {
                    self.declare(s.span, target, Type::Int);
                } else {
                    match self.lookup(target) {
                        None => self.err(s.span, format!("undeclared identifier `{target}`")),
                        Some(Type::Int) => {}
                        Some(t) => self.err(s.span, format!("cannot assign an int result to {t} `{target}`")),
                    }
                }
                false
            }
            StmtKind::Block(v) => self.block(v),
        }
    }

    fn call(&mut self, span: Span, callee: &str, args: &[Expr]) {
        self.calls.insert(callee.to_string());
        let Some(f) = self.program.function(callee) else {
            self.err(span, format!("unknown function `{callee}`"));
            return;
        };
        if f.result != Type::Int {
            self.err(span, format!("`{callee}` does not return an int"));
        }
        if f.params.len() != args.len() {
            self.err(span, format!("`{callee}` takes {} arguments, {} given", f.params.len(), args.len()));
            return;
        }
        let params = f.params.clone();
        for (p, a) in params.iter().zip(args) {
            if p.ty == Type::IntArray {
                match &a.kind {
                    ExprKind::Var(n) if self.lookup(n) == Some(Type::IntArray) => {}
                    _ => self.err(a.span, format!("argument for `{}` must be an array name", p.name)),
                }
            } else {
                self.check_expr(a, p.ty);
            }
        }
    }
}

fn check_formula(
    f: &Formula,
    lookup: &dyn Fn(&str) -> Option<Type>,
    result: Option<Type>,
    errors: &mut Vec<TypeError>,
) {
    match f {
        Formula::Atom(e) => match expr_type(e, lookup, result) {
            Ok(Type::Bool) => {}
            Ok(t) => errors.push(TypeError {
                span: e.span,
                message: format!("contract clause must be boolean, found {t} in `{}`", super::pretty::expr(e)),
            }),
            Err(m) => errors.push(TypeError { span: e.span, message: m }),
        },
        Formula::Not(g) => check_formula(g, lookup, result, errors),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_formula(a, lookup, result, errors);
            check_formula(b, lookup, result, errors);
        }
        Formula::ForAll { var, lo, hi, body, span } => {
            if lookup(var).is_some() {
                errors.push(TypeError { span: *span, message: format!("quantified `{var}` shadows a name") });
            }
            for e in [lo, hi] {
                match expr_type(e, lookup, result) {
                    Ok(Type::Int) => {}
                    Ok(t) => errors.push(TypeError { span: e.span, message: format!("range bound must be int, found {t}") }),
                    Err(m) => errors.push(TypeError { span: e.span, message: m }),
                }
            }
            let inner = |n: &str| if n == var { Some(Type::Int) } else { lookup(n) };
            check_formula(body, &inner, result, errors);
        }
        Formula::AllDifferent(a, span) => {
            if lookup(a) != Some(Type::IntArray) {
                errors.push(TypeError { span: *span, message: format!("`\\alldifferent` needs an array, `{a}` is not one") });
            }
        }
    }
}

fn writes_param_array(stmts: &[Stmt], f: &Function) -> Option<Span> {
    stmts.iter().find_map(|s| match &s.kind {
        StmtKind::ArrayAssign { name, .. } if f.param(name).is_some() => Some(s.span),
        StmtKind::Block(v) => writes_param_array(v, f),
        StmtKind::If { then, els, .. } => writes_param_array(std::slice::from_ref(then), f)
            .or_else(|| els.as_ref().and_then(|e| writes_param_array(std::slice::from_ref(e), f))),
        StmtKind::While { body, .. } => writes_param_array(std::slice::from_ref(body), f),
        _ => None,
    })
}

/// Check a parsed program; the result holds its desugared form.
pub fn typecheck(p: &Program) -> Result<TypedProgram, Vec<TypeError>> {
    let p = desugar(p);
    let mut errors = Vec::new();
    let mut locals = BTreeMap::new();
    let mut graph: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for f in &p.functions {
        if !seen.insert(f.name.clone()) {
            errors.push(TypeError { span: f.span, message: format!("function `{}` defined twice", f.name) });
        }
        let mut c = Checker {
            program: &p,
            errors: Vec::new(),
            scopes: vec![HashMap::new()],
            all: BTreeMap::new(),
            result: f.result,
            calls: BTreeSet::new(),
        };
        for prm in &f.params {
            if c.lookup(&prm.name).is_some() {
                c.err(f.span, format!("duplicate parameter `{}`", prm.name));
            }
            if prm.ty == Type::Void {
                c.err(f.span, "void parameter");
            }
            c.scopes[0].insert(prm.name.clone(), prm.ty);
            c.all.insert(prm.name.clone(), prm.ty);
        }
        let returns = c.block(&f.body);
        if !returns && f.result != Type::Void {
            c.err(f.span, format!("`{}` may finish without returning a value", f.name));
        }
        let params: HashMap<String, Type> = f.params.iter().map(|p| (p.name.clone(), p.ty)).collect();
        let lookup = |n: &str| params.get(n).copied();
        for r in &f.contract.requires {
            check_formula(r, &lookup, None, &mut c.errors);
        }
        for e in &f.contract.ensures {
            check_formula(e, &lookup, Some(f.result), &mut c.errors);
        }
        errors.append(&mut c.errors);
        graph.insert(f.name.clone(), c.calls.clone());
        locals.insert(f.name.clone(), c.all);
    }
    // callees are replaced by their contracts, which say nothing about
    // their array arguments afterwards
    let callees: BTreeSet<&String> = graph.values().flatten().collect();
    for f in &p.functions {
        if callees.contains(&f.name) {
            if let Some(span) = writes_param_array(&f.body, f) {
                errors.push(TypeError {
                    span,
                    message: format!("called function `{}` must not write its array parameters", f.name),
                });
            }
        }
    }
    for f in &p.functions {
        let mut stack = vec![(f.name.clone(), 0usize)];
        let mut visited = BTreeSet::new();
        while let Some((g, depth)) = stack.pop() {
            for h in graph.get(&g).into_iter().flatten() {
                if *h == f.name {
                    errors.push(TypeError { span: f.span, message: format!("recursive call to `{}`", f.name) });
                    stack.clear();
                    break;
                }
                if visited.insert(h.clone()) {
                    stack.push((h.clone(), depth + 1));
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(TypedProgram { program: p, locals })
    } else {
        Err(errors)
    }
}
