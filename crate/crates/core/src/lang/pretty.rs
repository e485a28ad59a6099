//! Source printer. Its output parses back to an equal tree.

use std::fmt::Write;

use super::ast::*;

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne => 3,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
        BinOp::Add | BinOp::Sub => 5,
        BinOp::Mul | BinOp::Div => 6,
    }
}

pub fn expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    match &e.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Var(n) => out.push_str(n),
        ExprKind::Index(a, i) => {
            out.push_str(a);
            out.push('[');
            write_expr(out, i, 0);
            out.push(']');
        }
        ExprKind::Length(a) => {
            let _ = write!(out, "{a}.length");
        }
        ExprKind::Result => out.push_str("\\result"),
        ExprKind::Unary(op, x) => {
            out.push(if *op == UnOp::Neg { '-' } else { '!' });
            // `-(3)` must not fold into the literal `-3`
            let atomic = matches!(
                x.kind,
                ExprKind::Var(_) | ExprKind::Index(..) | ExprKind::Length(_) | ExprKind::Result | ExprKind::Bool(_)
            );
            if atomic {
                write_expr(out, x, 7);
            } else {
                out.push('(');
                write_expr(out, x, 0);
                out.push(')');
            }
        }
        ExprKind::Binary(op, a, b) => {
            let p = prec(*op);
            let paren = p < min_prec;
            if paren {
                out.push('(');
            }
            // left-associative; relational operators do not chain at all
            let (lp, rp) = if p == 4 || p == 3 { (p + 1, p + 1) } else { (p, p + 1) };
            write_expr(out, a, lp);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, b, rp);
            if paren {
                out.push(')');
            }
        }
    }
}

pub fn formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f);
    s
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Atom(e) => {
            out.push('(');
            write_expr(out, e, 0);
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str("!(");
            write_formula(out, g);
            out.push(')');
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let op = match f {
                Formula::And(..) => "&&",
                Formula::Or(..) => "||",
                _ => "==>",
            };
            out.push('(');
            write_formula(out, a);
            let _ = write!(out, " {op} ");
            write_formula(out, b);
            out.push(')');
        }
        Formula::ForAll { var, lo, hi, body, .. } => {
            let _ = write!(out, "(\\forall int {var}; {} <= {var} && {var} < {}; ", expr(lo), expr(hi));
            write_formula(out, body);
            out.push(')');
        }
        Formula::AllDifferent(a, _) => {
            let _ = write!(out, "\\alldifferent {a}");
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn simple(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Decl { name, ty, init: None } => format!("{ty} {name}"),
        StmtKind::Decl { name, ty, init: Some(e) } => format!("{ty} {name} = {}", expr(e)),
        StmtKind::Assign { name, value } => format!("{name} = {}", expr(value)),
        StmtKind::ArrayAssign { name, index, value } => {
            format!("{name}[{}] = {}", expr(index), expr(value))
        }
        StmtKind::Call { target, declare, callee, args } => {
            let args: Vec<String> = args.iter().map(expr).collect();
            let decl = if *declare { "int " } else { "" };
            format!("{decl}{target} = {callee}({})", args.join(", "))
        }
        _ => unreachable!("not a simple statement"),
    }
}

fn write_stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    write_stmt_inline(out, s, depth);
}

/// Print `s` assuming the indentation is already written.
fn write_stmt_inline(out: &mut String, s: &Stmt, depth: usize) {
    match &s.kind {
        StmtKind::Block(v) => {
            out.push_str("{\n");
            for t in v {
                write_stmt(out, t, depth + 1);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
        StmtKind::If { cond, then, els } => {
            let _ = write!(out, "if ({}) ", expr(cond));
            write_body(out, then, depth);
            if let Some(e) = els {
                indent(out, depth);
                out.push_str("else ");
                write_body(out, e, depth);
            }
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while ({}) ", expr(cond));
            write_body(out, body, depth);
        }
        StmtKind::For { init, cond, step, body } => {
            let i = init.as_ref().map(|s| simple(s)).unwrap_or_default();
            let c = cond.as_ref().map(expr).unwrap_or_default();
            let st = step.as_ref().map(|s| simple(s)).unwrap_or_default();
            let _ = write!(out, "for ({i}; {c}; {st}) ");
            write_body(out, body, depth);
        }
        StmtKind::Return(None) => out.push_str("return;\n"),
        StmtKind::Return(Some(e)) => {
            let _ = writeln!(out, "return {};", expr(e));
        }
        _ => {
            out.push_str(&simple(s));
            out.push_str(";\n");
        }
    }
}

fn write_body(out: &mut String, s: &Stmt, depth: usize) {
    if matches!(s.kind, StmtKind::Block(_)) {
        write_stmt_inline(out, s, depth);
    } else {
        out.push('\n');
        write_stmt(out, s, depth + 1);
    }
}

pub fn function(f: &Function, depth: usize) -> String {
    let mut out = String::new();
    let c = &f.contract;
    if !c.requires.is_empty() || !c.ensures.is_empty() {
        indent(&mut out, depth);
        out.push_str("/*@");
        let mut first = true;
        for (kw, fs) in [("requires", &c.requires), ("ensures", &c.ensures)] {
            for g in fs {
                if !first {
                    indent(&mut out, depth);
                    out.push_str("  @");
                }
                first = false;
                let _ = writeln!(out, " {kw} {};", formula(g));
            }
        }
        indent(&mut out, depth);
        out.push_str("  @*/\n");
    }
    indent(&mut out, depth);
    let params: Vec<String> = f.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
    let _ = writeln!(out, "{} {}({}) {{", f.result, f.name, params.join(", "));
    for s in &f.body {
        write_stmt(&mut out, s, depth + 1);
    }
    indent(&mut out, depth);
    out.push_str("}\n");
    out
}

pub fn program(p: &Program) -> String {
    let mut out = String::new();
    let depth = usize::from(p.class.is_some());
    if let Some(c) = &p.class {
        let _ = writeln!(out, "class {c} {{");
    }
    for (i, f) in p.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&function(f, depth));
    }
    if p.class.is_some() {
        out.push_str("}\n");
    }
    out
}
