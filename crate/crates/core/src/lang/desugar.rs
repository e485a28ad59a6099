use super::ast::*;

/// Rewrite every `for` into a block holding the initialiser and a `while`
/// whose body runs the original body then the step.
pub fn desugar(p: &Program) -> Program {
    let functions = p
        .functions
        .iter()
        .map(|f| Function { body: f.body.iter().map(stmt).collect(), ..f.clone() })
        .collect();
    Program { class: p.class.clone(), functions }
}

fn stmt(s: &Stmt) -> Stmt {
    let kind = match &s.kind {
        StmtKind::Block(v) => StmtKind::Block(v.iter().map(stmt).collect()),
        StmtKind::If { cond, then, els } => StmtKind::If {
            cond: cond.clone(),
            then: Box::new(stmt(then)),
            els: els.as_ref().map(|e| Box::new(stmt(e))),
        },
        StmtKind::While { cond, body } => {
            StmtKind::While { cond: cond.clone(), body: Box::new(stmt(body)) }
        }
        StmtKind::For { init, cond, step, body } => {
            let mut inner = vec![stmt(body)];
            inner.extend(step.as_ref().map(|st| stmt(st)));
            let cond = cond.clone().unwrap_or_else(|| Expr::new(ExprKind::Bool(true), s.span));
            let looped = Stmt::new(
                StmtKind::While { cond, body: Box::new(Stmt::new(StmtKind::Block(inner), s.span)) },
                s.span,
            );
            let mut outer: Vec<Stmt> = init.iter().map(|i| stmt(i)).collect();
            outer.push(looped);
            StmtKind::Block(outer)
        }
        k => k.clone(),
    };
    Stmt::new(kind, s.span)
}
