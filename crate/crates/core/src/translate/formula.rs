//! Contract formulas: asserted, reified, or split into negated cases.

use super::{BoolRep, Ctx, Lin, Scope, TResult, TranslateError};
use crate::lang::{ExprKind, Formula, Span};
use crate::solver::{BoolOp, Constraint, Linear, Rel};

/// Quantifier instances expanded under a non-constant bound, at most.
const GUARDED_CAP: i128 = 10_000;

/// One conjunct of an ensures clause, possibly a single instance of a
/// quantified conjunct.
#[derive(Clone, Debug)]
pub struct Case<'f> {
    pub formula: &'f Formula,
    pub bound: Vec<(String, i64)>,
}

enum Range {
    Const(i64, i64),
    /// Candidate values `from..to`, each guarded by `lo <= k < hi`.
    Guarded { lo: Lin, hi: Lin, from: i64, to: i64 },
}

impl Ctx {
    fn range(&mut self, sc: &Scope, lo: &crate::lang::Expr, hi: &crate::lang::Expr, span: Span) -> TResult<Range> {
        let lo = self.int_expr(sc, lo)?;
        let lo = self.fold(lo)?;
        let hi = self.int_expr(sc, hi)?;
        let hi = self.fold(hi)?;
        if let (Some(a), Some(b)) = (lo.as_const(), hi.as_const()) {
            return Ok(Range::Const(a, b));
        }
        let from = self.lin_bounds(&lo).0;
        let to = self.lin_bounds(&hi).1;
        if to - from > GUARDED_CAP {
            return Err(TranslateError::NonConstantQuantifierBound(span));
        }
        Ok(Range::Guarded { lo, hi, from: from as i64, to: to as i64 })
    }

    /// `lo <= k && k < hi`
    fn guard(&mut self, lo: &Lin, hi: &Lin, k: i64) -> TResult<BoolRep> {
        let a = lo.clone().add(Lin::constant(k), -1)?;
        let a = self.reify(Linear::new(a.terms.iter().copied(), Rel::Le, -a.c))?;
        let b = Lin::constant(k + 1).add(hi.clone(), -1)?;
        let b = self.reify(Linear::new(b.terms.iter().copied(), Rel::Le, -b.c))?;
        self.bool_op(BoolOp::And, vec![a, b])
    }

    /// Post `f` (or its negation) without a literal for the whole formula.
    pub fn assert_formula(&mut self, sc: &Scope, f: &Formula, pos: bool) -> TResult<()> {
        match f {
            Formula::Atom(e) => match &e.kind {
                ExprKind::Binary(op, a, b) if op.is_comparison() => {
                    let lin = self.comparison(sc, *op, a, b)?;
                    let lin = if pos { lin } else { lin.negated() };
                    let lin = self.fold_linear(lin);
                    if lin.terms.is_empty() {
                        return if lin.holds(|_| 0) { Ok(()) } else { Err(TranslateError::Infeasible) };
                    }
                    self.post(Constraint::Linear(lin))
                }
                _ => {
                    let b = self.bool_expr(sc, e)?;
                    self.fix_bool(b, pos)
                }
            },
            Formula::Not(g) => self.assert_formula(sc, g, !pos),
            Formula::And(a, b) if pos => {
                self.assert_formula(sc, a, true)?;
                self.assert_formula(sc, b, true)
            }
            Formula::Or(a, b) if !pos => {
                self.assert_formula(sc, a, false)?;
                self.assert_formula(sc, b, false)
            }
            Formula::Implies(a, b) if !pos => {
                self.assert_formula(sc, a, true)?;
                self.assert_formula(sc, b, false)
            }
            Formula::And(a, b) => {
                let (x, y) = (self.reify_formula(sc, a)?, self.reify_formula(sc, b)?);
                let (x, y) = (self.not(x)?, self.not(y)?);
                self.assert_op(BoolOp::Or, vec![x, y])
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.reify_formula(sc, a)?, self.reify_formula(sc, b)?);
                self.assert_op(BoolOp::Or, vec![x, y])
            }
            Formula::Implies(a, b) => {
                let x = self.reify_formula(sc, a)?;
                let x = self.not(x)?;
                let y = self.reify_formula(sc, b)?;
                self.assert_op(BoolOp::Or, vec![x, y])
            }
            Formula::ForAll { var, lo, hi, body, span } => match (self.range(sc, lo, hi, *span)?, pos) {
                (Range::Const(a, b), true) => {
                    for k in a..b {
                        self.assert_formula(&sc.with(var, k), body, true)?;
                    }
                    Ok(())
                }
                (Range::Const(a, b), false) => {
                    let mut args = Vec::new();
                    for k in a..b {
                        let r = self.reify_formula(&sc.with(var, k), body)?;
                        args.push(self.not(r)?);
                    }
                    self.assert_op(BoolOp::Or, args)
                }
                (Range::Guarded { lo, hi, from, to }, true) => {
                    for k in from..to {
                        let g = self.guard(&lo, &hi, k)?;
                        match self.bool_value(g) {
                            Some(false) => {}
                            Some(true) => self.assert_formula(&sc.with(var, k), body, true)?,
                            None => {
                                let ng = self.not(g)?;
                                let r = self.reify_formula(&sc.with(var, k), body)?;
                                self.assert_op(BoolOp::Or, vec![ng, r])?;
                            }
                        }
                    }
                    Ok(())
                }
                (Range::Guarded { lo, hi, from, to }, false) => {
                    let mut args = Vec::new();
                    for k in from..to {
                        let g = self.guard(&lo, &hi, k)?;
                        if self.bool_value(g) == Some(false) {
                            continue;
                        }
                        let r = self.reify_formula(&sc.with(var, k), body)?;
                        let nr = self.not(r)?;
                        args.push(self.bool_op(BoolOp::And, vec![g, nr])?);
                    }
                    self.assert_op(BoolOp::Or, args)
                }
            },
            Formula::AllDifferent(a, _) => {
                let slots = sc.array(a)?.slots.clone();
                if pos {
                    if slots.len() < 2 {
                        return Ok(());
                    }
                    self.post(Constraint::AllDifferent(slots))
                } else {
                    let mut args = Vec::new();
                    for i in 0..slots.len() {
                        for j in i + 1..slots.len() {
                            args.push(self.reify(Linear::diff(slots[i], slots[j], Rel::Eq, 0))?);
                        }
                    }
                    self.assert_op(BoolOp::Or, args)
                }
            }
        }
    }

    /// A literal equivalent to `f`.
    pub fn reify_formula(&mut self, sc: &Scope, f: &Formula) -> TResult<BoolRep> {
        match f {
            Formula::Atom(e) => self.bool_expr(sc, e),
            Formula::Not(g) => {
                let r = self.reify_formula(sc, g)?;
                self.not(r)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let x = self.reify_formula(sc, a)?;
                let y = self.reify_formula(sc, b)?;
                let op = if matches!(f, Formula::And(..)) { BoolOp::And } else { BoolOp::Or };
                self.bool_op(op, vec![x, y])
            }
            Formula::Implies(a, b) => {
                let x = self.reify_formula(sc, a)?;
                let x = self.not(x)?;
                let y = self.reify_formula(sc, b)?;
                self.bool_op(BoolOp::Or, vec![x, y])
            }
            Formula::ForAll { var, lo, hi, body, span } => {
                let mut args = Vec::new();
                match self.range(sc, lo, hi, *span)? {
                    Range::Const(a, b) => {
                        for k in a..b {
                            args.push(self.reify_formula(&sc.with(var, k), body)?);
                        }
                    }
                    Range::Guarded { lo, hi, from, to } => {
                        for k in from..to {
                            let g = self.guard(&lo, &hi, k)?;
                            if self.bool_value(g) == Some(false) {
                                continue;
                            }
                            let ng = self.not(g)?;
                            let r = self.reify_formula(&sc.with(var, k), body)?;
                            args.push(self.bool_op(BoolOp::Or, vec![ng, r])?);
                        }
                    }
                }
                self.bool_op(BoolOp::And, args)
            }
            Formula::AllDifferent(a, _) => {
                let slots = sc.array(a)?.slots.clone();
                let mut args = Vec::new();
                for i in 0..slots.len() {
                    for j in i + 1..slots.len() {
                        args.push(self.reify(Linear::diff(slots[i], slots[j], Rel::Ne, 0))?);
                    }
                }
                self.bool_op(BoolOp::And, args)
            }
        }
    }

    /// Split ensures clauses into conjuncts; a quantified conjunct with
    /// constant bounds yields one case per instance.
    pub fn cases<'f>(&mut self, sc: &Scope, ensures: &'f [Formula]) -> TResult<Vec<Case<'f>>> {
        let mut out = Vec::new();
        for f in ensures {
            self.split(sc, f, &mut out)?;
        }
        Ok(out)
    }

    fn split<'f>(&mut self, sc: &Scope, f: &'f Formula, out: &mut Vec<Case<'f>>) -> TResult<()> {
        for c in f.conjuncts() {
            if let Formula::ForAll { var, lo, hi, body, span } = c {
                if let Range::Const(a, b) = self.range(sc, lo, hi, *span)? {
                    for k in a..b {
                        self.split(&sc.with(var, k), body, out)?;
                    }
                    continue;
                }
            }
            out.push(Case { formula: c, bound: sc.bound.clone() });
        }
        Ok(())
    }

    /// Post the negation of one case.
    pub fn assert_case(&mut self, sc: &Scope, case: &Case) -> TResult<()> {
        let mut sc = sc.clone();
        sc.bound = case.bound.clone();
        self.assert_formula(&sc, case.formula, false)
    }
}
