//! Constraint vocabulary of the store.

use std::fmt;

/// Handle to a store variable. Carries the owning store's tag so that a
/// variable from another store is rejected instead of silently aliased.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub(crate) store: u32,
    pub(crate) index: u32,
}

impl VarId {
    pub fn index(self) -> usize {
        self.index as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.index)
    }
}

/// Relation of a linear constraint `Σ cᵢ·xᵢ ⋈ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Le,
    Eq,
    Ne,
}

/// `Σ coef·var  rel  rhs`, terms sorted by variable with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Linear {
    pub terms: Vec<(i64, VarId)>,
    pub rel: Rel,
    pub rhs: i64,
}

impl Linear {
    pub fn new(terms: impl IntoIterator<Item = (i64, VarId)>, rel: Rel, rhs: i64) -> Self {
        let mut terms: Vec<(i64, VarId)> = terms.into_iter().collect();
        terms.sort_by_key(|&(_, v)| v);
        let mut merged: Vec<(i64, VarId)> = Vec::with_capacity(terms.len());
        for (c, v) in terms {
            match merged.last_mut() {
                Some((c0, v0)) if *v0 == v => *c0 += c,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|&(c, _)| c != 0);
        Linear { terms: merged, rel, rhs }
    }

    /// `x - y rel c`
    pub fn diff(x: VarId, y: VarId, rel: Rel, c: i64) -> Self {
        Linear::new([(1, x), (-1, y)], rel, c)
    }

    /// The logical negation over the integers.
    pub fn negated(&self) -> Linear {
        match self.rel {
            // ¬(Σ ≤ c)  ⇔  -Σ ≤ -c-1
            Rel::Le => Linear {
                terms: self.terms.iter().map(|&(c, v)| (-c, v)).collect(),
                rel: Rel::Le,
                rhs: -self.rhs - 1,
            },
            Rel::Eq => Linear { rel: Rel::Ne, ..self.clone() },
            Rel::Ne => Linear { rel: Rel::Eq, ..self.clone() },
        }
    }

    pub fn holds(&self, value: impl Fn(VarId) -> i64) -> bool {
        let lhs: i128 = self.terms.iter().map(|&(c, v)| c as i128 * value(v) as i128).sum();
        let rhs = self.rhs as i128;
        match self.rel {
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ne => lhs != rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
}

/// Constraints understood by the store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Linear(Linear),
    /// `x · y = z`
    Mult { x: VarId, y: VarId, z: VarId },
    /// `x / y = z`, truncating toward zero; `y ≠ 0`.
    Div { x: VarId, y: VarId, z: VarId },
    /// `table[index] = value`
    Element { index: VarId, table: Vec<VarId>, value: VarId },
    AllDifferent(Vec<VarId>),
    /// `b ⇔ lin`, with `b ∈ {0,1}`.
    Reif { b: VarId, lin: Linear },
    /// `b ⇔ op(args)` over 0/1 variables.
    Bool { b: VarId, op: BoolOp, args: Vec<VarId> },
    NotEq(VarId, VarId),
}

impl Constraint {
    pub fn vars(&self) -> Vec<VarId> {
        match self {
            Constraint::Linear(l) => l.terms.iter().map(|&(_, v)| v).collect(),
            Constraint::Mult { x, y, z } | Constraint::Div { x, y, z } => vec![*x, *y, *z],
            Constraint::Element { index, table, value } => {
                let mut vs = Vec::with_capacity(table.len() + 2);
                vs.push(*index);
                vs.extend_from_slice(table);
                vs.push(*value);
                vs
            }
            Constraint::AllDifferent(vs) => vs.clone(),
            Constraint::Reif { b, lin } => {
                let mut vs = vec![*b];
                vs.extend(lin.terms.iter().map(|&(_, v)| v));
                vs
            }
            Constraint::Bool { b, args, .. } => {
                let mut vs = vec![*b];
                vs.extend_from_slice(args);
                vs
            }
            Constraint::NotEq(x, y) => vec![*x, *y],
        }
    }

    /// Evaluate under a total assignment.
    pub fn is_satisfied(&self, value: impl Fn(VarId) -> i64) -> bool {
        match self {
            Constraint::Linear(l) => l.holds(value),
            Constraint::Mult { x, y, z } => {
                value(*x) as i128 * value(*y) as i128 == value(*z) as i128
            }
            Constraint::Div { x, y, z } => {
                let d = value(*y);
                d != 0 && value(*x) / d == value(*z)
            }
            Constraint::Element { index, table, value: v } => {
                let i = value(*index);
                i >= 0 && (i as usize) < table.len() && value(table[i as usize]) == value(*v)
            }
            Constraint::AllDifferent(vs) => {
                let mut vals: Vec<i64> = vs.iter().map(|&v| value(v)).collect();
                vals.sort_unstable();
                vals.windows(2).all(|w| w[0] != w[1])
            }
            Constraint::Reif { b, lin } => {
                let bv = value(*b);
                (bv == 0 || bv == 1) && (bv == 1) == lin.holds(&value)
            }
            Constraint::Bool { b, op, args } => {
                let bv = value(*b);
                let vals: Vec<i64> = args.iter().map(|&a| value(a)).collect();
                if !(0..=1).contains(&bv) || vals.iter().any(|&a| !(0..=1).contains(&a)) {
                    return false;
                }
                let r = match op {
                    BoolOp::And => vals.iter().all(|&a| a == 1),
                    BoolOp::Or => vals.contains(&1),
                };
                r == (bv == 1)
            }
            Constraint::NotEq(x, y) => value(*x) != value(*y),
        }
    }
}
