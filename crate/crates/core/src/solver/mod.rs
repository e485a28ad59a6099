//! Finite-domain constraint store, propagators and labeling.

mod constraint;
mod domain;
mod propagators;
mod relational;
mod search;
mod simplex;
mod store;

use std::fmt;

pub use constraint::{BoolOp, Constraint, Linear, Rel, VarId};
pub use domain::{Domain, Empty, DEFAULT_MAX, DEFAULT_MIN, HOLE_CAP};
pub use search::{solve, Assignment, Limits, SearchStats, ENUMERATE_BELOW};
pub use store::{Consistency, Mark, Store, StoreConfig, StoreStats};

/// Which resource ran out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    Nodes,
    Time,
    Unwind,
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Budget::Nodes => "node budget",
            Budget::Time => "time budget",
            Budget::Unwind => "unwind budget",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid domain [{lo}:{hi}]")]
    InvalidDomain { lo: i64, hi: i64 },
    #[error("variable {0} does not belong to this store")]
    ForeignVariable(VarId),
    #[error("choice points popped out of order (top is {expected}, got {got})")]
    MarkOrderViolation { expected: usize, got: usize },
    #[error("{0} exhausted")]
    ResourceExceeded(Budget),
}
