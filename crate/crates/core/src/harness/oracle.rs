//! Exhaustive concrete checking over small input domains.

use crate::engine::{check_input, Check, EngineError, InstanceParams, InterpError};
use crate::lang::{Type, TypedProgram};
use crate::solver::{DEFAULT_MAX, DEFAULT_MIN};
use crate::translate::Inputs;

pub const DEFAULT_CAP: u128 = 10_000_000;

/// Interpreter steps allowed per concrete run.
const STEPS: u64 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("input space has {size} points, above the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Interp(#[from] InterpError),
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub checked: u64,
    /// Inputs rejected by requires.
    pub vacuous: u64,
    /// Runs that left the integer domain or the step budget.
    pub excluded: u64,
    pub violations: u64,
    pub first: Option<(Inputs, Check)>,
}

impl OracleReport {
    pub fn violated(&self) -> bool {
        self.violations > 0
    }
}

enum Dim {
    Scalar(String),
    Slot(String, usize),
}

/// Enumerate every input of `name` allowed by the lengths and bounds of
/// `inst`, running each through the interpreter.
pub fn check_all(
    p: &TypedProgram,
    name: &str,
    inst: &InstanceParams,
    cap: u128,
) -> Result<OracleReport, OracleError> {
    let f = p.function(name).ok_or_else(|| EngineError::UnknownFunction(name.to_string()))?;
    let mut dims = Vec::new();
    let mut ranges = Vec::new();
    let mut lengths = Vec::new();
    for prm in &f.params {
        let b = inst.bounds.get(&prm.name).copied();
        if let Some((lo, hi)) = b {
            if lo > hi {
                return Err(EngineError::InvalidBounds(prm.name.clone()).into());
            }
        }
        match prm.ty {
            Type::IntArray => {
                let n = *inst
                    .lengths
                    .get(&prm.name)
                    .ok_or_else(|| EngineError::MissingLength(prm.name.clone()))?;
                lengths.push((prm.name.clone(), n));
                for k in 0..n {
                    dims.push(Dim::Slot(prm.name.clone(), k));
                    ranges.push(b.unwrap_or((DEFAULT_MIN, DEFAULT_MAX)));
                }
            }
            Type::Bool => {
                dims.push(Dim::Scalar(prm.name.clone()));
                ranges.push(b.unwrap_or((0, 1)));
            }
            _ => {
                dims.push(Dim::Scalar(prm.name.clone()));
                ranges.push(b.unwrap_or((DEFAULT_MIN, DEFAULT_MAX)));
            }
        }
    }
    let size = ranges
        .iter()
        .try_fold(1u128, |acc, &(lo, hi)| acc.checked_mul((hi as i128 - lo as i128 + 1) as u128))
        .unwrap_or(u128::MAX);
    if size > cap {
        return Err(OracleError::CapExceeded { size, cap });
    }

    let mut report = OracleReport::default();
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let inputs = assemble(&dims, &cur, &lengths);
        let c = check_input(p, name, &inputs, STEPS)?;
        report.checked += 1;
        match &c {
            Check::Vacuous => report.vacuous += 1,
            Check::Excluded(_) => report.excluded += 1,
            c if c.is_violation() => {
                report.violations += 1;
                if report.first.is_none() {
                    report.first = Some((inputs, c.clone()));
                }
            }
            _ => {}
        }
        // odometer, last dimension fastest
        let mut k = cur.len();
        loop {
            if k == 0 {
                return Ok(report);
            }
            k -= 1;
            if cur[k] < ranges[k].1 {
                cur[k] += 1;
                break;
            }
            cur[k] = ranges[k].0;
        }
    }
}

fn assemble(dims: &[Dim], vals: &[i64], lengths: &[(String, usize)]) -> Inputs {
    let mut inputs = Inputs {
        scalars: Vec::new(),
        arrays: lengths.iter().map(|(n, len)| (n.clone(), vec![0; *len])).collect(),
    };
    for (d, &v) in dims.iter().zip(vals) {
        match d {
            Dim::Scalar(n) => inputs.scalars.push((n.clone(), v)),
            Dim::Slot(n, k) => {
                if let Some((_, a)) = inputs.arrays.iter_mut().find(|(m, _)| m == n) {
                    a[*k] = v;
                }
            }
        }
    }
    inputs
}
