//! Helpers shared by several test targets.

#![allow(dead_code)]

pub mod props;

use bpv::engine::{verify_function, InstanceParams};
use bpv::harness::corpus::{Entry, Size, CORPUS};
use bpv::harness::oracle::{check_all, DEFAULT_CAP};
use bpv::lang::{load, Type};

/// One small instance compared against the brute-force oracle.
#[derive(Debug)]
pub struct Comparison {
    pub program: &'static str,
    pub size: Option<usize>,
    pub verdict: &'static str,
    pub oracle_violated: bool,
    pub runs: u64,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        match self.verdict {
            "Verified" => !self.oracle_violated,
            "Counterexample" => self.oracle_violated,
            _ => false,
        }
    }
}

/// Every scalar and slot in `0..=4`; lengths `0..=4` for array programs,
/// bound sizes `0..=4` for bounded scalars.
pub fn small_instances(e: &Entry) -> Vec<(Option<usize>, InstanceParams)> {
    let p = load(e.source).unwrap();
    let f = e.entry.map_or_else(|| p.entry(), |n| p.function(n).unwrap());
    let mut base = InstanceParams::new();
    for prm in &f.params {
        if prm.ty != Type::Bool {
            base = base.bound(&prm.name, 0, 4);
        }
    }
    match e.size {
        Size::Fixed => vec![(None, base)],
        _ => (0..=4).map(|n| (Some(n), e.instance(Some(n), &base))).collect(),
    }
}

pub fn compare(e: &Entry) -> Vec<Comparison> {
    let p = load(e.source).unwrap();
    let f = e.entry.map_or_else(|| p.entry().name.clone(), str::to_string);
    small_instances(e)
        .into_iter()
        .map(|(size, inst)| {
            let o = verify_function(&p, &f, &inst).unwrap();
            let r = check_all(&p, &f, &inst, DEFAULT_CAP).unwrap();
            assert_eq!(r.excluded, 0, "{} {size:?}: runs left the domain", e.name);
            Comparison { program: e.name, size, verdict: o.verdict.label(), oracle_violated: r.violated(), runs: r.checked }
        })
        .collect()
}

pub fn compare_corpus() -> Vec<Comparison> {
    CORPUS.iter().flat_map(compare).collect()
}

fn int(s: &str) -> Option<i64> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then(|| s.parse().ok()).flatten()
}

fn ident(s: &str) -> bool {
    let mut b = s.bytes();
    matches!(b.next(), Some(c) if c.is_ascii_alphabetic() || c == b'_') && b.all(|c| c.is_ascii_alphanumeric() || c == b'_')
}

/// `<ident>_<version>[<slot>]?[<lo>:<hi>] : <value>|[<lo2>..<hi2>]`
pub fn trace_line_ok(line: &str) -> bool {
    let Some((head, value)) = line.split_once(" : ") else { return false };
    let value_ok = match value.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
        Some(r) => r.split_once("..").is_some_and(|(a, b)| int(a).is_some() && int(b).is_some()),
        None => int(value).is_some(),
    };
    let Some(open) = head.find('[') else { return false };
    let (name, rest) = head.split_at(open);
    let name_ok = name.rsplit_once('_').is_some_and(|(id, v)| ident(id) && int(v).is_some_and(|v| v >= 0) && !v.starts_with('-'));
    let groups: Vec<&str> = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')).map(|r| r.split("][").collect()).unwrap_or_default();
    let groups_ok = match groups.as_slice() {
        [range] => range.split_once(':').is_some_and(|(a, b)| int(a).is_some() && int(b).is_some()),
        [slot, range] => {
            slot.bytes().all(|b| b.is_ascii_digit()) && !slot.is_empty()
                && range.split_once(':').is_some_and(|(a, b)| int(a).is_some() && int(b).is_some())
        }
        _ => false,
    };
    value_ok && name_ok && groups_ok
}

/// A whole trace: header, then only grammar lines.
pub fn trace_ok(trace: &str) -> Result<(), String> {
    let mut lines = trace.lines();
    if lines.next() != Some("Counter-example found") {
        return Err("missing header".into());
    }
    let mut n = 0;
    for l in lines {
        if !trace_line_ok(l) {
            return Err(format!("bad line `{l}`"));
        }
        n += 1;
    }
    if n == 0 {
        return Err("no entries".into());
    }
    Ok(())
}
