//! Benchmark runs and their report.

use std::fmt::Write as _;

use super::corpus::{Entry, Size};
use crate::engine::{verify_function, InstanceParams, Verdict};
use crate::lang;

#[derive(Clone, Debug)]
pub struct Row {
    pub benchmark: String,
    /// Array length or scalar bound; `None` for fixed programs.
    pub length: Option<usize>,
    /// Verdict label, or `Error` when the run could not start.
    pub verdict: String,
    pub expected: &'static str,
    pub paths: Option<u64>,
    pub nodes: u64,
    pub ms: f64,
}

impl Row {
    pub fn matches(&self) -> bool {
        self.verdict == self.expected
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn mismatches(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.matches())
    }

    pub fn all_match(&self) -> bool {
        self.mismatches().next().is_none()
    }

    pub fn tsv(&self) -> String {
        let mut s = String::from("benchmark\tlength\tverdict\tpaths\tnodes\tms\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{:.1}",
                r.benchmark,
                opt(r.length),
                r.verdict,
                opt(r.paths),
                r.nodes,
                r.ms
            );
        }
        s
    }

    /// Aligned table; mismatching rows are flagged.
    pub fn table(&self) -> String {
        let head = ["benchmark", "length", "verdict", "paths", "nodes", "ms", ""];
        let cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.benchmark.clone(),
                    opt(r.length),
                    r.verdict.clone(),
                    opt(r.paths),
                    r.nodes.to_string(),
                    format!("{:.1}", r.ms),
                    if r.matches() { String::new() } else { format!("expected {}", r.expected) },
                ]
            })
            .collect();
        let mut w = head.map(str::len);
        for c in &cells {
            for (k, x) in c.iter().enumerate() {
                w[k] = w[k].max(x.len());
            }
        }
        let mut s = String::new();
        let mut line = |c: &[&str]| {
            let mut l = String::new();
            for (k, x) in c.iter().enumerate() {
                if k == 0 || k == 2 || k == 6 {
                    let _ = write!(l, "{:<w$}  ", x, w = w[k]);
                } else {
                    let _ = write!(l, "{:>w$}  ", x, w = w[k]);
                }
            }
            s.push_str(l.trim_end());
            s.push('\n');
        };
        line(&head);
        for c in &cells {
            line(&c.each_ref().map(String::as_str));
        }
        s
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Run one benchmark instance.
pub fn run(e: &Entry, size: Option<usize>, base: &InstanceParams) -> Row {
    let size = match e.size {
        Size::Fixed => None,
        _ => size,
    };
    let mut row = Row {
        benchmark: e.name.to_string(),
        length: size,
        verdict: "Error".to_string(),
        expected: e.expected.label(),
        paths: None,
        nodes: 0,
        ms: 0.0,
    };
    let Ok(p) = lang::load(e.source) else { return row };
    let name = e.entry.map_or_else(|| p.entry().name.clone(), str::to_string);
    let inst = e.instance(size, base);
    if let Ok(o) = verify_function(&p, &name, &inst) {
        row.verdict = o.verdict.label().to_string();
        if let Verdict::Verified { feasible_paths, .. } = o.verdict {
            row.paths = Some(feasible_paths);
        }
        row.nodes = o.stats.nodes;
        row.ms = o.elapsed.as_secs_f64() * 1000.0;
    }
    row
}

/// Run every entry at `sizes`, or at its default sizes when `sizes` is
/// empty. Fixed programs run once.
pub fn run_suite(entries: &[&Entry], sizes: &[usize], base: &InstanceParams) -> Report {
    let mut report = Report::default();
    for e in entries {
        let sizes: Vec<Option<usize>> = match e.size {
            Size::Fixed => vec![None],
            _ if !sizes.is_empty() => sizes.iter().copied().map(Some).collect(),
            _ => e.sizes.iter().copied().map(Some).collect(),
        };
        for s in sizes {
            report.rows.push(run(e, s, base));
        }
    }
    report
}
