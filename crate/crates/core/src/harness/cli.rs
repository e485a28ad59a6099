//! The `bpv` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{bench, corpus, oracle};
use crate::engine::{verify_function, Check, InstanceParams, Verdict};
use crate::lang::{self, TypedProgram};

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bpv", version, about = "Bounded verification of annotated programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Verify one program within the given bounds.
    Verify {
        /// Program file, or the name of a corpus program.
        file: PathBuf,
        #[command(flatten)]
        inst: InstArgs,
        #[arg(long)]
        max_unwind: Option<u32>,
        #[arg(long)]
        budget_nodes: Option<u64>,
        #[arg(long)]
        budget_ms: Option<u64>,
        /// Also print the branch decisions of a counterexample path.
        #[arg(long)]
        trace: bool,
        /// Print the number of feasible paths.
        #[arg(long)]
        paths: bool,
    },
    /// Run corpus benchmarks and compare verdicts with the expected ones.
    Bench {
        /// `all`, a corpus name, or one of tritype, bsearch, bsearchKO,
        /// bubble, selection. Repeatable.
        #[arg(long, default_value = "all")]
        suite: Vec<String>,
        /// Instance sizes, e.g. 8,16,32.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Enumerate every input concretely and look for a contract violation.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        inst: InstArgs,
        /// Largest input space enumerated.
        #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
        cap: u128,
    },
}

#[derive(Args, Debug)]
struct InstArgs {
    /// Function to check; the first one in the file by default.
    #[arg(long)]
    entry: Option<String>,
    /// Array length, `name=N`.
    #[arg(long = "len", value_parser = parse_len)]
    lens: Vec<(String, usize)>,
    /// Input domain, `name=lo..hi`; for an array it bounds every slot.
    #[arg(long = "bound", value_parser = parse_bound)]
    bounds: Vec<(String, (i64, i64))>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

fn parse_len(s: &str) -> Result<(String, usize), String> {
    let (n, v) = s.split_once('=').ok_or("expected name=N")?;
    let v = v.trim().parse().map_err(|e| format!("bad length `{v}`: {e}"))?;
    Ok((n.trim().to_string(), v))
}

fn parse_bound(s: &str) -> Result<(String, (i64, i64)), String> {
    let (n, v) = s.split_once('=').ok_or("expected name=lo..hi")?;
    let (lo, hi) = v.split_once("..").ok_or("expected name=lo..hi")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad bound `{lo}`: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad bound `{hi}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((n.trim().to_string(), (lo, hi)))
}

impl InstArgs {
    fn params(&self) -> InstanceParams {
        let mut inst = InstanceParams::new();
        for (n, l) in &self.lens {
            inst = inst.len(n, *l);
        }
        for (n, (lo, hi)) in &self.bounds {
            inst = inst.bound(n, *lo, *hi);
        }
        inst
    }
}

/// Read a program from disk, falling back to the embedded corpus.
fn load(path: &PathBuf) -> Result<(TypedProgram, Option<&'static str>), String> {
    let (src, entry) = match std::fs::read_to_string(path) {
        Ok(s) => (s, None),
        Err(e) => {
            let name = path.to_string_lossy();
            match corpus::by_file(&name) {
                Some(c) => (c.source.to_string(), c.entry),
                None => return Err(format!("{}: {e}", path.display())),
            }
        }
    };
    let p = lang::load(&src).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((p, entry))
}

fn function(p: &TypedProgram, flag: &Option<String>, default: Option<&str>) -> String {
    flag.clone()
        .or_else(|| default.map(str::to_string))
        .unwrap_or_else(|| p.entry().name.clone())
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    match cli.cmd {
        Cmd::Verify { file, inst, max_unwind, budget_nodes, budget_ms, trace, paths } => {
            let (p, default) = match load(&file) {
                Ok(x) => x,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_USAGE;
                }
            };
            let mut params = inst.params();
            params.max_unwind = max_unwind;
            params.max_nodes = budget_nodes;
            params.budget = budget_ms.map(Duration::from_millis);
            let name = function(&p, &inst.entry, default);
            let o = match verify_function(&p, &name, &params) {
                Ok(o) => o,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_USAGE;
                }
            };
            let _ = writeln!(out, "{}", o.verdict);
            if paths {
                let _ = writeln!(out, "feasible paths: {}", o.stats.feasible_paths);
            }
            match &o.verdict {
                Verdict::Verified { .. } => EXIT_VERIFIED,
                Verdict::Counterexample(c) => {
                    let _ = write!(out, "{}", c.trace());
                    if trace {
                        let _ = writeln!(out, "input: {}", c.witness.inputs);
                        for d in &c.decisions {
                            let _ = writeln!(out, "branch {}: {}", d.span, d.taken);
                        }
                    }
                    EXIT_COUNTEREXAMPLE
                }
                Verdict::ResourceExceeded(_) => EXIT_RESOURCE,
            }
        }
        Cmd::Bench { suite, sizes, format, budget_ms } => {
            let mut entries = Vec::new();
            for s in &suite {
                match corpus::suite(s) {
                    Some(v) => entries.extend(v),
                    None => {
                        let _ = writeln!(err, "error: unknown suite `{s}`");
                        return EXIT_USAGE;
                    }
                }
            }
            let mut base = InstanceParams::new();
            base.budget = budget_ms.map(Duration::from_millis);
            let report = bench::run_suite(&entries, &sizes, &base);
            let _ = match format {
                Format::Text => write!(out, "{}", report.table()),
                Format::Tsv => write!(out, "{}", report.tsv()),
            };
            if report.all_match() {
                0
            } else {
                for r in report.mismatches() {
                    let len = r.length.map_or("-".to_string(), |l| l.to_string());
                    let _ = writeln!(err, "mismatch: {} {} is {}, expected {}", r.benchmark, len, r.verdict, r.expected);
                }
                1
            }
        }
        Cmd::Oracle { file, inst, cap } => {
            let (p, default) = match load(&file) {
                Ok(x) => x,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_USAGE;
                }
            };
            let name = function(&p, &inst.entry, default);
            let r = match oracle::check_all(&p, &name, &inst.params(), cap) {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_USAGE;
                }
            };
            let _ = writeln!(
                out,
                "checked {} inputs ({} outside requires, {} outside the integer domain)",
                r.checked, r.vacuous, r.excluded
            );
            match &r.first {
                None => {
                    let _ = writeln!(out, "no violation");
                    0
                }
                Some((input, c)) => {
                    let why = match c {
                        Check::Fault(e) => e.to_string(),
                        _ => "ensures is false".to_string(),
                    };
                    let _ = writeln!(out, "{} violating inputs; first: {input} ({why})", r.violations);
                    1
                }
            }
        }
    }
}
