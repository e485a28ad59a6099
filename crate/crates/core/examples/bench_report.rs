//! Run part of the benchmark corpus and print the report as TSV.

use bpv::engine::InstanceParams;
use bpv::harness::{bench, corpus};

fn main() {
    let mut entries = corpus::suite("tritype").unwrap();
    entries.extend(corpus::suite("bsearchKO").unwrap());
    let report = bench::run_suite(&entries, &[], &InstanceParams::new());
    print!("{}", report.tsv());
    if !report.all_match() {
        std::process::exit(1);
    }
}
