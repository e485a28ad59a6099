//! Verify the triangle classifier over the full integer domain.

use bpv::engine::{verify, InstanceParams, Verdict};
use bpv::harness::corpus;

fn main() {
    let e = corpus::get("tritype").unwrap();
    let p = bpv::lang::load(e.source).expect("corpus program parses");
    let out = verify(&p, &InstanceParams::new()).expect("no instance errors");

    println!("{}", out.verdict);
    if let Verdict::Verified { feasible_paths, nodes } = out.verdict {
        println!("{feasible_paths} feasible paths, {nodes} search nodes, {:?}", out.elapsed);
    }
}
