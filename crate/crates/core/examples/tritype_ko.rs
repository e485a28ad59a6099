//! Find the bug in the faulty triangle classifier, print the trace and
//! replay the witness on the concrete interpreter.

use bpv::engine::{interpret, verify, InstanceParams, Verdict, DEFAULT_STEPS};
use bpv::harness::corpus;

fn main() {
    let p = bpv::lang::load(corpus::get("tritypeKO").unwrap().source).unwrap();
    let out = verify(&p, &InstanceParams::new()).unwrap();
    let Verdict::Counterexample(cex) = &out.verdict else {
        panic!("expected a counterexample, got {}", out.verdict);
    };
    print!("{}", cex.trace());

    let run = interpret(&p, "tritypeKO", &cex.witness.inputs, DEFAULT_STEPS).unwrap();
    println!("concrete run on {}: returns {:?}", cex.witness.inputs, run.result);
}
