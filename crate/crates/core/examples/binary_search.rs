//! Binary search without invariant or unwinding bound: the correct version
//! verifies, the faulty one yields a witness at every length.

use bpv::engine::{check_input, verify, InstanceParams, Verdict, DEFAULT_STEPS};
use bpv::harness::corpus;

fn main() {
    let ok = bpv::lang::load(corpus::get("binarySearch").unwrap().source).unwrap();
    for n in [8, 16] {
        let out = verify(&ok, &InstanceParams::new().len("tab", n)).unwrap();
        println!(
            "binarySearch len {n}: {} (at most {} iterations) in {:?}",
            out.verdict, out.stats.max_loop_iterations, out.elapsed
        );
    }

    let ko = bpv::lang::load(corpus::get("binarySearchKO").unwrap().source).unwrap();
    for n in [8, 16, 32, 64, 128] {
        let out = verify(&ko, &InstanceParams::new().len("tab", n)).unwrap();
        match &out.verdict {
            Verdict::Counterexample(c) => {
                let replay = check_input(&ko, "binarySearch", &c.witness.inputs, DEFAULT_STEPS).unwrap();
                println!("binarySearchKO len {n}: x = {:?}, replay violates: {}", c.witness.inputs.scalar("x"), replay.is_violation());
            }
            v => println!("binarySearchKO len {n}: {v}"),
        }
    }
}
