//! Square sum over a permutation of 0..n, stated with `\alldifferent`.

use bpv::engine::{verify, InstanceParams};
use bpv::harness::corpus;

fn main() {
    let p = bpv::lang::load(corpus::get("squareSumArray").unwrap().source).unwrap();
    for size in 2..=6 {
        let out = verify(&p, &InstanceParams::new().len("t", size)).unwrap();
        println!("size {size}: {} ({} nodes, {:?})", out.verdict, out.stats.nodes, out.elapsed);
    }
}
