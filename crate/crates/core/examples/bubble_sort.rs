use bpv::engine::{verify, InstanceParams};
use bpv::harness::corpus;

/// Bubble sort from a fixed decreasing input. Every condition is decided by
/// propagation, so a single path is explored.
fn main() {
    let p = bpv::lang::load(corpus::get("bubbleSortWithInit").unwrap().source).unwrap();
    for n in [8, 16, 32] {
        let out = verify(&p, &InstanceParams::new().len("tab", n)).unwrap();
        println!("length {n:>2}: {}  {:?}", out.verdict, out.elapsed);
    }
}
