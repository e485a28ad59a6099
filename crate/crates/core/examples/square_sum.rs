//! Sum of squares with a nonlinear contract, for n bounded by 8 and 16.

use bpv::engine::{interpret, verify, InstanceParams, DEFAULT_STEPS};
use bpv::harness::corpus;
use bpv::translate::Inputs;

fn main() {
    let p = bpv::lang::load(corpus::get("squareSum").unwrap().source).unwrap();
    for n in [8, 16] {
        let out = verify(&p, &InstanceParams::new().bound("n", 0, n)).unwrap();
        println!("n <= {n}: {}", out.verdict);
    }

    let input = Inputs { scalars: vec![("n".into(), 8)], arrays: vec![] };
    let run = interpret(&p, "somme", &input, DEFAULT_STEPS).unwrap();
    println!("somme(8) = {:?}", run.result);
}
