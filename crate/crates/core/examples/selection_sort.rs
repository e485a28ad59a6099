//! Modular verification: selectionSort calls findMin through its contract,
//! so the whole sort is a single path. findMin is then checked on its own.

use bpv::engine::{verify_function, InstanceParams};
use bpv::harness::corpus;

fn main() {
    let p = bpv::lang::load(corpus::get("selectionSort").unwrap().source).unwrap();
    let out = verify_function(&p, "selectionSort", &InstanceParams::new().len("t", 40)).unwrap();
    println!("selectionSort, length 40: {} in {:?}", out.verdict, out.elapsed);

    let out = verify_function(&p, "findMin", &InstanceParams::new().len("t", 6)).unwrap();
    println!("findMin, length 6: {} in {:?}", out.verdict, out.elapsed);
}
