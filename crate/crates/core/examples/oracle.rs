//! Cross-check the verifier against exhaustive concrete execution on small
//! domains.

use bpv::engine::{verify_function, InstanceParams, Verdict};
use bpv::harness::{corpus, oracle};

fn main() {
    for e in corpus::CORPUS {
        let p = bpv::lang::load(e.source).unwrap();
        let name = e.entry.map_or_else(|| p.entry().name.clone(), str::to_string);
        let f = p.function(&name).unwrap();
        let mut inst = InstanceParams::new();
        for prm in &f.params {
            inst = inst.bound(&prm.name, 0, 4);
        }
        for prm in f.array_params() {
            inst = inst.len(&prm.name, 3);
        }
        let truth = oracle::check_all(&p, &name, &inst, oracle::DEFAULT_CAP).unwrap();
        let v = verify_function(&p, &name, &inst).unwrap().verdict;
        let agree = truth.violated() == matches!(v, Verdict::Counterexample(_));
        println!("{:<20} oracle: {:>5} violations of {:>5}   verifier: {:<16} {}", e.name, truth.violations, truth.checked, v.label(), if agree { "agree" } else { "DISAGREE" });
    }
}
