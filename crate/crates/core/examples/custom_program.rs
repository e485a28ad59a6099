//! Verify a program given as text. The contract of `abs` is too weak for
//! the one of `dist`, and the verifier shows why.

use bpv::engine::{verify_function, InstanceParams, Verdict};

const SRC: &str = r#"
/*@ ensures \result >= 0; @*/
int abs(int x) {
  if (x < 0) { return -x; }
  return x;
}

/*@ requires a >= -100 && a <= 100 && b >= -100 && b <= 100;
  @ ensures \result == a - b || \result == b - a; @*/
int dist(int a, int b) {
  int d = abs(a - b);
  return d;
}
"#;

fn main() {
    let p = bpv::lang::load(SRC).unwrap();
    let out = verify_function(&p, "abs", &InstanceParams::new()).unwrap();
    println!("abs: {}", out.verdict);

    let out = verify_function(&p, "dist", &InstanceParams::new()).unwrap();
    println!("dist: {}", out.verdict);
    if let Verdict::Counterexample(c) = &out.verdict {
        print!("{}", c.trace());
    }
}
