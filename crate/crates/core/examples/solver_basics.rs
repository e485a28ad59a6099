//! The constraint store on its own: posting, propagation, choice points and
//! search.

use bpv::solver::{solve, Constraint, Limits, Linear, Rel, SearchStats, Store};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = Store::new();
    let x = s.new_var(0, 8)?;
    let z = s.new_var(-100, 100)?;
    s.post(Constraint::Mult { x, y: x, z })?;
    println!("z = x*x, x in 0..8: z in {}..{}", s.min(z), s.max(z));

    // t[i] = v with a symbolic index
    let t: Vec<_> = [3, 7, 7, 1].iter().map(|&k| s.constant(k)).collect();
    let i = s.new_var(0, 3)?;
    let v = s.new_var(5, 10)?;
    s.post(Constraint::Element { index: i, table: t, value: v })?;
    println!("index domain after t[i] in 5..10: {:?}", s.domain(i).iter().collect::<Vec<_>>());

    let mark = s.push();
    let r = s.post(Constraint::Linear(Linear::diff(x, i, Rel::Le, -3)))?;
    println!("x - i <= -3: {r:?}, x in {}..{}", s.min(x), s.max(x));
    s.pop(mark)?;
    println!("after pop: x in {}..{}", s.min(x), s.max(x));

    let mut stats = SearchStats::default();
    let a = solve(&mut s, &[x, i], &Limits::unlimited(), &mut stats)?.expect("satisfiable");
    println!("solution x={} i={} z={} v={} ({} nodes)", a.get(x), a.get(i), a.get(z), a.get(v), stats.nodes);
    Ok(())
}
