//! Bounds and value propagators, one per [`Constraint`] variant.

use super::constraint::{BoolOp, Constraint, Linear, Rel, VarId};
use super::domain::Empty;
use super::store::VarState;

type Prop = Result<(), Empty>;

pub(crate) fn propagate(c: &Constraint, vs: &mut VarState) -> Prop {
    match c {
        Constraint::Linear(l) => linear(&l.terms, l.rel, l.rhs, vs),
        Constraint::Mult { x, y, z } => mult(*x, *y, *z, vs),
        Constraint::Div { x, y, z } => div(*x, *y, *z, vs),
        Constraint::Element { index, table, value } => element(*index, table, *value, vs),
        Constraint::AllDifferent(xs) => all_different(xs, vs),
        Constraint::Reif { b, lin } => reif(*b, lin, vs),
        Constraint::Bool { b, op, args } => boolean(*b, *op, args, vs),
        Constraint::NotEq(x, y) => not_eq(*x, *y, vs),
    }
}

pub(crate) fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn ceil_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

fn term_bounds(c: i64, v: VarId, vs: &VarState) -> (i128, i128) {
    let (lo, hi) = (vs.min(v) as i128, vs.max(v) as i128);
    let c = c as i128;
    if c >= 0 {
        (c * lo, c * hi)
    } else {
        (c * hi, c * lo)
    }
}

/// Bounds consistency for `Σ c·x ≤ rhs` (one pass; re-queued on change).
fn linear_le(terms: &[(i64, VarId)], sign: i64, rhs: i128, vs: &mut VarState) -> Prop {
    let mut sum_min: i128 = 0;
    for &(c, v) in terms {
        sum_min += term_bounds(c * sign, v, vs).0;
    }
    if sum_min > rhs {
        return Err(Empty);
    }
    for &(c, v) in terms {
        let c = (c * sign) as i128;
        let own_min = term_bounds(c as i64, v, vs).0;
        let slack = rhs - (sum_min - own_min);
        if c > 0 {
            vs.set_max(v, floor_div(slack, c))?;
        } else {
            vs.set_min(v, ceil_div(slack, c))?;
        }
    }
    Ok(())
}

fn linear(terms: &[(i64, VarId)], rel: Rel, rhs: i64, vs: &mut VarState) -> Prop {
    match rel {
        Rel::Le => linear_le(terms, 1, rhs as i128, vs),
        Rel::Eq => {
            linear_le(terms, 1, rhs as i128, vs)?;
            linear_le(terms, -1, -(rhs as i128), vs)
        }
        Rel::Ne => {
            let mut rest: i128 = 0;
            let mut open = None;
            for &(c, v) in terms {
                match vs.fixed(v) {
                    Some(x) => rest += c as i128 * x as i128,
                    None if open.is_none() => open = Some((c, v)),
                    None => return Ok(()),
                }
            }
            match open {
                None if rest == rhs as i128 => Err(Empty),
                None => Ok(()),
                Some((c, v)) => {
                    let need = rhs as i128 - rest;
                    if need % c as i128 == 0 {
                        let val = need / c as i128;
                        if val >= i64::MIN as i128 && val <= i64::MAX as i128 {
                            vs.remove(v, val as i64)?;
                        }
                    }
                    Ok(())
                }
            }
        }
    }
}

/// Entailment status of a linear constraint under current bounds.
pub(crate) fn linear_status(lin: &Linear, vs: &VarState) -> Option<bool> {
    let (mut lo, mut hi) = (0i128, 0i128);
    let mut open = 0usize;
    let mut last_open = None;
    for &(c, v) in &lin.terms {
        let (a, b) = term_bounds(c, v, vs);
        lo += a;
        hi += b;
        if vs.fixed(v).is_none() {
            open += 1;
            last_open = Some((c, v));
        }
    }
    let rhs = lin.rhs as i128;
    let eq = || -> Option<bool> {
        if lo == hi {
            return Some(lo == rhs);
        }
        if rhs < lo || rhs > hi {
            return Some(false);
        }
        if open == 1 {
            let (c, v) = last_open.unwrap();
            let (tlo, _) = term_bounds(c, v, vs);
            let rest = lo - tlo;
            let need = rhs - rest;
            if need % c as i128 != 0 {
                return Some(false);
            }
            let val = need / c as i128;
            if val < i64::MIN as i128 || val > i64::MAX as i128 || !vs.dom(v).contains(val as i64)
            {
                return Some(false);
            }
        }
        None
    };
    match lin.rel {
        Rel::Le if hi <= rhs => Some(true),
        Rel::Le if lo > rhs => Some(false),
        Rel::Le => None,
        Rel::Eq => eq(),
        Rel::Ne => eq().map(|b| !b),
    }
}

fn reif(b: VarId, lin: &Linear, vs: &mut VarState) -> Prop {
    vs.set_min(b, 0)?;
    vs.set_max(b, 1)?;
    match vs.fixed(b) {
        Some(1) => linear(&lin.terms, lin.rel, lin.rhs, vs),
        Some(_) => {
            let neg = lin.negated();
            linear(&neg.terms, neg.rel, neg.rhs, vs)
        }
        None => {
            if let Some(t) = linear_status(lin, vs) {
                vs.assign(b, t as i64)?;
            }
            Ok(())
        }
    }
}

fn boolean(b: VarId, op: BoolOp, args: &[VarId], vs: &mut VarState) -> Prop {
    vs.set_min(b, 0)?;
    vs.set_max(b, 1)?;
    for &a in args {
        vs.set_min(a, 0)?;
        vs.set_max(a, 1)?;
    }
    // Or is And with every polarity flipped.
    let (absorbing, neutral) = match op {
        BoolOp::And => (0, 1),
        BoolOp::Or => (1, 0),
    };
    if args.iter().any(|&a| vs.fixed(a) == Some(absorbing)) {
        vs.assign(b, absorbing)?;
        return Ok(());
    }
    let open: Vec<VarId> = args.iter().copied().filter(|&a| vs.fixed(a).is_none()).collect();
    if open.is_empty() {
        vs.assign(b, neutral)?;
        return Ok(());
    }
    match vs.fixed(b) {
        Some(x) if x == neutral => {
            for a in open {
                vs.assign(a, neutral)?;
            }
        }
        Some(_) if open.len() == 1 => {
            vs.assign(open[0], absorbing)?;
        }
        _ => {}
    }
    Ok(())
}

fn not_eq(x: VarId, y: VarId, vs: &mut VarState) -> Prop {
    if let Some(a) = vs.fixed(x) {
        vs.remove(y, a)?;
    }
    if let Some(b) = vs.fixed(y) {
        vs.remove(x, b)?;
    }
    Ok(())
}

fn all_different(xs: &[VarId], vs: &mut VarState) -> Prop {
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &x) in xs.iter().enumerate() {
            if let Some(a) = vs.fixed(x) {
                for (j, &y) in xs.iter().enumerate() {
                    if i != j {
                        if vs.fixed(y) == Some(a) {
                            return Err(Empty);
                        }
                        changed |= vs.remove(y, a)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn element(index: VarId, table: &[VarId], value: VarId, vs: &mut VarState) -> Prop {
    if table.is_empty() {
        return Err(Empty);
    }
    vs.set_min(index, 0)?;
    vs.set_max(index, table.len() as i128 - 1)?;
    if let Some(m) = vs.fixed(index) {
        let slot = table[m as usize];
        let dv = vs.dom(value).clone();
        vs.intersect(slot, &dv)?;
        let ds = vs.dom(slot).clone();
        vs.intersect(value, &ds)?;
        return Ok(());
    }
    let candidates: Vec<i64> = vs.dom(index).iter().collect();
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for s in candidates {
        let slot = table[s as usize];
        if !vs.dom(slot).intersects(vs.dom(value)) {
            vs.remove(index, s)?;
        } else {
            lo = lo.min(vs.min(slot));
            hi = hi.max(vs.max(slot));
        }
    }
    if lo > hi {
        return Err(Empty);
    }
    vs.set_min(value, lo as i128)?;
    vs.set_max(value, hi as i128)?;
    if vs.fixed(index).is_some() {
        return element(index, table, value, vs);
    }
    // value consistency when the value domain is small
    if vs.dom(value).size() <= 256 {
        let slots: Vec<VarId> = vs.dom(index).iter().map(|s| table[s as usize]).collect();
        let vals: Vec<i64> = vs.dom(value).iter().collect();
        for val in vals {
            if !slots.iter().any(|&t| vs.dom(t).contains(val)) {
                vs.remove(value, val)?;
            }
        }
    }
    Ok(())
}

fn corners(a: (i64, i64), b: (i64, i64)) -> (i128, i128) {
    let ps = [
        a.0 as i128 * b.0 as i128,
        a.0 as i128 * b.1 as i128,
        a.1 as i128 * b.0 as i128,
        a.1 as i128 * b.1 as i128,
    ];
    (*ps.iter().min().unwrap(), *ps.iter().max().unwrap())
}

fn isqrt(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Quotient hull `{ p / q : p ∈ [p0,p1], q ∈ [q0,q1] }` for sign-definite `q`,
/// returned as `(ceil(min), floor(max))`.
fn quotient_hull(p: (i64, i64), q: (i64, i64)) -> (i128, i128) {
    let mut lo = i128::MAX;
    let mut hi = i128::MIN;
    for &a in &[p.0 as i128, p.1 as i128] {
        for &b in &[q.0 as i128, q.1 as i128] {
            lo = lo.min(ceil_div(a, b));
            hi = hi.max(floor_div(a, b));
        }
    }
    (lo, hi)
}

fn sign_definite(vs: &VarState, v: VarId) -> bool {
    vs.min(v) > 0 || vs.max(v) < 0
}

fn mult(x: VarId, y: VarId, z: VarId, vs: &mut VarState) -> Prop {
    if x == y {
        return square(x, z, vs);
    }
    let (lo, hi) = corners((vs.min(x), vs.max(x)), (vs.min(y), vs.max(y)));
    vs.set_min(z, lo)?;
    vs.set_max(z, hi)?;
    if !vs.dom(z).contains(0) {
        vs.remove(x, 0)?;
        vs.remove(y, 0)?;
    }
    for (a, b) in [(x, y), (y, x)] {
        // a = z / b when b cannot be zero
        if sign_definite(vs, b) {
            let (lo, hi) = quotient_hull((vs.min(z), vs.max(z)), (vs.min(b), vs.max(b)));
            vs.set_min(a, lo)?;
            vs.set_max(a, hi)?;
        }
    }
    let (lo, hi) = corners((vs.min(x), vs.max(x)), (vs.min(y), vs.max(y)));
    vs.set_min(z, lo)?;
    vs.set_max(z, hi)?;
    Ok(())
}

fn square(x: VarId, z: VarId, vs: &mut VarState) -> Prop {
    let (a, b) = (vs.min(x) as i128, vs.max(x) as i128);
    let (lo, hi) = if a >= 0 {
        (a * a, b * b)
    } else if b <= 0 {
        (b * b, a * a)
    } else {
        (0, (a * a).max(b * b))
    };
    vs.set_min(z, lo)?;
    vs.set_max(z, hi)?;
    let r = isqrt(vs.max(z) as i128);
    vs.set_min(x, -r)?;
    vs.set_max(x, r)?;
    let zmin = vs.min(z) as i128;
    if zmin > 0 {
        let mut s = isqrt(zmin);
        if s * s < zmin {
            s += 1;
        }
        // |x| >= s
        if vs.min(x) as i128 > -s {
            vs.set_min(x, s)?;
        }
        if (vs.max(x) as i128) < s {
            vs.set_max(x, -s)?;
        }
    }
    if let Some(v) = vs.fixed(x) {
        vs.assign(z, (v as i128 * v as i128).try_into().map_err(|_| Empty)?)?;
    }
    Ok(())
}

fn div(x: VarId, y: VarId, z: VarId, vs: &mut VarState) -> Prop {
    vs.remove(y, 0)?;
    if !sign_definite(vs, y) {
        return Ok(());
    }
    let (ql, qh) = {
        // real quotient hull, then truncation (monotone)
        let mut lo: Option<(i128, i128)> = None;
        let mut hi: Option<(i128, i128)> = None;
        for &a in &[vs.min(x) as i128, vs.max(x) as i128] {
            for &b in &[vs.min(y) as i128, vs.max(y) as i128] {
                let (n, d) = if b < 0 { (-a, -b) } else { (a, b) };
                if lo.is_none_or(|(ln, ld)| n * ld < ln * d) {
                    lo = Some((n, d));
                }
                if hi.is_none_or(|(hn, hd)| n * hd > hn * d) {
                    hi = Some((n, d));
                }
            }
        }
        let (ln, ld) = lo.unwrap();
        let (hn, hd) = hi.unwrap();
        (ln / ld, hn / hd)
    };
    vs.set_min(z, ql)?;
    vs.set_max(z, qh)?;
    if let Some(c) = vs.fixed(y) {
        // x ranges over the preimage of [zmin, zmax] under trunc(x / c)
        let c = c as i128;
        let (zl, zh) = (vs.min(z) as i128, vs.max(z) as i128);
        let m = c.abs() - 1;
        let (pl, ph) = if c > 0 { (zl, zh) } else { (-zh, -zl) };
        // for c > 0: z = trunc(x/c); x in [z*c - m, z*c + m] depending on sign
        let lo = if pl > 0 { pl * c.abs() } else { pl * c.abs() - m };
        let hi = if ph < 0 { ph * c.abs() } else { ph * c.abs() + m };
        vs.set_min(x, lo)?;
        vs.set_max(x, hi)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_division() {
        assert_eq!(floor_div(7, 2), 3);
        assert_eq!(floor_div(-7, 2), -4);
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(ceil_div(-7, 2), -3);
        assert_eq!(floor_div(7, -2), -4);
        assert_eq!(ceil_div(-7, -2), 4);
    }

    #[test]
    fn integer_square_root() {
        for n in 0..200i128 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
    }
}
