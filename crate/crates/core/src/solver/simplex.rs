//! Exact rational feasibility check for small linear systems (phase-one
//! simplex, Bland's rule).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub(crate) struct LpRow {
    /// `(column, coefficient)`
    pub coefs: Vec<(usize, i64)>,
    pub eq: bool,
    pub rhs: i128,
}

fn rat(v: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Whether `rows` has a real solution with `bounds[j].0 <= x_j <= bounds[j].1`.
pub(crate) fn feasible(bounds: &[(i64, i64)], rows: &[LpRow]) -> bool {
    let n = bounds.len();
    // shift x = lo + y, y in [0, hi - lo]
    let mut shifted: Vec<(Vec<(usize, i128)>, bool, i128)> = Vec::new();
    for r in rows {
        let mut b = r.rhs;
        for &(j, c) in &r.coefs {
            b -= c as i128 * bounds[j].0 as i128;
        }
        let coefs: Vec<(usize, i128)> = r.coefs.iter().map(|&(j, c)| (j, c as i128)).collect();
        if coefs.is_empty() {
            if (r.eq && b != 0) || b < 0 {
                return false;
            }
            continue;
        }
        shifted.push((coefs, r.eq, b));
    }
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        shifted.push((vec![(j, 1)], false, hi as i128 - lo as i128));
    }

    let m = shifted.len();
    let slack_count = shifted.iter().filter(|r| !r.1).count();
    let art_rows: Vec<usize> = (0..m).filter(|&i| shifted[i].1 || shifted[i].2 < 0).collect();
    let cols = n + slack_count + art_rows.len();
    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut next_slack = n;
    let mut next_art = n + slack_count;
    for (i, (coefs, eq, b)) in shifted.iter().enumerate() {
        let sign: i128 = if *b < 0 { -1 } else { 1 };
        for &(j, c) in coefs {
            t[i][j] += rat(sign * c);
        }
        if !*eq {
            t[i][next_slack] = rat(sign);
            if sign > 0 {
                basis[i] = next_slack;
            }
            next_slack += 1;
        }
        t[i][cols] = rat(sign * b);
        if *eq || *b < 0 {
            t[i][next_art] = BigRational::one();
            basis[i] = next_art;
            next_art += 1;
        }
    }
    if art_rows.is_empty() {
        return true;
    }
    // phase-one objective: minimise the sum of artificials, written as
    // reduced costs over the current basis
    let mut obj = vec![BigRational::zero(); cols + 1];
    for &i in &art_rows {
        for (o, v) in obj.iter_mut().zip(&t[i]) {
            *o -= v;
        }
    }
    for a in n + slack_count..cols {
        obj[a] = BigRational::zero();
    }
    loop {
        let Some(enter) = (0..cols).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][cols] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // unbounded phase one cannot happen; treat as feasible
            return true;
        };
        pivot(&mut t, &mut obj, r, enter);
        basis[r] = enter;
    }
    obj[cols].is_zero()
}

fn pivot(t: &mut [Vec<BigRational>], obj: &mut [BigRational], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        if !v.is_zero() {
            *v /= &p;
        }
    }
    let prow = t[r].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for &j in &nz {
            row[j] -= &f * &prow[j];
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for &j in &nz {
            obj[j] -= &f * &prow[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(coefs: &[(usize, i64)], eq: bool, rhs: i128) -> LpRow {
        LpRow { coefs: coefs.to_vec(), eq, rhs }
    }

    #[test]
    fn triangle_cycle_is_infeasible() {
        // i + j <= k, i + k <= j, i >= 1
        let b = [(1, 1000), (0, 1000), (0, 1000)];
        let rows = [row(&[(0, 1), (1, 1), (2, -1)], false, 0), row(&[(0, 1), (2, 1), (1, -1)], false, 0)];
        assert!(!feasible(&b, &rows));
    }

    #[test]
    fn equality_system() {
        let b = [(-10, 10), (-10, 10)];
        assert!(feasible(&b, &[row(&[(0, 1), (1, 1)], true, 3), row(&[(0, 1), (1, -1)], true, 1)]));
        assert!(!feasible(&b, &[row(&[(0, 1), (1, 1)], true, 30)]));
    }

    #[test]
    fn real_but_not_integer_is_feasible() {
        // 2x = 1 has a rational solution; integrality is left to search
        assert!(feasible(&[(0, 1)], &[row(&[(0, 2)], true, 1)]));
    }
}
