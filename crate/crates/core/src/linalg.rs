//! Exact dense linear solving over Q(zeta_N) with certificates.
//!
//! `solve` either produces one solution of A x = b or a separating functional
//! y with y^T A = 0 and y^T b != 0, so inconsistency is always witnessed by
//! data the caller can re-check.

use crate::scalars::Cyclotomic;

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solution(Vec<Cyclotomic>),
    /// Row functional annihilating every column of A but not b.
    Inconsistent(Vec<Cyclotomic>),
}

/// Solves A x = b exactly; A is given by rows. Free variables are set to 0.
pub fn solve(rows: &[Vec<Cyclotomic>], rhs: &[Cyclotomic]) -> SolveOutcome {
    let m = rows.len();
    assert_eq!(m, rhs.len());
    let n = if m > 0 { rows[0].len() } else { 0 };
    // Augmented working rows: [A | b | I], the I block tracks row operations.
    let mut work: Vec<Vec<Cyclotomic>> = Vec::with_capacity(m);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.len(), n);
        let mut w = r.clone();
        w.push(rhs[i].clone());
        for j in 0..m {
            w.push(if i == j {
                Cyclotomic::one()
            } else {
                Cyclotomic::zero()
            });
        }
        work.push(w);
    }
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut next_row = 0usize;
    for col in 0..n {
        let Some(p) = (next_row..m).find(|&r| !work[r][col].is_zero()) else {
            continue;
        };
        work.swap(next_row, p);
        let pinv = work[next_row][col].inv().expect("nonzero pivot");
        for v in work[next_row].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &pinv;
            }
        }
        let pivot_row = work[next_row].clone();
        for r in 0..m {
            if r == next_row || work[r][col].is_zero() {
                continue;
            }
            let f = work[r][col].clone();
            for j in 0..pivot_row.len() {
                if pivot_row[j].is_zero() {
                    continue;
                }
                let t = &work[r][j] - &(&f * &pivot_row[j]);
                work[r][j] = t;
            }
        }
        pivot_of_col[col] = Some(next_row);
        next_row += 1;
        if next_row == m {
            break;
        }
    }
    for r in 0..m {
        if work[r][..n].iter().all(|c| c.is_zero()) && !work[r][n].is_zero() {
            return SolveOutcome::Inconsistent(work[r][n + 1..].to_vec());
        }
    }
    let mut x = vec![Cyclotomic::zero(); n];
    for col in 0..n {
        if let Some(r) = pivot_of_col[col] {
            x[col] = work[r][n].clone();
        }
    }
    SolveOutcome::Solution(x)
}

/// Applies a functional to a vector: sum_i y_i v_i.
pub fn pair(y: &[Cyclotomic], v: &[Cyclotomic]) -> Cyclotomic {
    let mut acc = Cyclotomic::zero();
    for (a, b) in y.iter().zip(v.iter()) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * b);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Cyclotomic {
        Cyclotomic::from_int(n)
    }

    #[test]
    fn solves_square_system() {
        let rows = vec![vec![c(2), c(1)], vec![c(1), c(3)]];
        let rhs = vec![c(5), c(10)];
        match solve(&rows, &rhs) {
            SolveOutcome::Solution(x) => {
                assert_eq!(x, vec![c(1), c(3)]);
            }
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn underdetermined_picks_some_solution() {
        let rows = vec![vec![c(1), c(1), c(0)]];
        let rhs = vec![c(4)];
        match solve(&rows, &rhs) {
            SolveOutcome::Solution(x) => {
                assert_eq!(&x[0] + &x[1], c(4));
            }
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn inconsistency_is_certified() {
        let rows = vec![vec![c(1), c(2)], vec![c(2), c(4)]];
        let rhs = vec![c(1), c(3)];
        match solve(&rows, &rhs) {
            SolveOutcome::Inconsistent(y) => {
                // y^T A = 0, y^T b != 0, re-checked from the raw data
                for col in 0..2 {
                    let col_vec: Vec<Cyclotomic> =
                        rows.iter().map(|r| r[col].clone()).collect();
                    assert!(pair(&y, &col_vec).is_zero());
                }
                assert!(!pair(&y, &rhs).is_zero());
            }
            _ => panic!("expected inconsistency"),
        }
    }

    #[test]
    fn cyclotomic_entries() {
        let i = Cyclotomic::zeta(4, 1);
        let rows = vec![vec![i.clone(), c(1)], vec![c(1), i.clone()]];
        let rhs = vec![c(0), c(2)];
        match solve(&rows, &rhs) {
            SolveOutcome::Solution(x) => {
                assert_eq!(&(&rows[0][0] * &x[0]) + &(&rows[0][1] * &x[1]), c(0));
                assert_eq!(&(&rows[1][0] * &x[0]) + &(&rows[1][1] * &x[1]), c(2));
            }
            _ => panic!("expected a solution"),
        }
    }
}
