//! Dense linear algebra over `F_q`: row reduction, kernels, solving.

use crate::field::{Fe, FiniteField};

/// Reduces `rows` in place to reduced row echelon form, dropping zero rows.
/// Returns the pivot column of each remaining row.
pub fn rref(k: &FiniteField, rows: &mut Vec<Vec<Fe>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = k.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = k.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c];
            for (x, &p) in row.iter_mut().zip(&pivot_row) {
                *x = k.sub(*x, k.mul(f, p));
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(k: &FiniteField, rows: &[Vec<Fe>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(k, &mut m, ncols).len()
}

/// Basis of `{v : A v = 0}` for `A` given by `rows`, one vector per free column,
/// with a 1 in that column.
pub fn nullspace(k: &FiniteField, rows: &[Vec<Fe>], ncols: usize) -> Vec<Vec<Fe>> {
    let mut m = rows.to_vec();
    let pivots = rref(k, &mut m, ncols);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Fe::ZERO; ncols];
        v[free] = Fe::ONE;
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = k.neg(row[free]);
        }
        out.push(v);
    }
    out
}

/// Coefficients `c` with `Σ c_i · columns[i] = target`, if any.
pub fn solve(k: &FiniteField, columns: &[Vec<Fe>], target: &[Fe]) -> Option<Vec<Fe>> {
    let n = columns.len();
    let len = target.len();
    let mut rows: Vec<Vec<Fe>> = (0..len)
        .map(|i| {
            let mut row: Vec<Fe> = columns.iter().map(|c| c[i]).collect();
            row.push(target[i]);
            row
        })
        .collect();
    let pivots = rref(k, &mut rows, n + 1);
    if pivots.contains(&n) {
        return None;
    }
    let mut sol = vec![Fe::ZERO; n];
    for (row, &pc) in rows.iter().zip(&pivots) {
        sol[pc] = row[n];
    }
    Some(sol)
}

pub fn is_independent(k: &FiniteField, vectors: &[Vec<Fe>]) -> bool {
    match vectors.first() {
        None => true,
        Some(v) => rank(k, vectors, v.len()) == vectors.len(),
    }
}

pub fn mat_vec(k: &FiniteField, m: &[Vec<Fe>], v: &[Fe]) -> Vec<Fe> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Fe::ZERO, |acc, (&a, &b)| k.add(acc, k.mul(a, b))))
        .collect()
}

/// `u^T M v`.
pub fn bilinear(k: &FiniteField, m: &[Vec<Fe>], u: &[Fe], v: &[Fe]) -> Fe {
    let mv = mat_vec(k, m, v);
    u.iter().zip(&mv).fold(Fe::ZERO, |acc, (&a, &b)| k.add(acc, k.mul(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one_matrix() {
        let k = FiniteField::prime(5).unwrap();
        let rows = vec![vec![k.from_int(1), k.from_int(2), k.from_int(3)]];
        let ker = nullspace(&k, &rows, 3);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(mat_vec(&k, &rows, v).iter().all(|c| c.is_zero()));
        }
        assert!(is_independent(&k, &ker));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let k = FiniteField::prime(3).unwrap();
        let cols = vec![vec![k.one(), k.zero()], vec![k.one(), k.one()]];
        let sol = solve(&k, &cols, &[k.zero(), k.one()]).unwrap();
        assert_eq!(sol, vec![k.from_int(2), k.one()]);
        let cols = vec![vec![k.one(), k.one()]];
        assert!(solve(&k, &cols, &[k.one(), k.zero()]).is_none());
    }
}
