//! Exact linear algebra over the rationals on small dense matrices.
//!
//! Matrices are row-major `Vec<Vec<Rational>>`.

#![allow(clippy::needless_range_loop)]

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Row echelon form in place; returns the pivot columns and the parity of
/// the row swaps performed.
fn echelon(m: &mut Matrix) -> (Vec<usize>, bool) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut odd = false;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            odd = !odd;
        }
        let pivot = m[r][c].clone();
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] / &pivot;
            for k in c..cols {
                let delta = &factor * &m[r][k];
                m[i][k] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (pivots, odd)
}

pub fn determinant(m: &Matrix) -> Rational {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return Rational::one();
    }
    let mut work = m.clone();
    let (pivots, odd) = echelon(&mut work);
    if pivots.len() < n {
        return Rational::zero();
    }
    let mut det = Rational::one();
    for (i, row) in work.iter().enumerate() {
        det *= &row[i];
    }
    if odd {
        -det
    } else {
        det
    }
}

pub fn rank(m: &Matrix) -> usize {
    let mut work = m.clone();
    echelon(&mut work).0.len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &Matrix) -> Vec<Vec<Rational>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut work = m.clone();
    let (pivots, _) = echelon(&mut work);
    // reduce to RREF
    for (r, &c) in pivots.iter().enumerate().rev() {
        let inv = Rational::one() / &work[r][c];
        for k in c..cols {
            work[r][k] *= &inv;
        }
        for i in 0..r {
            if work[i][c].is_zero() {
                continue;
            }
            let factor = work[i][c].clone();
            for k in c..cols {
                let delta = &factor * &work[r][k];
                work[i][k] -= delta;
            }
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -work[r][f].clone();
            }
            v
        })
        .collect()
}

/// Matrix with the given vectors as columns.
pub fn from_columns(columns: &[Vec<Rational>]) -> Matrix {
    let rows = columns.first().map_or(0, Vec::len);
    (0..rows).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect()
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(p, c);
        let inv = Rational::one() / &aug[c][c];
        for k in 0..2 * n {
            aug[c][k] *= &inv;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let factor = aug[i][c].clone();
                for k in 0..2 * n {
                    let delta = &factor * &aug[c][k];
                    aug[i][k] -= delta;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn mat(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&mat(&[&[1, 0], &[0, 1]])), int(1));
        assert_eq!(determinant(&mat(&[&[0, 1], &[1, 0]])), int(-1));
        assert_eq!(determinant(&mat(&[&[1, 2], &[2, 4]])), int(0));
        // Vandermonde at 0, 1, 2
        assert_eq!(determinant(&mat(&[&[1, 1, 1], &[0, 1, 2], &[0, 1, 4]])), int(2));
        assert_eq!(determinant(&vec![]), int(1));
    }

    #[test]
    fn rank_and_nullspace() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&m, &ns[0]).iter().all(Zero::is_zero));
        assert_eq!(nullspace(&mat(&[&[1, 0], &[0, 1]])).len(), 0);
    }

    #[test]
    fn inverses() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![int(1), int(-1)], vec![int(-1), int(2)]]);
        assert!(inverse(&mat(&[&[1, 2], &[2, 4]])).is_none());
        let half = vec![vec![int(2)]];
        assert_eq!(inverse(&half).unwrap(), vec![vec![ratio(1, 2)]]);
    }
}
