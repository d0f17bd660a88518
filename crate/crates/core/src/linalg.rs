//! Dense exact linear algebra over the rationals with deterministic pivoting.

use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

pub type QMat = Vec<Vec<Rational>>;

/// Row echelon form; pivots are the first nonzero entry scanning rows in order.
/// Returns the pivot columns.
pub fn echelon(m: &mut QMat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &m[r][j] * &f;
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMat) -> usize {
    let mut a = m.clone();
    echelon(&mut a).len()
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut a: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let piv = echelon(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Applies a rational matrix to a vector over any coefficient domain.
pub fn apply<T: Scalar>(m: &QMat, v: &[T]) -> Vec<T> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(c, _)| !c.is_zero())
                .fold(T::nil(), |acc, (c, x)| acc.add(&x.scale(c)))
        })
        .collect()
}

/// Solves the square full-rank system `m x = b`.
pub fn solve<T: Scalar>(m: &QMat, b: &[T]) -> Option<Vec<T>> {
    Some(apply(&inverse(m)?, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn mat(rows: &[&[i64]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rank_and_inverse() {
        let m = mat(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(rank(&m), 3);
        let inv = inverse(&m).unwrap();
        let v = apply(&inv, &[q(1), q(0), q(0)]);
        assert_eq!(apply(&m, &v), vec![q(1), q(0), q(0)]);
        assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]])), 1);
        assert!(inverse(&mat(&[&[1, 2], &[2, 4]])).is_none());
    }
}
