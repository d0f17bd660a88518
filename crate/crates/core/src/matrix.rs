//! Square matrices over a coefficient domain.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, parse_q, q, Rational, Scalar};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type QMatrix = Matrix<Rational>;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![T::nil(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::unit();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimMismatch(n, r.len()));
        }
        Ok(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diag(entries: Vec<T>) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n);
        for (i, e) in entries.into_iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    /// Lifts a rational matrix into another domain.
    pub fn lift(m: &QMatrix) -> Self {
        Matrix {
            n: m.n,
            data: m.data.iter().map(T::from_q).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let n = self.n;
        self.data.iter().enumerate().map(move |(k, v)| (k / n, k % n, v))
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_nil)
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, T::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, T::sub)
    }

    pub fn neg(&self) -> Self {
        self.map(T::neg)
    }

    pub fn scale(&self, x: &Rational) -> Self {
        self.map(|e| e.scale(x))
    }

    /// Multiplies every entry by a domain element.
    pub fn times(&self, x: &T) -> Self {
        self.map(|e| if e.is_nil() { T::nil() } else { e.mul(x) })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out: Matrix<T> = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_nil() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if b.is_nil() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        out
    }

    /// Multiplication by a rational matrix on the left.
    pub fn lmul_q(&self, left: &QMatrix) -> Self {
        let n = self.n;
        let mut out: Matrix<T> = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = left.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &self.data[k * n + j];
                    if !b.is_nil() {
                        let idx = i * n + j;
                        out.data[idx] = out.data[idx].add(&b.scale(a));
                    }
                }
            }
        }
        out
    }

    /// Multiplication by a rational matrix on the right.
    pub fn rmul_q(&self, right: &QMatrix) -> Self {
        let n = self.n;
        let mut out: Matrix<T> = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_nil() {
                    continue;
                }
                for j in 0..n {
                    let b = right.get(k, j);
                    if !b.is_zero() {
                        let idx = i * n + j;
                        out.data[idx] = out.data[idx].add(&a.scale(b));
                    }
                }
            }
        }
        out
    }

    pub fn try_bracket(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimMismatch(self.n, other.n));
        }
        Ok(self.mul(other).sub(&other.mul(self)))
    }

    pub fn bracket(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Entry-wise derivation.
    pub fn derive(&self) -> Self {
        self.map(T::derive)
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::nil(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Matrix::identity(self.n), |acc, _| acc.mul(self))
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(i, j, v)| i == j || v.is_nil())
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        self.entries().all(|(i, j, v)| {
            if i == j {
                *v == T::unit()
            } else {
                j < i || v.is_nil()
            }
        })
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        self.transpose().is_lower_unitriangular()
    }

    /// First entry (row-major) that is nonzero.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &T)> {
        self.entries().find(|(_, _, v)| !v.is_nil())
    }

    pub fn to_json_with(&self, f: impl Fn(&T) -> serde_json::Value) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows()
                .iter()
                .map(|r| serde_json::Value::Array(r.iter().map(&f).collect()))
                .collect(),
        )
    }

    pub fn from_json_with(
        v: &serde_json::Value,
        f: impl Fn(&serde_json::Value) -> Result<T>,
    ) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
        let rows: Vec<Vec<T>> = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                    .iter()
                    .map(&f)
                    .collect()
            })
            .collect::<Result<_>>()?;
        Matrix::from_rows(rows)
    }
}

impl QMatrix {
    /// Elementary matrix E_{ij} (0-based) scaled by `c`.
    pub fn unit(n: usize, i: usize, j: usize, c: i64) -> QMatrix {
        let mut m = QMatrix::zeros(n);
        m.set(i, j, q(c));
        m
    }

    /// Sum of c·E_{ij} over 1-based (i, j, c) triples.
    pub fn from_entries(n: usize, entries: &[(usize, usize, i64)]) -> QMatrix {
        let mut m = QMatrix::zeros(n);
        for &(i, j, c) in entries {
            m.set(i - 1, j - 1, q(c));
        }
        m
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        let inv = crate::linalg::inverse(&self.rows())?;
        QMatrix::from_rows(inv).ok()
    }

    pub fn det(&self) -> Rational {
        let mut a = self.rows();
        let n = self.n;
        let mut det = q(1);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= &a[c][c];
            let piv = a[c][c].clone();
            for i in c + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = &a[i][c] / &piv;
                for j in c..n {
                    let d = &a[c][j] * &f;
                    a[i][j] -= d;
                }
            }
        }
        det
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.to_json_with(|x| serde_json::Value::String(fmt_q(x)))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<QMatrix> {
        Matrix::from_json_with(v, |e| match e {
            serde_json::Value::String(s) => parse_q(s),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(q)
                .ok_or_else(|| Error::Parse(format!("non-integer number {n}"))),
            other => Err(Error::Parse(format!("bad matrix entry {other}"))),
        })
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_dimension_check() {
        let a = QMatrix::identity(2);
        let b = QMatrix::identity(3);
        assert_eq!(a.try_bracket(&b), Err(Error::DimMismatch(2, 3)));
    }

    #[test]
    fn det_and_inverse() {
        let m = QMatrix::from_entries(3, &[(1, 1, 2), (1, 2, 1), (2, 2, 1), (3, 1, 1), (3, 3, 1)]);
        assert_eq!(m.det(), q(2));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(3));
        let s = QMatrix::from_entries(2, &[(1, 2, 1), (2, 1, -1)]);
        assert_eq!(s.det(), q(1));
    }

    #[test]
    fn json_round_trip() {
        let m = QMatrix::from_entries(2, &[(1, 2, 3), (2, 1, -1)]);
        let j = m.to_json();
        assert_eq!(j.to_string(), r#"[["0/1","3/1"],["-1/1","0/1"]]"#);
        assert_eq!(QMatrix::from_json(&j).unwrap(), m);
    }
}
