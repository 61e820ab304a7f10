//! Small dense matrices over the rationals.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::parse::parse_scalar;
use crate::poly::{format_scalar, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: Vec<Vec<Scalar>>,
}

impl Matrix {
    /// Panics unless `rows` is square.
    pub fn new(rows: Vec<Vec<Scalar>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix { rows }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::poly::scalar(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.rows[i][i] = Scalar::one();
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        Matrix {
            rows: vec![vec![Scalar::zero(); n]; n],
        }
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let mut m = Matrix::zero(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.rows[i][i] = e.clone();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n();
        assert_eq!(n, other.n());
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                if self.rows[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &self.rows[i][k] * &other.rows[k][j];
                    out.rows[i][j] += t;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Matrix {
        (0..e).fold(Matrix::identity(self.n()), |acc, _| acc.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.n())
    }

    pub fn det(&self) -> Scalar {
        let n = self.n();
        let mut a = self.rows.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Scalar::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &pivot;
                let (top, bottom) = a.split_at_mut(r);
                for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= &factor * y;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n();
        let mut a = self.rows.clone();
        let mut inv = Matrix::identity(n).rows;
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or(Error::SingularMatrix)?;
            a.swap(p, col);
            inv.swap(p, col);
            let pivot = a[col][col].recip();
            for c in 0..n {
                a[col][c] *= &pivot;
                inv[col][c] *= &pivot;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let t = &factor * &a[col][c];
                    a[r][c] -= t;
                    let t = &factor * &inv[col][c];
                    inv[r][c] -= t;
                }
            }
        }
        Ok(Matrix { rows: inv })
    }

    /// Parses `[[a,b],[c,d]]` with rational entries.
    pub fn parse(text: &str) -> Result<Matrix> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::syntax(0, "matrix must be enclosed in [ ]"))?;
        let mut rows = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('[').ok_or_else(|| {
                Error::syntax(offset_in(text, rest), "expected '[' opening a row")
            })?;
            let close = body
                .find(']')
                .ok_or_else(|| Error::syntax(text.len(), "unterminated matrix row"))?;
            rows.push(parse_scalar_list(&body[..close])?);
            rest = body[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
            }
        }
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::syntax(0, "matrix must be square and nonempty"));
        }
        Ok(Matrix { rows })
    }
}

fn offset_in(whole: &str, part: &str) -> usize {
    part.as_ptr() as usize - whole.as_ptr() as usize
}

/// Comma-separated rationals, e.g. `1, -2/3, 0`.
pub fn parse_scalar_list(text: &str) -> Result<Vec<Scalar>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_scalar).collect()
}

/// Parses a bracketed vector `[c1, ..., cn]`.
pub fn parse_vector(text: &str) -> Result<Vec<Scalar>> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::syntax(0, "vector must be enclosed in [ ]"))?;
    parse_scalar_list(inner)
}

pub fn format_vector(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(format_scalar).collect();
    format!("[{}]", parts.join(","))
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| format_vector(r)).collect();
        write!(f, "[{}]", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{ratio, scalar};

    #[test]
    fn det_and_inverse() {
        let m = Matrix::from_i64(&[&[0, 1], &[-1, 0]]);
        assert_eq!(m.det(), scalar(1));
        assert_eq!(m.inverse().unwrap(), Matrix::from_i64(&[&[0, -1], &[1, 0]]));
        let d = Matrix::diagonal(&[scalar(2), ratio(1, 2)]);
        assert_eq!(d.det(), scalar(1));
        assert!(d.mul(&d.inverse().unwrap()).is_identity());
        assert_eq!(
            Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse(),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn parse_and_format() {
        let m = Matrix::parse("[[1, -1/2], [0, 3]]").unwrap();
        assert_eq!(m.to_string(), "[[1,-1/2],[0,3]]");
        assert_eq!(Matrix::parse(&m.to_string()).unwrap(), m);
        assert!(Matrix::parse("[[1,2],[3]]").is_err());
        assert!(Matrix::parse("[1,2]").is_err());
        assert_eq!(
            parse_vector("[1, 2/4]").unwrap(),
            vec![scalar(1), ratio(1, 2)]
        );
    }
}
