//! Small dense matrices and an LU factorization with partial pivoting.
//!
//! Everything here is sized by the method parameters (`k`, `s`, `nu`), so the
//! matrices are tiny and stored row-major in a flat `Vec`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row slices. All rows must have the same length.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization `P A = L U` of a square matrix with partial (row) pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: Matrix,
    perm: Vec<usize>,
    singular: bool,
    norm_one: f64,
}

impl Lu {
    pub fn new(a: &Matrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::DimensionMismatch {
                expected: a.rows,
                actual: a.cols,
            });
        }
        let n = a.rows;
        let norm_one = a.norm_one();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;

        for col in 0..n {
            let (pivot_row, pivot_abs) =
                (col..n)
                    .map(|r| (r, f[(r, col)].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs == 0.0 || !pivot_abs.is_finite() {
                singular = true;
                continue;
            }
            if pivot_row != col {
                for j in 0..n {
                    f.data.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = f[(col, col)];
            for r in col + 1..n {
                let factor = f[(r, col)] / pivot;
                f[(r, col)] = factor;
                if factor != 0.0 {
                    for j in col + 1..n {
                        let u = f[(col, j)];
                        f[(r, j)] -= factor * u;
                    }
                }
            }
        }

        Ok(Self {
            factors: f,
            perm,
            singular,
            norm_one,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.factors.rows;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        if self.singular {
            return Err(Error::SingularMatrix);
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.factors[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.factors[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.factors[(i, i)];
        }
        Ok(x)
    }

    /// Reciprocal condition number in the 1-norm, `1 / (|A|_1 |A^-1|_1)`.
    ///
    /// The inverse is formed column by column from the factors; the systems
    /// this is used on have dimension equal to the number of extra invariants,
    /// so the exact value is as cheap as an estimator would be.
    pub fn rcond(&self) -> f64 {
        let n = self.factors.rows;
        if self.singular || self.norm_one == 0.0 {
            return 0.0;
        }
        if n == 0 {
            return 1.0;
        }
        let mut inv_norm: f64 = 0.0;
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = match self.solve(&e) {
                Ok(c) => c,
                Err(_) => return 0.0,
            };
            inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
        }
        if !inv_norm.is_finite() {
            return 0.0;
        }
        1.0 / (self.norm_one * inv_norm)
    }
}
