//! Small dense matrices: enough for a pooled covariance and its solves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.dim.max(1)).map(<[T]>::to_vec).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `self + λI`.
    pub fn with_ridge(&self, lambda: T) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] = m[(i, i)] + lambda;
        }
        m
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> T {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn lu(&self) -> Option<Lu<T>> {
        Lu::factor(self)
    }

    /// 1-norm condition number; infinite when singular.
    pub fn condition_number(&self) -> T {
        match self.lu() {
            None => T::infinity(),
            Some(lu) => {
                let mut inv_norm = T::zero();
                for j in 0..self.dim {
                    let mut e = vec![T::zero(); self.dim];
                    e[j] = T::one();
                    let col = lu.solve(&e);
                    inv_norm = inv_norm.max(col.iter().map(|x| x.abs()).sum());
                }
                self.norm_1() * inv_norm
            }
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

/// LU factorization with partial pivoting, `PA = LU`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: SquareMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    fn factor(a: &SquareMatrix<T>) -> Option<Self> {
        let n = a.dim;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    lu[(x, col)]
                        .abs()
                        .partial_cmp(&lu[(y, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty range");
            if lu[(pivot, col)] == T::zero() || !lu[(pivot, col)].is_finite() {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot, j)];
                    lu[(pivot, j)] = tmp;
                }
                perm.swap(col, pivot);
            }
            for row in col + 1..n {
                let factor = lu[(row, col)] / lu[(col, col)];
                lu[(row, col)] = factor;
                for j in col + 1..n {
                    lu[(row, j)] = lu[(row, j)] - factor * lu[(col, j)];
                }
            }
        }
        Some(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.dim;
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] = y[i] - self.lu[(i, j)] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] = y[i] - self.lu[(i, j)] * y[j];
            }
            y[i] = y[i] / self.lu[(i, i)];
        }
        y
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
