//! Dense square matrices and Cholesky factorization, enough for Hessians of a
//! few hundred mobile angles.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math::sqrt;
use crate::{Error, Result};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn negated(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| -x).collect() }
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: DenseMatrix,
}

impl Cholesky {
    /// Factor a symmetric matrix; fails with [`Error::NotPositiveDefinite`] on the
    /// first non-positive pivot. Only the lower triangle is read.
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.dim();
        let mut l = DenseMatrix::zeros(n);
        for j in 0..n {
            let mut pivot = a[(j, j)];
            for k in 0..j {
                pivot -= l[(j, k)] * l[(j, k)];
            }
            if !(pivot > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: j, value: pivot });
            }
            let root = sqrt(pivot);
            l[(j, j)] = root;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / root;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.lower.dim();
        let l = &self.lower;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        y
    }

    pub fn lower(&self) -> &DenseMatrix {
        &self.lower
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve_spd() {
        let mut a = DenseMatrix::zeros(3);
        let rows = [[4.0, 2.0, 0.4], [2.0, 5.0, 1.0], [0.4, 1.0, 3.0]];
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                a[(i, j)] = *v;
            }
        }
        let ch = Cholesky::factor(&a).unwrap();
        let x = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x);
        for (got, want) in ch.solve(&b).iter().zip(x) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let mut a = DenseMatrix::zeros(2);
        a[(0, 0)] = 1.0;
        a[(0, 1)] = 2.0;
        a[(1, 0)] = 2.0;
        a[(1, 1)] = 1.0;
        assert!(matches!(Cholesky::factor(&a), Err(Error::NotPositiveDefinite { pivot: 1, .. })));
    }
}
