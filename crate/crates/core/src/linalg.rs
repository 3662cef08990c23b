//! Exact rational row reduction and complex least squares.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::scalar::Rational;

/// Dense rational matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rational>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }
    pub fn from_rows(rows: &[Vec<Rational>], cols: usize) -> Self {
        let mut m = QMat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.data[i * cols..(i + 1) * cols].clone_from_slice(r);
        }
        m
    }
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = Rational::one() / self.get(r, c).clone();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j) - &f * self.get(r, j);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Solves `self · x = b` with free variables set to zero; `None` if
    /// inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        let mut aug = QMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }
}

/// Rank of a set of rational vectors.
pub fn span_rank(vectors: &[Vec<Rational>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    QMat::from_rows(vectors, dim).rank()
}

/// Reduces a set of vectors to an echelon basis of their span.
pub fn span_basis(vectors: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = QMat::from_rows(vectors, dim);
    let r = m.rref().len();
    (0..r).map(|i| m.row(i).to_vec()).collect()
}

/// Complex least-squares solver with a precomputed SVD, reused across
/// right-hand sides.
pub struct LeastSquares {
    svd: nalgebra::SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    rcond: f64,
}

impl LeastSquares {
    pub fn new(a: DMatrix<Complex64>, rcond: f64) -> Self {
        LeastSquares { svd: a.svd(true, true), rcond }
    }
    pub fn singular_values(&self) -> Vec<f64> {
        self.svd.singular_values.iter().copied().collect()
    }
    pub fn solve(&self, b: &DVector<Complex64>) -> DVector<Complex64> {
        let smax = self.svd.singular_values.max();
        self.svd
            .solve(b, self.rcond * smax)
            .expect("SVD computed with both factors")
    }
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}
