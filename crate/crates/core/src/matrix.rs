//! Dense square complex matrices.
//!
//! Storage is row-major and always dense. The product kernel skips exact zero
//! entries of the left factor and, when the right factor is mostly empty,
//! walks only its stored nonzeros. Operators built from Pauli-like generators
//! keep a handful of nonzeros per row, so this keeps 1024-dimensional layouts
//! cheap without changing the storage format. Summation order per output
//! entry is always ascending in the inner index, so results are bitwise
//! reproducible.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
/// Magnitude below which product entries are flushed to zero.
pub const FLUSH: f64 = 1e-12;
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[C64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x.norm_sqr()).sum::<f64>())
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        libm::sqrt(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>(),
        )
    }

    /// Number of entries that are not exactly zero.
    pub fn nonzeros(&self) -> usize {
        self.data.iter().filter(|x| **x != ZERO).count()
    }

    /// Matrix product. Entries of magnitude below [`FLUSH`] are set to zero so
    /// that cancellation residue does not fill in sparse operators.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        let nnz = rhs.nonzeros();
        if nnz * 4 > n * n {
            for i in 0..n {
                let out_row = &mut out[i * n..(i + 1) * n];
                for k in 0..n {
                    let a = self.data[i * n + k];
                    if a == ZERO {
                        continue;
                    }
                    let b_row = &rhs.data[k * n..(k + 1) * n];
                    for (o, &b) in out_row.iter_mut().zip(b_row) {
                        *o += a * b;
                    }
                }
            }
        } else {
            let mut cols: Vec<u32> = Vec::with_capacity(nnz);
            let mut offsets: Vec<usize> = Vec::with_capacity(n + 1);
            offsets.push(0);
            for k in 0..n {
                for j in 0..n {
                    if rhs.data[k * n + j] != ZERO {
                        cols.push(j as u32);
                    }
                }
                offsets.push(cols.len());
            }
            for i in 0..n {
                let out_row = &mut out[i * n..(i + 1) * n];
                for k in 0..n {
                    let a = self.data[i * n + k];
                    if a == ZERO {
                        continue;
                    }
                    let b_row = &rhs.data[k * n..(k + 1) * n];
                    for &j in &cols[offsets[k]..offsets[k + 1]] {
                        let j = j as usize;
                        out_row[j] += a * b_row[j];
                    }
                }
            }
        }
        for o in out.iter_mut().filter(|o| o.norm_sqr() < FLUSH * FLUSH) {
            *o = ZERO;
        }
        Self { dim: n, data: out }
    }

    pub fn pow(&self, exponent: usize) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..exponent {
            acc = acc.matmul(self);
        }
        acc
    }

    pub fn apply(&self, vector: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, vector.len(), "vector length mismatch");
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(vector)
                    .filter(|(a, _)| **a != ZERO)
                    .map(|(a, v)| a * v)
                    .sum()
            })
            .collect()
    }

    /// Tensor product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// `‖A†A − 1‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .distance(&Self::identity(self.dim))
    }

    /// `‖A − A†‖_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                acc += 2.0 * (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
            acc += (self.get(i, i).im * 2.0) * (self.get(i, i).im * 2.0);
        }
        libm::sqrt(acc)
    }

    /// `‖A² − 1‖_F`.
    pub fn involution_residual(&self) -> f64 {
        self.matmul(self).distance(&Self::identity(self.dim))
    }

    /// `‖A² − A‖_F`.
    pub fn idempotence_residual(&self) -> f64 {
        self.matmul(self).distance(self)
    }

    /// `‖AB − BA‖_F`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        self.matmul(other).distance(&other.matmul(self))
    }

    /// `‖AB + BA‖_F`.
    pub fn anticommutator_norm(&self, other: &Self) -> f64 {
        let ab = self.matmul(other);
        let ba = other.matmul(self);
        libm::sqrt(
            ab.data
                .iter()
                .zip(&ba.data)
                .map(|(x, y)| (x + y).norm_sqr())
                .sum::<f64>(),
        )
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo_random(dim: usize, seed: u64, density: u64) -> Matrix {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 11
        };
        let data = (0..dim * dim)
            .map(|_| {
                if next() % 100 < density {
                    C64::new(
                        (next() % 1000) as f64 / 500.0 - 1.0,
                        (next() % 1000) as f64 / 500.0 - 1.0,
                    )
                } else {
                    ZERO
                }
            })
            .collect();
        Matrix::from_vec(dim, data).unwrap()
    }

    fn naive(a: &Matrix, b: &Matrix) -> Matrix {
        let n = a.dim();
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += a.get(i, k) * b.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    #[test]
    fn product_matches_naive_for_dense_and_sparse_factors() {
        for (density, seed) in [(100, 1), (10, 2), (3, 3), (50, 4)] {
            let a = pseudo_random(13, seed, density);
            let b = pseudo_random(13, seed + 17, density);
            assert!(a.matmul(&b).distance(&naive(&a, &b)) < 1e-12);
        }
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = Matrix::identity(2);
        let i3 = Matrix::identity(3);
        assert_eq!(i2.kron(&i3), Matrix::identity(6));
    }

    #[test]
    fn from_vec_rejects_wrong_length() {
        assert_eq!(
            Matrix::from_vec(2, vec![ZERO; 3]),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        );
    }

    #[test]
    fn hermiticity_residual_detects_imaginary_diagonal() {
        let m = Matrix::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        assert!(m.hermiticity_residual() > 1.0);
        assert!(Matrix::identity(3).hermiticity_residual() == 0.0);
    }
}
