use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::numerics::SignedLog;

/// Field element usable by the dense routines: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const ZERO: Self;
    const ONE: Self;

    fn conj(self) -> Self;
    fn abs2(self) -> f64;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn from_re(x: f64) -> Self;
    fn scale(self, x: f64) -> Self;
    fn is_finite(self) -> bool;

    /// Lower bidiagonal form `(diagonal, sub-diagonal)` of a row-major
    /// `p × n` matrix with `p ≤ n`.
    fn bidiagonalize(data: Vec<Self>, p: usize, n: usize) -> (Vec<f64>, Vec<f64>);
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs2(self) -> f64 {
        self * self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn from_re(x: f64) -> Self {
        x
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn bidiagonalize(mut data: Vec<Self>, p: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
        svd::bidiagonalize_generic(&mut data, p, n)
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    const ONE: Self = Complex64::new(1.0, 0.0);

    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn bidiagonalize(data: Vec<Self>, p: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
        let (mut re, mut im): (Vec<f64>, Vec<f64>) = data.iter().map(|z| (z.re, z.im)).unzip();
        svd::bidiagonalize_split(&mut re, &mut im, p, n)
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<Complex64>;

impl<T: Scalar> Matrix<T> {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("dimensions must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![T::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                let (src, dst) = (rhs.row(k), &mut out.data[i * rhs.cols..(i + 1) * rhs.cols]);
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn into_data(self) -> Vec<T> {
        self.data
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// `WW†`, made exactly self-adjoint by averaging the two triangles.
pub fn gram<T: Scalar>(w: &Matrix<T>) -> Matrix<T> {
    let p = w.rows();
    let mut raw = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let mut acc = T::ZERO;
            for (&a, &b) in w.row(i).iter().zip(w.row(j)) {
                acc += a * b.conj();
            }
            raw[(i, j)] = acc;
        }
    }
    let mut out = Matrix::zeros(p, p);
    for i in 0..p {
        out[(i, i)] = T::from_re(raw[(i, i)].re());
        for j in i + 1..p {
            let avg = (raw[(i, j)] + raw[(j, i)].conj()).scale(0.5);
            out[(i, j)] = avg;
            out[(j, i)] = avg.conj();
        }
    }
    out
}

/// Square matrix of [`SignedLog`] entries; dimension zero is the empty matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedLogMatrix {
    dim: usize,
    data: Vec<SignedLog>,
}

impl SignedLogMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![SignedLog::ZERO; dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> SignedLog) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_f64(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{dim}x{dim} matrix needs {} entries, got {}",
                dim * dim,
                values.len()
            )));
        }
        Ok(Self {
            dim,
            data: values.iter().map(|&x| SignedLog::from_f64(x)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn data(&self) -> &[SignedLog] {
        &self.data
    }
}

impl Index<(usize, usize)> for SignedLogMatrix {
    type Output = SignedLog;

    fn index(&self, (i, j): (usize, usize)) -> &SignedLog {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SignedLogMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut SignedLog {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_examples() {
        let id = RealMatrix::identity(2);
        assert_eq!(gram(&id), id);
        let w = RealMatrix::from_row_major(1, 2, vec![1.0, 2.0]).unwrap();
        assert_eq!(gram(&w).as_slice(), &[5.0]);
    }

    #[test]
    fn gram_complex_is_exactly_hermitian() {
        let w = ComplexMatrix::from_fn(3, 5, |i, j| {
            Complex64::new((i as f64 + 0.3 * j as f64).sin(), (1.7 * i as f64 - j as f64).cos())
        });
        let a = gram(&w);
        for i in 0..3 {
            assert_eq!(a[(i, i)].im, 0.0);
            assert!(a[(i, i)].re >= 0.0);
            for j in 0..3 {
                assert_eq!(a[(i, j)], a[(j, i)].conj());
            }
        }
    }

    #[test]
    fn shape_validation() {
        assert!(RealMatrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
        assert!(RealMatrix::from_row_major(0, 2, vec![]).is_err());
        assert!(RealMatrix::from_row_major(1, 1, vec![f64::NAN]).is_err());
        let a = RealMatrix::identity(2);
        let b = RealMatrix::zeros(3, 1);
        assert!(a.matmul(&b).is_err());
    }
}
