//! Dense complex matrices with LU-based determinant and inverse.
//!
//! Storage is row-major. Determinants and inverses use partial pivoting;
//! Hermitian spectra, thin QR and singular values are delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Relative threshold below which a pivoted LU factorisation is declared singular.
pub const SINGULAR_FLOOR: f64 = 1e-12;

struct Lu {
    packed: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
    /// Product of row norms of the input, an upper bound on `|det|`.
    hadamard: f64,
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::ShapeMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, NumericsError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(NumericsError::RaggedRows);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, NumericsError> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Complex64::conj).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.to_nalgebra()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// `I - self`, for square matrices.
    pub fn identity_minus(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            Complex64::new(d, 0.0) - self[(i, j)]
        })
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, NumericsError> {
        if self.cols != rhs.rows {
            return Err(NumericsError::ShapeMismatch {
                expected: (self.cols, rhs.cols),
                found: rhs.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Pivoted LU factorisation.
    fn lu(&self) -> Result<Lu, NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::NotSquare(self.shape()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, _) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            if pivot == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                a[i * n + k] = factor;
                for j in (k + 1)..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= factor * u;
                }
            }
        }
        let hadamard: f64 = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.data[i * n + j].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .product();
        Ok(Lu {
            packed: a,
            perm,
            sign,
            hadamard,
        })
    }

    /// Determinant via pivoted LU. Singular input yields `0` rather than an error.
    pub fn det(&self) -> Result<Complex64, NumericsError> {
        let n = self.rows;
        if n == 0 && self.is_square() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let lu = self.lu()?;
        let prod: Complex64 = (0..n).map(|i| lu.packed[i * n + i]).product();
        Ok(prod * lu.sign)
    }

    /// Inverse via pivoted LU. Fails when `|det|` is below [`SINGULAR_FLOOR`]
    /// times the Hadamard bound (product of row norms).
    pub fn inverse(&self) -> Result<Self, NumericsError> {
        let n = self.rows;
        let Lu {
            packed: lu,
            perm,
            hadamard,
            ..
        } = self.lu()?;
        let det: Complex64 = (0..n).map(|i| lu[i * n + i]).product();
        let ratio = det.norm() / hadamard.max(f64::MIN_POSITIVE);
        if !(ratio >= SINGULAR_FLOOR) {
            return Err(NumericsError::Singular { ratio });
        }
        let mut inv = Self::zeros(n, n);
        for col in 0..n {
            // Solve L y = P e_col, then U x = y.
            let mut x: Vec<Complex64> = (0..n)
                .map(|i| {
                    if perm[i] == col {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            for i in 0..n {
                for k in 0..i {
                    let l = lu[i * n + k];
                    x[i] = x[i] - l * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    let u = lu[i * n + k];
                    x[i] = x[i] - u * x[k];
                }
                x[i] /= lu[i * n + i];
            }
            for (i, xi) in x.iter().enumerate() {
                inv.data[i * n + col] = *xi;
            }
        }
        Ok(inv)
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Eigenvalues of the Hermitian part `(A + A*)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::NotSquare(self.shape()));
        }
        let h = (self + &self.adjoint()).scale(Complex64::new(0.5, 0.0));
        let mut eig: Vec<f64> = h
            .to_nalgebra()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).norm() <= tol))
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| (self[(i, j)] + self[(j, i)]).norm() <= tol))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in addition");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in subtraction");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] for a fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("incompatible shapes in product")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_of_2x2() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert!((m.det().unwrap() - c(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn det_of_complex_3x3_matches_cofactor_expansion() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(0.5, -0.2), c(0.0, 2.0)],
            vec![c(-1.0, 0.3), c(2.0, 0.0), c(0.1, 0.1)],
            vec![c(0.7, 0.0), c(0.0, -1.0), c(1.5, 0.5)],
        ])
        .unwrap();
        let a = |i, j| m[(i, j)];
        let cof = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        assert!((m.det().unwrap() - cof).norm() < 1e-13);
    }

    #[test]
    fn singular_matrix_has_zero_det_and_no_inverse() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(m.det().unwrap().norm() < 1e-15);
        assert!(matches!(m.inverse(), Err(NumericsError::Singular { .. })));
    }

    #[test]
    fn inverse_round_trip() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(0.5, 0.0)],
            vec![c(-0.3, 0.2), c(1.0, -1.0)],
        ])
        .unwrap();
        let prod = &m * &m.inverse().unwrap();
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn non_square_det_is_an_error() {
        assert!(matches!(
            ComplexMatrix::zeros(2, 3).det(),
            Err(NumericsError::NotSquare((2, 3)))
        ));
    }

    #[test]
    fn hermitian_eigenvalues_of_diagonal() {
        let m = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert_eq!(m.hermitian_eigenvalues().unwrap(), vec![-1.0, 3.0]);
    }

    #[test]
    fn operator_norm_of_rank_one() {
        let m = ComplexMatrix::from_real_rows(&[&[3.0, 4.0], &[0.0, 0.0]]).unwrap();
        assert!((m.operator_norm() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn empty_determinant_is_one() {
        assert_eq!(ComplexMatrix::zeros(0, 0).det().unwrap(), c(1.0, 0.0));
    }
}
