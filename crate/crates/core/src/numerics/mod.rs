//! Numerical primitives: complex matrices, exact Wirtinger polynomials,
//! scalar fields with Wirtinger Hessians, and compensated summation.

mod field;
mod matrix;
mod poly;

pub use field::{
    directional_wirtinger_derivative, fd_hessian_with_estimate, wirtinger_hessian, FdOptions,
    FieldKind, WirtingerField, WirtingerHessian,
};
pub use matrix::{ComplexMatrix, SINGULAR_FLOOR};
pub use poly::{Monomial, Poly, COEFF_DROP};

pub use num_complex::Complex64;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not square: {0:?}")]
    NotSquare((usize, usize)),
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("rows have unequal lengths")]
    RaggedRows,
    #[error("matrix is numerically singular (|det| / Hadamard bound = {ratio:e})")]
    Singular { ratio: f64 },
    #[error("polynomial has {found} variables, expected {expected}")]
    VariableCount { expected: usize, found: usize },
    #[error("finite-difference step {0:e} is too small for the evaluation scale")]
    StepUnderflow(f64),
    #[error("field evaluation returned a non-finite value")]
    NonFinite,
    #[error("substituted map must be holomorphic")]
    NotHolomorphic,
}

/// Shorthand for a complex number.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.correction += (self.sum - t) + x;
        } else {
            self.correction += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let mut s = CompensatedSum::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
