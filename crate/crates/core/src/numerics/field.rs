//! Scalar fields on matrix space and their Wirtinger Hessians.
//!
//! A field accepts a matrix of fixed shape; its entries, flattened row-major,
//! are the ambient coordinates `z_a`. The Hessian is the mixed matrix
//! `H[a][b] = ∂²u/∂z_a∂z̄_b`, exact for polynomial fields and computed by
//! central differences with Richardson extrapolation otherwise.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::sync::Arc;

use num_complex::Complex64;

use super::{ComplexMatrix, NumericsError, Poly};

pub type Evaluator = Arc<dyn Fn(&ComplexMatrix) -> Complex64 + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(&ComplexMatrix) -> WirtingerHessian + Send + Sync>;

/// Square matrix of mixed second derivatives indexed by flattened ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerHessian {
    dim: usize,
    data: Vec<Complex64>,
}

impl WirtingerHessian {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// `max |H[a][b] - conj(H[b][a])|`; zero for real-valued fields.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..=a {
                worst = worst.max((self[(a, b)] - self[(b, a)].conj()).norm());
            }
        }
        worst
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.dim, |a, b| self[(a, b)])
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self, NumericsError> {
        if !m.is_square() {
            return Err(NumericsError::NotSquare(m.shape()));
        }
        Ok(Self {
            dim: m.rows(),
            data: m.as_slice().to_vec(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for WirtingerHessian {
    type Output = Complex64;

    fn index(&self, (a, b): (usize, usize)) -> &Complex64 {
        &self.data[a * self.dim + b]
    }
}

impl IndexMut<(usize, usize)> for WirtingerHessian {
    fn index_mut(&mut self, (a, b): (usize, usize)) -> &mut Complex64 {
        &mut self.data[a * self.dim + b]
    }
}

#[derive(Clone)]
pub enum FieldKind {
    /// Exact polynomial in the flattened entries.
    Polynomial(Poly),
    /// Black-box evaluator; Hessians by finite differences.
    Opaque(Evaluator),
    /// Evaluator with a caller-supplied exact Hessian.
    Analytic { eval: Evaluator, hessian: HessianFn },
}

/// A scalar field `u : C^{rows×cols} → C`.
#[derive(Clone)]
pub struct WirtingerField {
    shape: (usize, usize),
    kind: FieldKind,
}

impl fmt::Debug for WirtingerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            FieldKind::Polynomial(p) => format!("Polynomial({} terms)", p.len()),
            FieldKind::Opaque(_) => "Opaque".to_string(),
            FieldKind::Analytic { .. } => "Analytic".to_string(),
        };
        f.debug_struct("WirtingerField")
            .field("shape", &self.shape)
            .field("kind", &kind)
            .finish()
    }
}

impl WirtingerField {
    pub fn polynomial(shape: (usize, usize), poly: Poly) -> Result<Self, NumericsError> {
        if poly.nvars() != shape.0 * shape.1 {
            return Err(NumericsError::VariableCount {
                expected: shape.0 * shape.1,
                found: poly.nvars(),
            });
        }
        Ok(Self {
            shape,
            kind: FieldKind::Polynomial(poly),
        })
    }

    pub fn opaque(
        shape: (usize, usize),
        f: impl Fn(&ComplexMatrix) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            shape,
            kind: FieldKind::Opaque(Arc::new(f)),
        }
    }

    pub fn analytic(
        shape: (usize, usize),
        f: impl Fn(&ComplexMatrix) -> Complex64 + Send + Sync + 'static,
        hessian: impl Fn(&ComplexMatrix) -> WirtingerHessian + Send + Sync + 'static,
    ) -> Self {
        Self {
            shape,
            kind: FieldKind::Analytic {
                eval: Arc::new(f),
                hessian: Arc::new(hessian),
            },
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn as_polynomial(&self) -> Option<&Poly> {
        match &self.kind {
            FieldKind::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    /// Same field with the exact Hessian hidden, forcing finite differences.
    pub fn to_opaque(&self) -> Self {
        let this = self.clone();
        Self::opaque(self.shape, move |z| {
            this.eval(z).unwrap_or(Complex64::new(f64::NAN, 0.0))
        })
    }

    fn check_shape(&self, z: &ComplexMatrix) -> Result<(), NumericsError> {
        if z.shape() != self.shape {
            return Err(NumericsError::ShapeMismatch {
                expected: self.shape,
                found: z.shape(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, z: &ComplexMatrix) -> Result<Complex64, NumericsError> {
        self.check_shape(z)?;
        match &self.kind {
            FieldKind::Polynomial(p) => p.eval_matrix(z),
            FieldKind::Opaque(f) | FieldKind::Analytic { eval: f, .. } => Ok(f(z)),
        }
    }
}

/// Finite-difference controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    /// Base step; scaled by `max(1, max|z_a|)`.
    pub step: f64,
    /// Combine steps `h` and `h/2` to cancel the `O(h²)` error term.
    pub richardson: bool,
    /// Use finite differences even when an exact Hessian is available.
    pub force: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            richardson: true,
            force: false,
        }
    }
}

impl FdOptions {
    pub fn forced() -> Self {
        Self {
            force: true,
            ..Self::default()
        }
    }
}

/// Wirtinger Hessian of `u` at `z`: exact for polynomial and analytic fields
/// (unless `opts.force`), finite differences otherwise.
pub fn wirtinger_hessian(
    u: &WirtingerField,
    z: &ComplexMatrix,
    opts: &FdOptions,
) -> Result<WirtingerHessian, NumericsError> {
    u.check_shape(z)?;
    match (&u.kind, opts.force) {
        (FieldKind::Polynomial(p), false) => p.wirtinger_hessian(z.as_slice()),
        (FieldKind::Analytic { hessian, .. }, false) => Ok(hessian(z)),
        _ => fd_hessian_with_estimate(u, z, opts).map(|(h, _)| h),
    }
}

/// Central-difference real Hessian of `f` over the `2N` real coordinates
/// `(Re z_a, Im z_a)`, folded into the mixed Wirtinger Hessian.
fn fd_hessian_at_step(
    u: &WirtingerField,
    z: &ComplexMatrix,
    h: f64,
) -> Result<WirtingerHessian, NumericsError> {
    let n = z.rows() * z.cols();
    let dirs = 2 * n;
    let shift = |base: &mut ComplexMatrix, d: usize, by: f64| {
        let entry = &mut base.as_mut_slice()[d / 2];
        if d.is_multiple_of(2) {
            entry.re += by;
        } else {
            entry.im += by;
        }
    };
    let eval = |m: &ComplexMatrix| -> Result<Complex64, NumericsError> {
        let v = u.eval(m)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFinite)
        }
    };
    let f0 = eval(z)?;
    let mut s = vec![Complex64::new(0.0, 0.0); dirs * dirs];
    let mut work = z.clone();
    for p in 0..dirs {
        shift(&mut work, p, h);
        let fp = eval(&work)?;
        shift(&mut work, p, -2.0 * h);
        let fm = eval(&work)?;
        shift(&mut work, p, h);
        s[p * dirs + p] = (fp - f0 * 2.0 + fm) / (h * h);
        for q in (p + 1)..dirs {
            let mut corner = |sp: f64, sq: f64| {
                shift(&mut work, p, sp * h);
                shift(&mut work, q, sq * h);
                let v = eval(&work);
                shift(&mut work, p, -sp * h);
                shift(&mut work, q, -sq * h);
                v
            };
            let fpp = corner(1.0, 1.0)?;
            let fpm = corner(1.0, -1.0)?;
            let fmp = corner(-1.0, 1.0)?;
            let fmm = corner(-1.0, -1.0)?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            s[p * dirs + q] = v;
            s[q * dirs + p] = v;
        }
    }
    let mut out = WirtingerHessian::zeros(n);
    let i = Complex64::new(0.0, 1.0);
    for a in 0..n {
        for b in 0..n {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            out[(a, b)] = (s[xa * dirs + xb] + s[ya * dirs + yb]) * 0.25
                + i * 0.25 * (s[xa * dirs + yb] - s[ya * dirs + xb]);
        }
    }
    Ok(out)
}

/// Finite-difference Hessian together with an error estimate: the largest
/// entrywise change between steps `h` and `h/2`.
pub fn fd_hessian_with_estimate(
    u: &WirtingerField,
    z: &ComplexMatrix,
    opts: &FdOptions,
) -> Result<(WirtingerHessian, f64), NumericsError> {
    u.check_shape(z)?;
    let scale = z.max_abs().max(1.0);
    let h = opts.step * scale;
    if !(h > 1e3 * f64::EPSILON * scale) {
        return Err(NumericsError::StepUnderflow(h));
    }
    let coarse = fd_hessian_at_step(u, z, h)?;
    if !opts.richardson {
        return Ok((coarse, f64::NAN));
    }
    let fine = fd_hessian_at_step(u, z, h / 2.0)?;
    let estimate = fine.max_abs_diff(&coarse);
    let mut out = WirtingerHessian::zeros(coarse.dim());
    for (o, (f, c)) in out.data.iter_mut().zip(fine.data.iter().zip(&coarse.data)) {
        *o = (f * 4.0 - c) / 3.0;
    }
    Ok((out, estimate))
}

/// Holomorphic Wirtinger derivative of `f` at `z` along the matrix direction
/// `dir`: `∂/∂ε f(z + ε·dir)` at `ε = 0`, by Richardson-extrapolated central
/// differences in `Re ε` and `Im ε`.
pub fn directional_wirtinger_derivative(
    f: impl Fn(&ComplexMatrix) -> Complex64,
    z: &ComplexMatrix,
    dir: &ComplexMatrix,
    step: f64,
) -> Complex64 {
    let at = |eps: Complex64| f(&(z + &dir.scale(eps)));
    let central = |h: f64| {
        let dx = (at(Complex64::new(h, 0.0)) - at(Complex64::new(-h, 0.0))) / (2.0 * h);
        let dy = (at(Complex64::new(0.0, h)) - at(Complex64::new(0.0, -h))) / (2.0 * h);
        (dx - Complex64::new(0.0, 1.0) * dy) * 0.5
    };
    let coarse = central(step);
    let fine = central(step / 2.0);
    (fine * 4.0 - coarse) / 3.0
}
