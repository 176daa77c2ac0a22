//! Poisson–Szegő kernels of the matrix domains and the algebraic pieces of
//! their Hua-harmonicity identity.
//!
//! With `V = I - z z*` and `W = I - z w*`, the kernel is
//! `P(z, w) = det(V)^κ / |det W|^{2κ}`. Differentiating `log P` gives
//!
//! `(1/κ²P) Δ^{jk} P = A + B + C - D - E`,
//!
//! where `A = (1/κ) Δ^{jk} log det V` and `B, C, D, E` are the weighted
//! quadratic forms in the log-gradients `b = ∇ log det V`, `c = ∇ log det W`
//! (`B ~ b b̄`, `C ~ c c̄`, `D ~ b c̄`, `E ~ c b̄`). For the symmetric and
//! antisymmetric types all five have closed forms; their sum vanishes on the
//! Shilov boundary.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::domains::{contains, DomainError, DomainSpec, MatrixPoint};
use crate::numerics::{
    directional_wirtinger_derivative, wirtinger_hessian, ComplexMatrix, FdOptions, NumericsError,
    Poly, WirtingerField, WirtingerHessian,
};
use crate::operators::{coefficients, v_matrix, OperatorError, OperatorId, OperatorKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("z is not an interior point (margin {0:e})")]
    NotInterior(f64),
    #[error("det(I - z w*) vanishes")]
    SingularPair,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("points belong to different domains: {0} and {1}")]
    DomainMismatch(DomainSpec, DomainSpec),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `W(z, w) = I - z w*`.
pub fn w_matrix(z: &ComplexMatrix, w: &ComplexMatrix) -> ComplexMatrix {
    (z * &w.adjoint()).identity_minus()
}

fn hua_operator(spec: &DomainSpec) -> Result<OperatorKind, KernelError> {
    match spec {
        DomainSpec::TypeI { .. } => Ok(OperatorKind::Delta1),
        DomainSpec::TypeII { .. } => Ok(OperatorKind::Delta2),
        DomainSpec::TypeIII { .. } => Ok(OperatorKind::Delta3),
        DomainSpec::TypeIV { .. } => Err(KernelError::Unsupported(
            "kernel identities for type IV".into(),
        )),
    }
}

/// Kernel value from raw matrices without membership checks. Returns NaN when
/// `det V ≤ 0`; used as the evaluator of finite-difference fields.
pub fn poisson_szego_unchecked(kappa: f64, z: &ComplexMatrix, w: &ComplexMatrix) -> f64 {
    let det_v = match v_matrix(z).det() {
        Ok(d) => d.re,
        Err(_) => return f64::NAN,
    };
    let det_w = match w_matrix(z, w).det() {
        Ok(d) => d.norm(),
        Err(_) => return f64::NAN,
    };
    if !(det_v > 0.0) {
        return f64::NAN;
    }
    (kappa * det_v.ln() - 2.0 * kappa * det_w.ln()).exp()
}

/// `P(z, w)` for `z` interior and `w` in the closure (typically Shilov).
pub fn poisson_szego(z: &MatrixPoint, w: &MatrixPoint) -> Result<f64, KernelError> {
    let spec = z.spec();
    if w.spec() != spec {
        return Err(KernelError::DomainMismatch(spec, w.spec()));
    }
    let kappa = spec.kappa()?.as_f64();
    let margin = contains(&spec, z.value())?.margin;
    if !(margin > 0.0) {
        return Err(KernelError::NotInterior(margin));
    }
    if w_matrix(z.value(), w.value()).inverse().is_err() {
        return Err(KernelError::SingularPair);
    }
    Ok(poisson_szego_unchecked(kappa, z.value(), w.value()))
}

/// `z ↦ P(z, w)` as an opaque field on the ambient matrix space; Hessians are
/// taken by finite differences.
pub fn kernel_field_opaque(w: &MatrixPoint) -> Result<WirtingerField, KernelError> {
    let spec = w.spec();
    let kappa = spec.kappa()?.as_f64();
    let w = w.value().clone();
    Ok(WirtingerField::opaque(spec.ambient_shape(), move |z| {
        Complex64::new(poisson_szego_unchecked(kappa, z, &w), 0.0)
    }))
}

/// Exact-derivative kernel fields: `N = det(I - z z*)` and `G = det(I - z w*)`
/// are expanded as polynomials in the ambient entries and the Hessian of
/// `N^κ |G|^{-2κ}` is assembled by the product and power rules.
#[derive(Debug, Clone)]
pub struct ExactKernel {
    spec: DomainSpec,
    kappa: f64,
    det_v: Arc<Poly>,
}

fn entry_vars(rows: usize, cols: usize) -> Vec<Vec<Poly>> {
    let n = rows * cols;
    (0..rows)
        .map(|i| (0..cols).map(|j| Poly::var(n, i * cols + j)).collect())
        .collect()
}

impl ExactKernel {
    pub fn new(spec: DomainSpec) -> Result<Self, KernelError> {
        let kappa = spec.kappa()?.as_f64();
        let (rows, cols) = spec.ambient_shape();
        let nv = rows * cols;
        let z = entry_vars(rows, cols);
        let zc: Vec<Vec<Poly>> = z
            .iter()
            .map(|r| r.iter().map(Poly::conj).collect())
            .collect();
        let v: Vec<Vec<Poly>> = (0..rows)
            .map(|i| {
                (0..rows)
                    .map(|j| {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        (0..cols).fold(Poly::constant(nv, Complex64::new(delta, 0.0)), |acc, l| {
                            &acc - &(&z[i][l] * &zc[j][l])
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            spec,
            kappa,
            det_v: Arc::new(Poly::det(&v)?),
        })
    }

    pub fn spec(&self) -> DomainSpec {
        self.spec
    }

    /// `det(I - z z*)` as a polynomial in the ambient entries.
    pub fn det_v_poly(&self) -> &Poly {
        &self.det_v
    }

    /// `det(I - z w*)` as a holomorphic polynomial in `z`.
    pub fn det_w_poly(&self, w: &ComplexMatrix) -> Result<Poly, KernelError> {
        let (rows, cols) = self.spec.ambient_shape();
        if w.shape() != (rows, cols) {
            return Err(NumericsError::ShapeMismatch {
                expected: (rows, cols),
                found: w.shape(),
            }
            .into());
        }
        let nv = rows * cols;
        let z = entry_vars(rows, cols);
        let m: Vec<Vec<Poly>> = (0..rows)
            .map(|i| {
                (0..rows)
                    .map(|j| {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        (0..cols).fold(Poly::constant(nv, Complex64::new(delta, 0.0)), |acc, l| {
                            &acc - &z[i][l].scale(w[(j, l)].conj())
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Poly::det(&m)?)
    }

    /// `z ↦ P(z, w)` with its exact Wirtinger Hessian.
    pub fn field(&self, w: &MatrixPoint) -> Result<WirtingerField, KernelError> {
        if w.spec() != self.spec {
            return Err(KernelError::DomainMismatch(self.spec, w.spec()));
        }
        let g = Arc::new(self.det_w_poly(w.value())?);
        let n_poly = Arc::clone(&self.det_v);
        let kappa = self.kappa;
        let g_eval = Arc::clone(&g);
        let n_eval = Arc::clone(&self.det_v);
        let eval = move |z: &ComplexMatrix| {
            let n = n_eval.eval_matrix(z).map(|v| v.re).unwrap_or(f64::NAN);
            let m = g_eval
                .eval_matrix(z)
                .map(|v| v.norm_sqr())
                .unwrap_or(f64::NAN);
            Complex64::new(n.powf(kappa) * m.powf(-kappa), 0.0)
        };
        let hessian = move |z: &ComplexMatrix| kernel_hessian(kappa, &n_poly, &g, z);
        Ok(WirtingerField::analytic(
            self.spec.ambient_shape(),
            eval,
            hessian,
        ))
    }
}

/// Hessian of `A·B` with `A = N^κ`, `B = M^{-κ}`, `M = G Ḡ`.
fn kernel_hessian(kappa: f64, n_poly: &Poly, g_poly: &Poly, z: &ComplexMatrix) -> WirtingerHessian {
    let x = z.as_slice();
    let dim = x.len();
    let (n_val, n_dz, n_dzb) = n_poly.gradients(x).expect("shape checked by field");
    let n_hess = n_poly.wirtinger_hessian(x).expect("shape checked by field");
    let (g_val, g_dz, _) = g_poly.gradients(x).expect("shape checked by field");
    let n = n_val.re;
    let m = g_val.norm_sqr();
    let a = n.powf(kappa);
    let b = m.powf(-kappa);
    let mut h = WirtingerHessian::zeros(dim);
    for p in 0..dim {
        let m_p = g_dz[p] * g_val.conj();
        let a_p = n_dz[p] * (kappa * n.powf(kappa - 1.0));
        let b_p = m_p * (-kappa * m.powf(-kappa - 1.0));
        for q in 0..dim {
            let m_q = g_val * g_dz[q].conj();
            let m_pq = g_dz[p] * g_dz[q].conj();
            let a_q = n_dzb[q] * (kappa * n.powf(kappa - 1.0));
            let b_q = m_q * (-kappa * m.powf(-kappa - 1.0));
            let a_pq = n_dz[p] * n_dzb[q] * (kappa * (kappa - 1.0) * n.powf(kappa - 2.0))
                + n_hess[(p, q)] * (kappa * n.powf(kappa - 1.0));
            let b_pq = m_p * m_q * (kappa * (kappa + 1.0) * m.powf(-kappa - 2.0))
                - m_pq * (kappa * m.powf(-kappa - 1.0));
            h[(p, q)] = a_pq * b + a_p * b_q + a_q * b_p + b_pq * a;
        }
    }
    h
}

/// Log-gradients `b_{jα} = ∂ log det V` and `c_{jα} = ∂ log det W` in the
/// independent coordinates of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGradients {
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
}

/// `w* (I - z w*)^{-1}`.
fn w_star_w_inv(z: &ComplexMatrix, w: &ComplexMatrix) -> Result<ComplexMatrix, KernelError> {
    let winv = w_matrix(z, w)
        .inverse()
        .map_err(|_| KernelError::SingularPair)?;
    Ok(&w.adjoint() * &winv)
}

/// Log-gradient of `det(I - z w*)` by the closed matrix formulas:
/// `-[w* W⁻¹]_{αj}` for type I, `-(2 - δ_{jα})[w* W⁻¹]_{jα}` for the
/// symmetric type and `2[w* W⁻¹]_{jα}` for the antisymmetric type.
pub fn log_det_w_gradient(
    spec: &DomainSpec,
    z: &ComplexMatrix,
    w: &ComplexMatrix,
) -> Result<ComplexMatrix, KernelError> {
    let x = w_star_w_inv(z, w)?;
    let (rows, cols) = spec.ambient_shape();
    Ok(match spec {
        DomainSpec::TypeI { .. } => ComplexMatrix::from_fn(rows, cols, |j, a| -x[(a, j)]),
        DomainSpec::TypeII { .. } => ComplexMatrix::from_fn(rows, cols, |j, a| {
            let f = if j == a { 1.0 } else { 2.0 };
            -x[(j, a)] * f
        }),
        DomainSpec::TypeIII { .. } => ComplexMatrix::from_fn(rows, cols, |j, a| x[(j, a)] * 2.0),
        DomainSpec::TypeIV { .. } => {
            return Err(KernelError::Unsupported("log-gradients for type IV".into()))
        }
    })
}

/// Closed-form log-gradients; `b(z) = c(z, z)`.
pub fn log_gradients_closed_form(
    z: &MatrixPoint,
    w: &MatrixPoint,
) -> Result<LogGradients, KernelError> {
    let spec = z.spec();
    Ok(LogGradients {
        b: log_det_w_gradient(&spec, z.value(), z.value())?,
        c: log_det_w_gradient(&spec, z.value(), w.value())?,
    })
}

/// Log-gradients obtained from the ambient gradient `g_{jα} = -[w* W⁻¹]_{αj}`
/// by the chain rule for the domain coordinates.
pub fn log_gradients_chain_rule(
    z: &MatrixPoint,
    w: &MatrixPoint,
) -> Result<LogGradients, KernelError> {
    let spec = z.spec();
    let fold = |w: &ComplexMatrix| -> Result<ComplexMatrix, KernelError> {
        let x = w_star_w_inv(z.value(), w)?;
        let g = |j: usize, a: usize| -x[(a, j)];
        let (rows, cols) = spec.ambient_shape();
        Ok(match spec {
            DomainSpec::TypeI { .. } => ComplexMatrix::from_fn(rows, cols, g),
            DomainSpec::TypeII { .. } => ComplexMatrix::from_fn(rows, cols, |j, a| {
                let f = if j == a { 0.5 } else { 1.0 };
                (g(j, a) + g(a, j)) * f
            }),
            DomainSpec::TypeIII { .. } => {
                ComplexMatrix::from_fn(rows, cols, |j, a| g(j, a) - g(a, j))
            }
            DomainSpec::TypeIV { .. } => {
                return Err(KernelError::Unsupported("log-gradients for type IV".into()))
            }
        })
    };
    Ok(LogGradients {
        b: fold(z.value())?,
        c: fold(w.value())?,
    })
}

/// Log-gradient of `det W(·, w)` at `z` by central differences of `det W`
/// along the structure-preserving directions `E_{jα}`, `E_{jα} + E_{αj}`
/// (symmetric, off-diagonal) or `E_{jα} - E_{αj}` (antisymmetric).
pub fn fd_log_det_w_gradient(
    z: &MatrixPoint,
    w: &MatrixPoint,
    step: f64,
) -> Result<ComplexMatrix, KernelError> {
    let spec = z.spec();
    let (rows, cols) = spec.ambient_shape();
    let det_w = |x: &ComplexMatrix| {
        w_matrix(x, w.value())
            .det()
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let base = w_matrix(z.value(), w.value()).det()?;
    if base == Complex64::new(0.0, 0.0) {
        return Err(KernelError::SingularPair);
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for j in 0..rows {
        for a in 0..cols {
            let mut dir = ComplexMatrix::zeros(rows, cols);
            dir[(j, a)] = Complex64::new(1.0, 0.0);
            match spec {
                DomainSpec::TypeI { .. } => {}
                DomainSpec::TypeII { .. } => dir[(a, j)] = Complex64::new(1.0, 0.0),
                DomainSpec::TypeIII { .. } if j == a => continue,
                DomainSpec::TypeIII { .. } => dir[(a, j)] = Complex64::new(-1.0, 0.0),
                DomainSpec::TypeIV { .. } => {
                    return Err(KernelError::Unsupported("log-gradients for type IV".into()))
                }
            }
            out[(j, a)] = directional_wirtinger_derivative(det_w, z.value(), &dir, step) / base;
        }
    }
    Ok(out)
}

/// The five `n×n` tensors of the identity (indexed by `(j, k)`), plus the
/// obstruction `F(z, w)` for the antisymmetric type.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityTensors {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
    pub e: ComplexMatrix,
    pub f: Option<ComplexMatrix>,
}

impl IdentityTensors {
    /// `A + B + C - D - E`.
    pub fn assembly(&self) -> ComplexMatrix {
        &(&(&(&self.a + &self.b) + &self.c) - &self.d) - &self.e
    }
}

/// `F(z, w) = (I - w* z)⁻¹ (I - w* w) (I - z* w)⁻¹`, which vanishes exactly
/// when `w* w = I`.
pub fn f_matrix(z: &ComplexMatrix, w: &ComplexMatrix) -> Result<ComplexMatrix, KernelError> {
    let singular = |_| KernelError::SingularPair;
    let left = (&w.adjoint() * z)
        .identity_minus()
        .inverse()
        .map_err(singular)?;
    let right = (&z.adjoint() * w)
        .identity_minus()
        .inverse()
        .map_err(singular)?;
    let mid = (&w.adjoint() * w).identity_minus();
    Ok(&(&left * &mid) * &right)
}

/// Closed forms of `A..E` for the symmetric and antisymmetric types.
pub fn identity_tensors(z: &MatrixPoint, w: &MatrixPoint) -> Result<IdentityTensors, KernelError> {
    let spec = z.spec();
    if w.spec() != spec {
        return Err(KernelError::DomainMismatch(spec, w.spec()));
    }
    let (zv, wv) = (z.value(), w.value());
    let n = zv.rows();
    let eye = ComplexMatrix::identity(n);
    let four = Complex64::new(4.0, 0.0);
    let singular = |_| KernelError::SingularPair;
    let v_inv = v_matrix(zv).inverse().map_err(singular)?;
    let zz_inv = (&zv.adjoint() * zv)
        .identity_minus()
        .inverse()
        .map_err(singular)?;
    // (I - z* w)⁻¹ and (I - w* z)⁻¹
    let x = (&zv.adjoint() * wv)
        .identity_minus()
        .inverse()
        .map_err(singular)?;
    let y = (&wv.adjoint() * zv)
        .identity_minus()
        .inverse()
        .map_err(singular)?;
    let kappa = spec.kappa()?.as_f64();
    let (a_factor, f) = match spec {
        DomainSpec::TypeII { .. } => (Complex64::new(-4.0, 0.0), None),
        DomainSpec::TypeIII { n } => (
            Complex64::new(-2.0 * (n as f64 - 1.0) / kappa, 0.0),
            Some(f_matrix(zv, wv)?),
        ),
        _ => {
            return Err(KernelError::Unsupported(format!(
                "closed-form identity tensors for {spec}"
            )))
        }
    };
    let a = v_inv.transpose().scale(a_factor);
    let b = (&zz_inv - &eye).scale(four);
    let mut c = &(&x + &y) - &eye;
    if let Some(f) = &f {
        c = &c - f;
    }
    Ok(IdentityTensors {
        a,
        b,
        c: c.scale(four),
        d: (&x - &eye).scale(four),
        e: (&y - &eye).scale(four),
        f,
    })
}

/// `A..E` by direct summation: `A` from the ambient Hessian of `log det V`,
/// `-[(I - z* z)⁻¹]_{αβ} [V⁻¹]_{kj}`, contracted with the component operator;
/// `B..E` as weighted quadratic forms in the closed-form log-gradients.
pub fn identity_tensors_direct(
    z: &MatrixPoint,
    w: &MatrixPoint,
) -> Result<IdentityTensors, KernelError> {
    let spec = z.spec();
    if w.spec() != spec {
        return Err(KernelError::DomainMismatch(spec, w.spec()));
    }
    let kind = hua_operator(&spec)?;
    let kappa = spec.kappa()?.as_f64();
    let zv = z.value();
    let (rows, cols) = zv.shape();
    let singular = |_| KernelError::SingularPair;
    let v = v_matrix(zv);
    let v_inv = v.inverse().map_err(singular)?;
    let zz_inv = (&zv.adjoint() * zv)
        .identity_minus()
        .inverse()
        .map_err(singular)?;
    let dim = rows * cols;
    let mut log_v_hessian = WirtingerHessian::zeros(dim);
    for j in 0..rows {
        for al in 0..cols {
            for k in 0..rows {
                for be in 0..cols {
                    log_v_hessian[(j * cols + al, k * cols + be)] =
                        -zz_inv[(al, be)] * v_inv[(k, j)];
                }
            }
        }
    }
    let grads = log_gradients_closed_form(z, w)?;
    // Weight of b_{jα} conj(b'_{kβ}) in the component (j, k).
    let weight = |j: usize, al: usize, k: usize, be: usize| -> Complex64 {
        match spec {
            DomainSpec::TypeI { .. } => {
                let delta = if al == be { 1.0 } else { 0.0 };
                let s: Complex64 = (0..rows).map(|l| zv[(l, al)] * zv[(l, be)].conj()).sum();
                Complex64::new(delta, 0.0) - s
            }
            DomainSpec::TypeII { .. } => {
                let fj = if j == al { 0.5 } else { 1.0 };
                let fk = if k == be { 0.5 } else { 1.0 };
                v[(al, be)] / (fj * fk)
            }
            _ => {
                if j == al || k == be {
                    Complex64::new(0.0, 0.0)
                } else {
                    v[(al, be)]
                }
            }
        }
    };
    let quad = |p: &ComplexMatrix, q: &ComplexMatrix| {
        ComplexMatrix::from_fn(rows, rows, |j, k| {
            let mut s = Complex64::new(0.0, 0.0);
            for al in 0..cols {
                for be in 0..cols {
                    s += weight(j, al, k, be) * p[(j, al)] * q[(k, be)].conj();
                }
            }
            s
        })
    };
    let mut a = ComplexMatrix::zeros(rows, rows);
    for j in 0..rows {
        for k in 0..rows {
            let t = coefficients(&OperatorId::component(kind, j, k), z)?;
            a[(j, k)] = t.contract(&log_v_hessian) / kappa;
        }
    }
    let f = match spec {
        DomainSpec::TypeIII { .. } => Some(f_matrix(zv, w.value())?),
        _ => None,
    };
    Ok(IdentityTensors {
        a,
        b: quad(&grads.b, &grads.b),
        c: quad(&grads.c, &grads.c),
        d: quad(&grads.b, &grads.c),
        e: quad(&grads.c, &grads.b),
        f,
    })
}

/// Residuals of the harmonicity identity over all components `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelResiduals {
    /// `|Δ^{jk} P|` with a finite-difference Hessian.
    pub fd: ComplexMatrix,
    /// `|Δ^{jk} P|` with the exact polynomial Hessian.
    pub exact: ComplexMatrix,
    /// `A + B + C - D - E` (closed forms where available, else direct sums).
    pub assembly: ComplexMatrix,
}

impl KernelResiduals {
    pub fn max_fd(&self) -> f64 {
        self.fd.max_abs()
    }

    pub fn max_exact(&self) -> f64 {
        self.exact.max_abs()
    }

    pub fn max_assembly(&self) -> f64 {
        self.assembly.max_abs()
    }
}

fn component_values(
    kind: OperatorKind,
    h: &WirtingerHessian,
    z: &MatrixPoint,
) -> Result<ComplexMatrix, KernelError> {
    let n = z.spec().component_range();
    let mut out = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            out[(j, k)] = coefficients(&OperatorId::component(kind, j, k), z)?.contract(h);
        }
    }
    Ok(out)
}

/// Evaluates the identity at `(z, w)` along three independent routes.
pub fn kernel_residuals(
    exact: &ExactKernel,
    z: &MatrixPoint,
    w: &MatrixPoint,
    opts: &FdOptions,
) -> Result<KernelResiduals, KernelError> {
    let spec = z.spec();
    let kind = hua_operator(&spec)?;
    let margin = contains(&spec, z.value())?.margin;
    if !(margin > 0.0) {
        return Err(KernelError::NotInterior(margin));
    }
    let fd_opts = FdOptions {
        force: true,
        ..*opts
    };
    let h_fd = wirtinger_hessian(&kernel_field_opaque(w)?, z.value(), &fd_opts)?;
    let h_exact = wirtinger_hessian(&exact.field(w)?, z.value(), opts)?;
    let assembly = match spec {
        DomainSpec::TypeI { .. } => identity_tensors_direct(z, w)?.assembly(),
        _ => identity_tensors(z, w)?.assembly(),
    };
    Ok(KernelResiduals {
        fd: component_values(kind, &h_fd, z)?,
        exact: component_values(kind, &h_exact, z)?,
        assembly,
    })
}

/// Scalar residuals `(r₁, r₂)` for one component: the exact-path value of
/// `|Δ^{jk} P(·, w)|(z)` and `|(A + B + C - D - E)_{jk}|`.
pub fn check_kernel_identity(
    z: &MatrixPoint,
    w: &MatrixPoint,
    j: usize,
    k: usize,
) -> Result<(f64, f64), KernelError> {
    let spec = z.spec();
    let range = spec.component_range();
    if j >= range || k >= range {
        return Err(OperatorError::ComponentOutOfRange { j, k, range }.into());
    }
    let exact = ExactKernel::new(spec)?;
    let r = kernel_residuals(&exact, z, w, &FdOptions::default())?;
    Ok((r.exact[(j, k)].norm(), r.assembly[(j, k)].norm()))
}

/// The `(1/κ²P) ∂²P/∂z_a∂z̄_b` matrix over ambient coordinates, from the
/// matrix formulas for `∂∂̄ log det V`, `∇ log det V` and `∇ log det W`.
pub fn log_decomposition_ambient(
    z: &MatrixPoint,
    w: &MatrixPoint,
) -> Result<WirtingerHessian, KernelError> {
    let spec = z.spec();
    let kappa = spec.kappa()?.as_f64();
    let zv = z.value();
    let (rows, cols) = zv.shape();
    let singular = |_| KernelError::SingularPair;
    let v_inv = v_matrix(zv).inverse().map_err(singular)?;
    let zz_inv = (&zv.adjoint() * zv)
        .identity_minus()
        .inverse()
        .map_err(singular)?;
    let bz = &zv.adjoint() * &v_inv;
    let cw = w_star_w_inv(zv, w.value())?;
    let grad = |j: usize, a: usize| -bz[(a, j)] + cw[(a, j)];
    let dim = rows * cols;
    let mut h = WirtingerHessian::zeros(dim);
    for j in 0..rows {
        for al in 0..cols {
            for k in 0..rows {
                for be in 0..cols {
                    let hess = -zz_inv[(al, be)] * v_inv[(k, j)];
                    h[(j * cols + al, k * cols + be)] =
                        hess / kappa + grad(j, al) * grad(k, be).conj();
                }
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{haar_unitary, sample_interior, sample_silov};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_at_origin_is_one() {
        let spec = DomainSpec::type_ii(2).unwrap();
        let z = MatrixPoint::new(spec, ComplexMatrix::zeros(2, 2)).unwrap();
        let w = sample_silov(&spec, 1, 1).unwrap().remove(0);
        assert!((poisson_szego(&z, &w).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn disc_kernel_matches_classical_formula() {
        let spec = DomainSpec::type_i(1, 1).unwrap();
        let zc = Complex64::new(0.3, 0.4);
        let wc = Complex64::from_polar(1.0, 0.7);
        let z = MatrixPoint::new(spec, ComplexMatrix::new(1, 1, vec![zc]).unwrap()).unwrap();
        let w = MatrixPoint::new(spec, ComplexMatrix::new(1, 1, vec![wc]).unwrap()).unwrap();
        let expected = (1.0 - zc.norm_sqr()) / (wc - zc).norm_sqr();
        assert!((poisson_szego(&z, &w).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn exterior_point_is_rejected() {
        let spec = DomainSpec::type_i(1, 1).unwrap();
        let z = MatrixPoint::new(
            spec,
            ComplexMatrix::identity(1).scale(Complex64::new(1.5, 0.0)),
        )
        .unwrap();
        let w = MatrixPoint::new(spec, ComplexMatrix::identity(1)).unwrap();
        assert!(matches!(
            poisson_szego(&z, &w),
            Err(KernelError::NotInterior(_))
        ));
    }

    #[test]
    fn type_iv_is_unsupported() {
        let spec = DomainSpec::type_iv(2).unwrap();
        let z = MatrixPoint::new(spec, ComplexMatrix::zeros(1, 2)).unwrap();
        assert!(poisson_szego(&z, &z).is_err());
    }

    #[test]
    fn kernel_is_unitarily_invariant() {
        let spec = DomainSpec::type_ii(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let zs = sample_interior(&spec, 8, 5).unwrap();
        let ws = sample_silov(&spec, 8, 5).unwrap();
        for (z, w) in zs.iter().zip(&ws) {
            let u = haar_unitary(&mut rng, 3);
            let rot =
                |m: &ComplexMatrix| MatrixPoint::new(spec, &(&u * m) * &u.transpose()).unwrap();
            let p0 = poisson_szego(z, w).unwrap();
            let p1 = poisson_szego(&rot(z.value()), &rot(w.value())).unwrap();
            assert!((p0 - p1).abs() < 1e-10 * p0.max(1.0));
        }
    }

    #[test]
    fn exact_and_opaque_fields_agree() {
        let spec = DomainSpec::type_ii(2).unwrap();
        let exact = ExactKernel::new(spec).unwrap();
        let z = sample_interior(&spec, 3, 1).unwrap().remove(0);
        let w = sample_silov(&spec, 3, 1).unwrap().remove(0);
        let a = exact.field(&w).unwrap().eval(z.value()).unwrap().re;
        let b = poisson_szego(&z, &w).unwrap();
        assert!((a - b).abs() < 1e-12 * b);
        let h_exact =
            wirtinger_hessian(&exact.field(&w).unwrap(), z.value(), &FdOptions::default()).unwrap();
        let h_fd = wirtinger_hessian(
            &kernel_field_opaque(&w).unwrap(),
            z.value(),
            &FdOptions::default(),
        )
        .unwrap();
        assert!(h_exact.max_abs_diff(&h_fd) < 1e-6 * h_exact.frobenius_norm().max(1.0));
    }

    #[test]
    fn closed_form_gradients_match_chain_rule() {
        for spec in [
            DomainSpec::type_i(2, 3).unwrap(),
            DomainSpec::type_ii(3).unwrap(),
            DomainSpec::type_iii(4).unwrap(),
        ] {
            let z = sample_interior(&spec, 1, 1).unwrap().remove(0);
            let w = sample_silov(&spec, 1, 1).unwrap().remove(0);
            let a = log_gradients_closed_form(&z, &w).unwrap();
            let b = log_gradients_chain_rule(&z, &w).unwrap();
            assert!(a.b.max_abs_diff(&b.b) < 1e-13, "{spec}");
            assert!(a.c.max_abs_diff(&b.c) < 1e-13, "{spec}");
        }
    }

    #[test]
    fn closed_form_gradients_match_finite_differences() {
        for spec in [
            DomainSpec::type_i(2, 3).unwrap(),
            DomainSpec::type_ii(3).unwrap(),
            DomainSpec::type_iii(4).unwrap(),
        ] {
            for (z, w) in sample_interior(&spec, 4, 5)
                .unwrap()
                .into_iter()
                .zip(sample_silov(&spec, 4, 5).unwrap())
            {
                let closed = log_gradients_closed_form(&z, &w).unwrap().c;
                let fd = fd_log_det_w_gradient(&z, &w, 1e-4).unwrap();
                let rel = closed.max_abs_diff(&fd) / closed.max_abs();
                assert!(rel < 1e-8, "{spec}: {rel}");
            }
        }
    }

    #[test]
    fn closed_and_direct_tensors_agree() {
        for spec in [
            DomainSpec::type_ii(3).unwrap(),
            DomainSpec::type_iii(4).unwrap(),
        ] {
            let z = sample_interior(&spec, 2, 1).unwrap().remove(0);
            let w = sample_silov(&spec, 2, 1).unwrap().remove(0);
            let c = identity_tensors(&z, &w).unwrap();
            let d = identity_tensors_direct(&z, &w).unwrap();
            for (x, y, name) in [
                (&c.a, &d.a, "A"),
                (&c.b, &d.b, "B"),
                (&c.c, &d.c, "C"),
                (&c.d, &d.d, "D"),
                (&c.e, &d.e, "E"),
            ] {
                assert!(
                    x.max_abs_diff(y) < 1e-10,
                    "{spec} {name}: {}",
                    x.max_abs_diff(y)
                );
            }
        }
    }

    #[test]
    fn identity_vanishes_on_shilov_boundary() {
        for spec in [
            DomainSpec::type_i(2, 2).unwrap(),
            DomainSpec::type_ii(2).unwrap(),
            DomainSpec::type_iii(4).unwrap(),
        ] {
            let exact = ExactKernel::new(spec).unwrap();
            let z = sample_interior(&spec, 6, 1).unwrap().remove(0);
            let w = sample_silov(&spec, 6, 1).unwrap().remove(0);
            let r = kernel_residuals(&exact, &z, &w, &FdOptions::default()).unwrap();
            assert!(r.max_exact() < 1e-9, "{spec} exact {}", r.max_exact());
            assert!(
                r.max_assembly() < 1e-9,
                "{spec} assembly {}",
                r.max_assembly()
            );
            assert!(r.max_fd() < 1e-6, "{spec} fd {}", r.max_fd());
        }
    }

    #[test]
    fn log_decomposition_matches_exact_hessian() {
        let spec = DomainSpec::type_i(2, 2).unwrap();
        let exact = ExactKernel::new(spec).unwrap();
        let z = sample_interior(&spec, 7, 1).unwrap().remove(0);
        let w = sample_silov(&spec, 7, 1).unwrap().remove(0);
        let p = poisson_szego(&z, &w).unwrap();
        let kappa = spec.kappa().unwrap().as_f64();
        let h =
            wirtinger_hessian(&exact.field(&w).unwrap(), z.value(), &FdOptions::default()).unwrap();
        let lhs = WirtingerHessian::from_matrix(
            &h.to_matrix()
                .scale(Complex64::new(1.0 / (kappa * kappa * p), 0.0)),
        )
        .unwrap();
        let rhs = log_decomposition_ambient(&z, &w).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn component_out_of_range() {
        let spec = DomainSpec::type_ii(2).unwrap();
        let z = sample_interior(&spec, 1, 1).unwrap().remove(0);
        let w = sample_silov(&spec, 1, 1).unwrap().remove(0);
        assert!(check_kernel_identity(&z, &w, 2, 0).is_err());
    }
}
