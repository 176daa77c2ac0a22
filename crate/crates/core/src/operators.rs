//! Hua-type second-order operators as coefficient tensors over the ambient
//! coordinates.
//!
//! Every operator is `Σ_{a,b} T[a][b] ∂²/∂z_a∂z̄_b` with `a, b` running over the
//! flattened entries of the ambient matrix. For the symmetric and
//! antisymmetric types the operators are written in the independent
//! coordinates `z_{jα}` of the domain; the chain rule maps a domain derivative
//! onto ambient ones:
//!
//! * symmetric: `D_{jα} = (1 - δ_{jα}/2)(∂_{jα} + ∂_{αj})`,
//! * antisymmetric: `D_{jα} = ∂_{jα} - ∂_{αj}`,
//!
//! and the weights are folded into `T`, so `apply` accepts any smooth
//! extension of a field to the full matrix space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{lie_ball_s, DomainSpec, MatrixPoint};
use crate::numerics::{
    wirtinger_hessian, ComplexMatrix, FdOptions, NumericsError, WirtingerField, WirtingerHessian,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("operator {op:?} is not defined on {spec}")]
    WrongDomain { op: OperatorKind, spec: DomainSpec },
    #[error("component ({j},{k}) out of range 0..{range}")]
    ComponentOutOfRange { j: usize, k: usize, range: usize },
    #[error("operator {0:?} has no components")]
    NoComponents(OperatorKind),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    /// Hua operator of type I.
    Delta1,
    /// Hua operator of the symmetric type.
    Delta2,
    /// Hua operator of the antisymmetric type.
    Delta3,
    /// Invariant Laplacian of the Lie ball.
    Delta4,
    /// Invariant Laplacian of the unit ball, `(1 - |z|²) Σ (δ_{αβ} - z_α z̄_β) ∂_α ∂̄_β`.
    BallInvariant,
    /// Weighted ball operator `Σ (δ_{αβ} - |z|² z_α z̄_β) ∂_α ∂̄_β`.
    TildeBall,
}

/// An operator, optionally restricted to its `(j, k)` component (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorId {
    pub kind: OperatorKind,
    pub component: Option<(usize, usize)>,
}

impl OperatorId {
    pub fn full(kind: OperatorKind) -> Self {
        Self {
            kind,
            component: None,
        }
    }

    pub fn component(kind: OperatorKind, j: usize, k: usize) -> Self {
        Self {
            kind,
            component: Some((j, k)),
        }
    }
}

/// Coefficients `T[a][b]` of `∂²/∂z_a∂z̄_b` over flattened ambient indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    dim: usize,
    data: Vec<Complex64>,
}

impl CoefficientTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.data[a * self.dim + b]
    }

    fn add(&mut self, a: usize, b: usize, v: Complex64) {
        self.data[a * self.dim + b] += v;
    }

    /// `Σ_{a,b} T[a][b] H[a][b]`, summed in row-major order.
    pub fn contract(&self, h: &WirtingerHessian) -> Complex64 {
        debug_assert_eq!(self.dim, h.dim());
        self.data.iter().zip(h.as_slice()).map(|(t, x)| t * x).sum()
    }

    /// `max |T[a][b] - conj(T[b][a])|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..=a {
                worst = worst.max((self.get(a, b) - self.get(b, a).conj()).norm());
            }
        }
        worst
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.dim, |a, b| self.get(a, b))
    }
}

fn applicable(kind: OperatorKind, spec: &DomainSpec) -> bool {
    matches!(
        (kind, spec),
        (OperatorKind::Delta1, DomainSpec::TypeI { .. })
            | (OperatorKind::Delta2, DomainSpec::TypeII { .. })
            | (OperatorKind::Delta3, DomainSpec::TypeIII { .. })
            | (OperatorKind::Delta4, DomainSpec::TypeIV { .. })
            | (OperatorKind::BallInvariant, DomainSpec::TypeI { m: 1, .. })
            | (OperatorKind::TildeBall, DomainSpec::TypeI { m: 1, .. })
    )
}

/// `V = I - z z*`.
pub fn v_matrix(z: &ComplexMatrix) -> ComplexMatrix {
    (z * &z.adjoint()).identity_minus()
}

/// Adds the contribution of the `(j, k)` component of a matrix-type operator,
/// scaled by `weight`, to `t`.
fn add_component(
    t: &mut CoefficientTensor,
    kind: OperatorKind,
    z: &ComplexMatrix,
    v: &ComplexMatrix,
    j: usize,
    k: usize,
    weight: Complex64,
) {
    let cols = z.cols();
    let idx = |r: usize, c: usize| r * cols + c;
    match kind {
        OperatorKind::Delta1 => {
            // (I - zᵗ z̄)_{αβ}
            for alpha in 0..cols {
                for beta in 0..cols {
                    let mut a = if alpha == beta {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    for l in 0..z.rows() {
                        a -= z[(l, alpha)] * z[(l, beta)].conj();
                    }
                    t.add(idx(j, alpha), idx(k, beta), weight * a);
                }
            }
        }
        OperatorKind::Delta2 => {
            for alpha in 0..cols {
                for beta in 0..cols {
                    let w = weight * v[(alpha, beta)];
                    for (ra, ca) in [(j, alpha), (alpha, j)] {
                        for (rb, cb) in [(k, beta), (beta, k)] {
                            t.add(idx(ra, ca), idx(rb, cb), w);
                        }
                    }
                }
            }
        }
        OperatorKind::Delta3 => {
            for alpha in (0..cols).filter(|&a| a != j) {
                for beta in (0..cols).filter(|&b| b != k) {
                    let w = weight * v[(alpha, beta)];
                    t.add(idx(j, alpha), idx(k, beta), w);
                    t.add(idx(j, alpha), idx(beta, k), -w);
                    t.add(idx(alpha, j), idx(k, beta), -w);
                    t.add(idx(alpha, j), idx(beta, k), w);
                }
            }
        }
        _ => unreachable!("only matrix-type operators have components"),
    }
}

/// Coefficient tensor of `op` at `z`.
pub fn coefficients(op: &OperatorId, z: &MatrixPoint) -> Result<CoefficientTensor, OperatorError> {
    let spec = z.spec();
    if !applicable(op.kind, &spec) {
        return Err(OperatorError::WrongDomain { op: op.kind, spec });
    }
    let x = z.value();
    let dim = spec.ambient_dim();
    let mut t = CoefficientTensor::zeros(dim);
    let one = Complex64::new(1.0, 0.0);
    match (op.kind, op.component) {
        (OperatorKind::Delta1 | OperatorKind::Delta2 | OperatorKind::Delta3, Some((j, k))) => {
            let range = spec.component_range();
            if j >= range || k >= range {
                return Err(OperatorError::ComponentOutOfRange { j, k, range });
            }
            add_component(&mut t, op.kind, x, &v_matrix(x), j, k, one);
        }
        (kind, Some(_)) => return Err(OperatorError::NoComponents(kind)),
        (OperatorKind::Delta1, None) => {
            // Σ_{jk} V_{jk} Δ^{jk}
            let v = v_matrix(x);
            let a = (&x.transpose() * &x.conj()).identity_minus();
            let n = x.cols();
            for j in 0..x.rows() {
                for k in 0..x.rows() {
                    for alpha in 0..n {
                        for beta in 0..n {
                            t.add(j * n + alpha, k * n + beta, v[(j, k)] * a[(alpha, beta)]);
                        }
                    }
                }
            }
        }
        (OperatorKind::Delta2 | OperatorKind::Delta3, None) => {
            // ¼ Σ_{jk} V_{jk} Δ^{jk}
            let v = v_matrix(x);
            let n = x.rows();
            for j in 0..n {
                for k in 0..n {
                    add_component(&mut t, op.kind, x, &v, j, k, v[(j, k)] * 0.25);
                }
            }
        }
        (OperatorKind::Delta4, None) => {
            let zs = x.as_slice();
            let n = zs.len();
            let norm2: f64 = zs.iter().map(Complex64::norm_sqr).sum();
            let s = lie_ball_s(x);
            let r = 1.0 - 2.0 * norm2 + s.norm_sqr();
            for j in 0..n {
                for k in 0..n {
                    let delta = if j == k { 1.0 } else { 0.0 };
                    let first = (Complex64::new(delta, 0.0) - zs[j] * zs[k].conj() * 2.0) * r;
                    let second = (zs[j].conj() - s.conj() * zs[j]) * (zs[k] - s * zs[k].conj());
                    t.add(j, k, first + second * 2.0);
                }
            }
        }
        (OperatorKind::BallInvariant | OperatorKind::TildeBall, None) => {
            let zs = x.as_slice();
            let n = zs.len();
            let norm2: f64 = zs.iter().map(Complex64::norm_sqr).sum();
            for j in 0..n {
                for k in 0..n {
                    let delta = if j == k { 1.0 } else { 0.0 };
                    let outer = zs[j] * zs[k].conj();
                    let c = if op.kind == OperatorKind::BallInvariant {
                        (Complex64::new(delta, 0.0) - outer) * (1.0 - norm2)
                    } else {
                        Complex64::new(delta, 0.0) - outer * norm2
                    };
                    t.add(j, k, c);
                }
            }
        }
    }
    Ok(t)
}

/// `(op u)(z)`.
pub fn apply(
    op: &OperatorId,
    u: &WirtingerField,
    z: &MatrixPoint,
    opts: &FdOptions,
) -> Result<Complex64, OperatorError> {
    let t = coefficients(op, z)?;
    let h = wirtinger_hessian(u, z.value(), opts)?;
    Ok(t.contract(&h))
}

/// Applies `op` given a precomputed Hessian of the field at `z`.
pub fn apply_with_hessian(
    op: &OperatorId,
    h: &WirtingerHessian,
    z: &MatrixPoint,
) -> Result<Complex64, OperatorError> {
    Ok(coefficients(op, z)?.contract(h))
}

/// Weight of the component sum: `1` for type I, `1/4` for types II and III.
pub fn component_weight(kind: OperatorKind) -> Option<f64> {
    match kind {
        OperatorKind::Delta1 => Some(1.0),
        OperatorKind::Delta2 | OperatorKind::Delta3 => Some(0.25),
        _ => None,
    }
}

/// `|Δu - w Σ_{jk} V_{jk} Δ^{jk}u|`, with `w` from [`component_weight`].
pub fn component_sum_check(
    kind: OperatorKind,
    u: &WirtingerField,
    z: &MatrixPoint,
    opts: &FdOptions,
) -> Result<f64, OperatorError> {
    let w = component_weight(kind).ok_or(OperatorError::NoComponents(kind))?;
    let h = wirtinger_hessian(u, z.value(), opts)?;
    let full = apply_with_hessian(&OperatorId::full(kind), &h, z)?;
    let v = v_matrix(z.value());
    let range = z.spec().component_range();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..range {
        for k in 0..range {
            sum += v[(j, k)] * apply_with_hessian(&OperatorId::component(kind, j, k), &h, z)?;
        }
    }
    Ok((full - sum * w).norm())
}
