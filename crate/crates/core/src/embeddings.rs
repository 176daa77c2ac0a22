//! Holomorphic embeddings of balls into matrix domains, the pullback
//! identities relating ball operators to Hua operator components, recovery of
//! a sesquilinear form from its diagonal values, and the transport law of the
//! complex Hessian under holomorphic maps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::domains::{DomainError, DomainSpec, MatrixPoint};
use crate::numerics::{
    wirtinger_hessian, ComplexMatrix, FdOptions, FieldKind, Monomial, NumericsError, Poly,
    WirtingerField, WirtingerHessian,
};
use crate::operators::{apply_with_hessian, v_matrix, OperatorError, OperatorId, OperatorKind};

/// Tolerance for unit vectors and unitary matrices.
const STRUCTURE_TOL: f64 = 1e-12;

/// Relative tolerance of the probe check in [`polarization_recover`].
const PROBE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbeddingError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("ξ is not a unit vector (|ξ| = {0})")]
    NotUnit(f64),
    #[error("U is not unitary (‖U*U - I‖ = {0:e})")]
    NotUnitary(f64),
    #[error("λ lies outside the unit ball (|λ|² = {0})")]
    OutsideBall(f64),
    #[error("form is not sesquilinear-quadratic (probe mismatch {0:e})")]
    Inconsistent(f64),
    #[error("map has {found} components, field expects {expected}")]
    ComponentCount { expected: usize, found: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Kind of ball embedding.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingKind {
    /// `z(λ) = ξᵗλ` into `I(m, n)`, `ξ ∈ ∂B_m`, `λ ∈ B_n`.
    TypeI { xi: Vec<Complex64> },
    /// `z(λ) = (λU)ᵗ(λU)` into `II(n)`, `U` unitary, `λ ∈ B_n`.
    TypeII { u: ComplexMatrix },
    /// `z(λ) = [[0, λ], [-λᵗ, 0]]` into `III(n)`, `λ ∈ B_{n-1}`.
    TypeIII,
}

/// A ball embedding stored as an exact polynomial map `λ ↦ z(λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallEmbedding {
    kind: EmbeddingKind,
    spec: DomainSpec,
    ball_dim: usize,
    /// Row-major entries of `z(λ)` as polynomials in `λ`.
    map: Vec<Poly>,
}

fn unit_check(v: &[Complex64]) -> Result<(), EmbeddingError> {
    let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > STRUCTURE_TOL {
        return Err(EmbeddingError::NotUnit(norm));
    }
    Ok(())
}

impl BallEmbedding {
    pub fn type_i(xi: Vec<Complex64>, n: usize) -> Result<Self, EmbeddingError> {
        let m = xi.len();
        let spec = DomainSpec::type_i(m, n)?;
        unit_check(&xi)?;
        let map = (0..m)
            .flat_map(|k| (0..n).map(move |a| (k, a)))
            .map(|(k, a)| Poly::var(n, a).scale(xi[k]))
            .collect();
        Ok(Self {
            kind: EmbeddingKind::TypeI { xi },
            spec,
            ball_dim: n,
            map,
        })
    }

    pub fn type_ii(u: ComplexMatrix) -> Result<Self, EmbeddingError> {
        let n = u.rows();
        let spec = DomainSpec::type_ii(n)?;
        if !u.is_square() {
            return Err(EmbeddingError::InvalidDimension(format!(
                "U is {:?}",
                u.shape()
            )));
        }
        let defect = (&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(n));
        if defect > STRUCTURE_TOL {
            return Err(EmbeddingError::NotUnitary(defect));
        }
        // y_i = Σ_p λ_p U_{pi}
        let y: Vec<Poly> = (0..n)
            .map(|i| {
                (0..n).fold(Poly::zero(n), |acc, p| {
                    &acc + &Poly::var(n, p).scale(u[(p, i)])
                })
            })
            .collect();
        let map = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| &y[i] * &y[j])
            .collect();
        Ok(Self {
            kind: EmbeddingKind::TypeII { u },
            spec,
            ball_dim: n,
            map,
        })
    }

    pub fn type_iii(n: usize) -> Result<Self, EmbeddingError> {
        let spec = DomainSpec::type_iii(n)?;
        let d = n - 1;
        let mut map = vec![Poly::zero(d); n * n];
        for p in 1..n {
            map[p] = Poly::var(d, p - 1);
            map[p * n] = Poly::var(d, p - 1).scale(Complex64::new(-1.0, 0.0));
        }
        Ok(Self {
            kind: EmbeddingKind::TypeIII,
            spec,
            ball_dim: d,
            map,
        })
    }

    pub fn kind(&self) -> &EmbeddingKind {
        &self.kind
    }

    pub fn spec(&self) -> DomainSpec {
        self.spec
    }

    pub fn ball_dim(&self) -> usize {
        self.ball_dim
    }

    pub fn map(&self) -> &[Poly] {
        &self.map
    }
}

/// Random unit vector in `C^m` with small-integer Gaussian-rational entries,
/// normalised explicitly.
pub fn random_unit_vector(m: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..m)
            .map(|_| {
                Complex64::new(
                    f64::from(rng.random_range(-9i32..=9)),
                    f64::from(rng.random_range(-9i32..=9)),
                )
            })
            .collect();
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform random point of the ball `B_n` scaled to radius at most `radius`.
pub fn random_ball_point(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let g: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = g.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>().powf(1.0 / (2.0 * n as f64));
    g.into_iter().map(|x| x * (r / norm)).collect()
}

/// Random polynomial with `terms` monomials of total degree at most `degree`
/// and Gaussian complex coefficients.
pub fn random_polynomial(nvars: usize, degree: u32, terms: usize, rng: &mut ChaCha8Rng) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..terms {
        let total = rng.random_range(0..=degree);
        let mut z = vec![0u32; nvars];
        let mut zbar = vec![0u32; nvars];
        for _ in 0..total {
            let v = rng.random_range(0..nvars);
            if rng.random::<bool>() {
                z[v] += 1;
            } else {
                zbar[v] += 1;
            }
        }
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        p.add_term(Monomial { z, zbar }, c);
    }
    p
}

fn ball_check(lambda: &[Complex64], dim: usize) -> Result<f64, EmbeddingError> {
    if lambda.len() != dim {
        return Err(EmbeddingError::InvalidDimension(format!(
            "λ has {} entries, ball has dimension {dim}",
            lambda.len()
        )));
    }
    let norm2: f64 = lambda.iter().map(Complex64::norm_sqr).sum();
    if norm2 >= 1.0 {
        return Err(EmbeddingError::OutsideBall(norm2));
    }
    Ok(norm2)
}

/// `z(λ)` as a point of the target domain.
pub fn embed(e: &BallEmbedding, lambda: &[Complex64]) -> Result<MatrixPoint, EmbeddingError> {
    ball_check(lambda, e.ball_dim)?;
    let (rows, cols) = e.spec.ambient_shape();
    let entries = e
        .map
        .iter()
        .map(|p| p.eval(lambda))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MatrixPoint::new(
        e.spec,
        ComplexMatrix::new(rows, cols, entries)?,
    )?)
}

/// Holomorphic Jacobian `J[i][a] = ∂φ_a/∂λ_i` at `x`.
fn jacobian(map: &[Poly], x: &[Complex64]) -> Result<ComplexMatrix, NumericsError> {
    let k = x.len();
    let derivs: Vec<Vec<Poly>> = map
        .iter()
        .map(|p| (0..k).map(|i| p.diff_z(i)).collect())
        .collect();
    let mut j = ComplexMatrix::zeros(k, map.len());
    for (a, row) in derivs.iter().enumerate() {
        for (i, d) in row.iter().enumerate() {
            j[(i, a)] = d.eval(x)?;
        }
    }
    Ok(j)
}

/// Hessian of `u ∘ φ` at `x`, computed independently of the chain rule:
/// symbolic composition for polynomial fields, finite differences otherwise.
fn composed_hessian(
    map: &[Poly],
    u: &WirtingerField,
    x: &[Complex64],
) -> Result<WirtingerHessian, EmbeddingError> {
    let k = x.len();
    let point = ComplexMatrix::new(1, k, x.to_vec())?;
    match u.kind() {
        FieldKind::Polynomial(p) => {
            let g = p.substitute_holomorphic(map)?;
            Ok(g.wirtinger_hessian(x)?)
        }
        _ => {
            let (rows, cols) = u.shape();
            let map = map.to_vec();
            let u = u.clone();
            let g = WirtingerField::opaque((1, k), move |lam: &ComplexMatrix| {
                let entries: Vec<Complex64> = map
                    .iter()
                    .map(|p| {
                        p.eval(lam.as_slice())
                            .unwrap_or(Complex64::new(f64::NAN, 0.0))
                    })
                    .collect();
                let z = ComplexMatrix::new(rows, cols, entries).expect("shape fixed by map");
                u.eval(&z).unwrap_or(Complex64::new(f64::NAN, 0.0))
            });
            Ok(wirtinger_hessian(&g, &point, &FdOptions::default())?)
        }
    }
}

/// Difference of the two sides of the pullback identity for `u` at `λ`.
///
/// * Type I: `Σ(δ_ij - λ_iλ̄_j) ∂²g/∂λ_i∂λ̄_j - Σ ξ_k ξ̄_ℓ (Δ₁^{kℓ}u)(z(λ))`.
/// * Type II: `Σ(δ_αβ - |λ|²λ_αλ̄_β) ∂²v/∂λ_α∂λ̄_β` minus the double sum
///   `Σ_{pq} λ_p λ̄_q Σ_{ik} U_{pi} Ū_{qk} Σ_{jℓ} V_{jℓ} / ((1-δ_kℓ/2)(1-δ_ij/2)) ∂²u/∂z_ij∂z̄_kℓ`
///   with derivatives in the independent entries of a symmetric matrix.
/// * Type III: `Δ₃^{11}u(z(λ)) - Σ(δ_pq - λ_pλ̄_q) ∂²g/∂λ_p∂λ̄_q`.
pub fn pullback_residual(
    e: &BallEmbedding,
    u: &WirtingerField,
    lambda: &[Complex64],
) -> Result<Complex64, EmbeddingError> {
    let norm2 = ball_check(lambda, e.ball_dim)?;
    if u.shape() != e.spec.ambient_shape() {
        return Err(EmbeddingError::ComponentCount {
            expected: u.shape().0 * u.shape().1,
            found: e.map.len(),
        });
    }
    let z = embed(e, lambda)?;
    let hu = wirtinger_hessian(u, z.value(), &FdOptions::default())?;
    let hg = composed_hessian(&e.map, u, lambda)?;
    let d = e.ball_dim;
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let ball_side = |weight: f64| {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                let c = Complex64::new(delta(i, j), 0.0) - lambda[i] * lambda[j].conj() * weight;
                s += c * hg[(i, j)];
            }
        }
        s
    };
    match &e.kind {
        EmbeddingKind::TypeI { xi } => {
            let mut rhs = Complex64::new(0.0, 0.0);
            for (k, xk) in xi.iter().enumerate() {
                for (l, xl) in xi.iter().enumerate() {
                    let op = OperatorId::component(OperatorKind::Delta1, k, l);
                    rhs += *xk * xl.conj() * apply_with_hessian(&op, &hu, &z)?;
                }
            }
            Ok(ball_side(1.0) - rhs)
        }
        EmbeddingKind::TypeII { u: unitary } => {
            let n = d;
            let v = v_matrix(z.value());
            let idx = |r: usize, c: usize| r * n + c;
            let w = |i: usize, j: usize| 1.0 - delta(i, j) / 2.0;
            // ∂²u/∂z_ij∂z̄_kℓ in the independent entries of a symmetric matrix
            let sym = |i: usize, j: usize, k: usize, l: usize| {
                (hu[(idx(i, j), idx(k, l))]
                    + hu[(idx(i, j), idx(l, k))]
                    + hu[(idx(j, i), idx(k, l))]
                    + hu[(idx(j, i), idx(l, k))])
                    * (w(i, j) * w(k, l))
            };
            let mut rhs = Complex64::new(0.0, 0.0);
            for p in 0..n {
                for q in 0..n {
                    let lam = lambda[p] * lambda[q].conj();
                    for i in 0..n {
                        for k in 0..n {
                            let uu = unitary[(p, i)] * unitary[(q, k)].conj();
                            let mut inner = Complex64::new(0.0, 0.0);
                            for j in 0..n {
                                for l in 0..n {
                                    inner += v[(j, l)] / (w(k, l) * w(i, j)) * sym(i, j, k, l);
                                }
                            }
                            rhs += lam * uu * inner;
                        }
                    }
                }
            }
            Ok(ball_side(norm2) - rhs)
        }
        EmbeddingKind::TypeIII => {
            let op = OperatorId::component(OperatorKind::Delta3, 0, 0);
            Ok(apply_with_hessian(&op, &hu, &z)? - ball_side(1.0))
        }
    }
}

/// Recovers `M` from `form(ξ) = Σ_{jk} M_jk ξ_j ξ̄_k` using its values at
/// `e_k`, `(e_j + e_k)/√2` and `(e_j + i e_k)/√2`, then checks the result
/// against the form at random probe vectors.
pub fn polarization_recover(
    n: usize,
    form: impl Fn(&[Complex64]) -> Complex64,
) -> Result<ComplexMatrix, EmbeddingError> {
    if n == 0 {
        return Err(EmbeddingError::InvalidDimension(
            "n must be positive".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let basis = |entries: &[(usize, Complex64)]| {
        let mut v = vec![zero; n];
        for &(i, c) in entries {
            v[i] = c;
        }
        v
    };
    let one = Complex64::new(1.0, 0.0);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ih = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = form(&basis(&[(k, one)]));
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let s = form(&basis(&[(j, h), (k, h)]));
            let t = form(&basis(&[(j, h), (k, ih)]));
            let p = s * 2.0 - m[(j, j)] - m[(k, k)];
            let q = t * 2.0 - m[(j, j)] - m[(k, k)];
            let i = Complex64::new(0.0, 1.0);
            m[(j, k)] = (p + i * q) / 2.0;
            m[(k, j)] = (p - i * q) / 2.0;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let scale = m.max_abs().max(1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let xi = random_ball_point(n, 1.0, &mut rng);
        worst = worst.max((form(&xi) - quadratic_form(&m, &xi)).norm() / scale);
    }
    if worst > PROBE_TOL {
        return Err(EmbeddingError::Inconsistent(worst));
    }
    Ok(m)
}

/// `Σ_{jk} M_jk ξ_j ξ̄_k`.
pub fn quadratic_form(m: &ComplexMatrix, xi: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (j, xj) in xi.iter().enumerate() {
        for (k, xk) in xi.iter().enumerate() {
            s += m[(j, k)] * xj * xk.conj();
        }
    }
    s
}

/// A holomorphic polynomial map `C^k → C^{rows×cols}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicMap {
    source_dim: usize,
    target_shape: (usize, usize),
    components: Vec<Poly>,
}

impl HolomorphicMap {
    pub fn new(
        target_shape: (usize, usize),
        components: Vec<Poly>,
    ) -> Result<Self, EmbeddingError> {
        if components.len() != target_shape.0 * target_shape.1 {
            return Err(EmbeddingError::ComponentCount {
                expected: target_shape.0 * target_shape.1,
                found: components.len(),
            });
        }
        if !components.iter().all(Poly::is_holomorphic) {
            return Err(NumericsError::NotHolomorphic.into());
        }
        let source_dim = components.first().map_or(0, Poly::nvars);
        Ok(Self {
            source_dim,
            target_shape,
            components,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new((1, n), (0..n).map(|i| Poly::var(n, i)).collect()).expect("identity map")
    }

    /// `λ ↦ λU` on row vectors.
    pub fn linear(u: &ComplexMatrix) -> Result<Self, EmbeddingError> {
        let (k, n) = u.shape();
        let comps = (0..n)
            .map(|i| {
                (0..k).fold(Poly::zero(k), |acc, p| {
                    &acc + &Poly::var(k, p).scale(u[(p, i)])
                })
            })
            .collect();
        Self::new((1, n), comps)
    }

    /// The biholomorphism from the unit ball of `C³` onto `III(3)`.
    pub fn iii3() -> Self {
        let mut comps = vec![Poly::zero(3); 9];
        for (slot, (r, c)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            comps[r * 3 + c] = Poly::var(3, slot);
            comps[c * 3 + r] = Poly::var(3, slot).scale(Complex64::new(-1.0, 0.0));
        }
        Self::new((3, 3), comps).expect("III(3) map")
    }

    /// The biholomorphism from the bidisc onto `IV(2)`.
    pub fn iv2() -> Self {
        let w1 = Poly::var(2, 0);
        let w2 = Poly::var(2, 1);
        Self::new(
            (1, 2),
            vec![
                (&w1 + &w2).scale(Complex64::new(0.5, 0.0)),
                (&w1 - &w2).scale(Complex64::new(0.0, -0.5)),
            ],
        )
        .expect("IV(2) map")
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_shape(&self) -> (usize, usize) {
        self.target_shape
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn eval(&self, x: &[Complex64]) -> Result<ComplexMatrix, EmbeddingError> {
        let entries = self
            .components
            .iter()
            .map(|p| p.eval(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ComplexMatrix::new(
            self.target_shape.0,
            self.target_shape.1,
            entries,
        )?)
    }
}

/// Frobenius norm of `H_{u∘φ}(z₀) - φ'(z₀) H_u(φ(z₀)) φ'(z₀)*`, with
/// `φ'_{ia} = ∂φ_a/∂z_i`.
pub fn hessian_transport_check(
    phi: &HolomorphicMap,
    u: &WirtingerField,
    z0: &[Complex64],
) -> Result<f64, EmbeddingError> {
    if u.shape() != phi.target_shape {
        return Err(EmbeddingError::ComponentCount {
            expected: u.shape().0 * u.shape().1,
            found: phi.components.len(),
        });
    }
    if z0.len() != phi.source_dim {
        return Err(EmbeddingError::InvalidDimension(format!(
            "z₀ has {} entries, map expects {}",
            z0.len(),
            phi.source_dim
        )));
    }
    let lhs = composed_hessian(&phi.components, u, z0)?.to_matrix();
    let w = phi.eval(z0)?;
    let hu = wirtinger_hessian(u, &w, &FdOptions::default())?.to_matrix();
    let j = jacobian(&phi.components, z0)?;
    let rhs = &(&j * &hu) * &j.adjoint();
    Ok((&lhs - &rhs).frobenius_norm())
}
