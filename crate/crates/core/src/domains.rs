//! The four classical bounded symmetric domains, membership tests, seeded
//! interior and Shilov-boundary samplers, and two low-dimensional
//! biholomorphic models.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::numerics::{ComplexMatrix, NumericsError};

/// Default lower bound on the membership margin of interior samples.
pub const DEFAULT_MARGIN_FLOOR: f64 = 0.05;

/// Tolerance for the symmetry checks performed by [`MatrixPoint::new`].
const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("invalid dimensions for {kind}: {detail}")]
    InvalidDimension { kind: &'static str, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point has shape {found:?}, domain expects {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("point violates the {0} structure")]
    StructureViolation(&'static str),
    #[error("point lies outside the domain (margin {0:e})")]
    OutsideDomain(f64),
    #[error("margin floor must lie in (0, 1), got {0}")]
    InvalidMarginFloor(f64),
    #[error("cannot parse domain '{0}'; expected I:m,n | II:n | III:n | IV:n")]
    Parse(String),
    #[error("fixture format error: {0}")]
    Fixture(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A classical domain together with its dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainSpec {
    /// `m×n` matrices with `I - z z* > 0`, `m ≤ n`.
    TypeI { m: usize, n: usize },
    /// Symmetric `n×n` matrices with `I - z z* > 0`.
    TypeII { n: usize },
    /// Antisymmetric `n×n` matrices with `I - z z* > 0`.
    TypeIII { n: usize },
    /// Vectors with `1 - 2|z|² + |s|² > 0` and `|s| < 1`, where `s = Σ z_j²`.
    TypeIV { n: usize },
}

/// Half-integer exponent `κ` of the Poisson–Szegő kernel, stored as `2κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Kappa {
    twice: u32,
}

impl Kappa {
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl DomainSpec {
    pub fn type_i(m: usize, n: usize) -> Result<Self, DomainError> {
        if m == 0 || m > n {
            return Err(DomainError::InvalidDimension {
                kind: "type I",
                detail: format!("need 1 <= m <= n, got m={m}, n={n}"),
            });
        }
        Ok(Self::TypeI { m, n })
    }

    pub fn type_ii(n: usize) -> Result<Self, DomainError> {
        if n == 0 {
            return Err(DomainError::InvalidDimension {
                kind: "type II",
                detail: "need n >= 1".into(),
            });
        }
        Ok(Self::TypeII { n })
    }

    pub fn type_iii(n: usize) -> Result<Self, DomainError> {
        if n < 2 {
            return Err(DomainError::InvalidDimension {
                kind: "type III",
                detail: format!("need n >= 2, got {n}"),
            });
        }
        Ok(Self::TypeIII { n })
    }

    pub fn type_iv(n: usize) -> Result<Self, DomainError> {
        if n == 0 {
            return Err(DomainError::InvalidDimension {
                kind: "type IV",
                detail: "need n >= 1".into(),
            });
        }
        Ok(Self::TypeIV { n })
    }

    /// Shape of the ambient matrix space; type IV points are `1×n` rows.
    pub fn ambient_shape(&self) -> (usize, usize) {
        match *self {
            Self::TypeI { m, n } => (m, n),
            Self::TypeII { n } | Self::TypeIII { n } => (n, n),
            Self::TypeIV { n } => (1, n),
        }
    }

    /// Number of ambient complex coordinates.
    pub fn ambient_dim(&self) -> usize {
        let (r, c) = self.ambient_shape();
        r * c
    }

    /// Range of the component indices `j, k` of the Hua operator.
    pub fn component_range(&self) -> usize {
        match *self {
            Self::TypeI { m, .. } => m,
            Self::TypeII { n } | Self::TypeIII { n } | Self::TypeIV { n } => n,
        }
    }

    pub fn kappa(&self) -> Result<Kappa, DomainError> {
        match *self {
            Self::TypeI { n, .. } => Ok(Kappa::from_twice(2 * n as u32)),
            Self::TypeII { n } => Ok(Kappa::from_twice(n as u32 + 1)),
            Self::TypeIII { n } if n % 2 == 0 => Ok(Kappa::from_twice(n as u32 - 1)),
            Self::TypeIII { n } => Ok(Kappa::from_twice(n as u32)),
            Self::TypeIV { .. } => Err(DomainError::Unsupported(
                "no Poisson-Szegő exponent is defined here for type IV".into(),
            )),
        }
    }

    /// Compact label such as `II2` or `I2x3`, used in campaign identifiers.
    pub fn label(&self) -> String {
        match *self {
            Self::TypeI { m, n } => format!("I{m}x{n}"),
            Self::TypeII { n } => format!("II{n}"),
            Self::TypeIII { n } => format!("III{n}"),
            Self::TypeIV { n } => format!("IV{n}"),
        }
    }

    fn validate_structure(&self, z: &ComplexMatrix) -> Result<(), DomainError> {
        if z.shape() != self.ambient_shape() {
            return Err(DomainError::ShapeMismatch {
                expected: self.ambient_shape(),
                found: z.shape(),
            });
        }
        let tol = STRUCTURE_TOL * z.max_abs().max(1.0);
        match self {
            Self::TypeII { .. } if !z.is_symmetric(tol) => {
                Err(DomainError::StructureViolation("symmetric"))
            }
            Self::TypeIII { .. } if !z.is_antisymmetric(tol) => {
                Err(DomainError::StructureViolation("antisymmetric"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::TypeI { m, n } => write!(f, "I:{m},{n}"),
            Self::TypeII { n } => write!(f, "II:{n}"),
            Self::TypeIII { n } => write!(f, "III:{n}"),
            Self::TypeIV { n } => write!(f, "IV:{n}"),
        }
    }
}

impl FromStr for DomainSpec {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DomainError::Parse(s.to_string());
        let (kind, dims) = s.trim().split_once(':').ok_or_else(err)?;
        let dims: Vec<usize> = dims
            .split(',')
            .map(|d| d.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| err())?;
        match (kind.trim(), dims.as_slice()) {
            ("I", [m, n]) => Self::type_i(*m, *n),
            ("I", [n]) => Self::type_i(1, *n),
            ("II", [n]) => Self::type_ii(*n),
            ("III", [n]) => Self::type_iii(*n),
            ("IV", [n]) => Self::type_iv(*n),
            _ => Err(err()),
        }
    }
}

/// A point of the ambient space of a domain, with its structure validated.
/// It need not lie inside the domain (Shilov samples lie on the boundary).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPoint {
    spec: DomainSpec,
    value: ComplexMatrix,
}

impl MatrixPoint {
    pub fn new(spec: DomainSpec, value: ComplexMatrix) -> Result<Self, DomainError> {
        spec.validate_structure(&value)?;
        Ok(Self { spec, value })
    }

    pub fn spec(&self) -> DomainSpec {
        self.spec
    }

    pub fn value(&self) -> &ComplexMatrix {
        &self.value
    }

    pub fn into_value(self) -> ComplexMatrix {
        self.value
    }
}

/// Result of a membership test; `margin > 0` exactly when the point is inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// Smallest eigenvalue of `I - z z*` for matrix types; for type IV the
    /// smaller of `1 - 2|z|² + |s|²` and `1 - |s|²`.
    pub margin: f64,
}

/// `s(z) = Σ z_j²` for a type IV point.
pub fn lie_ball_s(z: &ComplexMatrix) -> Complex64 {
    z.as_slice().iter().map(|x| x * x).sum()
}

pub fn contains(spec: &DomainSpec, z: &ComplexMatrix) -> Result<Membership, DomainError> {
    if z.shape() != spec.ambient_shape() {
        return Err(DomainError::ShapeMismatch {
            expected: spec.ambient_shape(),
            found: z.shape(),
        });
    }
    let margin = match spec {
        DomainSpec::TypeIV { .. } => {
            let norm2: f64 = z.as_slice().iter().map(Complex64::norm_sqr).sum();
            let s2 = lie_ball_s(z).norm_sqr();
            (1.0 - 2.0 * norm2 + s2).min(1.0 - s2)
        }
        _ => {
            let v = (z * &z.adjoint()).identity_minus();
            v.hermitian_eigenvalues()?[0]
        }
    };
    Ok(Membership {
        inside: margin > 0.0,
        margin,
    })
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n).to_nalgebra();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    ComplexMatrix::from_nalgebra(&(q * phases))
}

/// `count` interior points with margin at least [`DEFAULT_MARGIN_FLOOR`].
pub fn sample_interior(
    spec: &DomainSpec,
    seed: u64,
    count: usize,
) -> Result<Vec<MatrixPoint>, DomainError> {
    sample_interior_with_floor(spec, seed, count, DEFAULT_MARGIN_FLOOR)
}

/// Interior sampler: a structured Gaussian direction scaled to operator norm
/// `r = sqrt((1 - floor)·U)`, `U` uniform, so that the margin `1 - r²` is at
/// least `floor`. Type IV points are drawn by rejection in the Euclidean ball.
pub fn sample_interior_with_floor(
    spec: &DomainSpec,
    seed: u64,
    count: usize,
    margin_floor: f64,
) -> Result<Vec<MatrixPoint>, DomainError> {
    if !(margin_floor > 0.0 && margin_floor < 1.0) {
        return Err(DomainError::InvalidMarginFloor(margin_floor));
    }
    let mut rng = rng_for(seed);
    let (rows, cols) = spec.ambient_shape();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = gaussian_matrix(&mut rng, rows, cols);
        let dir = match spec {
            DomainSpec::TypeII { .. } => {
                let mut s = &g + &g.transpose();
                // Exact symmetry: copy the upper triangle down.
                for i in 0..rows {
                    for j in 0..i {
                        s[(i, j)] = s[(j, i)];
                    }
                }
                s
            }
            DomainSpec::TypeIII { .. } => {
                let mut a = &g - &g.transpose();
                for i in 0..rows {
                    a[(i, i)] = Complex64::new(0.0, 0.0);
                    for j in 0..i {
                        a[(i, j)] = -a[(j, i)];
                    }
                }
                a
            }
            _ => g,
        };
        let u: f64 = rng.random();
        let z = match spec {
            DomainSpec::TypeIV { .. } => {
                let scale = u.sqrt() / dir.frobenius_norm();
                let z = dir.scale(Complex64::new(scale, 0.0));
                if contains(spec, &z)?.margin < margin_floor {
                    continue;
                }
                z
            }
            _ => {
                let r = ((1.0 - margin_floor) * u).sqrt();
                dir.scale(Complex64::new(r / dir.operator_norm(), 0.0))
            }
        };
        out.push(MatrixPoint::new(*spec, z)?);
    }
    Ok(out)
}

/// Seeded samples from the `K`-invariant probability measure on the Shilov
/// boundary: `w w* = I` for type I, `U Uᵗ` for type II and `U J Uᵗ` for
/// even type III, with `U` Haar-unitary and `J` the standard symplectic block.
pub fn sample_silov(
    spec: &DomainSpec,
    seed: u64,
    count: usize,
) -> Result<Vec<MatrixPoint>, DomainError> {
    let mut rng = rng_for(seed);
    (0..count).map(|_| silov_point(spec, &mut rng)).collect()
}

/// One Shilov-boundary point drawn from `rng`.
pub fn silov_point(spec: &DomainSpec, rng: &mut ChaCha8Rng) -> Result<MatrixPoint, DomainError> {
    let value = match *spec {
        DomainSpec::TypeI { m, n } => {
            let u = haar_unitary(rng, n);
            ComplexMatrix::from_fn(m, n, |i, j| u[(i, j)])
        }
        DomainSpec::TypeII { n } => {
            let u = haar_unitary(rng, n);
            symmetrize(&(&u * &u.transpose()))
        }
        DomainSpec::TypeIII { n } if n % 2 == 0 => {
            let u = haar_unitary(rng, n);
            antisymmetrize(&(&(&u * &symplectic_block(n, n)) * &u.transpose()))
        }
        DomainSpec::TypeIII { n } => {
            return Err(DomainError::Unsupported(format!(
                "Shilov sampling for odd type III (n = {n})"
            )))
        }
        DomainSpec::TypeIV { .. } => {
            return Err(DomainError::Unsupported(
                "Shilov sampling for type IV".into(),
            ))
        }
    };
    MatrixPoint::new(*spec, value)
}

/// Rank-deficient antisymmetric points `U J' Uᵗ` of odd type III, where `J'`
/// has `(n-1)/2` symplectic blocks and a zero last row and column. They are
/// topological boundary points with `w* w ≠ I`.
pub fn sample_pseudo_silov_odd(
    n: usize,
    seed: u64,
    count: usize,
) -> Result<Vec<MatrixPoint>, DomainError> {
    if n.is_multiple_of(2) || n < 3 {
        return Err(DomainError::InvalidDimension {
            kind: "type III",
            detail: format!("pseudo-boundary sampler needs odd n >= 3, got {n}"),
        });
    }
    let spec = DomainSpec::type_iii(n)?;
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| {
            let u = haar_unitary(&mut rng, n);
            let w = antisymmetrize(&(&(&u * &symplectic_block(n, n - 1)) * &u.transpose()));
            MatrixPoint::new(spec, w)
        })
        .collect()
}

/// `n×n` block-diagonal matrix with `[[0, 1], [-1, 0]]` blocks covering the
/// leading `filled` rows (rounded down to even).
fn symplectic_block(n: usize, filled: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(n, n);
    for b in 0..(filled / 2) {
        j[(2 * b, 2 * b + 1)] = Complex64::new(1.0, 0.0);
        j[(2 * b + 1, 2 * b)] = Complex64::new(-1.0, 0.0);
    }
    j
}

fn symmetrize(a: &ComplexMatrix) -> ComplexMatrix {
    (a + &a.transpose()).scale(Complex64::new(0.5, 0.0))
}

fn antisymmetrize(a: &ComplexMatrix) -> ComplexMatrix {
    (a - &a.transpose()).scale(Complex64::new(0.5, 0.0))
}

/// Antisymmetric `3×3` matrix `[[0, a, b], [-a, 0, c], [-b, -c, 0]]`.
pub fn iii3_matrix(v: [Complex64; 3]) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let [a, b, c] = v;
    ComplexMatrix::from_rows(&[vec![o, a, b], vec![-a, o, c], vec![-b, -c, o]])
        .expect("3x3 literal")
}

/// Biholomorphism from the unit ball of `C³` onto `III(3)`.
pub fn biholo_iii3(v: [Complex64; 3]) -> Result<MatrixPoint, DomainError> {
    let norm2: f64 = v.iter().map(Complex64::norm_sqr).sum();
    if norm2 >= 1.0 {
        return Err(DomainError::OutsideDomain(1.0 - norm2));
    }
    MatrixPoint::new(DomainSpec::TypeIII { n: 3 }, iii3_matrix(v))
}

/// Inverse of [`biholo_iii3`]: reads the upper-triangular entries.
pub fn iii3_to_ball(w: &MatrixPoint) -> Result<[Complex64; 3], DomainError> {
    if w.spec() != (DomainSpec::TypeIII { n: 3 }) {
        return Err(DomainError::ShapeMismatch {
            expected: (3, 3),
            found: w.value().shape(),
        });
    }
    let z = w.value();
    Ok([z[(0, 1)], z[(0, 2)], z[(1, 2)]])
}

/// Biholomorphism from the bidisc onto `IV(2)`:
/// `(ζ₁, ζ₂) ↦ ((ζ₁ + ζ₂)/2, (ζ₁ - ζ₂)/(2i))`.
pub fn biholo_iv2(zeta: [Complex64; 2]) -> Result<MatrixPoint, DomainError> {
    let worst = zeta.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if worst >= 1.0 {
        return Err(DomainError::OutsideDomain(1.0 - worst));
    }
    let i2 = Complex64::new(0.0, 2.0);
    let w = ComplexMatrix::new(
        1,
        2,
        vec![(zeta[0] + zeta[1]) / 2.0, (zeta[0] - zeta[1]) / i2],
    )?;
    MatrixPoint::new(DomainSpec::TypeIV { n: 2 }, w)
}

/// Inverse of [`biholo_iv2`]: `w ↦ (w₁ + i w₂, w₁ - i w₂)`.
pub fn iv2_to_bidisc(w: &ComplexMatrix) -> Result<[Complex64; 2], DomainError> {
    if w.shape() != (1, 2) {
        return Err(DomainError::ShapeMismatch {
            expected: (1, 2),
            found: w.shape(),
        });
    }
    let i = Complex64::new(0.0, 1.0);
    Ok([w[(0, 0)] + i * w[(0, 1)], w[(0, 0)] - i * w[(0, 1)]])
}

/// Serialises points as `{"domain": "II:2", "points": [{rows, cols, entries}]}`
/// with entries row-major as `[re, im]` pairs.
pub fn points_to_json(spec: &DomainSpec, points: &[MatrixPoint]) -> Value {
    let pts: Vec<Value> = points
        .iter()
        .map(|p| {
            let z = p.value();
            json!({
                "rows": z.rows(),
                "cols": z.cols(),
                "entries": z.as_slice().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "domain": spec.to_string(), "points": pts })
}

pub fn points_from_json(v: &Value) -> Result<(DomainSpec, Vec<MatrixPoint>), DomainError> {
    let fixture = |msg: &str| DomainError::Fixture(msg.to_string());
    let spec: DomainSpec = v
        .get("domain")
        .and_then(Value::as_str)
        .ok_or_else(|| fixture("missing 'domain'"))?
        .parse()?;
    let pts = v
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| fixture("missing 'points'"))?;
    let points = pts
        .iter()
        .map(|p| {
            let dim = |k: &str| {
                p.get(k)
                    .and_then(Value::as_u64)
                    .map(|x| x as usize)
                    .ok_or_else(|| fixture(&format!("missing '{k}'")))
            };
            let (rows, cols) = (dim("rows")?, dim("cols")?);
            let entries = p
                .get("entries")
                .and_then(Value::as_array)
                .ok_or_else(|| fixture("missing 'entries'"))?
                .iter()
                .map(|e| {
                    let pair: [f64; 2] =
                        serde_json::from_value(e.clone()).map_err(|e| fixture(&e.to_string()))?;
                    Ok(Complex64::new(pair[0], pair[1]))
                })
                .collect::<Result<Vec<_>, DomainError>>()?;
            MatrixPoint::new(spec, ComplexMatrix::new(rows, cols, entries)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((spec, points))
}
