//! Exact polynomials in `z_1..z_N` and their conjugates `z̄_1..z̄_N`.
//!
//! Terms are kept in a sorted map keyed by exponent vectors, so two
//! polynomials with the same terms compare and iterate identically.
//! Coefficients with modulus below [`COEFF_DROP`] are discarded.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, NumericsError, WirtingerHessian};

/// Coefficients smaller than this are dropped after every operation.
pub const COEFF_DROP: f64 = 1e-15;

/// Exponents of `z` followed by exponents of `z̄`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Self {
            z: vec![0; nvars],
            zbar: vec![0; nvars],
        }
    }

    pub fn degree(&self) -> (u32, u32) {
        (self.z.iter().sum(), self.zbar.iter().sum())
    }

    fn times(&self, other: &Self) -> Self {
        Self {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
            zbar: self
                .zbar
                .iter()
                .zip(&other.zbar)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

/// Precomputed powers `z_i^e` and `z̄_i^e` at one point.
struct PowerTable {
    z: Vec<Vec<Complex64>>,
    zbar: Vec<Vec<Complex64>>,
}

impl PowerTable {
    fn new(point: &[Complex64], max_z: &[u32], max_zbar: &[u32]) -> Self {
        let table = |x: Complex64, m: u32| {
            let mut out = Vec::with_capacity(m as usize + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            out.push(acc);
            for _ in 0..m {
                acc *= x;
                out.push(acc);
            }
            out
        };
        Self {
            z: point
                .iter()
                .zip(max_z)
                .map(|(&x, &m)| table(x, m))
                .collect(),
            zbar: point
                .iter()
                .zip(max_zbar)
                .map(|(&x, &m)| table(x.conj(), m))
                .collect(),
        }
    }

    /// Product of all powers in `m`, with the exponents of `skip_z` and
    /// `skip_zbar` each lowered by one.
    fn product(&self, m: &Monomial, skip_z: Option<usize>, skip_zbar: Option<usize>) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (i, &e) in m.z.iter().enumerate() {
            let e = if skip_z == Some(i) { e - 1 } else { e };
            if e > 0 {
                acc *= self.z[i][e as usize];
            }
        }
        for (i, &e) in m.zbar.iter().enumerate() {
            let e = if skip_zbar == Some(i) { e - 1 } else { e };
            if e > 0 {
                acc *= self.zbar[i][e as usize];
            }
        }
        acc
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The coordinate `z_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range");
        let mut m = Monomial::one(nvars);
        m.z[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(m, Complex64::new(1.0, 0.0));
        p
    }

    /// The conjugate coordinate `z̄_i`.
    pub fn conj_var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range");
        let mut m = Monomial::one(nvars);
        m.zbar[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(m, Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Complex64)>,
    ) -> Result<Self, NumericsError> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.z.len() != nvars || m.zbar.len() != nvars {
                return Err(NumericsError::VariableCount {
                    expected: nvars,
                    found: m.z.len().max(m.zbar.len()),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        let entry = self
            .terms
            .entry(m.clone())
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() < COEFF_DROP {
            self.terms.remove(&m);
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= COEFF_DROP);
    }

    /// Largest total degree in `z` and in `z̄` separately.
    pub fn degree(&self) -> (u32, u32) {
        self.terms.keys().fold((0, 0), |(p, q), m| {
            let (a, b) = m.degree();
            (p.max(a), q.max(b))
        })
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree().0 + m.degree().1)
            .max()
            .unwrap_or(0)
    }

    /// True when no term involves a conjugate variable.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|m| m.zbar.iter().all(|&e| e == 0))
    }

    /// True when every term has bidegree exactly `(p, q)`.
    pub fn is_bihomogeneous(&self, p: u32, q: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == (p, q))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    /// Pointwise complex conjugate: swaps `z` and `z̄` exponents and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                (
                    Monomial {
                        z: m.zbar.clone(),
                        zbar: m.z.clone(),
                    },
                    c.conj(),
                )
            })
            .collect();
        Self {
            nvars: self.nvars,
            terms,
        }
    }

    /// `(self + conj(self)) / 2`, i.e. the real part as a field.
    pub fn real_part(&self) -> Self {
        (self + &self.conj()).scale(Complex64::new(0.5, 0.0))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.nvars, Complex64::new(1.0, 0.0));
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// `∂/∂z_i`.
    pub fn diff_z(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.z[i];
            if e > 0 {
                let mut m2 = m.clone();
                m2.z[i] -= 1;
                out.add_term(m2, c * e as f64);
            }
        }
        out
    }

    /// `∂/∂z̄_i`.
    pub fn diff_zbar(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.zbar[i];
            if e > 0 {
                let mut m2 = m.clone();
                m2.zbar[i] -= 1;
                out.add_term(m2, c * e as f64);
            }
        }
        out
    }

    /// Euclidean mixed Laplacian `Σ_i ∂²/∂z_i∂z̄_i`.
    pub fn mixed_laplacian(&self) -> Self {
        (0..self.nvars).fold(Self::zero(self.nvars), |acc, i| {
            &acc + &self.diff_z(i).diff_zbar(i)
        })
    }

    fn max_exponents(&self) -> (Vec<u32>, Vec<u32>) {
        let mut mz = vec![0; self.nvars];
        let mut mzb = vec![0; self.nvars];
        for m in self.terms.keys() {
            for i in 0..self.nvars {
                mz[i] = mz[i].max(m.z[i]);
                mzb[i] = mzb[i].max(m.zbar[i]);
            }
        }
        (mz, mzb)
    }

    fn check_point(&self, point: &[Complex64]) -> Result<(), NumericsError> {
        if point.len() != self.nvars {
            return Err(NumericsError::VariableCount {
                expected: self.nvars,
                found: point.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64, NumericsError> {
        self.check_point(point)?;
        let (mz, mzb) = self.max_exponents();
        let table = PowerTable::new(point, &mz, &mzb);
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| c * table.product(m, None, None))
            .sum())
    }

    /// Evaluates at a matrix point, reading entries in row-major order.
    pub fn eval_matrix(&self, z: &ComplexMatrix) -> Result<Complex64, NumericsError> {
        self.eval(z.as_slice())
    }

    /// Value, holomorphic gradient `∂f/∂z_a` and antiholomorphic gradient `∂f/∂z̄_b`.
    pub fn gradients(
        &self,
        point: &[Complex64],
    ) -> Result<(Complex64, Vec<Complex64>, Vec<Complex64>), NumericsError> {
        self.check_point(point)?;
        let n = self.nvars;
        let (mz, mzb) = self.max_exponents();
        let table = PowerTable::new(point, &mz, &mzb);
        let mut value = Complex64::new(0.0, 0.0);
        let mut gz = vec![Complex64::new(0.0, 0.0); n];
        let mut gzb = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in &self.terms {
            value += c * table.product(m, None, None);
            for a in 0..n {
                if m.z[a] > 0 {
                    gz[a] += c * m.z[a] as f64 * table.product(m, Some(a), None);
                }
                if m.zbar[a] > 0 {
                    gzb[a] += c * m.zbar[a] as f64 * table.product(m, None, Some(a));
                }
            }
        }
        Ok((value, gz, gzb))
    }

    /// Exact mixed Hessian `∂²f/∂z_a∂z̄_b`.
    pub fn wirtinger_hessian(
        &self,
        point: &[Complex64],
    ) -> Result<WirtingerHessian, NumericsError> {
        self.check_point(point)?;
        let n = self.nvars;
        let (mz, mzb) = self.max_exponents();
        let table = PowerTable::new(point, &mz, &mzb);
        let mut h = WirtingerHessian::zeros(n);
        for (m, c) in &self.terms {
            for a in (0..n).filter(|&a| m.z[a] > 0) {
                for b in (0..n).filter(|&b| m.zbar[b] > 0) {
                    let coeff = c * (m.z[a] * m.zbar[b]) as f64;
                    h[(a, b)] += coeff * table.product(m, Some(a), Some(b));
                }
            }
        }
        Ok(h)
    }

    /// Determinant of a square matrix of polynomials by cofactor expansion.
    pub fn det(matrix: &[Vec<Poly>]) -> Result<Poly, NumericsError> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(NumericsError::NotSquare((
                n,
                matrix.first().map_or(0, Vec::len),
            )));
        }
        let nvars = matrix
            .first()
            .and_then(|r| r.first())
            .map_or(0, Poly::nvars);
        fn minor_det(m: &[Vec<Poly>], rows: &[usize], cols: &[usize], nvars: usize) -> Poly {
            if rows.is_empty() {
                return Poly::constant(nvars, Complex64::new(1.0, 0.0));
            }
            let r = rows[0];
            let mut acc = Poly::zero(nvars);
            for (pos, &c) in cols.iter().enumerate() {
                if m[r][c].is_empty() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = &m[r][c] * &minor_det(m, &rows[1..], &rest, nvars);
                acc = if pos % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        }
        let idx: Vec<usize> = (0..n).collect();
        Ok(minor_det(matrix, &idx, &idx, nvars))
    }

    /// Composes with a holomorphic map: each `z_i` is replaced by `map[i]`
    /// and each `z̄_i` by its conjugate. The result lives in the map's variables.
    pub fn substitute_holomorphic(&self, map: &[Poly]) -> Result<Poly, NumericsError> {
        if map.len() != self.nvars {
            return Err(NumericsError::VariableCount {
                expected: self.nvars,
                found: map.len(),
            });
        }
        if !map.iter().all(Poly::is_holomorphic) {
            return Err(NumericsError::NotHolomorphic);
        }
        let k = map.first().map_or(0, Poly::nvars);
        if map.iter().any(|p| p.nvars != k) {
            return Err(NumericsError::VariableCount {
                expected: k,
                found: map.iter().map(Poly::nvars).max().unwrap_or(0),
            });
        }
        let conj_map: Vec<Poly> = map.iter().map(Poly::conj).collect();
        let mut pow_cache: BTreeMap<(bool, usize, u32), Poly> = BTreeMap::new();
        let mut power = |bar: bool, i: usize, e: u32| -> Poly {
            pow_cache
                .entry((bar, i, e))
                .or_insert_with(|| {
                    if bar {
                        conj_map[i].pow(e)
                    } else {
                        map[i].pow(e)
                    }
                })
                .clone()
        };
        let mut out = Poly::zero(k);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(k, *c);
            for i in 0..self.nvars {
                if m.z[i] > 0 {
                    term = &term * &power(false, i, m.z[i]);
                }
                if m.zbar[i] > 0 {
                    term = &term * &power(true, i, m.zbar[i]);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            *out.terms
                .entry(m.clone())
                .or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        out.prune();
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut terms: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *terms
                    .entry(ma.times(mb))
                    .or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        let mut out = Poly {
            nvars: self.nvars,
            terms,
        };
        out.prune();
        out
    }
}
