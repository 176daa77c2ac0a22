//! Dirichlet problems: the weighted ball operator via bidegree harmonics and
//! radial profiles, Monte-Carlo Poisson–Szegő quadrature on matrix domains,
//! and a pluriharmonicity test.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domains::{contains, silov_point, DomainError, DomainSpec, MatrixPoint};
use crate::hypergeom::{radial_profile, HypergeomError, RadialProfile};
use crate::kernels::{poisson_szego_unchecked, KernelError};
use crate::numerics::{
    wirtinger_hessian, CompensatedSum, ComplexMatrix, FdOptions, Monomial, NumericsError, Poly,
    WirtingerField, WirtingerHessian,
};
use crate::operators::OperatorError;

/// Samples per independently seeded Monte-Carlo chunk.
pub const CHUNK_SIZE: usize = 4096;

/// Tolerance on the mixed Laplacian of accepted harmonic polynomials.
const HARMONIC_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirichletError {
    #[error("ball dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("polynomial is not harmonic (largest Laplacian coefficient {0:e})")]
    NotHarmonic(f64),
    #[error("polynomial is not bihomogeneous of bidegree ({p}, {q})")]
    NotBihomogeneous { p: u32, q: u32 },
    #[error("harmonic has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point with |z|² = {0} lies outside the closed ball")]
    OutsideBall(f64),
    #[error("sample count must be positive")]
    NoSamples,
    #[error(transparent)]
    Hypergeom(#[from] HypergeomError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A harmonic polynomial on `Cⁿ`, homogeneous of degree `p` in `z` and `q` in `z̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct BidegreeHarmonic {
    n: usize,
    p: u32,
    q: u32,
    poly: Poly,
}

fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(n - 1, total - first)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

fn max_coeff(p: &Poly) -> f64 {
    p.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

/// Harmonic projection of a `(p, q)`-bihomogeneous polynomial:
/// `Σ_j (-1)^j |z|^{2j} L^j P / (j! Π_{i=1..j} (p+q+n-1-i))`, `L = Σ ∂_i ∂̄_i`.
/// Harmonic input is returned unchanged.
pub fn harmonic_projection(poly: &Poly, p: u32, q: u32) -> Poly {
    let n = poly.nvars();
    let rho = (0..n).fold(Poly::zero(n), |acc, i| {
        &acc + &(&Poly::var(n, i) * &Poly::conj_var(n, i))
    });
    let mut out = poly.clone();
    let mut lap = poly.clone();
    let mut rho_pow = Poly::constant(n, Complex64::new(1.0, 0.0));
    let mut coeff = 1.0;
    for j in 1..=p.min(q) {
        lap = lap.mixed_laplacian();
        if lap.is_empty() {
            break;
        }
        rho_pow = &rho_pow * &rho;
        coeff *= -1.0 / (f64::from(j) * f64::from(p + q + n as u32 - 1 - j));
        out = &out + &(&rho_pow * &lap).scale(Complex64::new(coeff, 0.0));
    }
    out
}

/// Random nonzero harmonic polynomial of bidegree `(p, q)` on `Cⁿ`: complex
/// Gaussian coefficients on every monomial, then [`harmonic_projection`].
/// `p = q = 0` gives the constant 1.
pub fn make_bidegree(
    p: u32,
    q: u32,
    n: usize,
    seed: u64,
) -> Result<BidegreeHarmonic, DirichletError> {
    if n < 2 {
        return Err(DirichletError::DimensionTooSmall(n));
    }
    if p == 0 && q == 0 {
        return BidegreeHarmonic::new(Poly::constant(n, Complex64::new(1.0, 0.0)), p, q);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut raw = Poly::zero(n);
        for a in compositions(n, p) {
            for b in compositions(n, q) {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                raw.add_term(
                    Monomial {
                        z: a.clone(),
                        zbar: b,
                    },
                    Complex64::new(re, im),
                );
            }
        }
        let h = harmonic_projection(&raw, p, q);
        if max_coeff(&h) > 1e-8 {
            return BidegreeHarmonic::new(h, p, q);
        }
    }
}

impl BidegreeHarmonic {
    /// Wraps a polynomial after checking harmonicity and bihomogeneity.
    pub fn new(poly: Poly, p: u32, q: u32) -> Result<Self, DirichletError> {
        let n = poly.nvars();
        if n < 2 {
            return Err(DirichletError::DimensionTooSmall(n));
        }
        if !poly.is_bihomogeneous(p, q) {
            return Err(DirichletError::NotBihomogeneous { p, q });
        }
        let lap = max_coeff(&poly.mixed_laplacian());
        if lap > HARMONIC_TOL * max_coeff(&poly).max(1.0) {
            return Err(DirichletError::NotHarmonic(lap));
        }
        Ok(Self { n, p, q, poly })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> (u32, u32) {
        (self.p, self.q)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn field(&self) -> WirtingerField {
        WirtingerField::polynomial((1, self.n), self.poly.clone()).expect("dimension matches")
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, DirichletError> {
        Ok(self.poly.eval(z)?)
    }
}

/// `u(z) = Σ h_{p,q}(|z|⁴) f_{p,q}(z)` on the closed unit ball of `Cⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSolution {
    n: usize,
    terms: Vec<(BidegreeHarmonic, RadialProfile)>,
}

/// Pairs every harmonic with its radial profile.
pub fn solve_tilde(fs: &[BidegreeHarmonic], n: usize) -> Result<DirichletSolution, DirichletError> {
    if n < 2 {
        return Err(DirichletError::DimensionTooSmall(n));
    }
    let terms = fs
        .iter()
        .map(|f| {
            if f.n != n {
                return Err(DirichletError::DimensionMismatch {
                    expected: n,
                    found: f.n,
                });
            }
            Ok((f.clone(), radial_profile(f.p, f.q, n as u32)?))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DirichletSolution { n, terms })
}

impl DirichletSolution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(BidegreeHarmonic, RadialProfile)] {
        &self.terms
    }

    fn radius2(&self, z: &[Complex64]) -> Result<f64, DirichletError> {
        if z.len() != self.n {
            return Err(DirichletError::DimensionMismatch {
                expected: self.n,
                found: z.len(),
            });
        }
        let rho: f64 = z.iter().map(Complex64::norm_sqr).sum();
        if rho > 1.0 + 1e-12 {
            return Err(DirichletError::OutsideBall(rho));
        }
        Ok(rho.min(1.0))
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, DirichletError> {
        let rho = self.radius2(z)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (f, h) in &self.terms {
            sum += f.eval(z)? * h.evaluate(rho * rho)?;
        }
        Ok(sum)
    }

    /// `Σ f_{p,q}(z)`, the prescribed boundary values.
    pub fn boundary_data(&self, z: &[Complex64]) -> Result<Complex64, DirichletError> {
        self.terms
            .iter()
            .map(|(f, _)| f.eval(z))
            .sum::<Result<Complex64, _>>()
    }

    /// Exact Hessian by the product rule with `t = |z|⁴`:
    /// `h f_{jk̄} + h'(t_j f_k̄ + t_k̄ f_j) + f(h' t_{jk̄} + h'' t_j t_k̄)`.
    pub fn hessian(&self, z: &[Complex64]) -> Result<WirtingerHessian, DirichletError> {
        let rho = self.radius2(z)?;
        let n = self.n;
        let t = rho * rho;
        let mut out = WirtingerHessian::zeros(n);
        for (f, h) in &self.terms {
            let (fv, fz, fzb) = f.poly.gradients(z)?;
            let fh = f.poly.wirtinger_hessian(z)?;
            let (h0, h1, h2) = if t < 1.0 {
                (h.evaluate(t)?, h.derivative(t, 1)?, h.derivative(t, 2)?)
            } else {
                (1.0, f64::NAN, f64::NAN)
            };
            for j in 0..n {
                let tj = z[j].conj() * (2.0 * rho);
                for k in 0..n {
                    let tk = z[k] * (2.0 * rho);
                    let delta = if j == k { 2.0 * rho } else { 0.0 };
                    let tjk = z[j].conj() * z[k] * 2.0 + delta;
                    out[(j, k)] += fh[(j, k)] * h0
                        + (tj * fzb[k] + tk * fz[j]) * h1
                        + fv * (tjk * h1 + tj * tk * h2);
                }
            }
        }
        Ok(out)
    }

    /// `u` as a field on `1×n` rows with its exact Hessian.
    pub fn field(&self) -> WirtingerField {
        let eval_self = self.clone();
        let hess_self = self.clone();
        let n = self.n;
        WirtingerField::analytic(
            (1, n),
            move |z| {
                eval_self
                    .eval(z.as_slice())
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            },
            move |z| {
                hess_self.hessian(z.as_slice()).unwrap_or_else(|_| {
                    let mut h = WirtingerHessian::zeros(n);
                    for a in 0..n {
                        h[(a, a)] = Complex64::new(f64::NAN, 0.0);
                    }
                    h
                })
            },
        )
    }
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: Complex64,
    /// `sqrt(Var(re) + Var(im)) / sqrt(N)`.
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean_re: f64,
    mean_im: f64,
    m2: f64,
}

impl Moments {
    fn from_values(values: &[Complex64]) -> Self {
        let count = values.len() as f64;
        let mut sre = CompensatedSum::new();
        let mut sim = CompensatedSum::new();
        for v in values {
            sre.add(v.re);
            sim.add(v.im);
        }
        let (mean_re, mean_im) = (sre.value() / count, sim.value() / count);
        let mut m2 = CompensatedSum::new();
        for v in values {
            m2.add((v.re - mean_re).powi(2) + (v.im - mean_im).powi(2));
        }
        Self {
            count,
            mean_re,
            mean_im,
            m2: m2.value(),
        }
    }

    /// Parallel-variance merge.
    fn merge(self, other: Self) -> Self {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let (dre, dim) = (other.mean_re - self.mean_re, other.mean_im - self.mean_im);
        let w = other.count / count;
        Self {
            count,
            mean_re: self.mean_re + dre * w,
            mean_im: self.mean_im + dim * w,
            m2: self.m2 + other.m2 + (dre * dre + dim * dim) * self.count * w,
        }
    }

    fn estimate(&self) -> MonteCarloEstimate {
        let var = if self.count > 1.0 {
            self.m2 / (self.count - 1.0)
        } else {
            0.0
        };
        MonteCarloEstimate {
            mean: Complex64::new(self.mean_re, self.mean_im),
            std_error: (var / self.count).sqrt(),
            samples: self.count as usize,
        }
    }
}

/// Boundary data for [`poisson_solve`].
pub type BoundaryFn<'a> = &'a (dyn Fn(&ComplexMatrix) -> Complex64 + Sync);

/// Estimates `∫ P(z, w) φ(w) dσ(w)` for several boundary functions at once
/// from the same Shilov samples. Samples are drawn in chunks of
/// [`CHUNK_SIZE`], chunk `i` from stream `i` of a ChaCha generator seeded by
/// `seed`; chunks run in parallel and are merged in index order, so the
/// result is independent of the thread count.
pub fn poisson_solve_many(
    z: &MatrixPoint,
    boundary: &[BoundaryFn<'_>],
    samples: usize,
    seed: u64,
) -> Result<Vec<MonteCarloEstimate>, DirichletError> {
    if samples == 0 {
        return Err(DirichletError::NoSamples);
    }
    let spec = z.spec();
    let kappa = spec.kappa()?.as_f64();
    let margin = contains(&spec, z.value())?.margin;
    if !(margin > 0.0) {
        return Err(KernelError::NotInterior(margin).into());
    }
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let per_chunk: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let len = CHUNK_SIZE.min(samples - chunk * CHUNK_SIZE);
            let mut values = vec![Vec::with_capacity(len); boundary.len()];
            for _ in 0..len {
                let w = silov_point(&spec, &mut rng)?;
                let p = poisson_szego_unchecked(kappa, z.value(), w.value());
                for (vals, phi) in values.iter_mut().zip(boundary) {
                    vals.push(phi(w.value()) * p);
                }
            }
            Ok(values.iter().map(|v| Moments::from_values(v)).collect())
        })
        .collect::<Result<_, DomainError>>()?;
    let mut totals = vec![Moments::default(); boundary.len()];
    for chunk in per_chunk {
        for (total, m) in totals.iter_mut().zip(chunk) {
            *total = total.merge(m);
        }
    }
    Ok(totals.iter().map(Moments::estimate).collect())
}

/// Monte-Carlo Poisson–Szegő solution of the Dirichlet problem at `z`.
pub fn poisson_solve(
    z: &MatrixPoint,
    boundary: BoundaryFn<'_>,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate, DirichletError> {
    Ok(poisson_solve_many(z, &[boundary], samples, seed)?.remove(0))
}

/// Outcome of [`pluriharmonicity_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PluriharmonicityResult {
    pub pluriharmonic: bool,
    /// Largest Frobenius norm of the Wirtinger Hessian over the points.
    pub max_hessian_norm: f64,
}

/// A field is pluriharmonic where its full Wirtinger Hessian vanishes.
pub fn pluriharmonicity_test(
    u: &WirtingerField,
    points: &[ComplexMatrix],
    tol: f64,
    opts: &FdOptions,
) -> Result<PluriharmonicityResult, DirichletError> {
    let mut worst: f64 = 0.0;
    for z in points {
        worst = worst.max(wirtinger_hessian(u, z, opts)?.frobenius_norm());
    }
    Ok(PluriharmonicityResult {
        pluriharmonic: worst < tol,
        max_hessian_norm: worst,
    })
}

/// Domains on which [`poisson_solve`] can sample the Shilov boundary.
pub fn supports_poisson(spec: &DomainSpec) -> bool {
    match spec {
        DomainSpec::TypeI { .. } | DomainSpec::TypeII { .. } => true,
        DomainSpec::TypeIII { n } => n % 2 == 0,
        DomainSpec::TypeIV { .. } => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::sample_interior;
    use crate::numerics::c64;
    use crate::operators::{apply, OperatorId, OperatorKind};

    #[test]
    fn projection_of_modulus_term() {
        // |z1|² in C² projects to (|z1|² - |z2|²)/2.
        let p = &Poly::var(2, 0) * &Poly::conj_var(2, 0);
        let h = harmonic_projection(&p, 1, 1);
        let x = [c64(0.3, 0.2), c64(-0.4, 0.1)];
        let expected = (x[0].norm_sqr() - x[1].norm_sqr()) / 2.0;
        assert!((h.eval(&x).unwrap() - c64(expected, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn disjoint_monomials_are_unchanged() {
        let p = &Poly::var(2, 0).pow(2) * &Poly::conj_var(2, 1).pow(3);
        assert_eq!(harmonic_projection(&p, 2, 3), p);
    }

    #[test]
    fn random_bidegree_is_harmonic() {
        for (p, q) in [(1, 0), (1, 1), (2, 1), (3, 2)] {
            let f = make_bidegree(p, q, 3, 17).unwrap();
            assert!(max_coeff(&f.poly().mixed_laplacian()) < 1e-12);
            assert!(f.poly().is_bihomogeneous(p, q));
        }
        assert_eq!(make_bidegree(0, 0, 2, 0).unwrap().poly().len(), 1);
        assert!(make_bidegree(1, 1, 1, 0).is_err());
    }

    #[test]
    fn non_harmonic_input_is_rejected() {
        let p = &Poly::var(2, 0) * &Poly::conj_var(2, 0);
        assert!(matches!(
            BidegreeHarmonic::new(p, 1, 1),
            Err(DirichletError::NotHarmonic(_))
        ));
    }

    #[test]
    fn holomorphic_data_extends_unchanged() {
        let f = make_bidegree(2, 0, 3, 5).unwrap();
        let u = solve_tilde(std::slice::from_ref(&f), 3).unwrap();
        let z = [c64(0.2, 0.1), c64(-0.3, 0.0), c64(0.1, 0.4)];
        assert_eq!(u.eval(&z).unwrap(), f.eval(&z).unwrap());
    }

    #[test]
    fn solution_is_annihilated_by_weighted_ball_operator() {
        let f = BidegreeHarmonic::new(&Poly::var(3, 0) * &Poly::conj_var(3, 1), 1, 1).unwrap();
        let u = solve_tilde(&[f], 3).unwrap().field();
        let spec = DomainSpec::type_i(1, 3).unwrap();
        for z in sample_interior(&spec, 3, 20).unwrap() {
            let r = apply(
                &OperatorId::full(OperatorKind::TildeBall),
                &u,
                &z,
                &FdOptions::default(),
            )
            .unwrap();
            assert!(r.norm() < 1e-12, "{r}");
        }
    }

    #[test]
    fn exact_hessian_matches_finite_differences() {
        let f = make_bidegree(2, 1, 3, 9).unwrap();
        let u = solve_tilde(&[f], 3).unwrap().field();
        let z =
            ComplexMatrix::new(1, 3, vec![c64(0.3, 0.1), c64(-0.2, 0.4), c64(0.1, -0.3)]).unwrap();
        let exact = wirtinger_hessian(&u, &z, &FdOptions::default()).unwrap();
        let fd = wirtinger_hessian(&u, &z, &FdOptions::forced()).unwrap();
        assert!(
            exact.max_abs_diff(&fd) < 1e-8,
            "{}",
            exact.max_abs_diff(&fd)
        );
    }

    #[test]
    fn kernel_mass_is_one_at_origin() {
        let spec = DomainSpec::type_ii(2).unwrap();
        let z = MatrixPoint::new(spec, ComplexMatrix::zeros(2, 2)).unwrap();
        let one = |_: &ComplexMatrix| c64(1.0, 0.0);
        let est = poisson_solve(&z, &one, 1000, 3).unwrap();
        assert!((est.mean - c64(1.0, 0.0)).norm() < 1e-14);
        assert!(est.std_error < 1e-14);
    }

    #[test]
    fn poisson_estimate_is_reproducible() {
        let spec = DomainSpec::type_i(2, 2).unwrap();
        let z = sample_interior(&spec, 1, 1).unwrap().remove(0);
        let phi = |w: &ComplexMatrix| c64(w[(0, 0)].re, 0.0);
        let a = poisson_solve(&z, &phi, 10_000, 42).unwrap();
        let b = poisson_solve(&z, &phi, 10_000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples, 10_000);
    }

    #[test]
    fn pluriharmonicity_examples() {
        let z1 = Poly::var(2, 0);
        let z2 = Poly::var(2, 1);
        let re_prod = WirtingerField::polynomial((1, 2), (&z1 * &z2).real_part()).unwrap();
        let mod1 = WirtingerField::polynomial((1, 2), &z1 * &Poly::conj_var(2, 0)).unwrap();
        let pts = vec![ComplexMatrix::new(1, 2, vec![c64(0.1, 0.2), c64(0.3, -0.1)]).unwrap()];
        let opts = FdOptions::default();
        let a = pluriharmonicity_test(&re_prod, &pts, 1e-10, &opts).unwrap();
        assert!(a.pluriharmonic && a.max_hessian_norm == 0.0);
        let b = pluriharmonicity_test(&mod1, &pts, 1e-10, &opts).unwrap();
        assert!(!b.pluriharmonic && (b.max_hessian_norm - 1.0).abs() < 1e-15);
    }
}
