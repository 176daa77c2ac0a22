//! Verification campaigns: seeded batches of identity checks that produce a
//! versioned, deterministic report.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counterexample::run_counterexample;
use crate::dirichlet::{
    poisson_solve_many, solve_tilde, supports_poisson, BidegreeHarmonic, BoundaryFn, DirichletError,
};
use crate::domains::{
    haar_unitary, sample_interior, sample_interior_with_floor, sample_pseudo_silov_odd,
    sample_silov, DomainError, DomainSpec,
};
use crate::embeddings::{
    hessian_transport_check, polarization_recover, pullback_residual, quadratic_form,
    random_ball_point, random_polynomial, random_unit_vector, BallEmbedding, EmbeddingError,
    HolomorphicMap,
};
use crate::hypergeom::{
    boundary_asymptotics_checks, classify_singularity, gauss_2f1_derivative,
    gauss_2f1_derivative_termwise, radial_profile, HypergeomError, SingularityKind,
};
use crate::kernels::{
    f_matrix, fd_log_det_w_gradient, kernel_residuals, log_gradients_closed_form, ExactKernel,
    KernelError,
};
use crate::numerics::{c64, Complex64, ComplexMatrix, FdOptions, Poly, WirtingerField};
use crate::operators::{apply, OperatorId, OperatorKind};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Hypergeom(#[from] HypergeomError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Kernel,
    Hypergeom,
    Dirichlet,
    Embeddings,
    Counterexample,
}

/// What a campaign runs and with which parameters. Unset fields take the
/// suite defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub suite: Suite,
    pub domain: Option<DomainSpec>,
    pub points: Option<usize>,
    pub seed: u64,
    /// Replaces the tolerance of every upper-bound check.
    pub tol: Option<f64>,
    /// Monte-Carlo sample count for the Poisson checks.
    pub samples: Option<usize>,
}

impl CampaignConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            domain: None,
            points: None,
            seed: 0,
            tol: None,
            samples: None,
        }
    }

    /// The domain the suite runs on.
    pub fn resolved_domain(&self) -> Result<Option<DomainSpec>, CampaignError> {
        let d = self.domain;
        match self.suite {
            Suite::Kernel => {
                let spec = d.unwrap_or(DomainSpec::TypeII { n: 2 });
                if matches!(spec, DomainSpec::TypeIV { .. }) {
                    return Err(CampaignError::Config(
                        "the kernel identity needs a matrix domain (type I, II or III)".into(),
                    ));
                }
                Ok(Some(spec))
            }
            Suite::Dirichlet => {
                let spec = d.unwrap_or(DomainSpec::TypeI { m: 2, n: 2 });
                if !supports_poisson(&spec) {
                    return Err(CampaignError::Config(format!(
                        "Poisson sampling needs type I, II or even type III, got {spec}"
                    )));
                }
                Ok(Some(spec))
            }
            Suite::Counterexample => match d {
                None | Some(DomainSpec::TypeIV { n: 2 }) => Ok(Some(DomainSpec::TypeIV { n: 2 })),
                Some(other) => Err(CampaignError::Config(format!(
                    "the counterexample lives on IV:2, got {other}"
                ))),
            },
            Suite::Hypergeom | Suite::Embeddings => match d {
                None => Ok(None),
                Some(_) => Err(CampaignError::Config(
                    "this suite does not take a domain".into(),
                )),
            },
        }
    }

    /// Campaign identifier, e.g. `kernel-identity-II2`.
    pub fn id(&self) -> Result<String, CampaignError> {
        let domain = self.resolved_domain()?;
        let label = domain.map(|d| d.label()).unwrap_or_default();
        Ok(match self.suite {
            Suite::Kernel => format!("kernel-identity-{label}"),
            Suite::Hypergeom => "hypergeom-singularity".into(),
            Suite::Dirichlet => format!("dirichlet-{label}"),
            Suite::Embeddings => "embeddings".into(),
            Suite::Counterexample => format!("counterexample-{label}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Passes when the largest residual is below the tolerance.
    Below,
    /// Passes when the largest value reaches the threshold.
    AtLeast,
}

/// One named check over a batch of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity or statement the check exercises.
    pub anchor: String,
    #[serde(with = "finite_or_null")]
    pub residual_max: f64,
    #[serde(with = "finite_or_null")]
    pub residual_mean: f64,
    pub count: usize,
    pub tolerance: f64,
    pub expect: Expectation,
    pub pass: bool,
}

/// Non-finite values are written as `null` and read back as NaN.
mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

impl CheckRecord {
    pub fn new(
        name: &str,
        anchor: &str,
        values: &[f64],
        tolerance: f64,
        expect: Expectation,
    ) -> Self {
        let count = values.len();
        let residual_max = if values.iter().any(|v| v.is_nan()) {
            f64::NAN
        } else {
            values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        };
        let residual_mean = values.iter().sum::<f64>() / count.max(1) as f64;
        let pass = count > 0
            && match expect {
                Expectation::Below => residual_max < tolerance,
                Expectation::AtLeast => residual_max >= tolerance,
            };
        Self {
            name: name.into(),
            anchor: anchor.into(),
            residual_max,
            residual_mean,
            count,
            tolerance,
            expect,
            pass,
        }
    }

    /// Additionally requires `ok` for the record to pass.
    pub fn requiring(mut self, ok: bool) -> Self {
        self.pass &= ok;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub precision: String,
    pub version: String,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            precision: "f64".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub campaign: String,
    pub seed: Option<u64>,
    pub records: Vec<CheckRecord>,
    /// True iff every record passes.
    pub pass: bool,
    pub environment: Environment,
}

impl VerificationReport {
    pub fn new(campaign: String, seed: Option<u64>, records: Vec<CheckRecord>) -> Self {
        let pass = !records.is_empty() && records.iter().all(|r| r.pass);
        Self {
            schema: SCHEMA_VERSION,
            campaign,
            seed,
            records,
            pass,
            environment: Environment::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, CampaignError> {
        let r: Self = serde_json::from_str(s).map_err(|e| CampaignError::Config(e.to_string()))?;
        if r.schema != SCHEMA_VERSION {
            return Err(CampaignError::Config(format!(
                "unsupported report schema {}",
                r.schema
            )));
        }
        Ok(r)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "campaign {}", self.campaign);
        for r in &self.records {
            let rel = match r.expect {
                Expectation::Below => "<",
                Expectation::AtLeast => ">=",
            };
            let _ = writeln!(
                out,
                "  {} {:<32} max {:>11.3e} mean {:>11.3e} n={:<5} {rel} {:.1e}  [{}]",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.residual_max,
                r.residual_mean,
                r.count,
                r.tolerance,
                r.anchor
            );
        }
        let _ = writeln!(out, "overall {}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

/// Combines reports; record names are prefixed with their campaign id.
pub fn merge(reports: &[VerificationReport]) -> VerificationReport {
    let records = reports
        .iter()
        .flat_map(|r| {
            r.records.iter().map(move |rec| CheckRecord {
                name: format!("{}/{}", r.campaign, rec.name),
                ..rec.clone()
            })
        })
        .collect();
    let campaign = reports
        .iter()
        .map(|r| r.campaign.as_str())
        .collect::<Vec<_>>()
        .join("+");
    VerificationReport::new(campaign, None, records)
}

struct Ctx {
    points: usize,
    seed: u64,
    tol: Option<f64>,
    samples: usize,
}

impl Ctx {
    fn below(&self, name: &str, anchor: &str, values: &[f64], tol: f64) -> CheckRecord {
        CheckRecord::new(
            name,
            anchor,
            values,
            self.tol.unwrap_or(tol),
            Expectation::Below,
        )
    }

    fn at_least(&self, name: &str, anchor: &str, values: &[f64], threshold: f64) -> CheckRecord {
        CheckRecord::new(name, anchor, values, threshold, Expectation::AtLeast)
    }
}

/// Runs the configured suite. Individual check failures are recorded in the
/// report; only configuration and setup errors are returned as `Err`.
pub fn run_campaign(config: &CampaignConfig) -> Result<VerificationReport, CampaignError> {
    let id = config.id()?;
    let domain = config.resolved_domain()?;
    if config.points == Some(0) {
        return Err(CampaignError::Config("--points must be positive".into()));
    }
    if let Some(t) = config.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CampaignError::Config(format!(
                "tolerance must be positive, got {t}"
            )));
        }
    }
    let default_points = match config.suite {
        Suite::Kernel => 50,
        Suite::Hypergeom => 50,
        Suite::Dirichlet => 10,
        Suite::Embeddings => 50,
        Suite::Counterexample => 200,
    };
    let ctx = Ctx {
        points: config.points.unwrap_or(default_points),
        seed: config.seed,
        tol: config.tol,
        samples: config.samples.unwrap_or(100_000),
    };
    let records = match config.suite {
        Suite::Kernel => kernel_suite(&ctx, domain.expect("resolved"))?,
        Suite::Hypergeom => hypergeom_suite(&ctx)?,
        Suite::Dirichlet => dirichlet_suite(&ctx, domain.expect("resolved"))?,
        Suite::Embeddings => embeddings_suite(&ctx)?,
        Suite::Counterexample => counterexample_suite(&ctx)?,
    };
    Ok(VerificationReport::new(id, Some(config.seed), records))
}

fn kernel_suite(ctx: &Ctx, spec: DomainSpec) -> Result<Vec<CheckRecord>, CampaignError> {
    let zs = sample_interior(&spec, ctx.seed, ctx.points)?;
    let ws = sample_silov(&spec, ctx.seed.wrapping_add(1), ctx.points)?;
    let exact = ExactKernel::new(spec)?;
    let opts = FdOptions::default();
    let per_pair = zs
        .par_iter()
        .zip(ws.par_iter())
        .map(|(z, w)| {
            let r = kernel_residuals(&exact, z, w, &opts)?;
            Ok((r.max_fd(), r.max_exact(), r.max_assembly()))
        })
        .collect::<Result<Vec<_>, KernelError>>()?;
    let (fd, rest): (Vec<f64>, Vec<(f64, f64)>) =
        per_pair.into_iter().map(|(a, b, c)| (a, (b, c))).unzip();
    let (ex, asm): (Vec<f64>, Vec<f64>) = rest.into_iter().unzip();
    let mut records = vec![
        ctx.below(
            "hua-kernel-fd",
            "Hua components annihilate the Poisson-Szego kernel (finite differences)",
            &fd,
            1e-6,
        ),
        ctx.below(
            "hua-kernel-exact",
            "Hua components annihilate the Poisson-Szego kernel (exact Hessian)",
            &ex,
            1e-9,
        ),
        ctx.below(
            "tensor-assembly",
            "A + B + C - D - E = 0 for the log-kernel Hessian",
            &asm,
            1e-9,
        ),
    ];
    if matches!(spec, DomainSpec::TypeII { .. } | DomainSpec::TypeIII { .. }) {
        let rel = zs
            .par_iter()
            .zip(ws.par_iter())
            .map(|(z, w)| {
                let closed = log_gradients_closed_form(z, w)?.c;
                let fd = fd_log_det_w_gradient(z, w, 1e-4)?;
                Ok(closed.max_abs_diff(&fd) / closed.max_abs())
            })
            .collect::<Result<Vec<f64>, KernelError>>()?;
        records.push(ctx.below(
            "log-gradient-closed-form",
            "closed forms of the log det W gradient",
            &rel,
            1e-6,
        ));
    }
    if let DomainSpec::TypeIII { n } = spec {
        let unitarity: Vec<f64> = ws
            .iter()
            .map(|w| {
                (&w.value().adjoint() * w.value())
                    .identity_minus()
                    .max_abs()
            })
            .collect();
        let f = zs
            .iter()
            .zip(&ws)
            .map(|(z, w)| Ok(f_matrix(z.value(), w.value())?.max_abs()))
            .collect::<Result<Vec<f64>, KernelError>>()?;
        records.push(ctx.below(
            "silov-unitarity",
            "I - w*w = 0 on the Shilov boundary",
            &unitarity,
            1e-12,
        ));
        records.push(ctx.below(
            "obstruction-vanishing",
            "F(z, w) = 0 on the Shilov boundary",
            &f,
            1e-10,
        ));
        let odd = if n % 2 == 1 { n } else { n - 1 }.max(3);
        let odd_spec = DomainSpec::type_iii(odd)?;
        let zc = sample_interior(&odd_spec, ctx.seed.wrapping_add(2), 1)?.remove(0);
        let wc = sample_pseudo_silov_odd(odd, ctx.seed.wrapping_add(3), 1)?.remove(0);
        let control = f_matrix(zc.value(), wc.value())?.max_abs();
        records.push(ctx.at_least(
            "obstruction-negative-control",
            "F(z, w) != 0 at a rank-deficient odd type III boundary point",
            &[control],
            1e-3,
        ));
    }
    Ok(records)
}

fn hypergeom_suite(ctx: &Ctx) -> Result<Vec<CheckRecord>, CampaignError> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut ladder = Vec::with_capacity(ctx.points);
    for _ in 0..ctx.points {
        let a = rng.random_range(0.1..3.0);
        let b = rng.random_range(0.1..3.0);
        let c = rng.random_range(0.5..5.0);
        let t = rng.random_range(0.0..0.9);
        let l = gauss_2f1_derivative(a, b, c, t, 1)?;
        let s = gauss_2f1_derivative_termwise(a, b, c, t)?;
        ladder.push((l - s).abs() / s.abs().max(1e-300));
    }
    let t_grid: Vec<f64> = (0..=99).map(|i| f64::from(i) / 100.0).collect();
    let mut euler = Vec::new();
    for (a, b, s) in [
        (1.5, 1.5, 0.5),
        (2.0, 2.5, 1.0),
        (1.0, 1.0, 0.5),
        (3.0, 1.5, 1.25),
    ] {
        euler.push(boundary_asymptotics_checks(a, b, s, &t_grid)?.euler_max_deviation);
    }
    let t_end = [1.0 - 2f64.powi(-14)];
    let log_ratio = |a: f64| -> Result<f64, HypergeomError> {
        Ok(boundary_asymptotics_checks(a, a, 0.5, &t_end)?
            .log_ratio_error()
            .unwrap_or(f64::NAN))
    };
    let mut ode = Vec::new();
    for (p, q, n) in [(1, 1, 2), (1, 1, 3), (2, 1, 3), (2, 2, 5)] {
        let h = radial_profile(p, q, n)?;
        for i in 1..=9 {
            ode.push(h.ode_residual(f64::from(i) / 10.0)?.abs());
        }
    }
    let mut records = vec![
        ctx.below(
            "derivative-ladder",
            "d/dt F(a,b;c;t) = (ab/c) F(a+1,b+1;c+1;t)",
            &ladder,
            1e-10,
        ),
        ctx.below(
            "euler-transformation",
            "F(a,b;c;t) = (1-t)^(c-a-b) F(c-a,c-b;c;t)",
            &euler,
            1e-10,
        ),
        ctx.below(
            "log-ratio-1-1",
            "F(a,b;a+b;t) / log(1/(1-t)) -> G(a+b)/(G(a)G(b)), a=b=1",
            &[log_ratio(1.0)?],
            0.01,
        ),
        ctx.below(
            "log-ratio-3/2-3/2",
            "F(a,b;a+b;t) / log(1/(1-t)) -> G(a+b)/(G(a)G(b)), a=b=3/2",
            &[log_ratio(1.5)?],
            0.01,
        ),
        ctx.below(
            "radial-ode",
            "hypergeometric ODE for the radial profile",
            &ode,
            1e-8,
        ),
    ];
    let cases: [(u32, u32, u32, SingularityKind); 4] = [
        (1, 1, 3, SingularityKind::LogType { k: 2 }),
        (2, 2, 5, SingularityKind::LogType { k: 3 }),
        (1, 1, 2, SingularityKind::HalfPower { k: 1 }),
        (1, 1, 4, SingularityKind::HalfPower { k: 2 }),
    ];
    for (p, q, n, expected) in cases {
        let s = classify_singularity(p, q, n)?;
        records.push(
            ctx.below(
                &format!("classify-{p}-{q}-{n}"),
                &format!("boundary singularity is {expected}"),
                &[s.coefficient_error()],
                0.05,
            )
            .requiring(s.kind == expected && s.leading_coefficient != 0.0),
        );
    }
    let smooth = [(1, 0, 3), (0, 2, 4), (3, 0, 2), (0, 0, 5)]
        .iter()
        .map(|&(p, q, n)| classify_singularity(p, q, n).map(|s| s.kind == SingularityKind::Smooth))
        .collect::<Result<Vec<bool>, _>>()?;
    let misclassified = smooth.iter().filter(|ok| !**ok).count() as f64;
    records.push(CheckRecord::new(
        "classify-smooth",
        "pq = 0 profiles are smooth up to the boundary",
        &[misclassified],
        0.5,
        Expectation::Below,
    ));
    Ok(records)
}

fn z1_zbar2(n: usize) -> Result<BidegreeHarmonic, DirichletError> {
    BidegreeHarmonic::new(&Poly::var(n, 0) * &Poly::conj_var(n, 1), 1, 1)
}

fn random_sphere_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v = random_ball_point(n, 1.0, rng);
    let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn dirichlet_suite(ctx: &Ctx, spec: DomainSpec) -> Result<Vec<CheckRecord>, CampaignError> {
    let n = 3;
    let sol = solve_tilde(&[z1_zbar2(n)?], n)?;
    let field = sol.field();
    let ball = DomainSpec::type_i(1, n)?;
    let inside = sample_interior_with_floor(&ball, ctx.seed, 100, 1.0 - 0.81)?;
    let tilde = inside
        .iter()
        .map(|z| {
            Ok(apply(
                &OperatorId::full(OperatorKind::TildeBall),
                &field,
                z,
                &FdOptions::default(),
            )?
            .norm())
        })
        .collect::<Result<Vec<f64>, DirichletError>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_add(1));
    let trace = (0..1000)
        .map(|_| {
            let z = random_sphere_point(n, &mut rng);
            Ok((sol.eval(&z)? - sol.boundary_data(&z)?).norm())
        })
        .collect::<Result<Vec<f64>, DirichletError>>()?;

    let zs = sample_interior_with_floor(&spec, ctx.seed.wrapping_add(2), ctx.points, 0.1)?;
    let one = |_: &ComplexMatrix| c64(1.0, 0.0);
    let holo = |w: &ComplexMatrix| {
        let (r, c) = w.shape();
        w[(0, c - 1)] * 2.0 + w[(r - 1, 0)] * c64(0.0, 0.5) + w[(0, 1)] * w[(r - 1, c - 2)] * 0.7
    };
    let pluri = move |w: &ComplexMatrix| c64(holo(w).re, 0.0);
    let boundary: [BoundaryFn<'_>; 2] = [&one, &pluri];
    let mut z_const = Vec::new();
    let mut z_pluri = Vec::new();
    for (i, z) in zs.iter().enumerate() {
        let est = poisson_solve_many(
            z,
            &boundary,
            ctx.samples,
            ctx.seed.wrapping_add(100 + i as u64),
        )?;
        z_const.push(z_score(est[0].mean, c64(1.0, 0.0), est[0].std_error));
        z_pluri.push(z_score(
            est[1].mean,
            c64(holo(z.value()).re, 0.0),
            est[1].std_error,
        ));
    }
    Ok(vec![
        ctx.below(
            "tilde-harmonic",
            "weighted ball operator annihilates h(|z|^4) z1 conj(z2)",
            &tilde,
            1e-6,
        ),
        ctx.below(
            "boundary-trace",
            "the extension restricts to the boundary data",
            &trace,
            1e-8,
        ),
        CheckRecord::new(
            "poisson-constant",
            "Poisson-Szego kernel has unit mass (standard errors)",
            &z_const,
            3.0,
            Expectation::Below,
        ),
        CheckRecord::new(
            "poisson-pluriharmonic",
            "Poisson-Szego integral reproduces pluriharmonic data (standard errors)",
            &z_pluri,
            3.0,
            Expectation::Below,
        ),
    ])
}

/// `|estimate - exact|` in units of the standard error; an exact estimate
/// with zero error scores 0.
fn z_score(est: Complex64, exact: Complex64, se: f64) -> f64 {
    let d = (est - exact).norm();
    if d == 0.0 {
        0.0
    } else {
        d / se
    }
}

fn embeddings_suite(ctx: &Ctx) -> Result<Vec<CheckRecord>, CampaignError> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut embeddings = Vec::new();
    for kind in ["I", "II", "III"] {
        let mut triples = Vec::with_capacity(ctx.points);
        for _ in 0..ctx.points {
            let e = match kind {
                "I" => BallEmbedding::type_i(random_unit_vector(2, &mut rng), 3)?,
                "II" => BallEmbedding::type_ii(haar_unitary(&mut rng, 3))?,
                _ => BallEmbedding::type_iii(4)?,
            };
            let (r, c) = e.spec().ambient_shape();
            let u = WirtingerField::polynomial((r, c), random_polynomial(r * c, 4, 12, &mut rng))
                .map_err(|e| CampaignError::Embedding(e.into()))?;
            let lam = random_ball_point(e.ball_dim(), 0.95, &mut rng);
            triples.push((e, u, lam));
        }
        let res = triples
            .par_iter()
            .map(|(e, u, lam)| Ok(pullback_residual(e, u, lam)?.norm()))
            .collect::<Result<Vec<f64>, EmbeddingError>>()?;
        embeddings.push((kind, res));
    }
    let mut polar = Vec::with_capacity(100);
    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let m = ComplexMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let rec = polarization_recover(n, |xi| quadratic_form(&m, xi))?;
        polar.push(rec.max_abs_diff(&m));
    }
    let mut transport = Vec::new();
    for phi in [HolomorphicMap::iii3(), HolomorphicMap::iv2()] {
        let (r, c) = phi.target_shape();
        for _ in 0..20 {
            let u = WirtingerField::polynomial((r, c), random_polynomial(r * c, 4, 12, &mut rng))
                .map_err(|e| CampaignError::Embedding(e.into()))?;
            let radius = if phi.source_dim() == 3 {
                0.95
            } else {
                0.95 / 2f64.sqrt()
            };
            let z0 = random_ball_point(phi.source_dim(), radius, &mut rng);
            transport.push(hessian_transport_check(&phi, &u, &z0)?);
        }
    }
    let mut records: Vec<CheckRecord> = embeddings
        .iter()
        .map(|(kind, res)| {
            ctx.below(
                &format!("pullback-type-{kind}"),
                &format!(
                    "ball operator of u o z equals the Hua-component side (type {kind} embedding)"
                ),
                res,
                1e-9,
            )
        })
        .collect();
    records.push(ctx.below(
        "polarization",
        "sesquilinear form recovered from diagonal values",
        &polar,
        1e-12,
    ));
    records.push(ctx.below(
        "hessian-transport",
        "H(u o phi) = phi' H(u) phi'* for the III(3) and IV(2) maps",
        &transport,
        1e-9,
    ));
    Ok(records)
}

fn counterexample_suite(ctx: &Ctx) -> Result<Vec<CheckRecord>, CampaignError> {
    let r = run_counterexample(ctx.points, 20, ctx.seed)?;
    Ok(vec![
        ctx.below(
            "delta4-counterexample",
            "Delta4 (|w1|^2 - |w2|^2) = 0 on IV(2)",
            &r.delta4,
            1e-10,
        ),
        ctx.at_least(
            "not-pluriharmonic",
            "|w1|^2 - |w2|^2 has nonzero complex Hessian",
            &r.hessian_norms,
            1.0,
        )
        .requiring(!r.pluriharmonic),
        ctx.below(
            "split-euclidean",
            "pullbacks of separately harmonic data are harmonic",
            &r.split_euclidean,
            1e-10,
        ),
        ctx.below(
            "split-mixed",
            "2 Re d2u/dw1 dw2bar = 0 for the same pullbacks",
            &r.split_mixed,
            1e-10,
        ),
        ctx.below(
            "delta4-bidisc-pullback",
            "Delta4 annihilates separately harmonic data moved to IV(2)",
            &r.geometric_delta4,
            1e-10,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_pass_logic() {
        assert!(CheckRecord::new("a", "x", &[0.1, 0.2], 0.3, Expectation::Below).pass);
        assert!(!CheckRecord::new("a", "x", &[0.1, 0.4], 0.3, Expectation::Below).pass);
        assert!(!CheckRecord::new("a", "x", &[f64::NAN], 0.3, Expectation::Below).pass);
        assert!(!CheckRecord::new("a", "x", &[], 0.3, Expectation::Below).pass);
        assert!(CheckRecord::new("a", "x", &[1.0], 1.0, Expectation::AtLeast).pass);
    }

    #[test]
    fn ids_and_domain_validation() {
        let mut c = CampaignConfig::new(Suite::Kernel);
        assert_eq!(c.id().unwrap(), "kernel-identity-II2");
        c.domain = Some(DomainSpec::TypeIV { n: 2 });
        assert!(matches!(c.id(), Err(CampaignError::Config(_))));
        let mut c = CampaignConfig::new(Suite::Counterexample);
        assert_eq!(c.id().unwrap(), "counterexample-IV2");
        c.domain = Some(DomainSpec::TypeII { n: 2 });
        assert!(c.id().is_err());
        let mut c = CampaignConfig::new(Suite::Dirichlet);
        c.domain = Some(DomainSpec::TypeIII { n: 3 });
        assert!(c.id().is_err());
    }

    #[test]
    fn counterexample_campaign_passes() {
        let mut c = CampaignConfig::new(Suite::Counterexample);
        c.points = Some(30);
        let r = run_campaign(&c).unwrap();
        assert!(r.pass, "{}", r.to_text());
        let round = VerificationReport::from_json(&r.to_json()).unwrap();
        assert_eq!(round, r);
        let nan = VerificationReport::new(
            "n".into(),
            None,
            vec![CheckRecord::new(
                "x",
                "",
                &[f64::NAN],
                1.0,
                Expectation::Below,
            )],
        );
        let back = VerificationReport::from_json(&nan.to_json()).unwrap();
        assert!(back.records[0].residual_max.is_nan() && !back.pass);
    }

    #[test]
    fn merge_prefixes_names() {
        let a = VerificationReport::new(
            "a".into(),
            Some(1),
            vec![CheckRecord::new("x", "", &[0.0], 1.0, Expectation::Below)],
        );
        let b = VerificationReport::new(
            "b".into(),
            Some(2),
            vec![CheckRecord::new("y", "", &[2.0], 1.0, Expectation::Below)],
        );
        let m = merge(&[a, b]);
        assert_eq!(m.campaign, "a+b");
        assert_eq!(m.records[1].name, "b/y");
        assert!(!m.pass);
    }
}
