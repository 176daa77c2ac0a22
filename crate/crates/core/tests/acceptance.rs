//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use hua_core::campaign::{run_campaign, CampaignConfig, CheckRecord, Suite, VerificationReport};
use hua_core::domains::DomainSpec;
use hua_core::hypergeom::{classify_singularity, SingularityKind};

const SEED: u64 = 20240611;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            detail: String::new(),
        }
    }

    fn note(&mut self, ok: bool, text: String) {
        self.pass &= ok;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        if !ok {
            self.detail.push_str("FAILED ");
        }
        self.detail.push_str(&text);
    }

    fn merge(&mut self, other: Outcome) {
        self.pass &= other.pass;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(&other.detail);
    }
}

fn domain(s: &str) -> DomainSpec {
    s.parse()
        .unwrap_or_else(|e| panic!("bad domain {s}: {e:?}"))
}

fn campaign(
    suite: Suite,
    domain: Option<DomainSpec>,
    points: usize,
    samples: Option<usize>,
) -> Result<VerificationReport, String> {
    let mut c = CampaignConfig::new(suite);
    c.domain = domain;
    c.points = Some(points);
    c.seed = SEED;
    c.samples = samples;
    run_campaign(&c).map_err(|e| e.to_string())
}

fn record<'a>(r: &'a VerificationReport, name: &str) -> &'a CheckRecord {
    r.records
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("{} has no record {name}", r.campaign))
}

/// `max < tol` over at least `count` samples, judged here rather than by the report.
fn below(r: &VerificationReport, name: &str, tol: f64, count: usize) -> Outcome {
    let c = record(r, name);
    let mut o = Outcome::new();
    o.note(
        c.residual_max < tol && c.count >= count,
        format!(
            "{}:{name} max {:.2e} < {tol:.0e} (n={})",
            r.campaign, c.residual_max, c.count
        ),
    );
    o
}

fn above(r: &VerificationReport, name: &str, floor: f64) -> Outcome {
    let c = record(r, name);
    let mut o = Outcome::new();
    o.note(
        c.residual_max > floor,
        format!("{}:{name} {:.3e} > {floor:.0e}", r.campaign, c.residual_max),
    );
    o
}

fn run(f: impl FnOnce() -> Result<Outcome, String>) -> Outcome {
    f().unwrap_or_else(|e| Outcome {
        pass: false,
        detail: format!("error: {e}"),
    })
}

fn kernel_identity() -> Outcome {
    run(|| {
        let mut o = Outcome::new();
        for d in ["I:2,2", "I:2,3", "II:2", "II:3", "III:4"] {
            let r = campaign(Suite::Kernel, Some(domain(d)), 50, None)?;
            o.merge(below(&r, "hua-kernel-fd", 1e-6, 50));
            o.merge(below(&r, "tensor-assembly", 1e-9, 50));
        }
        Ok(o)
    })
}

fn log_gradient() -> Outcome {
    run(|| {
        let mut o = Outcome::new();
        for d in ["II:2", "II:3", "III:4"] {
            let r = campaign(Suite::Kernel, Some(domain(d)), 100, None)?;
            o.merge(below(&r, "log-gradient-closed-form", 1e-6, 100));
        }
        Ok(o)
    })
}

fn obstruction_vanishing() -> Outcome {
    run(|| {
        let r = campaign(Suite::Kernel, Some(domain("III:4")), 50, None)?;
        let mut o = Outcome::new();
        o.merge(below(&r, "silov-unitarity", 1e-12, 50));
        o.merge(below(&r, "obstruction-vanishing", 1e-10, 50));
        o.merge(above(&r, "obstruction-negative-control", 1e-3));
        Ok(o)
    })
}

fn hypergeometric_suite() -> Outcome {
    run(|| {
        let r = campaign(Suite::Hypergeom, None, 50, None)?;
        let mut o = Outcome::new();
        o.merge(below(&r, "derivative-ladder", 1e-10, 50));
        o.merge(below(&r, "euler-transformation", 1e-10, 1));
        o.merge(below(&r, "log-ratio-1-1", 0.01, 1));
        o.merge(below(&r, "log-ratio-3/2-3/2", 0.01, 1));
        o.merge(below(&r, "radial-ode", 1e-8, 36));
        Ok(o)
    })
}

fn singularity_dichotomy() -> Outcome {
    run(|| {
        let mut o = Outcome::new();
        let cases = [
            ((1, 1, 3), SingularityKind::LogType { k: 2 }),
            ((2, 2, 5), SingularityKind::LogType { k: 3 }),
            ((1, 1, 2), SingularityKind::HalfPower { k: 1 }),
            ((1, 1, 4), SingularityKind::HalfPower { k: 2 }),
        ];
        for ((p, q, n), kind) in cases {
            let s = classify_singularity(p, q, n).map_err(|e| e.to_string())?;
            o.note(
                s.kind == kind
                    && s.leading_coefficient != 0.0
                    && s.coefficient_error() < 0.05
                    && s.fit_residual < 0.05,
                format!(
                    "({p},{q},{n}) {} coef err {:.1e} fit {:.1e}",
                    s.kind,
                    s.coefficient_error(),
                    s.fit_residual
                ),
            );
        }
        let mut smooth = 0;
        for n in 2..=6 {
            for d in 0..=4 {
                for (p, q) in [(d, 0), (0, d)] {
                    let s = classify_singularity(p, q, n).map_err(|e| e.to_string())?;
                    if s.kind != SingularityKind::Smooth {
                        o.note(false, format!("({p},{q},{n}) classified {}", s.kind));
                    }
                    smooth += 1;
                }
            }
        }
        o.note(true, format!("{smooth} pq=0 cases smooth"));
        Ok(o)
    })
}

fn tilde_dirichlet() -> Outcome {
    run(|| {
        let r = campaign(Suite::Dirichlet, Some(domain("I:2,2")), 1, Some(1000))?;
        let mut o = Outcome::new();
        o.merge(below(&r, "tilde-harmonic", 1e-6, 100));
        o.merge(below(&r, "boundary-trace", 1e-8, 1000));
        Ok(o)
    })
}

fn embedding_identities() -> Outcome {
    run(|| {
        let r = campaign(Suite::Embeddings, None, 50, None)?;
        let mut o = Outcome::new();
        for kind in ["I", "II", "III"] {
            o.merge(below(&r, &format!("pullback-type-{kind}"), 1e-9, 50));
        }
        o.merge(below(&r, "polarization", 1e-12, 100));
        o.merge(below(&r, "hessian-transport", 1e-9, 40));
        Ok(o)
    })
}

fn counterexample() -> Outcome {
    run(|| {
        let r = campaign(Suite::Counterexample, None, 200, None)?;
        let mut o = Outcome::new();
        o.merge(below(&r, "delta4-counterexample", 1e-10, 200));
        let np = record(&r, "not-pluriharmonic");
        o.note(
            np.pass && np.residual_max >= 1.0,
            format!(
                "pluriharmonicity test fails, Hessian norm {:.3}",
                np.residual_max
            ),
        );
        o.merge(below(&r, "split-euclidean", 1e-10, 200));
        o.merge(below(&r, "split-mixed", 1e-10, 200));
        Ok(o)
    })
}

fn poisson_reproduction() -> Outcome {
    run(|| {
        let start = Instant::now();
        let mut o = Outcome::new();
        for d in ["I:2,2", "II:2", "III:4"] {
            let r = campaign(Suite::Dirichlet, Some(domain(d)), 10, Some(100_000))?;
            o.merge(below(&r, "poisson-constant", 3.0, 10));
            o.merge(below(&r, "poisson-pluriharmonic", 3.0, 10));
        }
        let secs = start.elapsed().as_secs_f64();
        o.note(secs < 300.0, format!("{secs:.1}s"));
        Ok(o)
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("kernel identity", kernel_identity),
        ("log det W gradient closed forms", log_gradient),
        ("obstruction vanishing on III(4)", obstruction_vanishing),
        ("hypergeometric identities", hypergeometric_suite),
        ("boundary singularity dichotomy", singularity_dichotomy),
        ("weighted ball Dirichlet problem", tilde_dirichlet),
        ("embedding identities", embedding_identities),
        ("IV(2) counterexample", counterexample),
        ("Poisson reproduction", poisson_reproduction),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        all &= o.pass;
        println!(
            "criterion {} {:<34} {} ({:.1}s) {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
