//! The tube-domain counterexample on `IV(2)`: an invariant-harmonic function
//! that is not pluriharmonic, and the harmonicity split for functions pulled
//! back from separately harmonic data on the bidisc.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dirichlet::{pluriharmonicity_test, DirichletError};
use crate::domains::{sample_interior, DomainSpec};
use crate::numerics::{FdOptions, Monomial, Poly, WirtingerField};
use crate::operators::{apply, OperatorId, OperatorKind};

/// `|w₁|² - |w₂|²` on `C²`.
pub fn counterexample_poly() -> Poly {
    let w1 = Poly::var(2, 0);
    let w2 = Poly::var(2, 1);
    &(&w1 * &Poly::conj_var(2, 0)) - &(&w2 * &Poly::conj_var(2, 1))
}

pub fn counterexample_field() -> WirtingerField {
    WirtingerField::polynomial((1, 2), counterexample_poly()).expect("1x2 field in two variables")
}

/// `E(w) = ((w₁ + w₂)/2, (w₁ - w₂)/(2i))` as polynomials in `w`.
pub fn e_map() -> [Poly; 2] {
    let w1 = Poly::var(2, 0);
    let w2 = Poly::var(2, 1);
    [
        (&w1 + &w2).scale(Complex64::new(0.5, 0.0)),
        (&w1 - &w2).scale(Complex64::new(0.0, -0.5)),
    ]
}

/// `L(ζ) = (ζ₁ + iζ₂, ζ₁ - iζ₂)`, the inverse of [`e_map`].
pub fn l_map() -> [Poly; 2] {
    let z1 = Poly::var(2, 0);
    let iz2 = Poly::var(2, 1).scale(Complex64::new(0.0, 1.0));
    [&z1 + &iz2, &z1 - &iz2]
}

/// Random real polynomial on `C²` with `∂²v/∂ζ₁∂ζ̄₁ = ∂²v/∂ζ₂∂ζ̄₂ = 0`:
/// every monomial is holomorphic or antiholomorphic in each variable.
pub fn random_separately_harmonic(degree: u32, seed: u64) -> Poly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Poly::zero(2);
    for d1 in 0..=degree {
        for d2 in 0..=(degree - d1) {
            let sides1: &[(u32, u32)] = if d1 == 0 {
                &[(0, 0)]
            } else {
                &[(d1, 0), (0, d1)]
            };
            let sides2: &[(u32, u32)] = if d2 == 0 {
                &[(0, 0)]
            } else {
                &[(d2, 0), (0, d2)]
            };
            for &(a, b) in sides1 {
                for &(c, d) in sides2 {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    v.add_term(
                        Monomial {
                            z: vec![a, c],
                            zbar: vec![b, d],
                        },
                        Complex64::new(re, im),
                    );
                }
            }
        }
    }
    v.real_part()
}

/// `u = v ∘ E` in the variables `w` of `IV(2)`.
pub fn pullback_literal(v: &Poly) -> Poly {
    v.substitute_holomorphic(&e_map())
        .expect("two-variable map")
}

/// `u = v ∘ L`: the pullback along the inverse of the biholomorphism
/// `E: D² → IV(2)`.
pub fn pullback_geometric(v: &Poly) -> Poly {
    v.substitute_holomorphic(&l_map())
        .expect("two-variable map")
}

/// Harmonicity-split residuals of a function at a point of `C²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicSplit {
    /// `|∂²u/∂w₁∂w̄₁ + ∂²u/∂w₂∂w̄₂|`.
    pub euclidean_laplacian: f64,
    /// `|2 Re ∂²u/∂w₁∂w̄₂|`.
    pub mixed_real_part: f64,
}

pub fn harmonic_split(u: &Poly, w: &[Complex64]) -> Result<HarmonicSplit, DirichletError> {
    let h = u.wirtinger_hessian(w)?;
    Ok(HarmonicSplit {
        euclidean_laplacian: (h[(0, 0)] + h[(1, 1)]).norm(),
        mixed_real_part: (2.0 * h[(0, 1)].re).abs(),
    })
}

/// Per-sample residuals of the counterexample run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    /// `|Δ₄u|` for `u = |w₁|² - |w₂|²` at each point.
    pub delta4: Vec<f64>,
    pub pluriharmonic: bool,
    /// Frobenius norm of the Hessian of `u` at each point.
    pub hessian_norms: Vec<f64>,
    /// Harmonic-split residuals of `v ∘ E` over (function, point) pairs.
    pub split_euclidean: Vec<f64>,
    pub split_mixed: Vec<f64>,
    /// `|Δ₄(v ∘ L)|` over the same pairs.
    pub geometric_delta4: Vec<f64>,
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

impl CounterexampleReport {
    pub fn delta4_max(&self) -> f64 {
        max_of(&self.delta4)
    }

    /// Largest Hessian norm; the pluriharmonicity test fails when it is not small.
    pub fn hessian_norm(&self) -> f64 {
        max_of(&self.hessian_norms)
    }

    pub fn split_euclidean_max(&self) -> f64 {
        max_of(&self.split_euclidean)
    }

    pub fn split_mixed_max(&self) -> f64 {
        max_of(&self.split_mixed)
    }

    pub fn geometric_delta4_max(&self) -> f64 {
        max_of(&self.geometric_delta4)
    }
}

/// Evaluates the counterexample at `points` interior points of `IV(2)` and the
/// harmonicity split on `functions` random separately harmonic pullbacks.
pub fn run_counterexample(
    points: usize,
    functions: usize,
    seed: u64,
) -> Result<CounterexampleReport, DirichletError> {
    let spec = DomainSpec::type_iv(2)?;
    let pts = sample_interior(&spec, seed, points)?;
    let opts = FdOptions::default();
    let u = counterexample_field();
    let delta4 = OperatorId::full(OperatorKind::Delta4);
    let mut report = CounterexampleReport {
        delta4: Vec::with_capacity(points),
        pluriharmonic: true,
        hessian_norms: Vec::with_capacity(points),
        split_euclidean: Vec::new(),
        split_mixed: Vec::new(),
        geometric_delta4: Vec::new(),
    };
    for z in &pts {
        report.delta4.push(apply(&delta4, &u, z, &opts)?.norm());
        let pluri = pluriharmonicity_test(&u, std::slice::from_ref(z.value()), 1e-8, &opts)?;
        report.pluriharmonic &= pluri.pluriharmonic;
        report.hessian_norms.push(pluri.max_hessian_norm);
    }
    for f in 0..functions {
        let v = random_separately_harmonic(3, seed.wrapping_add(1 + f as u64));
        let literal = pullback_literal(&v);
        let geometric = WirtingerField::polynomial((1, 2), pullback_geometric(&v))?;
        for z in &pts {
            let split = harmonic_split(&literal, z.value().as_slice())?;
            report.split_euclidean.push(split.euclidean_laplacian);
            report.split_mixed.push(split.mixed_real_part);
            report
                .geometric_delta4
                .push(apply(&delta4, &geometric, z, &opts)?.norm());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    #[test]
    fn maps_are_mutually_inverse() {
        let e = e_map();
        let l = l_map();
        let composed: Vec<Poly> = l
            .iter()
            .map(|p| p.substitute_holomorphic(&e).unwrap())
            .collect();
        assert_eq!(composed[0], Poly::var(2, 0));
        assert_eq!(composed[1], Poly::var(2, 1));
    }

    #[test]
    fn separately_harmonic_data() {
        let v = random_separately_harmonic(4, 3);
        let x = [c64(0.2, -0.1), c64(0.4, 0.3)];
        let h = v.wirtinger_hessian(&x).unwrap();
        assert!(h[(0, 0)].norm() < 1e-13 && h[(1, 1)].norm() < 1e-13);
        assert!(v.eval(&x).unwrap().im.abs() < 1e-13);
        assert!(h[(0, 1)].norm() > 1e-3);
    }

    #[test]
    fn counterexample_is_invariant_harmonic_but_not_pluriharmonic() {
        let r = run_counterexample(40, 3, 11).unwrap();
        assert!(r.delta4_max() < 1e-10, "{}", r.delta4_max());
        assert!(!r.pluriharmonic && r.hessian_norm() >= 1.0);
        assert!(r.split_euclidean_max() < 1e-10 && r.split_mixed_max() < 1e-10);
        assert!(
            r.geometric_delta4_max() < 1e-10,
            "{}",
            r.geometric_delta4_max()
        );
    }

    #[test]
    fn literal_pullback_is_not_invariant_harmonic() {
        let v = random_separately_harmonic(3, 5);
        let u = WirtingerField::polynomial((1, 2), pullback_literal(&v)).unwrap();
        let spec = DomainSpec::type_iv(2).unwrap();
        let worst = sample_interior(&spec, 2, 20)
            .unwrap()
            .iter()
            .map(|z| {
                apply(
                    &OperatorId::full(OperatorKind::Delta4),
                    &u,
                    z,
                    &FdOptions::default(),
                )
                .unwrap()
                .norm()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }
}
