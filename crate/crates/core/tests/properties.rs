use hua_core::dirichlet::{make_bidegree, solve_tilde, BidegreeHarmonic};
use hua_core::domains::{
    contains, haar_unitary, sample_interior, sample_silov, DomainSpec, MatrixPoint,
};
use hua_core::embeddings::{
    hessian_transport_check, polarization_recover, pullback_residual, quadratic_form,
    random_ball_point, random_polynomial, random_unit_vector, BallEmbedding, HolomorphicMap,
};
use hua_core::hypergeom::{gauss_2f1, radial_profile};
use hua_core::kernels::poisson_szego;
use hua_core::numerics::{
    c64, wirtinger_hessian, Complex64, ComplexMatrix, FdOptions, Monomial, Poly, WirtingerField,
};
use hua_core::operators::{apply, component_sum_check, OperatorId, OperatorKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HUA_DOMAINS: [&str; 6] = ["I:1,3", "I:2,2", "I:2,3", "II:2", "II:3", "III:4"];

fn spec(label: &str) -> DomainSpec {
    label.parse().unwrap()
}

fn hua_kind(s: &DomainSpec) -> OperatorKind {
    match s {
        DomainSpec::TypeI { .. } => OperatorKind::Delta1,
        DomainSpec::TypeII { .. } => OperatorKind::Delta2,
        _ => OperatorKind::Delta3,
    }
}

fn real_field(s: &DomainSpec, rng: &mut ChaCha8Rng) -> WirtingerField {
    let (r, c) = s.ambient_shape();
    WirtingerField::polynomial((r, c), random_polynomial(r * c, 4, 10, rng).real_part()).unwrap()
}

fn holomorphic_field(s: &DomainSpec, rng: &mut ChaCha8Rng) -> WirtingerField {
    let (r, c) = s.ambient_shape();
    let nvars = r * c;
    let mut p = Poly::zero(nvars);
    for _ in 0..8 {
        let mut z = vec![0u32; nvars];
        for _ in 0..rng.random_range(1..=4) {
            z[rng.random_range(0..nvars)] += 1;
        }
        p.add_term(
            Monomial {
                z,
                zbar: vec![0; nvars],
            },
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
    }
    WirtingerField::polynomial((r, c), p).unwrap()
}

fn interior(s: &DomainSpec, seed: u64) -> MatrixPoint {
    sample_interior(s, seed, 1).unwrap().remove(0)
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn full_operator_is_weighted_component_sum(d in 0..HUA_DOMAINS.len(), seed in any::<u64>()) {
        let s = spec(HUA_DOMAINS[d]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = real_field(&s, &mut rng);
        let z = interior(&s, seed);
        prop_assert!(component_sum_check(hua_kind(&s), &u, &z, &FdOptions::default()).unwrap() < 1e-9);
    }

    #[test]
    fn real_fields_have_hermitian_hessians_and_real_images(d in 0..HUA_DOMAINS.len(), seed in any::<u64>()) {
        let s = spec(HUA_DOMAINS[d]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = real_field(&s, &mut rng);
        let z = interior(&s, seed);
        let h = wirtinger_hessian(&u, z.value(), &FdOptions::default()).unwrap();
        prop_assert!(h.hermitian_defect() <= 1e-14 * (1.0 + h.frobenius_norm()));
        let v = apply(&OperatorId::full(hua_kind(&s)), &u, &z, &FdOptions::default()).unwrap();
        prop_assert!(v.im.abs() < 1e-10 * (1.0 + v.re.abs()));
    }

    #[test]
    fn operators_are_linear(d in 0..HUA_DOMAINS.len(), seed in any::<u64>(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let s = spec(HUA_DOMAINS[d]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (r, c) = s.ambient_shape();
        let p = random_polynomial(r * c, 4, 10, &mut rng);
        let q = random_polynomial(r * c, 4, 10, &mut rng);
        let combo = &p.scale(c64(a, 0.0)) + &q.scale(c64(0.0, b));
        let field = |p: Poly| WirtingerField::polynomial((r, c), p).unwrap();
        let z = interior(&s, seed);
        let op = OperatorId::full(hua_kind(&s));
        let opts = FdOptions::default();
        let lhs = apply(&op, &field(combo), &z, &opts).unwrap();
        let rhs = apply(&op, &field(p), &z, &opts).unwrap() * a + apply(&op, &field(q), &z, &opts).unwrap() * c64(0.0, b);
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn holomorphic_fields_are_annihilated(d in 0..HUA_DOMAINS.len(), seed in any::<u64>(), conj in any::<bool>()) {
        let s = spec(HUA_DOMAINS[d]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = holomorphic_field(&s, &mut rng);
        if conj {
            u = WirtingerField::polynomial(u.shape(), u.as_polynomial().unwrap().conj()).unwrap();
        }
        let z = interior(&s, seed);
        prop_assert_eq!(apply(&OperatorId::full(hua_kind(&s)), &u, &z, &FdOptions::default()).unwrap().norm(), 0.0);
    }

    #[test]
    fn ball_invariant_is_delta1_on_rank_one(n in 2usize..5, seed in any::<u64>()) {
        let s = DomainSpec::type_i(1, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = real_field(&s, &mut rng);
        let z = interior(&s, seed);
        let opts = FdOptions::default();
        let ball = apply(&OperatorId::full(OperatorKind::BallInvariant), &u, &z, &opts).unwrap();
        let hua = apply(&OperatorId::full(OperatorKind::Delta1), &u, &z, &opts).unwrap();
        prop_assert!((ball - hua).norm() < 1e-12 * (1.0 + ball.norm()));
    }

    #[test]
    fn determinant_is_multiplicative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(4, &mut rng);
        let b = random_matrix(4, &mut rng);
        let lhs = a.matmul(&b).unwrap().det().unwrap();
        let rhs = a.det().unwrap() * b.det().unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1e-300));
    }

    #[test]
    fn type_i_membership_is_unitarily_invariant(seed in any::<u64>()) {
        let s = spec("I:2,3");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = interior(&s, seed);
        let moved = haar_unitary(&mut rng, 2)
            .matmul(z.value())
            .and_then(|m| m.matmul(&haar_unitary(&mut rng, 3)))
            .unwrap();
        let before = contains(&s, z.value()).unwrap().margin;
        let after = contains(&s, &moved).unwrap().margin;
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn silov_points_are_unitary_with_the_right_symmetry(d in 1..HUA_DOMAINS.len(), seed in any::<u64>()) {
        let s = spec(HUA_DOMAINS[d]);
        let w = sample_silov(&s, seed, 1).unwrap().remove(0);
        let w = w.value();
        let (r, _) = w.shape();
        prop_assert!(w.matmul(&w.adjoint()).unwrap().max_abs_diff(&ComplexMatrix::identity(r)) < 1e-12);
        match s {
            DomainSpec::TypeII { .. } => prop_assert!(w.is_symmetric(1e-13)),
            DomainSpec::TypeIII { .. } => prop_assert!(w.is_antisymmetric(1e-13)),
            _ => {}
        }
    }

    #[test]
    fn poisson_kernel_is_positive_and_normalized_at_origin(d in 0..HUA_DOMAINS.len(), seed in any::<u64>()) {
        let s = spec(HUA_DOMAINS[d]);
        let w = sample_silov(&s, seed, 1).unwrap().remove(0);
        let z = interior(&s, seed);
        prop_assert!(poisson_szego(&z, &w).unwrap() > 0.0);
        let (r, c) = s.ambient_shape();
        let origin = MatrixPoint::new(s, ComplexMatrix::zeros(r, c)).unwrap();
        prop_assert!((poisson_szego(&origin, &w).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_ladder(a in 0.1..3.0f64, b in 0.1..3.0f64, c in 0.5..4.0f64, t in 0.0..0.9f64) {
        let h = 1e-5;
        let fd = (gauss_2f1(a, b, c, t + h).unwrap() - gauss_2f1(a, b, c, t - h).unwrap()) / (2.0 * h);
        let ladder = a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, t).unwrap();
        prop_assert!((fd - ladder).abs() < 1e-7 * ladder.abs().max(1.0));
    }

    #[test]
    fn euler_transformation(k in 0u32..4, q in 1u32..6, n in 2u32..6, t in 0.0..0.99f64) {
        let a = f64::from(k) + (f64::from(q) + 1.0) / 2.0;
        let b = f64::from(q) / 2.0;
        let c = a + b + (f64::from(n) + 1.0) / 2.0;
        let lhs = gauss_2f1(a, b, c, t).unwrap();
        let rhs = (1.0 - t).powf(c - a - b) * gauss_2f1(c - a, c - b, c, t).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs());
    }

    #[test]
    fn radial_profiles_increase_to_one(p in 1u32..5, q in 1u32..5, n in 2u32..6) {
        let h = radial_profile(p, q, n).unwrap();
        let mut prev = h.evaluate(0.0).unwrap();
        for i in 1..=40 {
            let v = h.evaluate(f64::from(i) / 40.0 * 0.999).unwrap();
            prop_assert!(v > prev);
            prev = v;
        }
        prop_assert!((h.evaluate(1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_solution_has_the_prescribed_trace(p in 0u32..3, q in 0u32..3, n in 2usize..5, seed in any::<u64>()) {
        let f = make_bidegree(p, q, n, seed).unwrap();
        let g = make_bidegree(q + 1, p, n, seed ^ 1).unwrap();
        let sol = solve_tilde(&[f, g], n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let mut x = random_ball_point(n, 0.5, &mut rng);
            let r = x.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= r);
            prop_assert!((sol.eval(&x).unwrap() - sol.boundary_data(&x).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn solve_tilde_is_linear(p in 0u32..3, q in 0u32..3, n in 2usize..5, seed in any::<u64>(), a in -2.0..2.0f64) {
        let f = make_bidegree(p, q, n, seed).unwrap();
        let g = make_bidegree(p + 1, q + 1, n, seed ^ 1).unwrap();
        let af = BidegreeHarmonic::new(f.poly().scale(c64(0.0, a)), p, q).unwrap();
        let joint = solve_tilde(&[af, g.clone()], n).unwrap();
        let sf = solve_tilde(&[f], n).unwrap();
        let sg = solve_tilde(&[g], n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let x = random_ball_point(n, 0.95, &mut rng);
            let lhs = joint.eval(&x).unwrap();
            let rhs = sf.eval(&x).unwrap() * c64(0.0, a) + sg.eval(&x).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn polarization_round_trip(n in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(n, &mut rng);
        let got = polarization_recover(n, |xi| quadratic_form(&m, xi)).unwrap();
        prop_assert!(got.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn pullback_residual_vanishes(kind in 0usize..3, n in 2usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = match kind {
            0 => {
                let m = rng.random_range(1..=n);
                BallEmbedding::type_i(random_unit_vector(m, &mut rng), n).unwrap()
            }
            1 => BallEmbedding::type_ii(haar_unitary(&mut rng, n)).unwrap(),
            _ => BallEmbedding::type_iii(n).unwrap(),
        };
        let u = real_field(&e.spec(), &mut rng);
        let lambda = random_ball_point(e.ball_dim(), 0.9, &mut rng);
        prop_assert!(pullback_residual(&e, &u, &lambda).unwrap().norm() < 1e-9);
    }

    #[test]
    fn hessian_transport(which in 0usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = match which {
            0 => HolomorphicMap::iii3(),
            1 => HolomorphicMap::iv2(),
            _ => HolomorphicMap::linear(&haar_unitary(&mut rng, 3)).unwrap(),
        };
        let (r, c) = phi.target_shape();
        let u = WirtingerField::polynomial((r, c), random_polynomial(r * c, 4, 10, &mut rng)).unwrap();
        let z0 = random_ball_point(phi.source_dim(), 0.7, &mut rng);
        prop_assert!(hessian_transport_check(&phi, &u, &z0).unwrap() < 1e-9);
    }
}
