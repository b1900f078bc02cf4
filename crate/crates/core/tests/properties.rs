use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use corrlab::channels::{analyze_channel, build_factorization, schur_apply, SchurChannel};
use corrlab::linalg::{random_isometry, random_unitary, range_projection, CMat};
use corrlab::moments::{build_a, classify_admissible, d2_check_and_realize, moments_of, Confidence};
use corrlab::tuples::{functor_s, functor_t, seed, ProjectionTuple, SeedKind};
use corrlab::unitaries::{
    discretize_unitary, gram, pad_correlation, projections_to_unitaries, unitaries_to_projections, UnitaryTuple,
};
use corrlab::Scalar;

fn random_tuple(seed: u64, n: usize, k: usize) -> ProjectionTuple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps = (0..n)
        .map(|i| {
            let r = (seed as usize + 3 * i) % (k + 1);
            if r == 0 {
                CMat::zeros(k, k)
            } else {
                range_projection(&random_isometry(&mut rng, k, r))
            }
        })
        .collect();
    ProjectionTuple::new(ps, None).unwrap()
}

fn random_unitaries(seed: u64, count: usize, m: usize) -> UnitaryTuple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    UnitaryTuple::new((0..count).map(|_| random_unitary(&mut rng, m)).collect(), None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_reflection_is_an_involution(seed in any::<u64>(), n in 1usize..6, k in 1usize..7) {
        let t = random_tuple(seed, n, k);
        let tt = functor_t(&functor_t(&t));
        prop_assert_eq!(&tt.projections, &t.projections);
    }

    #[test]
    fn hyperbolic_reflection_scalar_and_trace(n in 3usize..8) {
        // Planar seed: Σ p = n/2, so the image has scalar n/(n−2) and dimension n − 2.
        let s = seed(SeedKind::PlanarHalf, n, &Scalar::ratio(n as i64, 2)).unwrap();
        let (q, report) = functor_s(&s).unwrap();
        prop_assert_eq!(q.k, n - 2);
        prop_assert_eq!(report.alpha_out, Scalar::ratio(n as i64, n as i64 - 2));
        prop_assert!((report.trace_q - (n - 2) as f64).abs() < 1e-9);
        prop_assert!(report.residual < 1e-9);
    }

    #[test]
    fn moment_matrices_are_psd_and_bounded(seed in any::<u64>(), n in 1usize..6, k in 1usize..8) {
        let m = moments_of(&random_tuple(seed, n, k)).unwrap();
        prop_assert!(m.min_eigenvalue() > -1e-10);
        prop_assert!(m.symmetry_deviation() < 1e-12);
        prop_assert!(m.entry_bound_violation() < 1e-12);
        // τ((Σp)²) ≥ τ(Σp)², written with the moments.
        let tr: f64 = (0..n).map(|i| m.entries[(i, i)]).sum();
        prop_assert!(m.entries.sum() >= tr * tr - 1e-10);
    }

    #[test]
    fn default_off_diagonal_is_the_floor(n in 2usize..9, a in 1i64..50) {
        // A_t with s = r saturates n·t + n(n−1)·s ≥ n²t².
        let t = Scalar::real((a as f64 / 50.0).max(1.0 / n as f64));
        let m = build_a(n, &t, None).unwrap();
        let (tv, s) = (m.entries[(0, 0)], m.entries[(0, 1)]);
        let nf = n as f64;
        prop_assert!((nf * tv + nf * (nf - 1.0) * s - nf * nf * tv * tv).abs() < 1e-12);
        prop_assert!(m.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn admissible_intervals_respect_the_reflection(n in 2usize..9, a in 0i64..=60) {
        // I_{1−t} = 1 − 2t + I_t when both are exact.
        let t = Scalar::ratio(a, 60);
        let u = Scalar::integer(1).sub(&t);
        let (it, iu) = (classify_admissible(n, &t).unwrap(), classify_admissible(n, &u).unwrap());
        if it.confidence == Confidence::Exact && iu.confidence == Confidence::Exact {
            let shift = 1.0 - 2.0 * t.to_f64();
            prop_assert!((iu.lo.to_f64() - (shift + it.lo.to_f64())).abs() < 1e-12);
            prop_assert!((iu.hi.to_f64() - (shift + it.hi.to_f64())).abs() < 1e-12);
        }
    }

    #[test]
    fn d2_matches_enumeration_of_diagonal_pairs(s in 0i64..=6, t in 0i64..=6, u in 0i64..=6) {
        // Oracle: (s, t, u) is realized by diagonal 0/1 pairs in C⁶ with uniform
        // weights iff some count vector (n11, n10, n01, n00) sums to 6.
        let mut found = false;
        for n11 in 0..=6i64 {
            for n10 in 0..=6 - n11 {
                for n01 in 0..=6 - n11 - n10 {
                    if n11 == u && n11 + n10 == s && n11 + n01 == t {
                        found = true;
                    }
                }
            }
        }
        let q = |x: i64| Scalar::Rational(BigRational::new(BigInt::from(x), BigInt::from(6)));
        prop_assert_eq!(d2_check_and_realize(&q(s), &q(t), &q(u)).is_ok(), found);
    }

    #[test]
    fn bridge_round_trip(seed in any::<u64>(), n in 1usize..6, k in 1usize..10) {
        let t = random_tuple(seed, n, k);
        let u = projections_to_unitaries(&t).unwrap();
        prop_assert!(u.unitarity_deviation() < 1e-12);
        let back = unitaries_to_projections(&u, 1e-10).unwrap();
        for (p, q) in t.projections.iter().zip(&back.projections) {
            prop_assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn discretization_within_bound(seed in any::<u64>(), d in 1usize..9, m in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, d);
        let disc = discretize_unitary(&u, m, 1e-10).unwrap();
        prop_assert!(disc.distance <= disc.bound + 1e-12);
        prop_assert!(disc.completeness < 1e-12);
        prop_assert!(disc.orthogonality < 1e-12);
        for p in &disc.pvm {
            prop_assert!((p * p - p).norm() < 1e-10);
        }
    }

    #[test]
    fn padding_keeps_positivity(seed in any::<u64>(), count in 1usize..6, m in 1usize..6) {
        let g = gram(&random_unitaries(seed, count, m)).unwrap();
        let padded = pad_correlation(&g).unwrap();
        prop_assert_eq!(padded.k, count + 1);
        prop_assert!(padded.report().pass);
    }

    #[test]
    fn schur_multipliers_of_grams_are_cp_unital_trace_preserving(seed in any::<u64>(), count in 1usize..6, m in 1usize..5) {
        let g = gram(&random_unitaries(seed, count, m)).unwrap();
        let r = analyze_channel(&SchurChannel::new(g).unwrap()).unwrap();
        prop_assert!(r.unital && r.trace_preserving && r.completely_positive);
    }

    #[test]
    fn factorization_identity_holds(seed in any::<u64>(), count in 1usize..6, m in 1usize..6) {
        let u = random_unitaries(seed, count, m);
        let cert = build_factorization(&u).unwrap();
        prop_assert!(cert.residual <= 1e-10);
        prop_assert!(cert.dense_checked);
        // T_B applied to a random Hermitian input stays Hermitian with the same trace.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let x = random_unitary(&mut rng, count);
        let h = &x + x.adjoint();
        let ch = SchurChannel::new(gram(&u).unwrap()).unwrap();
        let y = schur_apply(&ch, &h).unwrap();
        prop_assert!((y.trace() - h.trace()).norm() < 1e-10);
        prop_assert!((&y - y.adjoint()).norm() < 1e-10);
    }
}
