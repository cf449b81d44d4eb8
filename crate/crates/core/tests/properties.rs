//! Randomized invariants of the decomposition and its building blocks.

use std::f64::consts::PI;

use nrmschur::dense::{
    determinant, frobenius_norm, matmul, orthogonality_defect, schur_residual, skew_part, BlockSchur, DenseMatrix,
};
use nrmschur::io::{matrix_from_str, matrix_to_string, schur_from_str, schur_to_string};
use nrmschur::kernels::{provider, quasi_triangular_eigenvalues, Bidiagonal, KernelProvider};
use nrmschur::normal_schur::{cluster_sigmas, effective_eps1, normal_schur, NormalSchurOptions};
use nrmschur::sampling::{conjugate, haar_orthogonal, random_normal_matrix, Scenario, SpectrumSpec};
use nrmschur::skew_schur::skew_schur_decompose;
use nrmschur::spectral::{expm_skew, logm_normal};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scenario() -> impl Strategy<Value = Scenario> {
    prop_oneof![
        Just(Scenario::BestSo),
        Just(Scenario::WorstSo),
        Just(Scenario::UniformSo),
        Just(Scenario::RandomNormal),
        (0.0..=1.0f64).prop_map(Scenario::AlphaMix),
        Just(Scenario::WorstCaseSigma),
    ]
}

fn kernels() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("reference"), Just("dc")]
}

fn sample(n: usize, scenario: Scenario, seed: u64) -> (DenseMatrix, BlockSchur) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_normal_matrix(&SpectrumSpec { n, scenario }, &mut rng).unwrap()
}

fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let directed = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

fn spectral_scale(z: &[Complex64]) -> f64 {
    z.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_is_orthogonal_and_block_diagonal(
        n in 1usize..40, sc in scenario(), seed in any::<u64>(), kname in kernels()
    ) {
        let (a, truth) = sample(n, sc, seed);
        let kp = provider(kname).unwrap();
        let bs = normal_schur(&a, kp.as_ref(), &NormalSchurOptions::default()).unwrap();
        prop_assert_eq!((bs.p(), bs.r()), (truth.p(), truth.r()));
        prop_assert!(orthogonality_defect(&bs.q) < 1e-13);
        prop_assert!(schur_residual(&a, &bs.q, &bs.schur_matrix()) < 1e-10);
        // Members of a cluster share their imaginary part up to rounding.
        let slack = 1e-12 * frobenius_norm(&a);
        prop_assert!(bs.imag_parts().windows(2).all(|w| w[0] >= w[1] - slack));
        prop_assert!(bs.lambda_real.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigenvalues_match_general_schur(n in 1usize..40, sc in scenario(), seed in any::<u64>()) {
        let (a, _) = sample(n, sc, seed);
        let kp = provider("dc").unwrap();
        let ours = normal_schur(&a, kp.as_ref(), &NormalSchurOptions::default()).unwrap().eigenvalues();
        let oracle = quasi_triangular_eigenvalues(&kp.general_real_schur(&a).unwrap().t);
        prop_assert!(hausdorff(&ours, &oracle) <= 1e-9 * spectral_scale(&oracle));
    }

    #[test]
    fn spectrum_is_invariant_under_similarity_and_scales(
        n in 2usize..30, sc in scenario(), seed in any::<u64>(), c in 0.1f64..10.0
    ) {
        let (a, _) = sample(n, sc, seed);
        let kp = provider("dc").unwrap();
        let opts = NormalSchurOptions::default();
        let base = normal_schur(&a, kp.as_ref(), &opts).unwrap().eigenvalues();
        let u = haar_orthogonal(n, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let moved = normal_schur(&conjugate(&u, &a), kp.as_ref(), &opts).unwrap().eigenvalues();
        let scaled = normal_schur(&a.scale(c), kp.as_ref(), &opts).unwrap().eigenvalues();
        let expect: Vec<Complex64> = base.iter().map(|z| z * c).collect();
        let s = spectral_scale(&base);
        prop_assert!(hausdorff(&base, &moved) <= 1e-9 * s);
        prop_assert!(hausdorff(&expect, &scaled) <= 1e-9 * s * c);
    }

    #[test]
    fn pair_basis_diagonalizes_for_distinct_sigma(n in 2usize..40, seed in any::<u64>()) {
        let (a, _) = sample(n, Scenario::RandomNormal, seed);
        let kp = provider("dc").unwrap();
        let eps1 = effective_eps1(NormalSchurOptions::default().eps1, n);
        let s = skew_schur_decompose(&skew_part(&a).unwrap(), kp.as_ref(), eps1).unwrap();
        prop_assume!(cluster_sigmas(&s.sigma, eps1).iter().all(|c| c.m == 1));
        let q1 = s.q_hat.columns(0..s.p()).to_owned();
        let m = matmul(q1.t(), matmul(a.view(), q1.view()).view());
        let off = m.sub(&DenseMatrix::from_diag(&m.diagonal()));
        prop_assert!(frobenius_norm(&off) <= 1e-10 * frobenius_norm(&a));
    }

    #[test]
    fn clustered_basis_has_symplectic_structure(half in 2usize..20, seed in any::<u64>()) {
        let (a, _) = sample(2 * half, Scenario::WorstCaseSigma, seed);
        let kp = provider("dc").unwrap();
        let eps1 = effective_eps1(NormalSchurOptions::default().eps1, a.rows());
        let s = skew_schur_decompose(&skew_part(&a).unwrap(), kp.as_ref(), eps1).unwrap();
        let (p, r) = (s.p(), s.r);
        let idx: Vec<usize> = (0..p).chain((0..p).map(|j| p + r + j)).collect();
        let v = s.q_hat.select_columns(&idx);
        let t = matmul(v.t(), matmul(a.view(), v.view()).view());
        let w = t.submatrix(0..p, 0..p);
        let lower = t.submatrix(p..2 * p, 0..p);
        let x = lower.sub(&DenseMatrix::identity(p).scale(s.sigma[0]));
        let defect = frobenius_norm(&w.sub(&t.submatrix(p..2 * p, p..2 * p)))
            + frobenius_norm(&w.sub(&w.transpose()))
            + frobenius_norm(&x.add(&x.transpose()))
            + frobenius_norm(&t.submatrix(0..p, p..2 * p).add(&lower));
        prop_assert!(defect <= 1e-10 * frobenius_norm(&a));
    }

    #[test]
    fn real_block_is_symmetric_and_in_the_null_space(n in 2usize..40, seed in any::<u64>(), alpha in 0.1f64..=1.0) {
        let (a, _) = sample(n, Scenario::AlphaMix(alpha), seed);
        let kp = provider("dc").unwrap();
        let eps1 = effective_eps1(NormalSchurOptions::default().eps1, n);
        let skew = skew_part(&a).unwrap();
        let s = skew_schur_decompose(&skew, kp.as_ref(), eps1).unwrap();
        prop_assume!(s.r > 0);
        let q_r = s.q_hat.columns(s.p()..s.p() + s.r).to_owned();
        let h = matmul(q_r.t(), matmul(a.view(), q_r.view()).view());
        let anorm = frobenius_norm(&a);
        prop_assert!(frobenius_norm(&h.sub(&h.transpose())) <= 1e-10 * anorm);
        prop_assert!(frobenius_norm(&matmul(skew.view(), q_r.view())) <= 1e-11 * anorm);
    }

    #[test]
    fn skew_schur_reproduces_its_input(n in 1usize..40, seed in any::<u64>(), kname in kernels()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let s_mat = skew_part(&g).unwrap();
        let kp = provider(kname).unwrap();
        let s = skew_schur_decompose(&s_mat, kp.as_ref(), 1e-14).unwrap();
        prop_assert_eq!(2 * s.p() + s.r, n);
        prop_assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]) && s.sigma.iter().all(|&x| x > 0.0));
        prop_assert!(orthogonality_defect(&s.q_hat) < 1e-13);
        prop_assert!(schur_residual(&s_mat, &s.q_hat, &s.block_matrix()) < 1e-13);
    }

    #[test]
    fn kernels_factor_their_inputs(n in 1usize..30, seed in any::<u64>(), kname in kernels()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kp: std::sync::Arc<dyn KernelProvider> = provider(kname).unwrap();
        let b = Bidiagonal::new(
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (1..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        ).unwrap();
        let svd = kp.bidiagonal_svd(&b).unwrap();
        let us = matmul(svd.u.view(), DenseMatrix::from_diag(&svd.sigma).view());
        let back = matmul(us.view(), svd.v.t());
        prop_assert!(frobenius_norm(&back.sub(&b.to_dense())) <= 1e-13 * b.frobenius_norm().max(1.0));
        prop_assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));

        let g = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let h = g.add(&g.transpose());
        let evd = kp.symmetric_evd(&h).unwrap();
        let back = matmul(matmul(evd.r.view(), DenseMatrix::from_diag(&evd.lam).view()).view(), evd.r.t());
        prop_assert!(frobenius_norm(&back.sub(&h)) <= 1e-13 * frobenius_norm(&h).max(1.0));

        let rs = kp.general_real_schur(&g).unwrap();
        prop_assert!(orthogonality_defect(&rs.q) < 1e-13);
        prop_assert!(schur_residual(&g, &rs.q, &rs.t) < 1e-13);
    }

    #[test]
    fn exp_of_skew_is_a_rotation_and_log_inverts_it(n in 1usize..20, seed in any::<u64>(), size in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let omega = skew_part(&g).unwrap();
        let norm = frobenius_norm(&omega);
        prop_assume!(norm > 0.0);
        // Spectral radius below pi keeps the logarithm principal.
        let omega = omega.scale(size.min(PI - 0.2) / norm);
        let kp = provider("dc").unwrap();
        let q = expm_skew(&omega, kp.as_ref()).unwrap();
        prop_assert!(orthogonality_defect(&q) < 1e-13);
        prop_assert!((determinant(&q).unwrap() - 1.0).abs() < 1e-10);
        let back = logm_normal(&q, kp.as_ref()).unwrap();
        prop_assert!(frobenius_norm(&back.sub(&omega)) < 1e-10);
    }

    #[test]
    fn text_formats_round_trip_exactly(n in 1usize..8, seed in any::<u64>(), sc in scenario()) {
        let (a, truth) = sample(n, sc, seed);
        prop_assert_eq!(matrix_from_str(&matrix_to_string(&a)).unwrap(), a);
        let back = schur_from_str(&schur_to_string(&truth)).unwrap();
        prop_assert_eq!(back.q, truth.q);
        prop_assert_eq!(back.lambda, truth.lambda);
        prop_assert_eq!(back.theta, truth.theta);
        prop_assert_eq!(back.lambda_real, truth.lambda_real);
    }

    #[test]
    fn scenario_names_round_trip(sc in scenario()) {
        prop_assert_eq!(sc.to_string().parse::<Scenario>().unwrap(), sc);
    }
}
