//! Random test matrices: Haar orthogonal matrices and normal matrices with
//! prescribed spectra.
//!
//! Every generator takes the RNG explicitly. The CLI and tests use
//! `rand_chacha::ChaCha8Rng`, whose output stream is fixed for a given seed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dense::{assemble_schur_matrix, gemm_block, matmul, BlockSchur, DenseMatrix, EPS};
use crate::error::{Error, Result};
use crate::kernels::householder::{make_reflector, Reflectors};

/// Eigenvalue distribution of a generated normal matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// `lambda = 1`, `theta ~ U(0, pi/4)`.
    BestSo,
    /// `lambda = 1`, `theta ~ U(pi/2 - sqrt(eps), pi/2 + sqrt(eps))`.
    WorstSo,
    /// `lambda = 1`, `theta ~ U(0, pi)`.
    UniformSo,
    /// `lambda ~ U(0, 1)`, `theta ~ U(0, pi)`.
    RandomNormal,
    /// A fraction `alpha` of real `N(0, 1)` eigenvalues; pairs with phase
    /// `U(0, pi)` and radius `U(0, 2)`.
    AlphaMix(f64),
    /// All pairs share one imaginary part `sigma = |N(0,1)| + 0.1`, real parts `N(0, 1)`.
    WorstCaseSigma,
}

impl Scenario {
    pub const NAMES: &'static str = "best_so, worst_so, uniform_so, random_normal, alpha_mix:<alpha>, worst_case_sigma";

    /// Number of real eigenvalues for size `n`.
    pub fn real_count(&self, n: usize) -> usize {
        match *self {
            Scenario::AlphaMix(alpha) => {
                let r = (alpha * n as f64).round() as usize;
                // r must have the parity of n.
                if r % 2 == n % 2 {
                    r
                } else if r < n {
                    r + 1
                } else {
                    r - 1
                }
            }
            _ => n % 2,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::BestSo => f.write_str("best_so"),
            Scenario::WorstSo => f.write_str("worst_so"),
            Scenario::UniformSo => f.write_str("uniform_so"),
            Scenario::RandomNormal => f.write_str("random_normal"),
            Scenario::AlphaMix(a) => write!(f, "alpha_mix:{a}"),
            Scenario::WorstCaseSigma => f.write_str("worst_case_sigma"),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let simple = match lower.as_str() {
            "best_so" => Some(Scenario::BestSo),
            "worst_so" => Some(Scenario::WorstSo),
            "uniform_so" => Some(Scenario::UniformSo),
            "random_normal" => Some(Scenario::RandomNormal),
            "worst_case_sigma" => Some(Scenario::WorstCaseSigma),
            _ => None,
        };
        if let Some(sc) = simple {
            return Ok(sc);
        }
        let unknown = || Error::UnknownStrategy {
            kind: "scenario",
            name: s.to_string(),
            available: Scenario::NAMES.to_string(),
        };
        let arg = lower
            .strip_prefix("alpha_mix")
            .map(|rest| rest.trim_start_matches([':', '=', '(']).trim_end_matches(')'))
            .ok_or_else(unknown)?;
        let alpha: f64 = arg.parse().map_err(|_| unknown())?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(Scenario::AlphaMix(alpha))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSpec {
    pub n: usize,
    pub scenario: Scenario,
}

/// Uniform sample from the open interval `(lo, hi)`.
fn open_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    loop {
        let x = rng.random_range(lo..hi);
        if x > lo {
            return x;
        }
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-distributed orthogonal matrix: Householder QR of a Gaussian matrix with
/// the signs fixed so that `R` has a positive diagonal.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    let mut g = DenseMatrix::from_fn(n, n, |_, _| normal(rng));
    let mut refl = Reflectors::for_qr(n);
    let mut signs = vec![1.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n {
        let alpha = g[(k, k)];
        let mut x: Vec<f64> = (k + 1..n).map(|i| g[(i, k)]).collect();
        let (beta, tau) = make_reflector(alpha, &mut x);
        signs[k] = if beta < 0.0 { -1.0 } else { 1.0 };
        let mut v = Vec::with_capacity(n - k);
        v.push(1.0);
        v.extend_from_slice(&x);
        if tau != 0.0 && k + 1 < n {
            // G[k.., k+1..] -= tau v (v^T G[k.., k+1..]).
            let w = &mut w[k + 1..];
            w.fill(0.0);
            for (i, &vi) in v.iter().enumerate() {
                crate::dense::axpy(vi, &g.row(k + i)[k + 1..], w);
            }
            for (i, &vi) in v.iter().enumerate() {
                crate::dense::axpy(-tau * vi, w, &mut g.row_mut(k + i)[k + 1..]);
            }
        }
        refl.push(v, tau);
    }
    let mut q = refl.assemble();
    for i in 0..n {
        for (x, s) in q.row_mut(i).iter_mut().zip(&signs) {
            *x *= s;
        }
    }
    q
}

/// Draws the eigenvalues of `spec` as `(lambda, theta, lambda_real)`, with pairs
/// sorted by descending imaginary part and real eigenvalues descending.
pub fn sample_spectrum<R: Rng + ?Sized>(spec: &SpectrumSpec, rng: &mut R) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = spec.n;
    let r = spec.scenario.real_count(n);
    let p = (n - r) / 2;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(p);
    let mut reals: Vec<f64> = Vec::with_capacity(r);
    match spec.scenario {
        Scenario::BestSo | Scenario::WorstSo | Scenario::UniformSo => {
            let (lo, hi) = match spec.scenario {
                Scenario::BestSo => (0.0, FRAC_PI_4),
                Scenario::WorstSo => (FRAC_PI_2 - EPS.sqrt(), FRAC_PI_2 + EPS.sqrt()),
                _ => (0.0, PI),
            };
            pairs.extend((0..p).map(|_| (1.0, open_uniform(rng, lo, hi))));
            reals.extend(std::iter::repeat_n(1.0, r));
        }
        Scenario::RandomNormal => {
            pairs.extend((0..p).map(|_| (open_uniform(rng, 0.0, 1.0), open_uniform(rng, 0.0, PI))));
            reals.extend((0..r).map(|_| rng.random_range(-1.0..1.0)));
        }
        Scenario::AlphaMix(_) => {
            pairs.extend((0..p).map(|_| (open_uniform(rng, 0.0, 2.0), open_uniform(rng, 0.0, PI))));
            reals.extend((0..r).map(|_| normal(rng)));
        }
        Scenario::WorstCaseSigma => {
            let sigma = normal(rng).abs() + 0.1;
            pairs.extend((0..p).map(|_| {
                let d = normal(rng);
                (d.hypot(sigma), sigma.atan2(d))
            }));
            reals.extend((0..r).map(|_| normal(rng)));
        }
    }
    // Stable sort keeps draw order among equal imaginary parts.
    pairs.sort_by(|a, b| (b.0 * b.1.sin()).total_cmp(&(a.0 * a.1.sin())));
    reals.sort_by(|a, b| b.total_cmp(a));
    let (lambda, theta) = pairs.into_iter().unzip();
    (lambda, theta, reals)
}

/// Normal matrix `A = Q S Q^T` with Haar `Q` and spectrum drawn per `spec`,
/// returned with its exact block Schur form.
pub fn random_normal_matrix<R: Rng + ?Sized>(spec: &SpectrumSpec, rng: &mut R) -> Result<(DenseMatrix, BlockSchur)> {
    if spec.n == 0 {
        return Err(Error::InvalidParameter("matrix size must be positive".into()));
    }
    let (lambda, theta, reals) = sample_spectrum(spec, rng);
    let q = haar_orthogonal(spec.n, rng);
    let truth = BlockSchur::new(q, lambda, theta, reals)?;
    Ok((conjugate(&truth.q, &assemble_schur_matrix(&truth)), truth))
}

/// `Q S Q^T`.
pub fn conjugate(q: &DenseMatrix, s: &DenseMatrix) -> DenseMatrix {
    let qs = matmul(q.view(), s.view());
    let mut out = DenseMatrix::zeros(q.rows(), q.rows());
    gemm_block(1.0, qs.view(), q.t(), 0.0, &mut out, 0, 0);
    out
}

/// Rotation `base * H R H^T` where `R` turns each plane by an angle drawn from
/// `U(0, max_angle)` and `H` is Haar; stays within `max_angle` of `base`.
pub fn rotation_near<R: Rng + ?Sized>(base: &DenseMatrix, max_angle: f64, rng: &mut R) -> Result<DenseMatrix> {
    let n = base.rows();
    let p = n / 2;
    let theta: Vec<f64> = (0..p).map(|_| open_uniform(rng, 0.0, max_angle)).collect();
    let mut sorted = theta;
    sorted.sort_by(|a, b| b.sin().total_cmp(&a.sin()));
    let h = haar_orthogonal(n, rng);
    let bs = BlockSchur::new(h, vec![1.0; p], sorted, vec![1.0; n % 2])?;
    let near = conjugate(&bs.q, &assemble_schur_matrix(&bs));
    Ok(matmul(base.view(), near.view()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{frobenius_norm, normality_defect, orthogonality_defect, schur_residual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &n in &[1usize, 2, 7, 80, 150] {
            let q = haar_orthogonal(n, &mut rng);
            assert!(orthogonality_defect(&q) <= 1e-14, "n={n}");
        }
    }

    #[test]
    fn haar_first_coordinate_is_centered() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 10_000;
        let mean: f64 = (0..draws).map(|_| haar_orthogonal(5, &mut rng)[(0, 0)]).sum::<f64>() / draws as f64;
        // Var of one coordinate of a uniform unit vector in R^5 is 1/5.
        assert!(mean.abs() <= 3.0 * (0.2 / draws as f64).sqrt());
        let signs: Vec<f64> = (0..200).map(|_| haar_orthogonal(1, &mut rng)[(0, 0)]).collect();
        assert!(signs.contains(&1.0) && signs.contains(&-1.0));
    }

    #[test]
    fn scenarios_parse_and_count() {
        assert_eq!("best_so".parse::<Scenario>().unwrap(), Scenario::BestSo);
        assert_eq!("alpha_mix:0.3".parse::<Scenario>().unwrap(), Scenario::AlphaMix(0.3));
        assert_eq!("alpha_mix(0.5)".parse::<Scenario>().unwrap(), Scenario::AlphaMix(0.5));
        assert!("alpha_mix:1.5".parse::<Scenario>().is_err());
        assert!("gaussian".parse::<Scenario>().is_err());
        assert_eq!(Scenario::AlphaMix(0.5).real_count(20), 10);
        assert_eq!(Scenario::AlphaMix(0.3).real_count(21), 7);
        assert_eq!(Scenario::AlphaMix(1.0).real_count(21), 21);
        assert_eq!(Scenario::BestSo.real_count(11), 1);
    }

    #[test]
    fn generated_pairs_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for sc in [
            Scenario::BestSo,
            Scenario::WorstSo,
            Scenario::UniformSo,
            Scenario::RandomNormal,
            Scenario::AlphaMix(0.5),
            Scenario::WorstCaseSigma,
        ] {
            for &n in &[1usize, 8, 20, 31] {
                let (a, truth) = random_normal_matrix(&SpectrumSpec { n, scenario: sc }, &mut rng).unwrap();
                assert!(normality_defect(&a).unwrap() <= 1e-12);
                let s = assemble_schur_matrix(&truth);
                assert!(schur_residual(&a, &truth.q, &s) <= 1e-13, "{sc} n={n}");
                if sc == Scenario::AlphaMix(0.5) && n == 20 {
                    assert_eq!((truth.p(), truth.r()), (5, 10));
                }
            }
        }
    }

    #[test]
    fn worst_case_sigma_has_one_imaginary_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = SpectrumSpec { n: 8, scenario: Scenario::WorstCaseSigma };
        let (lambda, theta, reals) = sample_spectrum(&spec, &mut rng);
        assert!(reals.is_empty());
        let s0 = lambda[0] * theta[0].sin();
        assert!(s0 >= 0.1);
        assert!(lambda.iter().zip(&theta).all(|(l, t)| (l * t.sin() - s0).abs() < 1e-14));
    }

    #[test]
    fn rotations_near_base_stay_special_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = haar_orthogonal(9, &mut rng);
        let q = rotation_near(&base, 0.5, &mut rng).unwrap();
        assert!(orthogonality_defect(&q) < 1e-14);
        let diff = matmul(base.t(), q.view());
        assert!(frobenius_norm(&diff.sub(&DenseMatrix::identity(9))) < 2.0 * 0.5 * 3.0);
    }
}
