//! Matrix functions of normal matrices evaluated on their block Schur form.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::dense::{frobenius_norm, gemm_block, matmul, BlockSchur, DenseMatrix};
use crate::error::{Error, Result};
use crate::kernels::KernelProvider;
use crate::normal_schur::NormalSchurOptions;
use crate::schur_backend::{skew_to_block, NormalSchurBackend, SchurBackend};
use crate::skew_schur::skew_schur_decompose;

/// Relative distance within which two negative real eigenvalues are paired
/// into one rotation by `pi`.
pub const TOL_NEG: f64 = 1e-8;

/// Eigenvalue moduli below this fraction of the largest count as zero.
pub const TOL_SINGULAR: f64 = 1e-14;

/// `Q M Q^T` where `M` is given through its action on columns of `Q`:
/// `qm` holds `Q M`.
fn back_transform(qm: &DenseMatrix, q: &DenseMatrix) -> DenseMatrix {
    let n = q.rows();
    let mut out = DenseMatrix::zeros(n, n);
    gemm_block(1.0, qm.view(), q.t(), 0.0, &mut out, 0, 0);
    out
}

/// `Q B` for block-diagonal `B` made of `[[a, -b], [b, a]]` blocks on column
/// pairs and scalars on single columns.
fn apply_blocks(q: &DenseMatrix, pairs: &[(usize, usize, f64, f64)], singles: &[(usize, f64)]) -> DenseMatrix {
    let n = q.rows();
    let mut out = DenseMatrix::zeros(n, q.cols());
    for i in 0..n {
        let src = q.row(i);
        let dst = out.row_mut(i);
        for &(u, w, a, b) in pairs {
            let (x, y) = (src[u], src[w]);
            dst[u] = a * x + b * y;
            dst[w] = a * y - b * x;
        }
        for &(c, v) in singles {
            dst[c] = v * src[c];
        }
    }
    out
}

/// Principal logarithm from a block Schur form.
pub fn logm_block_schur(bs: &BlockSchur) -> Result<DenseMatrix> {
    let (p, r) = (bs.p(), bs.r());
    let scale = bs
        .lambda
        .iter()
        .chain(bs.lambda_real.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = TOL_SINGULAR * scale;
    if let Some(&modulus) = bs.lambda.iter().chain(bs.lambda_real.iter()).find(|x| x.abs() <= floor) {
        return Err(Error::Singular { modulus: modulus.abs() });
    }
    let mut pairs: Vec<(usize, usize, f64, f64)> = (0..p)
        .map(|j| (j, p + r + j, bs.lambda[j].ln(), bs.theta[j]))
        .collect();
    let mut singles = Vec::with_capacity(r);
    let mut k = 0;
    while k < r {
        let x = bs.lambda_real[k];
        if x > 0.0 {
            singles.push((p + k, x.ln()));
            k += 1;
            continue;
        }
        // Negative eigenvalues are sorted last, so equal ones are adjacent.
        match bs.lambda_real.get(k + 1) {
            Some(&y) if (x - y).abs() <= TOL_NEG * x.abs() => {
                pairs.push((p + k, p + k + 1, (0.5 * (x + y)).abs().ln(), PI));
                k += 2;
            }
            _ => return Err(Error::UnpairedNegativeEigenvalue { value: x }),
        }
    }
    Ok(back_transform(&apply_blocks(&bs.q, &pairs, &singles), &bs.q))
}

/// `exp` of a skew-symmetric matrix from its block Schur form; real parts
/// are taken as zero.
pub fn expm_skew_block_schur(bs: &BlockSchur) -> DenseMatrix {
    let pairs: Vec<(usize, usize, f64, f64)> = bs
        .imag_parts()
        .iter()
        .enumerate()
        .map(|(j, s)| (j, bs.p() + bs.r() + j, s.cos(), s.sin()))
        .collect();
    let singles: Vec<(usize, f64)> = (bs.p()..bs.p() + bs.r()).map(|c| (c, 1.0)).collect();
    back_transform(&apply_blocks(&bs.q, &pairs, &singles), &bs.q)
}

/// Principal logarithm of a normal matrix through [`crate::normal_schur`].
pub fn logm_normal(a: &DenseMatrix, kp: &dyn KernelProvider) -> Result<DenseMatrix> {
    let bs = crate::normal_schur::normal_schur(a, kp, &NormalSchurOptions::default())?;
    logm_block_schur(&bs)
}

pub fn logm_with(a: &DenseMatrix, backend: &dyn SchurBackend) -> Result<DenseMatrix> {
    logm_block_schur(&backend.normal(a)?)
}

/// `exp` of a skew-symmetric matrix; the result is special orthogonal.
pub fn expm_skew(omega: &DenseMatrix, kp: &dyn KernelProvider) -> Result<DenseMatrix> {
    let s = skew_schur_decompose(omega, kp, NormalSchurOptions::default().eps1)?;
    Ok(expm_skew_block_schur(&skew_to_block(s)?))
}

pub fn expm_skew_with(omega: &DenseMatrix, backend: &dyn SchurBackend) -> Result<DenseMatrix> {
    Ok(expm_skew_block_schur(&backend.skew(omega)?))
}

/// Geodesic distance `||log(Qa^T Qb)||_F` on the rotation group.
pub fn so_distance(qa: &DenseMatrix, qb: &DenseMatrix, kp: Arc<dyn KernelProvider>) -> Result<f64> {
    let backend = NormalSchurBackend::new(kp, NormalSchurOptions::default());
    so_distance_with(qa, qb, &backend)
}

pub fn so_distance_with(qa: &DenseMatrix, qb: &DenseMatrix, backend: &dyn SchurBackend) -> Result<f64> {
    Ok(frobenius_norm(&logm_with(&matmul(qa.t(), qb.view()), backend)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{determinant, orthogonality_defect};
    use crate::kernels::provider;
    use crate::sampling::haar_orthogonal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rot(t: f64) -> DenseMatrix {
        DenseMatrix::from_rows(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]).unwrap()
    }

    #[test]
    fn closed_form_logs() {
        let kp = provider("reference").unwrap();
        assert!(logm_normal(&DenseMatrix::identity(5), kp.as_ref()).unwrap().max_abs() < 1e-15);
        let l = logm_normal(&rot(PI / 2.0), kp.as_ref()).unwrap();
        assert!((l[(1, 0)] - PI / 2.0).abs() < 1e-14 && (l[(0, 1)] + PI / 2.0).abs() < 1e-14);
        let l = logm_normal(&DenseMatrix::identity(2).scale(-1.0), kp.as_ref()).unwrap();
        assert!((l[(1, 0)].abs() - PI).abs() < 1e-14 && (l[(0, 1)] + l[(1, 0)]).abs() < 1e-14);
        assert!(l[(0, 0)].abs() < 1e-14);
    }

    #[test]
    fn log_errors() {
        let kp = provider("reference").unwrap();
        let a = DenseMatrix::from_diag(&[1.0, -1.0, 2.0]);
        assert!(matches!(logm_normal(&a, kp.as_ref()), Err(Error::UnpairedNegativeEigenvalue { .. })));
        let a = DenseMatrix::from_diag(&[1.0, 0.0]);
        assert!(matches!(logm_normal(&a, kp.as_ref()), Err(Error::Singular { .. })));
    }

    #[test]
    fn exp_closed_forms() {
        let kp = provider("reference").unwrap();
        assert_eq!(expm_skew(&DenseMatrix::zeros(3, 3), kp.as_ref()).unwrap(), DenseMatrix::identity(3));
        let e = expm_skew(&DenseMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap(), kp.as_ref()).unwrap();
        assert!(e.sub(&rot(1.0)).max_abs() < 1e-15);
    }

    #[test]
    fn exp_log_round_trip() {
        let kp = provider("dc").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut done = 0;
        while done < 5 {
            let mut q = haar_orthogonal(8, &mut rng);
            if determinant(&q).unwrap() < 0.0 {
                for i in 0..8 {
                    q[(i, 0)] = -q[(i, 0)];
                }
            }
            let bs = crate::normal_schur::normal_schur(&q, kp.as_ref(), &NormalSchurOptions::default()).unwrap();
            if bs.eigenvalues().iter().any(|z| (z + 1.0).norm() < 1e-3) {
                continue;
            }
            let x = logm_normal(&q, kp.as_ref()).unwrap();
            assert!(x.add(&x.transpose()).max_abs() <= 1e-12 * frobenius_norm(&x));
            let back = expm_skew(&crate::dense::skew_part(&x).unwrap(), kp.as_ref()).unwrap();
            assert!(frobenius_norm(&back.sub(&q)) < 1e-10 * frobenius_norm(&q));
            assert!(orthogonality_defect(&back) < 1e-14);
            assert!((determinant(&back).unwrap() - 1.0).abs() < 1e-8);
            done += 1;
        }
    }

    #[test]
    fn distances() {
        let kp = provider("reference").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut r = DenseMatrix::identity(5);
        for i in 0..2 {
            for j in 0..2 {
                r[(i, j)] = rot(0.3)[(i, j)];
            }
        }
        let d = so_distance(&DenseMatrix::identity(5), &r, kp.clone()).unwrap();
        assert!((d - 2f64.sqrt() * 0.3).abs() < 1e-14);
        let qa = haar_orthogonal(6, &mut rng);
        assert!(so_distance(&qa, &qa, kp.clone()).unwrap() < 1e-13);
        let qb = haar_orthogonal(6, &mut rng);
        if determinant(&qa).unwrap() * determinant(&qb).unwrap() > 0.0 {
            let (dab, dba) = (so_distance(&qa, &qb, kp.clone()).unwrap(), so_distance(&qb, &qa, kp).unwrap());
            assert!((dab - dba).abs() < 1e-10);
        }
    }
}
