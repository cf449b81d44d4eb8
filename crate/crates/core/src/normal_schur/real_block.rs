//! Real eigenvalues: the restriction of `A` to the null space of `skew(A)` is
//! symmetric.

use crate::dense::{frobenius_norm, matmul, normality_defect, sym_part, DenseMatrix};
use crate::error::{Error, Result};
use crate::kernels::KernelProvider;

/// Relative asymmetry of `H = Q_r^T A Q_r` beyond which `A` is rejected.
pub const ASYMMETRY_TOL: f64 = 1e-8;

/// Returns `(R, lam)` with `sym(Q_r^T A Q_r) = R diag(lam) R^T`, `lam` descending.
pub fn real_block_evd(a: &DenseMatrix, q_r: &DenseMatrix, kp: &dyn KernelProvider) -> Result<(DenseMatrix, Vec<f64>)> {
    real_block_evd_with_product(a, q_r, &matmul(a.view(), q_r.view()), kp)
}

/// As [`real_block_evd`] with `A Q_r` supplied by the caller.
pub(crate) fn real_block_evd_with_product(
    a: &DenseMatrix,
    q_r: &DenseMatrix,
    aq_r: &DenseMatrix,
    kp: &dyn KernelProvider,
) -> Result<(DenseMatrix, Vec<f64>)> {
    if q_r.cols() == 0 {
        return Ok((DenseMatrix::zeros(0, 0), Vec::new()));
    }
    let h = matmul(q_r.t(), aq_r.view());
    let asym = frobenius_norm(&h.sub(&h.transpose())) * 0.5;
    let anorm = frobenius_norm(a);
    if asym > ASYMMETRY_TOL * anorm {
        return Err(Error::NotNormal {
            defect: normality_defect(a)?,
            tol: ASYMMETRY_TOL,
        });
    }
    let evd = kp.symmetric_evd(&sym_part(&h)?)?;
    Ok((evd.r, evd.lam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::provider;

    #[test]
    fn symmetric_input_and_scalar_case() {
        let kp = provider("reference").unwrap();
        let a = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let (_, lam) = real_block_evd(&a, &DenseMatrix::identity(2), kp.as_ref()).unwrap();
        assert!((lam[0] - 3.0).abs() < 1e-14 && (lam[1] - 1.0).abs() < 1e-14);
        let one = DenseMatrix::from_rows(&[&[0.0], &[1.0]]).unwrap();
        let (r, lam) = real_block_evd(&a, &one, kp.as_ref()).unwrap();
        assert_eq!(r, DenseMatrix::identity(1));
        assert_eq!(lam, vec![2.0]);
    }

    #[test]
    fn asymmetric_restriction_is_rejected() {
        let kp = provider("reference").unwrap();
        let a = DenseMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let err = real_block_evd(&a, &DenseMatrix::identity(2), kp.as_ref()).unwrap_err();
        assert!(matches!(err, Error::NotNormal { .. }));
    }
}
