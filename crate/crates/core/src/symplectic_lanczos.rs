//! Eigendecomposition of symmetric matrices `[[W, -X], [X, W]]` (`W` symmetric,
//! `X` skew) whose eigenvalues all come in pairs.
//!
//! `m` Lanczos steps from a start vector in the range of the matrix give a
//! basis `K` whose columns are also `J`-orthogonal, so `M = [K, J K]` is
//! orthogonal symplectic and `M^T A M = blkdiag(T, T)`. Loss of orthogonality
//! in `M` is detected and reported, not repaired.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dense::{axpy, dot, frobenius_norm, matmul, norm2, orthogonality_defect, DenseMatrix, EPS};
use crate::error::{Error, Result};
use crate::kernels::KernelProvider;

/// Orthogonality defect of `M` above which a result is flagged as degraded.
pub const DEGRADED_TOL: f64 = 1e-6;

const ATTEMPTS: usize = 4;

#[derive(Debug, Clone)]
pub struct WXMatrix {
    w: DenseMatrix,
    x: DenseMatrix,
}

impl WXMatrix {
    /// Validates `w` symmetric and `x` skew-symmetric of equal size.
    pub fn new(w: DenseMatrix, x: DenseMatrix) -> Result<Self> {
        if !w.is_square() || w.shape() != x.shape() {
            return Err(Error::DimensionMismatch(format!(
                "W is {}x{}, X is {}x{}",
                w.rows(),
                w.cols(),
                x.rows(),
                x.cols()
            )));
        }
        let scale = frobenius_norm(&w) + frobenius_norm(&x);
        let asym = frobenius_norm(&w.sub(&w.transpose()));
        if asym > 8.0 * EPS * scale {
            return Err(Error::NotSymmetric { defect: asym / scale });
        }
        let sym = frobenius_norm(&x.add(&x.transpose()));
        if sym > 8.0 * EPS * scale {
            return Err(Error::NotSkew { defect: sym / scale });
        }
        Ok(Self { w, x })
    }

    pub fn m(&self) -> usize {
        self.w.rows()
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let m = self.m();
        DenseMatrix::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
            (true, true) => self.w[(i, j)],
            (true, false) => -self.x[(i, j - m)],
            (false, true) => self.x[(i - m, j)],
            (false, false) => self.w[(i - m, j - m)],
        })
    }
}

/// `J x` with `J = [[0, -I], [I, 0]]`.
pub fn apply_j(x: &[f64]) -> Vec<f64> {
    let m = x.len() / 2;
    x[m..].iter().map(|v| -v).chain(x[..m].iter().copied()).collect()
}

#[derive(Debug, Clone)]
pub struct WxEigen {
    /// `M = [K, J K]`, `2m x 2m`.
    pub basis: DenseMatrix,
    /// Eigenvectors of `T = K^T A K`.
    pub z: DenseMatrix,
    /// Eigenvalues of `T`, descending; each is a double eigenvalue of `A`.
    pub d: Vec<f64>,
    /// `||M^T M - I||_F / sqrt(2m)`.
    pub orth_defect: f64,
    pub degraded: bool,
}

impl WxEigen {
    /// `R = M blkdiag(Z, Z) = [K Z, J K Z]`, so that `A = R blkdiag(D, D) R^T`.
    pub fn rotation(&self) -> DenseMatrix {
        let m = self.z.rows();
        let kz = matmul(self.basis.columns(0..m), self.z.view());
        let mut r = DenseMatrix::zeros(2 * m, 2 * m);
        for i in 0..2 * m {
            r.row_mut(i)[..m].copy_from_slice(kz.row(i));
        }
        for j in 0..m {
            let col = apply_j(&kz.column(j));
            for (i, v) in col.into_iter().enumerate() {
                r[(i, m + j)] = v;
            }
        }
        r
    }
}

/// Lanczos-based eigendecomposition of `[[W, -X], [X, W]]`; see the module docs.
pub fn wx_eigen<R: Rng + ?Sized>(a: &WXMatrix, kp: &dyn KernelProvider, rng: &mut R) -> Result<WxEigen> {
    let m = a.m();
    let dense = a.to_dense();
    let anorm = frobenius_norm(&dense);
    let mut last = Error::LanczosBreakdown { step: 0, m };
    for _ in 0..ATTEMPTS {
        match lanczos_basis(&dense, m, anorm, rng) {
            Ok(k) => return finish(&dense, k, kp),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn lanczos_basis<R: Rng + ?Sized>(a: &DenseMatrix, m: usize, anorm: f64, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    let n = 2 * m;
    let threshold = EPS.sqrt() * anorm;
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut b = a.matvec(&v);
    let nb = norm2(&b);
    if nb < threshold || nb == 0.0 {
        return Err(Error::LanczosBreakdown { step: 0, m });
    }
    b.iter_mut().for_each(|x| *x /= nb);
    let mut basis = vec![b];
    for step in 1..m {
        let mut w = a.matvec(&basis[step - 1]);
        for _ in 0..2 {
            for k in &basis {
                let h = dot(k, &w);
                axpy(-h, k, &mut w);
            }
        }
        let nw = norm2(&w);
        if nw < threshold {
            return Err(Error::LanczosBreakdown { step, m });
        }
        w.iter_mut().for_each(|x| *x /= nw);
        basis.push(w);
    }
    Ok(basis)
}

fn finish(a: &DenseMatrix, k: Vec<Vec<f64>>, kp: &dyn KernelProvider) -> Result<WxEigen> {
    let m = k.len();
    let n = 2 * m;
    let mut basis = DenseMatrix::zeros(n, n);
    for (j, col) in k.iter().enumerate() {
        let jcol = apply_j(col);
        for i in 0..n {
            basis[(i, j)] = col[i];
            basis[(i, m + j)] = jcol[i];
        }
    }
    let k1 = basis.columns(0..m);
    let t = matmul(matmul(k1.t(), a.view()).view(), k1);
    let evd = kp.symmetric_evd(&crate::dense::sym_part(&t)?)?;
    let orth_defect = orthogonality_defect(&basis);
    Ok(WxEigen {
        basis,
        z: evd.r,
        d: evd.lam,
        orth_defect,
        degraded: orth_defect > DEGRADED_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::provider;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_pairs() {
        let w = DenseMatrix::from_diag(&[3.0, 1.0]);
        let a = WXMatrix::new(w, DenseMatrix::zeros(2, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let res = wx_eigen(&a, provider("reference").unwrap().as_ref(), &mut rng).unwrap();
        assert!((res.d[0] - 3.0).abs() < 1e-10 && (res.d[1] - 1.0).abs() < 1e-10);
        assert!(!res.degraded);
        let r = res.rotation();
        let dd = DenseMatrix::from_diag(&[res.d[0], res.d[1], res.d[0], res.d[1]]);
        let back = matmul(matmul(r.view(), dd.view()).view(), r.t());
        assert!(back.sub(&a.to_dense()).max_abs() < 1e-10);
    }

    #[test]
    fn scalar_matrix_breaks_down() {
        let a = WXMatrix::new(DenseMatrix::identity(3).scale(2.0), DenseMatrix::zeros(3, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let err = wx_eigen(&a, provider("reference").unwrap().as_ref(), &mut rng).unwrap_err();
        assert!(matches!(err, Error::LanczosBreakdown { step: 1, m: 3 }));
    }

    #[test]
    fn rejects_wrong_structure() {
        let w = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(WXMatrix::new(w, DenseMatrix::zeros(2, 2)).is_err());
        let x = DenseMatrix::identity(2);
        assert!(WXMatrix::new(DenseMatrix::identity(2), x).is_err());
    }
}
