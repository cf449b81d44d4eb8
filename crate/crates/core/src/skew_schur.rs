//! Real Schur decomposition of skew-symmetric matrices.
//!
//! `A = Q~ T Q~^T` with `T` skew tridiagonal; an even-odd permutation turns
//! `T` into `[[0, -B~^T], [B~, 0]]` with `B~` upper bidiagonal of shape
//! `floor(n/2) x ceil(n/2)`, and the SVD of `B~` yields
//! `Q^T A Q = [[0, 0, -S], [0, 0_r, 0], [S, 0, 0]]`.

use crate::dense::{gemm_block, skew_defect, DenseMatrix, EPS};
use crate::error::{Error, Result};
use crate::kernels::householder::{make_reflector, Reflectors};
use crate::kernels::{Bidiagonal, KernelProvider};

/// Implicit skew tridiagonal matrix: `T[k+1][k] = sub[k]`, `T[k][k+1] = -sub[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewTridiagonal {
    pub sub: Vec<f64>,
}

impl SkewTridiagonal {
    pub fn n(&self) -> usize {
        if self.sub.is_empty() {
            // A 1x1 zero matrix and the empty matrix are indistinguishable here.
            1
        } else {
            self.sub.len() + 1
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n();
        let mut t = DenseMatrix::zeros(n, n);
        for (k, &s) in self.sub.iter().enumerate() {
            t[(k + 1, k)] = s;
            t[(k, k + 1)] = -s;
        }
        t
    }
}

/// `skew(A)` in its real Schur form: `q_hat` columns are laid out as
/// `[pairs | null space | partners]` with `sigma` descending and positive.
#[derive(Debug, Clone)]
pub struct SkewSchur {
    pub q_hat: DenseMatrix,
    pub sigma: Vec<f64>,
    pub r: usize,
}

impl SkewSchur {
    pub fn p(&self) -> usize {
        self.sigma.len()
    }

    /// The block matrix `[[0, 0, -S], [0, 0_r, 0], [S, 0, 0]]`.
    pub fn block_matrix(&self) -> DenseMatrix {
        let (p, r) = (self.p(), self.r);
        let n = 2 * p + r;
        let mut k = DenseMatrix::zeros(n, n);
        for (j, &s) in self.sigma.iter().enumerate() {
            k[(p + r + j, j)] = s;
            k[(j, p + r + j)] = -s;
        }
        k
    }
}

pub(crate) fn check_skew(a: &DenseMatrix) -> Result<usize> {
    let defect = skew_defect(a)?;
    if defect > 8.0 * EPS {
        return Err(Error::NotSkew { defect });
    }
    Ok(a.rows())
}

/// Householder reduction `A = Q~ T Q~^T` of a skew-symmetric matrix.
///
/// Only the strictly lower triangle is read after the skewness check.
pub fn skew_tridiagonalize(a: &DenseMatrix) -> Result<(DenseMatrix, SkewTridiagonal)> {
    check_skew(a)?;
    let (sub, refl) = skew_reflectors(a);
    Ok((refl.assemble(), SkewTridiagonal { sub }))
}

fn skew_reflectors(a: &DenseMatrix) -> (Vec<f64>, Reflectors) {
    let n = a.rows();
    let mut l = a.clone();
    let mut refl = Reflectors::new(n);
    let mut sub = Vec::with_capacity(n.saturating_sub(1));
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let off = k + 1;
        let m = n - off;
        let alpha = l[(off, k)];
        let mut x: Vec<f64> = (off + 1..n).map(|i| l[(i, k)]).collect();
        let (beta, tau) = make_reflector(alpha, &mut x);
        sub.push(beta);
        let mut v = Vec::with_capacity(m);
        v.push(1.0);
        v.extend_from_slice(&x);
        if tau != 0.0 {
            // w = tau A22 v using A22[j][i] = -A22[i][j].
            let w = &mut w[..m];
            w.fill(0.0);
            for i in 1..m {
                let row = &l.row(off + i)[off..off + i];
                w[i] += crate::dense::dot(row, &v[..i]);
                crate::dense::axpy(-v[i], row, &mut w[..i]);
            }
            w.iter_mut().for_each(|x| *x *= tau);
            // H A22 H = A22 + v w^T - w v^T (v^T A22 v = 0).
            for i in 1..m {
                let (vi, wi) = (v[i], w[i]);
                let row = &mut l.row_mut(off + i)[off..off + i];
                crate::dense::axpy(vi, &w[..i], row);
                crate::dense::axpy(-wi, &v[..i], row);
            }
        }
        refl.push(v, tau);
    }
    (sub, refl)
}

/// Even-odd permutation of `T`: returns `B~` (`floor(n/2) x ceil(n/2)`) and the
/// permutation `[0, 2, 4, ..., 1, 3, ...]` with `P^T T P = [[0, -B~^T], [B~, 0]]`.
pub fn even_odd_permute(t: &SkewTridiagonal) -> (DenseMatrix, Vec<usize>) {
    let n = t.n();
    let (k1, k2) = (n / 2, n.div_ceil(2));
    let perm: Vec<usize> = (0..n).step_by(2).chain((1..n).step_by(2)).collect();
    let mut b = DenseMatrix::zeros(k1, k2);
    for a in 0..k1 {
        b[(a, a)] = t.sub[2 * a];
        if 2 * a + 1 < t.sub.len() {
            b[(a, a + 1)] = -t.sub[2 * a + 1];
        }
    }
    (b, perm)
}

/// Real Schur form of a skew-symmetric matrix. Singular values below
/// `eps1 * sigma_max` are treated as zero and routed to the null block.
pub fn skew_schur_decompose(a: &DenseMatrix, kp: &dyn KernelProvider, eps1: f64) -> Result<SkewSchur> {
    skew_schur_with_floor(a, kp, eps1, 0.0)
}

/// As [`skew_schur_decompose`], with singular values below the absolute
/// `zero_floor` also treated as zero. Callers decomposing `skew(A)` pass a
/// floor relative to `A` so that a numerically symmetric `A` has no pairs.
pub fn skew_schur_with_floor(a: &DenseMatrix, kp: &dyn KernelProvider, eps1: f64, zero_floor: f64) -> Result<SkewSchur> {
    let n = check_skew(a)?;
    if n == 0 {
        return Ok(SkewSchur {
            q_hat: DenseMatrix::zeros(0, 0),
            sigma: Vec::new(),
            r: 0,
        });
    }
    let (sub, refl) = skew_reflectors(a);
    let q_tilde = refl.assemble();
    let (k1, k2) = (n / 2, n.div_ceil(2));
    if k1 == 0 {
        return Ok(SkewSchur {
            q_hat: q_tilde,
            sigma: Vec::new(),
            r: n,
        });
    }

    // Square part of B~; for odd n the extra column is rotated away from the
    // right, which accumulates into G (B~ G = [B 0]).
    let mut diag: Vec<f64> = (0..k1).map(|a| sub[2 * a]).collect();
    let mut superdiag: Vec<f64> = (0..k1 - 1).map(|a| -sub[2 * a + 1]).collect();
    let mut g = DenseMatrix::identity(k2);
    if k2 > k1 {
        let mut x = -sub[2 * k1 - 1];
        for j in (0..k1).rev() {
            let r = diag[j].hypot(x);
            let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (diag[j] / r, x / r) };
            diag[j] = r;
            if j > 0 {
                x = -s * superdiag[j - 1];
                superdiag[j - 1] *= c;
            }
            for i in 0..k2 {
                let row = g.row_mut(i);
                let (gj, gk) = (row[j], row[k1]);
                row[j] = c * gj + s * gk;
                row[k1] = c * gk - s * gj;
            }
        }
    }
    let svd = kp.bidiagonal_svd(&Bidiagonal::new(diag, superdiag)?)?;
    let smax = svd.sigma[0];
    let p = svd.sigma.iter().take_while(|&&s| s > 0.0 && s >= eps1 * smax && s >= zero_floor).count();
    if p == 0 {
        return Ok(SkewSchur {
            q_hat: q_tilde,
            sigma: Vec::new(),
            r: n,
        });
    }

    let v_full = if k2 > k1 {
        let mut vb = DenseMatrix::zeros(k2, k2);
        for i in 0..k1 {
            vb.row_mut(i)[..k1].copy_from_slice(svd.v.row(i));
        }
        vb[(k1, k1)] = 1.0;
        crate::dense::matmul(g.view(), vb.view())
    } else {
        svd.v
    };

    let even = q_tilde.view().strided_columns(0, 2);
    let odd = q_tilde.view().strided_columns(1, 2);
    let mut q_hat = DenseMatrix::zeros(n, n);
    gemm_block(1.0, even, v_full.view().columns(0..p), 0.0, &mut q_hat, 0, 0);
    gemm_block(1.0, even, v_full.view().columns(p..k2), 0.0, &mut q_hat, 0, p);
    gemm_block(1.0, odd, svd.u.view().columns(p..k1), 0.0, &mut q_hat, 0, k2);
    gemm_block(1.0, odd, svd.u.view().columns(0..p), 0.0, &mut q_hat, 0, n - p);
    Ok(SkewSchur {
        q_hat,
        sigma: svd.sigma[..p].to_vec(),
        r: n - 2 * p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{frobenius_norm, matmul, orthogonality_defect, skew_part};
    use crate::kernels::provider;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        skew_part(&a).unwrap()
    }

    #[test]
    fn tridiagonalization_reconstructs() {
        for &n in &[1usize, 2, 3, 4, 9, 70, 130] {
            let a = random_skew(n, n as u64);
            let (q, t) = skew_tridiagonalize(&a).unwrap();
            let back = matmul(matmul(q.view(), t.to_dense().view()).view(), q.t());
            let tol = 64.0 * EPS * n as f64 * frobenius_norm(&a);
            assert!(frobenius_norm(&back.sub(&a)) <= tol, "n={n}");
            assert!(orthogonality_defect(&q) < 1e-14);
        }
    }

    #[test]
    fn tridiagonal_input_is_fixed() {
        let t = SkewTridiagonal { sub: vec![1.0, -2.0, 0.5] };
        let (q, t2) = skew_tridiagonalize(&t.to_dense()).unwrap();
        assert_eq!(q, DenseMatrix::identity(4));
        assert_eq!(t2, t);
    }

    #[test]
    fn rejects_non_skew() {
        let a = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!(matches!(skew_tridiagonalize(&a), Err(Error::NotSkew { .. })));
    }

    #[test]
    fn permutation_block_form() {
        for n in 2usize..9 {
            let t = SkewTridiagonal { sub: (1..n).map(|k| k as f64).collect() };
            let (b, perm) = even_odd_permute(&t);
            assert_eq!(b.shape(), (n / 2, n.div_ceil(2)));
            let td = t.to_dense();
            let k2 = n.div_ceil(2);
            for i in 0..n {
                for j in 0..n {
                    let expected = if i >= k2 && j < k2 {
                        b[(i - k2, j)]
                    } else if i < k2 && j >= k2 {
                        -b[(j - k2, i)]
                    } else {
                        0.0
                    };
                    assert_eq!(td[(perm[i], perm[j])], expected);
                }
            }
        }
        let (_, perm) = even_odd_permute(&SkewTridiagonal { sub: vec![1.0, 2.0, 3.0] });
        assert_eq!(perm, vec![0, 2, 1, 3]);
    }

    #[test]
    fn block_identity_holds() {
        for name in ["reference", "dc"] {
            let kp = provider(name).unwrap();
            for &n in &[2usize, 3, 8, 15, 64, 101] {
                let a = random_skew(n, 100 + n as u64);
                let s = skew_schur_decompose(&a, kp.as_ref(), 10.0 * EPS).unwrap();
                assert_eq!(2 * s.p() + s.r, n);
                assert_eq!(s.r, n % 2);
                assert!(orthogonality_defect(&s.q_hat) < 1e-13);
                let lhs = matmul(matmul(s.q_hat.t(), a.view()).view(), s.q_hat.view());
                let diff = lhs.sub(&s.block_matrix());
                assert!(diff.max_abs() <= 1e-12 * frobenius_norm(&a), "{name} n={n}");
            }
        }
    }

    #[test]
    fn rank_deficient_null_block() {
        // A = X Y^T - Y X^T has rank 4 for n x 2 factors.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 11;
        let x = DenseMatrix::from_fn(n, 2, |_, _| rng.random_range(-1.0..1.0));
        let y = DenseMatrix::from_fn(n, 2, |_, _| rng.random_range(-1.0..1.0));
        let xy = matmul(x.view(), y.t());
        let a = xy.sub(&xy.transpose());
        let s = skew_schur_decompose(&a, provider("reference").unwrap().as_ref(), 1e-10).unwrap();
        assert_eq!((s.p(), s.r), (2, 7));
        let qr = s.q_hat.columns(2..9).to_owned();
        assert!(frobenius_norm(&matmul(a.view(), qr.view())) <= 1e-13 * frobenius_norm(&a));
    }

    #[test]
    fn small_examples() {
        let kp = provider("reference").unwrap();
        let a = DenseMatrix::from_rows(&[&[0.0, -2.0], &[2.0, 0.0]]).unwrap();
        let s = skew_schur_decompose(&a, kp.as_ref(), 10.0 * EPS).unwrap();
        assert_eq!(s.sigma, vec![2.0]);
        assert_eq!(s.r, 0);
        let back = matmul(matmul(s.q_hat.view(), s.block_matrix().view()).view(), s.q_hat.t());
        assert_eq!(back, a);
        let z = skew_schur_decompose(&DenseMatrix::zeros(3, 3), kp.as_ref(), 10.0 * EPS).unwrap();
        assert!(z.sigma.is_empty());
        assert_eq!(z.r, 3);
        assert_eq!(z.q_hat, DenseMatrix::identity(3));
    }
}
