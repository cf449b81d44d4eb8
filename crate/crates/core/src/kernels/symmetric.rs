//! Symmetric tridiagonalization and the implicit-QR tridiagonal eigensolver.

use super::householder::{make_reflector, Reflectors};
use super::{descending_order, SymmetricEvd};
use crate::dense::{axpy, dot, matmul, DenseMatrix, EPS};
use crate::error::{Error, Result};

/// Eigensolver for a symmetric tridiagonal matrix given by its diagonal and
/// off-diagonal. Returns eigenvalues in descending order and the matching
/// eigenvectors as columns.
pub(crate) type TridiagonalSolver = fn(&[f64], &[f64]) -> Result<(Vec<f64>, DenseMatrix)>;

/// Reduces a symmetric matrix to tridiagonal form `A = Q T Q^T`.
///
/// Only the lower triangle of `a` is read. Returns `(diag, offdiag, reflectors)`.
pub fn symmetric_tridiagonalize(a: &DenseMatrix) -> (Vec<f64>, Vec<f64>, Reflectors) {
    let n = a.rows();
    let mut l = a.clone();
    let mut refl = Reflectors::new(n);
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let off = k + 1;
        let m = n - off;
        let alpha = l[(off, k)];
        let mut x: Vec<f64> = (off + 1..n).map(|i| l[(i, k)]).collect();
        let (beta, tau) = make_reflector(alpha, &mut x);
        e.push(beta);
        let mut v = Vec::with_capacity(m);
        v.push(1.0);
        v.extend_from_slice(&x);
        if tau != 0.0 {
            // w = tau A22 v from the lower triangle.
            let w = &mut w[..m];
            w.fill(0.0);
            for i in 0..m {
                let row = &l.row(off + i)[off..off + i + 1];
                let vi = v[i];
                w[i] += dot(&row[..i], &v[..i]) + row[i] * vi;
                axpy(vi, &row[..i], &mut w[..i]);
            }
            for wi in w.iter_mut() {
                *wi *= tau;
            }
            let gamma = -0.5 * tau * dot(w, &v);
            axpy(gamma, &v, w);
            // A22 -= v w^T + w v^T on the lower triangle.
            for i in 0..m {
                let (vi, wi) = (v[i], w[i]);
                let row = &mut l.row_mut(off + i)[off..off + i + 1];
                axpy(-vi, &w[..=i], row);
                axpy(-wi, &v[..=i], row);
            }
        }
        refl.push(v, tau);
    }
    let d = (0..n).map(|i| l[(i, i)]).collect();
    (d, e, refl)
}

/// Symmetric EVD through tridiagonalization and a tridiagonal solver.
pub(crate) fn symmetric_evd_with(h: &DenseMatrix, solver: TridiagonalSolver) -> Result<SymmetricEvd> {
    let n = h.rows();
    if n == 0 {
        return Ok(SymmetricEvd {
            r: DenseMatrix::zeros(0, 0),
            lam: Vec::new(),
        });
    }
    let (d, e, refl) = symmetric_tridiagonalize(h);
    let (lam, z) = solver(&d, &e)?;
    let q = refl.assemble();
    Ok(SymmetricEvd {
        r: matmul(q.view(), z.view()),
        lam,
    })
}

/// Implicit symmetric tridiagonal QR with Wilkinson shifts.
pub(crate) fn tridiagonal_qr(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e = e.to_vec();
    // Rotations act on rows of Z^T so every update is contiguous.
    let mut zt = DenseMatrix::identity(n);
    let budget = 30 * n.max(1);
    let mut sweeps = 0;
    let mut hi = n;
    while hi > 1 {
        // Deflate negligible off-diagonals from the bottom.
        let mut split = false;
        for i in (0..hi - 1).rev() {
            if e[i].abs() <= EPS * (d[i].abs() + d[i + 1].abs()) || e[i] == 0.0 {
                e[i] = 0.0;
                if i == hi - 2 {
                    hi -= 1;
                    split = true;
                    break;
                }
            }
        }
        if split {
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 && e[lo - 1] != 0.0 {
            lo -= 1;
        }
        if sweeps >= budget {
            return Err(Error::NoConvergence {
                routine: "symmetric tridiagonal QR",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        qr_sweep(&mut d, &mut e, lo, hi - 1, &mut zt);
    }
    let order = descending_order(&d);
    let lam = order.iter().map(|&i| d[i]).collect();
    let mut z = DenseMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for (i, &x) in zt.row(src).iter().enumerate() {
            z[(i, col)] = x;
        }
    }
    Ok((lam, z))
}

fn rotate_rows(zt: &mut DenseMatrix, k: usize, c: f64, s: f64) {
    let n = zt.cols();
    let data = zt.as_mut_slice();
    let (top, bottom) = data.split_at_mut((k + 1) * n);
    let rk = &mut top[k * n..];
    let rk1 = &mut bottom[..n];
    for (a, b) in rk.iter_mut().zip(rk1.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x + s * y;
        *b = c * y - s * x;
    }
}

fn qr_sweep(d: &mut [f64], e: &mut [f64], lo: usize, hi: usize, zt: &mut DenseMatrix) {
    let delta = 0.5 * (d[hi - 1] - d[hi]);
    let b = e[hi - 1];
    let denom = delta + if delta >= 0.0 { 1.0 } else { -1.0 } * delta.hypot(b);
    let mu = if denom == 0.0 { d[hi] - b.abs() } else { d[hi] - b * b / denom };
    let mut x = d[lo] - mu;
    let mut z = e[lo];
    for k in lo..hi {
        let r = x.hypot(z);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (x / r, z / r) };
        if k > lo {
            e[k - 1] = r;
        }
        let (a, bb, dd) = (d[k], e[k], d[k + 1]);
        d[k] = c * c * a + 2.0 * c * s * bb + s * s * dd;
        d[k + 1] = s * s * a - 2.0 * c * s * bb + c * c * dd;
        e[k] = c * s * (dd - a) + (c * c - s * s) * bb;
        if k + 1 < hi {
            z = s * e[k + 1];
            e[k + 1] *= c;
            x = e[k];
        }
        rotate_rows(zt, k, c, s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{frobenius_norm, orthogonality_defect};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        crate::dense::sym_part(&a).unwrap()
    }

    fn tridiag_dense(d: &[f64], e: &[f64]) -> DenseMatrix {
        let n = d.len();
        DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                d[i]
            } else if i == j + 1 {
                e[j]
            } else if j == i + 1 {
                e[i]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn tridiagonalization_reconstructs() {
        for &n in &[1usize, 2, 5, 40, 100] {
            let a = random_symmetric(n, 11 + n as u64);
            let (d, e, refl) = symmetric_tridiagonalize(&a);
            let q = refl.assemble();
            let t = tridiag_dense(&d, &e);
            let back = matmul(matmul(q.view(), t.view()).view(), q.t());
            assert!(frobenius_norm(&back.sub(&a)) < 1e-13 * frobenius_norm(&a), "n={n}");
        }
    }

    #[test]
    fn tridiagonal_qr_diagonalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &n in &[1usize, 2, 3, 10, 60] {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let e: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (lam, z) = tridiagonal_qr(&d, &e).unwrap();
            assert!(lam.windows(2).all(|w| w[0] >= w[1]));
            assert!(orthogonality_defect(&z) < 1e-14);
            let t = tridiag_dense(&d, &e);
            let tz = matmul(t.view(), z.view());
            let zl = DenseMatrix::from_fn(n, n, |i, j| z[(i, j)] * lam[j]);
            assert!(frobenius_norm(&tz.sub(&zl)) < 1e-13 * frobenius_norm(&t).max(1.0));
        }
    }

    #[test]
    fn already_diagonal_and_zero() {
        let (lam, z) = tridiagonal_qr(&[1.0, 5.0, 3.0], &[0.0, 0.0]).unwrap();
        assert_eq!(lam, vec![5.0, 3.0, 1.0]);
        assert_eq!(z[(1, 0)], 1.0);
        let (lam, _) = tridiagonal_qr(&[0.0; 4], &[0.0; 3]).unwrap();
        assert_eq!(lam, vec![0.0; 4]);
    }
}
