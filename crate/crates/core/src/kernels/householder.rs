//! Householder reflectors, their blocked accumulation, and the Hessenberg baseline.

use crate::dense::{dot, gemm_block, DenseMatrix};

/// Generates `H = I - tau [1; v][1; v]^T` with `H [alpha; x] = [beta; 0]`.
///
/// On return `x` holds `v` (without the implicit leading one). Returns `(beta, tau)`.
pub fn make_reflector(mut alpha: f64, x: &mut [f64]) -> (f64, f64) {
    let mut xnorm = crate::dense::norm2(x);
    if xnorm == 0.0 {
        return (alpha, 0.0);
    }
    let mut beta = -alpha.signum() * alpha.hypot(xnorm);
    // Near the underflow threshold `1 / (alpha - beta)` overflows; rescale
    // until beta is representable with full precision.
    let safmin = f64::MIN_POSITIVE / crate::dense::EPS;
    let mut rescaled = 0;
    while beta.abs() < safmin && rescaled < 20 {
        x.iter_mut().for_each(|xi| *xi /= safmin);
        alpha /= safmin;
        beta /= safmin;
        rescaled += 1;
    }
    if rescaled > 0 {
        xnorm = crate::dense::norm2(x);
        beta = -alpha.signum() * alpha.hypot(xnorm);
    }
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for xi in x.iter_mut() {
        *xi *= scale;
    }
    for _ in 0..rescaled {
        beta *= safmin;
    }
    (beta, tau)
}

/// Reflectors `H_k`, each acting on indices `k + shift .. n`: `shift = 1` for
/// tridiagonal and Hessenberg reductions, `0` for QR. Stored vectors include
/// the leading one.
#[derive(Debug, Clone)]
pub struct Reflectors {
    n: usize,
    shift: usize,
    vs: Vec<Vec<f64>>,
    taus: Vec<f64>,
}

const BLOCK: usize = 32;

impl Reflectors {
    pub fn new(n: usize) -> Self {
        Self::with_shift(n, 1)
    }

    /// Reflectors for a QR factorization (`H_k` acts on `k .. n`).
    pub fn for_qr(n: usize) -> Self {
        Self::with_shift(n, 0)
    }

    fn with_shift(n: usize, shift: usize) -> Self {
        Self {
            n,
            shift,
            vs: Vec::with_capacity(n.saturating_sub(1)),
            taus: Vec::with_capacity(n.saturating_sub(1)),
        }
    }

    /// Appends the next reflector; `v[0]` must be one.
    pub fn push(&mut self, v: Vec<f64>, tau: f64) {
        let k = self.vs.len();
        debug_assert_eq!(v.len(), self.n - k - self.shift);
        self.vs.push(v);
        self.taus.push(tau);
    }

    pub fn len(&self) -> usize {
        self.vs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vs.is_empty()
    }

    /// Forms `Q = H_0 H_1 ... H_{k-1}` explicitly.
    pub fn assemble(&self) -> DenseMatrix {
        let n = self.n;
        let mut q = DenseMatrix::identity(n);
        let count = self.vs.len();
        let mut end = count;
        while end > 0 {
            let start = end.saturating_sub(BLOCK);
            if end - start >= 4 && n - start > 2 * BLOCK {
                self.apply_block(&mut q, start, end);
            } else {
                for k in (start..end).rev() {
                    self.apply_single(&mut q, k);
                }
            }
            end = start;
        }
        q
    }

    fn apply_single(&self, q: &mut DenseMatrix, k: usize) {
        let tau = self.taus[k];
        if tau == 0.0 {
            return;
        }
        let v = &self.vs[k];
        let off = k + self.shift;
        let n = self.n;
        let mut w = vec![0.0; n - off];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                crate::dense::axpy(vi, &q.row(off + i)[off..], &mut w);
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            let f = -tau * vi;
            if f != 0.0 {
                crate::dense::axpy(f, &w, &mut q.row_mut(off + i)[off..]);
            }
        }
    }

    /// Applies `H_start ... H_{end-1} = I - V T V^T` to the trailing block of `q`.
    fn apply_block(&self, q: &mut DenseMatrix, start: usize, end: usize) {
        let nb = end - start;
        let off = start + self.shift;
        let m = self.n - off;
        let mut v = DenseMatrix::zeros(m, nb);
        for j in 0..nb {
            for (i, &x) in self.vs[start + j].iter().enumerate() {
                v[(j + i, j)] = x;
            }
        }
        // Forward compact-WY factor.
        let mut t = DenseMatrix::zeros(nb, nb);
        let vtv = crate::dense::matmul(v.t(), v.view());
        for j in 0..nb {
            let tau = self.taus[start + j];
            t[(j, j)] = tau;
            for i in 0..j {
                let mut s = 0.0;
                for l in i..j {
                    s += t[(i, l)] * vtv[(l, j)];
                }
                t[(i, j)] = -tau * s;
            }
        }
        // Trailing block rows/cols off.. of q: W = T (V^T Q_sub); Q_sub -= V W.
        let qsub = q.view().rows(off..self.n).columns(off..self.n);
        let vtq = crate::dense::matmul(v.t(), qsub);
        let w = crate::dense::matmul(t.view(), vtq.view());
        gemm_block(-1.0, v.view(), w.view(), 1.0, q, off, off);
    }
}

/// Hessenberg reduction `A = Q H Q^T` with the orthogonal factor assembled.
///
/// This is the cost baseline the normal Schur solver is compared against.
pub fn hessenberg_with_assembly(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (h, refl) = hessenberg_reflectors(a);
    (refl.assemble(), h)
}

/// Unblocked Householder Hessenberg reduction; returns `H` and the reflectors.
pub(crate) fn hessenberg_reflectors(a: &DenseMatrix) -> (DenseMatrix, Reflectors) {
    assert!(a.is_square());
    let n = a.rows();
    let mut h = a.clone();
    let mut refl = Reflectors::new(n);
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let alpha = h[(k + 1, k)];
        let mut x: Vec<f64> = (k + 2..n).map(|i| h[(i, k)]).collect();
        let (beta, tau) = make_reflector(alpha, &mut x);
        let mut v = Vec::with_capacity(m);
        v.push(1.0);
        v.extend_from_slice(&x);
        h[(k + 1, k)] = beta;
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
        if tau != 0.0 {
            // Right update on rows 0..n, columns k+1..n.
            for i in 0..n {
                let row = &mut h.row_mut(i)[k + 1..];
                let s = tau * dot(row, &v);
                if s != 0.0 {
                    crate::dense::axpy(-s, &v, row);
                }
            }
            // Left update on rows k+1..n, columns k+1..n.
            let w = &mut w[..m];
            w.fill(0.0);
            for (i, &vi) in v.iter().enumerate() {
                crate::dense::axpy(vi, &h.row(k + 1 + i)[k + 1..], w);
            }
            for (i, &vi) in v.iter().enumerate() {
                crate::dense::axpy(-tau * vi, w, &mut h.row_mut(k + 1 + i)[k + 1..]);
            }
        }
        refl.push(v, tau);
    }
    (h, refl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{frobenius_norm, matmul, orthogonality_defect};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn reflector_annihilates() {
        let mut x = vec![4.0, -2.0, 1.0];
        let (alpha, orig) = (3.0, x.clone());
        let (beta, tau) = make_reflector(alpha, &mut x);
        let v: Vec<f64> = std::iter::once(1.0).chain(x.iter().copied()).collect();
        let y: Vec<f64> = std::iter::once(alpha).chain(orig).collect();
        let s = tau * dot(&v, &y);
        let out: Vec<f64> = y.iter().zip(&v).map(|(yi, vi)| yi - s * vi).collect();
        assert!((out[0] - beta).abs() < 1e-14);
        assert!(out[1..].iter().all(|z| z.abs() < 1e-14));
        assert!((beta.abs() - 30f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn subnormal_input_stays_finite() {
        let mut x = vec![-1e-310, 3e-320];
        let (beta, tau) = make_reflector(-2e-317, &mut x);
        assert!(beta.is_finite() && tau.is_finite() && x.iter().all(|v| v.is_finite()));
        assert!((beta - 1e-310).abs() < 1e-323);
        assert!((tau - 1.0).abs() < 1e-6 && (1.0..=2.0).contains(&tau));
    }

    #[test]
    fn zero_tail_gives_identity() {
        let mut x = vec![0.0, 0.0];
        assert_eq!(make_reflector(-2.0, &mut x), (-2.0, 0.0));
    }

    #[test]
    fn hessenberg_small_and_blocked() {
        for &n in &[1usize, 2, 3, 7, 90, 150] {
            let a = random(n, n as u64);
            let (q, h) = hessenberg_with_assembly(&a);
            assert!(orthogonality_defect(&q) < 1e-14, "n={n}");
            for i in 0..n {
                for j in 0..i.saturating_sub(1) {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
            let back = matmul(matmul(q.view(), h.view()).view(), q.t());
            assert!(frobenius_norm(&back.sub(&a)) <= 1e-13 * frobenius_norm(&a).max(1.0), "n={n}");
        }
    }

    #[test]
    fn blocked_assembly_matches_unblocked() {
        let n = 120;
        let (_, refl) = hessenberg_reflectors(&random(n, 3));
        let blocked = refl.assemble();
        let mut plain = DenseMatrix::identity(n);
        for k in (0..refl.len()).rev() {
            refl.apply_single(&mut plain, k);
        }
        assert!(frobenius_norm(&blocked.sub(&plain)) < 1e-13);
    }
}
