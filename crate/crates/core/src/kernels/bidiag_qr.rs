//! Golub–Kahan implicit-shift QR for the SVD of an upper-bidiagonal matrix.
//!
//! Left and right rotations are accumulated into the rows of `U^T` and `V^T`
//! so that every vector update is a contiguous row operation.

use super::{descending_order, Bidiagonal, BidiagonalSvd};
use crate::dense::{DenseMatrix, EPS};
use crate::error::{Error, Result};

fn rotate_rows(m: &mut DenseMatrix, a: usize, b: usize, c: f64, s: f64) {
    debug_assert_ne!(a, b);
    let n = m.cols();
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let data = m.as_mut_slice();
    let (top, bottom) = data.split_at_mut(hi * n);
    let (ra, rb) = if a < b {
        (&mut top[lo * n..lo * n + n], &mut bottom[..n])
    } else {
        (&mut bottom[..n], &mut top[lo * n..lo * n + n])
    };
    for (x, y) in ra.iter_mut().zip(rb.iter_mut()) {
        let (p, q) = (*x, *y);
        *x = c * p + s * q;
        *y = c * q - s * p;
    }
}

#[inline]
fn givens(x: f64, z: f64) -> (f64, f64, f64) {
    let r = x.hypot(z);
    if r == 0.0 {
        (1.0, 0.0, 0.0)
    } else {
        (x / r, z / r, r)
    }
}

struct State {
    d: Vec<f64>,
    e: Vec<f64>,
    ut: DenseMatrix,
    vt: DenseMatrix,
}

impl State {
    /// `d[i] == 0` with `i < hi`: rotate row `i` against rows below to clear it.
    fn chase_zero_diagonal_row(&mut self, i: usize, hi: usize) {
        let mut x = self.e[i];
        self.e[i] = 0.0;
        for j in i + 1..=hi {
            let (c, s, r) = givens(self.d[j], x);
            self.d[j] = r;
            rotate_rows(&mut self.ut, j, i, c, s);
            if j < hi {
                x = -s * self.e[j];
                self.e[j] *= c;
            }
        }
    }

    /// `d[hi] == 0`: rotate the last column against columns to the left.
    fn chase_zero_last_diagonal(&mut self, lo: usize, hi: usize) {
        let mut x = self.e[hi - 1];
        self.e[hi - 1] = 0.0;
        for j in (lo..hi).rev() {
            let (c, s, r) = givens(self.d[j], x);
            self.d[j] = r;
            rotate_rows(&mut self.vt, j, hi, c, s);
            if j > lo {
                x = -s * self.e[j - 1];
                self.e[j - 1] *= c;
            }
        }
    }

    fn shifted_sweep(&mut self, lo: usize, hi: usize) {
        let d = &self.d;
        let e = &self.e;
        let t11 = d[hi - 1] * d[hi - 1] + if hi - 1 > lo { e[hi - 2] * e[hi - 2] } else { 0.0 };
        let t12 = d[hi - 1] * e[hi - 1];
        let t22 = d[hi] * d[hi] + e[hi - 1] * e[hi - 1];
        let delta = 0.5 * (t11 - t22);
        let denom = delta + if delta >= 0.0 { 1.0 } else { -1.0 } * delta.hypot(t12);
        let mu = if denom == 0.0 { t22 - t12.abs() } else { t22 - t12 * t12 / denom };

        let mut y = d[lo] * d[lo] - mu;
        let mut z = d[lo] * e[lo];
        let mut bulge = 0.0;
        for k in lo..hi {
            // Right rotation on columns k, k+1.
            let (c, s, r) = givens(y, z);
            if k > lo {
                self.e[k - 1] = r;
            }
            let (dk, ek) = (self.d[k], self.e[k]);
            self.d[k] = c * dk + s * ek;
            self.e[k] = c * ek - s * dk;
            let low = s * self.d[k + 1];
            self.d[k + 1] *= c;
            rotate_rows(&mut self.vt, k, k + 1, c, s);

            // Left rotation on rows k, k+1 removes the subdiagonal bulge.
            let (c, s, r) = givens(self.d[k], low);
            self.d[k] = r;
            let (ek, dk1) = (self.e[k], self.d[k + 1]);
            self.e[k] = c * ek + s * dk1;
            self.d[k + 1] = c * dk1 - s * ek;
            if k + 1 < hi {
                bulge = s * self.e[k + 1];
                self.e[k + 1] *= c;
            }
            rotate_rows(&mut self.ut, k, k + 1, c, s);
            y = self.e[k];
            z = bulge;
        }
    }
}

pub(crate) fn bidiagonal_svd_qr(b: &Bidiagonal) -> Result<BidiagonalSvd> {
    let p = b.size();
    let mut st = State {
        d: b.diag.clone(),
        e: b.superdiag.clone(),
        ut: DenseMatrix::identity(p),
        vt: DenseMatrix::identity(p),
    };
    let bnorm = b.frobenius_norm();
    let small = EPS * bnorm;
    let budget = 30 * p.max(1);
    let mut sweeps = 0;
    let mut hi = p;
    'outer: while hi > 1 {
        for i in 0..hi {
            if st.d[i].abs() <= small {
                st.d[i] = 0.0;
            }
        }
        for i in 0..hi - 1 {
            if st.e[i].abs() <= EPS * (st.d[i].abs() + st.d[i + 1].abs()) {
                st.e[i] = 0.0;
            }
        }
        if st.e[hi - 2] == 0.0 {
            hi -= 1;
            continue;
        }
        let last = hi - 1;
        let mut lo = last - 1;
        while lo > 0 && st.e[lo - 1] != 0.0 {
            lo -= 1;
        }
        for i in lo..last {
            if st.d[i] == 0.0 {
                st.chase_zero_diagonal_row(i, last);
                continue 'outer;
            }
        }
        if st.d[last] == 0.0 {
            st.chase_zero_last_diagonal(lo, last);
            continue;
        }
        if sweeps >= budget {
            return Err(Error::NoConvergence {
                routine: "bidiagonal QR",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        st.shifted_sweep(lo, last);
    }
    for i in 0..p {
        if st.d[i] < 0.0 {
            st.d[i] = -st.d[i];
            for x in st.vt.row_mut(i) {
                *x = -*x;
            }
        }
    }
    let order = descending_order(&st.d);
    let sigma = order.iter().map(|&i| st.d[i]).collect();
    let mut u = DenseMatrix::zeros(p, p);
    let mut v = DenseMatrix::zeros(p, p);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..p {
            u[(i, col)] = st.ut[(src, i)];
            v[(i, col)] = st.vt[(src, i)];
        }
    }
    Ok(BidiagonalSvd { u, sigma, v })
}
