//! Francis double-shift QR on an upper-Hessenberg matrix, with the 2x2
//! standardization that puts complex pairs in `[[a, b], [c, a]]`, `b c < 0` form.

use num_complex::Complex64;

use super::RealSchur;
use crate::dense::{DenseMatrix, EPS};
use crate::error::{Error, Result};

const EXCEPTIONAL_PERIOD: usize = 10;
const DAT1: f64 = 0.75;
const DAT2: f64 = -0.4375;

/// Result of standardizing a real 2x2 block.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Standard2x2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub cs: f64,
    pub sn: f64,
}

/// Schur factorization of a real 2x2 matrix `[[a, b], [c, d]]`:
/// `[[a, b], [c, d]] = [[cs, -sn], [sn, cs]] [[a', b'], [c', d']] [[cs, sn], [-sn, cs]]`,
/// where either `c' = 0` or `a' = d'` and `b' c' < 0`.
pub(crate) fn standardize_2x2(mut a: f64, mut b: f64, mut c: f64, mut d: f64) -> Standard2x2 {
    let (cs, sn);
    if c == 0.0 {
        cs = 1.0;
        sn = 0.0;
    } else if b == 0.0 {
        cs = 0.0;
        sn = 1.0;
        std::mem::swap(&mut a, &mut d);
        b = -c;
        c = 0.0;
    } else if a - d == 0.0 && b.signum() != c.signum() {
        cs = 1.0;
        sn = 0.0;
    } else {
        let temp = a - d;
        let mut p = 0.5 * temp;
        let bcmax = b.abs().max(c.abs());
        let bcmis = b.abs().min(c.abs()) * b.signum() * c.signum();
        let scale = p.abs().max(bcmax);
        let mut z = (p / scale) * p + (bcmax / scale) * bcmis;
        if z >= 4.0 * EPS {
            // Real eigenvalues.
            z = p + (scale.sqrt() * z.sqrt()).copysign(p);
            a = d + z;
            d -= (bcmax / z) * bcmis;
            let tau = c.hypot(z);
            cs = z / tau;
            sn = c / tau;
            b -= c;
            c = 0.0;
        } else {
            // Complex or nearly equal real eigenvalues: equalize the diagonal.
            let sigma = b + c;
            let tau = sigma.hypot(temp);
            let mut cs0 = (0.5 * (1.0 + sigma.abs() / tau)).sqrt();
            let mut sn0 = -(p / (tau * cs0)) * if sigma >= 0.0 { 1.0 } else { -1.0 };
            let aa = a * cs0 + b * sn0;
            let bb = -a * sn0 + b * cs0;
            let cc = c * cs0 + d * sn0;
            let dd = -c * sn0 + d * cs0;
            a = aa * cs0 + cc * sn0;
            b = bb * cs0 + dd * sn0;
            c = -aa * sn0 + cc * cs0;
            d = -bb * sn0 + dd * cs0;
            let mid = 0.5 * (a + d);
            a = mid;
            d = mid;
            if c != 0.0 {
                if b != 0.0 {
                    if b.signum() == c.signum() {
                        // Real eigenvalues after all: reduce to upper triangular.
                        let sab = b.abs().sqrt();
                        let sac = c.abs().sqrt();
                        p = (sab * sac).copysign(c);
                        let tau = 1.0 / (b + c).abs().sqrt();
                        a = mid + p;
                        d = mid - p;
                        b -= c;
                        c = 0.0;
                        let cs1 = sab * tau;
                        let sn1 = sac * tau;
                        let t = cs0 * cs1 - sn0 * sn1;
                        sn0 = cs0 * sn1 + sn0 * cs1;
                        cs0 = t;
                    }
                } else {
                    b = -c;
                    c = 0.0;
                    let t = cs0;
                    cs0 = -sn0;
                    sn0 = t;
                }
            }
            cs = cs0;
            sn = sn0;
        }
    }
    Standard2x2 { a, b, c, d, cs, sn }
}

/// Plane rotation `x <- c x + s y`, `y <- c y - s x` on two row slices.
#[inline]
fn rot(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (p, q) in x.iter_mut().zip(y.iter_mut()) {
        let (u, v) = (*p, *q);
        *p = c * u + s * v;
        *q = c * v - s * u;
    }
}

fn two_rows(m: &mut DenseMatrix, a: usize, cols: std::ops::Range<usize>) -> (&mut [f64], &mut [f64]) {
    let n = m.cols();
    let data = m.as_mut_slice();
    let (top, bottom) = data.split_at_mut((a + 1) * n);
    (&mut top[a * n + cols.start..a * n + cols.end], &mut bottom[cols.start..cols.end])
}

fn rot_columns(m: &mut DenseMatrix, j: usize, rows: std::ops::Range<usize>, c: f64, s: f64) {
    for i in rows {
        let row = m.row_mut(i);
        let (u, v) = (row[j], row[j + 1]);
        row[j] = c * u + s * v;
        row[j + 1] = c * v - s * u;
    }
}

/// Reduces an upper-Hessenberg `h` to real Schur form, accumulating the
/// similarity into `z` (pass the Hessenberg factor to get Schur vectors of the
/// original matrix).
pub fn real_schur_of_hessenberg(mut h: DenseMatrix, mut z: DenseMatrix) -> Result<RealSchur> {
    let n = h.rows();
    assert!(h.is_square() && z.cols() == n);
    if n == 0 {
        return Ok(RealSchur { q: z, t: h });
    }
    for j in 0..n.saturating_sub(2) {
        for i in j + 2..n {
            h[(i, j)] = 0.0;
        }
    }
    let nz = z.rows();
    let safmin = f64::MIN_POSITIVE;
    let ulp = EPS;
    let smlnum = safmin * (n as f64 / ulp);
    let itmax = 30 * n.max(10);
    let mut total_its = 0usize;
    let mut kdefl = 0usize;

    // `i` is the last row of the active block (inclusive).
    let mut i = n as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut converged = false;
        while total_its <= itmax {
            // Look for a single small subdiagonal element.
            let mut k = iu;
            while k > l {
                let hkk1 = h[(k, k - 1)].abs();
                if hkk1 <= smlnum {
                    break;
                }
                let mut tst = h[(k - 1, k - 1)].abs() + h[(k, k)].abs();
                if tst == 0.0 {
                    if k >= 2 {
                        tst += h[(k - 1, k - 2)].abs();
                    }
                    if k + 1 < n {
                        tst += h[(k + 1, k)].abs();
                    }
                }
                if hkk1 <= ulp * tst {
                    let ab = hkk1.max(h[(k - 1, k)].abs());
                    let ba = hkk1.min(h[(k - 1, k)].abs());
                    let diff = (h[(k - 1, k - 1)] - h[(k, k)]).abs();
                    let aa = h[(k, k)].abs().max(diff);
                    let bb = h[(k, k)].abs().min(diff);
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[(l, l - 1)] = 0.0;
            }
            if l + 1 >= iu {
                converged = true;
                break;
            }
            kdefl += 1;
            total_its += 1;

            let (h11, h12, h21, h22);
            if kdefl.is_multiple_of(2 * EXCEPTIONAL_PERIOD) {
                let s = h[(iu, iu - 1)].abs() + h[(iu - 1, iu - 2)].abs();
                h11 = DAT1 * s + h[(iu, iu)];
                h12 = DAT2 * s;
                h21 = s;
                h22 = h11;
            } else if kdefl.is_multiple_of(EXCEPTIONAL_PERIOD) {
                let s = h[(l + 1, l)].abs() + h[(l + 2, l + 1)].abs();
                h11 = DAT1 * s + h[(l, l)];
                h12 = DAT2 * s;
                h21 = s;
                h22 = h11;
            } else {
                h11 = h[(iu - 1, iu - 1)];
                h21 = h[(iu, iu - 1)];
                h12 = h[(iu - 1, iu)];
                h22 = h[(iu, iu)];
            }
            let s = h11.abs() + h12.abs() + h21.abs() + h22.abs();
            let (rt1r, rt1i, rt2r, rt2i);
            if s == 0.0 {
                rt1r = 0.0;
                rt1i = 0.0;
                rt2r = 0.0;
                rt2i = 0.0;
            } else {
                let (h11, h12, h21, h22) = (h11 / s, h12 / s, h21 / s, h22 / s);
                let tr = 0.5 * (h11 + h22);
                let det = (h11 - tr) * (h22 - tr) - h12 * h21;
                let rtdisc = det.abs().sqrt();
                if det >= 0.0 {
                    rt1r = tr * s;
                    rt2r = rt1r;
                    rt1i = rtdisc * s;
                    rt2i = -rt1i;
                } else {
                    let a = tr + rtdisc;
                    let b = tr - rtdisc;
                    let pick = if (a - h22).abs() <= (b - h22).abs() { a } else { b } * s;
                    rt1r = pick;
                    rt2r = pick;
                    rt1i = 0.0;
                    rt2i = 0.0;
                }
            }

            // Look for two consecutive small subdiagonal elements.
            let mut v = [0.0f64; 3];
            let mut m = iu - 2;
            loop {
                let h21s = h[(m + 1, m)];
                let s = (h[(m, m)] - rt2r).abs() + rt2i.abs() + h21s.abs();
                let h21s = h21s / s;
                v[0] = h21s * h[(m, m + 1)] + (h[(m, m)] - rt1r) * ((h[(m, m)] - rt2r) / s) - rt1i * (rt2i / s);
                v[1] = h21s * (h[(m, m)] + h[(m + 1, m + 1)] - rt1r - rt2r);
                v[2] = h21s * h[(m + 2, m + 1)];
                let s = v[0].abs() + v[1].abs() + v[2].abs();
                v[0] /= s;
                v[1] /= s;
                v[2] /= s;
                if m == l {
                    break;
                }
                let h00 = h[(m, m - 1)].abs() * (v[1].abs() + v[2].abs());
                let h01 = ulp * v[0].abs() * (h[(m - 1, m - 1)].abs() + h[(m, m)].abs() + h[(m + 1, m + 1)].abs());
                if h00 <= h01 {
                    break;
                }
                m -= 1;
            }

            // Double-shift QR sweep.
            for k in m..iu {
                let nr = 3.min(iu - k + 1);
                if k > m {
                    for t in 0..nr {
                        v[t] = h[(k + t, k - 1)];
                    }
                }
                let (beta, t1) = {
                    let (head, tail) = v.split_at_mut(1);
                    super::householder::make_reflector(head[0], &mut tail[..nr - 1])
                };
                v[0] = beta;
                if k > m {
                    h[(k, k - 1)] = v[0];
                    h[(k + 1, k - 1)] = 0.0;
                    if k + 2 <= iu {
                        h[(k + 2, k - 1)] = 0.0;
                    }
                } else if m > l {
                    h[(k, k - 1)] *= 1.0 - t1;
                }
                let v2 = v[1];
                let t2 = t1 * v2;
                if nr == 3 {
                    let v3 = v[2];
                    let t3 = t1 * v3;
                    {
                        let data = h.as_mut_slice();
                        let (r0, rest) = data[k * n..].split_at_mut(n);
                        let (r1, r2) = rest.split_at_mut(n);
                        for j in k..n {
                            let sum = r0[j] + v2 * r1[j] + v3 * r2[j];
                            r0[j] -= sum * t1;
                            r1[j] -= sum * t2;
                            r2[j] -= sum * t3;
                        }
                    }
                    for r in 0..=(k + 3).min(iu) {
                        let row = h.row_mut(r);
                        let sum = row[k] + v2 * row[k + 1] + v3 * row[k + 2];
                        row[k] -= sum * t1;
                        row[k + 1] -= sum * t2;
                        row[k + 2] -= sum * t3;
                    }
                    for r in 0..nz {
                        let row = z.row_mut(r);
                        let sum = row[k] + v2 * row[k + 1] + v3 * row[k + 2];
                        row[k] -= sum * t1;
                        row[k + 1] -= sum * t2;
                        row[k + 2] -= sum * t3;
                    }
                } else if nr == 2 {
                    {
                        let (r0, r1) = two_rows(&mut h, k, k..n);
                        for (a, b) in r0.iter_mut().zip(r1.iter_mut()) {
                            let sum = *a + v2 * *b;
                            *a -= sum * t1;
                            *b -= sum * t2;
                        }
                    }
                    for r in 0..=iu {
                        let row = h.row_mut(r);
                        let sum = row[k] + v2 * row[k + 1];
                        row[k] -= sum * t1;
                        row[k + 1] -= sum * t2;
                    }
                    for r in 0..nz {
                        let row = z.row_mut(r);
                        let sum = row[k] + v2 * row[k + 1];
                        row[k] -= sum * t1;
                        row[k + 1] -= sum * t2;
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                routine: "Francis QR",
                iterations: total_its,
            });
        }
        if l + 1 == iu {
            // A 2x2 block has split off: standardize it.
            let st = standardize_2x2(h[(iu - 1, iu - 1)], h[(iu - 1, iu)], h[(iu, iu - 1)], h[(iu, iu)]);
            h[(iu - 1, iu - 1)] = st.a;
            h[(iu - 1, iu)] = st.b;
            h[(iu, iu - 1)] = st.c;
            h[(iu, iu)] = st.d;
            if iu + 1 < n {
                let (r0, r1) = two_rows(&mut h, iu - 1, iu + 1..n);
                rot(r0, r1, st.cs, st.sn);
            }
            rot_columns(&mut h, iu - 1, 0..iu - 1, st.cs, st.sn);
            rot_columns(&mut z, iu - 1, 0..nz, st.cs, st.sn);
        }
        kdefl = 0;
        i = l as isize - 1;
    }
    Ok(RealSchur { q: z, t: h })
}

/// Eigenvalues of a standardized quasi-upper-triangular matrix, in diagonal order.
pub fn quasi_triangular_eigenvalues(t: &DenseMatrix) -> Vec<Complex64> {
    let n = t.rows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let a = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
            let im = (t[(i, i + 1)].abs().sqrt()) * (t[(i + 1, i)].abs().sqrt());
            out.push(Complex64::new(a, im));
            out.push(Complex64::new(a, -im));
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{frobenius_norm, matmul, orthogonality_defect};
    use crate::kernels::hessenberg_with_assembly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn schur(a: &DenseMatrix) -> RealSchur {
        let (q, h) = hessenberg_with_assembly(a);
        real_schur_of_hessenberg(h, q).unwrap()
    }

    fn check_quasi_triangular(t: &DenseMatrix) {
        let n = t.rows();
        for j in 0..n {
            for i in j + 2..n {
                assert_eq!(t[(i, j)], 0.0);
            }
        }
        for i in 0..n.saturating_sub(2) {
            assert!(t[(i + 1, i)] == 0.0 || t[(i + 2, i + 1)] == 0.0);
        }
        for i in 0..n.saturating_sub(1) {
            if t[(i + 1, i)] != 0.0 {
                assert_eq!(t[(i, i)], t[(i + 1, i + 1)]);
                assert!(t[(i, i + 1)] * t[(i + 1, i)] < 0.0);
            }
        }
    }

    #[test]
    fn standardize_cases() {
        let s = standardize_2x2(0.0, -1.0, 1.0, 0.0);
        assert_eq!((s.a, s.b, s.c, s.d), (0.0, -1.0, 1.0, 0.0));
        // [[1, 2], [3, 4]]: trace 5, determinant -2.
        let s = standardize_2x2(1.0, 2.0, 3.0, 4.0);
        assert_eq!(s.c, 0.0);
        let r = 33f64.sqrt();
        let mut got = [s.a, s.d];
        got.sort_by(f64::total_cmp);
        assert!((got[0] - (5.0 - r) / 2.0).abs() < 1e-14);
        assert!((got[1] - (5.0 + r) / 2.0).abs() < 1e-14);
        let s = standardize_2x2(1.0, -5.0, 2.0, 3.0);
        assert_eq!(s.a, s.d);
        assert!(s.b * s.c < 0.0);
        assert!((s.a - 2.0).abs() < 1e-14);
        assert!((s.b * s.c + 9.0).abs() < 1e-13);
    }

    #[test]
    fn upper_triangular_is_fixed() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0, 3.0], &[0.0, 4.0, 5.0], &[0.0, 0.0, 6.0]]).unwrap();
        let rs = schur(&a);
        assert_eq!(rs.t, a);
        assert_eq!(rs.q, DenseMatrix::identity(3));
    }

    #[test]
    fn quarter_turn() {
        let a = DenseMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let rs = schur(&a);
        let ev = quasi_triangular_eigenvalues(&rs.t);
        assert!((ev[0].im.abs() - 1.0).abs() < 1e-15 && ev[0].re.abs() < 1e-15);
    }

    #[test]
    fn random_general_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &n in &[1usize, 2, 3, 4, 9, 30, 80] {
            let a = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let rs = schur(&a);
            check_quasi_triangular(&rs.t);
            assert!(orthogonality_defect(&rs.q) < 1e-13, "n={n}");
            let back = matmul(matmul(rs.q.view(), rs.t.view()).view(), rs.q.t());
            assert!(frobenius_norm(&back.sub(&a)) < 1e-13 * frobenius_norm(&a), "n={n}");
        }
    }
}
