//! Divide-and-conquer symmetric tridiagonal eigensolver (rank-one tearing,
//! deflation, secular equation, Gu–Eisenstat eigenvectors) and a bidiagonal
//! SVD built on the Golub–Kahan form `[[0, B^T], [B, 0]]` permuted to
//! tridiagonal.

use super::symmetric::{symmetric_evd_with, tridiagonal_qr};
use super::{descending_order, Bidiagonal, BidiagonalSvd};
use crate::dense::{gemm_block, matmul, DenseMatrix, EPS};
use crate::error::Result;

const LEAF: usize = 24;

/// Eigenvalues (descending) and eigenvectors of the symmetric tridiagonal
/// matrix with diagonal `d` and off-diagonal `e`.
pub(crate) fn tridiagonal_dc(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = d.len();
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    let scale = d.iter().chain(e).fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok((vec![0.0; n], DenseMatrix::identity(n)));
    }
    let ds: Vec<f64> = d.iter().map(|x| x / scale).collect();
    let es: Vec<f64> = e.iter().map(|x| x / scale).collect();

    let mut lam = vec![0.0; n];
    let mut q = DenseMatrix::zeros(n, n);
    let mut start = 0;
    for i in 0..n {
        let last = i + 1 == n || es[i].abs() <= EPS * ds[i].abs().sqrt() * ds[i + 1].abs().sqrt() || es[i] == 0.0;
        if last {
            let (l, qb) = dc_block(&ds[start..=i], &es[start..i])?;
            lam[start..=i].copy_from_slice(&l);
            for r in 0..qb.rows() {
                q.row_mut(start + r)[start..=i].copy_from_slice(qb.row(r));
            }
            start = i + 1;
        }
    }
    let order = descending_order(&lam);
    let values = order.iter().map(|&j| lam[j] * scale).collect();
    Ok((values, q.select_columns(&order)))
}

/// Ascending eigenvalues and eigenvectors of one unreduced block.
fn dc_block(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = d.len();
    if n <= LEAF {
        let (lam, z) = tridiagonal_qr(d, e)?;
        let rev: Vec<usize> = (0..n).rev().collect();
        return Ok((rev.iter().map(|&j| lam[j]).collect(), z.select_columns(&rev)));
    }
    let k = n / 2;
    let beta = e[k - 1];
    let rho = beta.abs();
    let sgn = if beta < 0.0 { -1.0 } else { 1.0 };
    let mut d1 = d[..k].to_vec();
    d1[k - 1] -= rho;
    let mut d2 = d[k..].to_vec();
    d2[0] -= rho;
    let (l1, q1) = dc_block(&d1, &e[..k - 1])?;
    let (l2, q2) = dc_block(&d2, &e[k..])?;
    Ok(merge(l1, q1, l2, q2, rho, sgn))
}

/// Root `j` of `1 + rho sum z2_i / (d_i - x) = 0` (with `d` strictly increasing),
/// returned as `(origin, tau)` with `x = d[origin] + tau`.
fn secular_root(j: usize, d: &[f64], z2: &[f64], rho: f64) -> (usize, f64) {
    let k = d.len();
    let (origin, mut lo, mut hi);
    if j + 1 < k {
        let mid = 0.5 * (d[j + 1] - d[j]);
        let f_mid = 1.0 + rho * d.iter().zip(z2).map(|(&di, &zi)| zi / ((di - d[j]) - mid)).sum::<f64>();
        if f_mid >= 0.0 {
            origin = j;
            lo = 0.0;
            hi = mid;
        } else {
            origin = j + 1;
            lo = -mid;
            hi = 0.0;
        }
    } else {
        origin = j;
        lo = 0.0;
        hi = rho * z2.iter().sum::<f64>();
    }
    let delta: Vec<f64> = d.iter().map(|&di| di - d[origin]).collect();
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (mut psi, mut dpsi, mut phi, mut dphi) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..k {
            let r = 1.0 / (delta[i] - tau);
            let t = z2[i] * r;
            if i <= j {
                psi += t;
                dpsi += t * r;
            } else {
                phi += t;
                dphi += t * r;
            }
        }
        let f = 1.0 + rho * (psi + phi);
        if !f.is_finite() {
            tau = 0.5 * (lo + hi);
            continue;
        }
        let err = 8.0 * rho * (psi.abs() + phi.abs()) + 3.0 + tau.abs() * rho * (dpsi + dphi);
        if f.abs() <= EPS * err {
            break;
        }
        if f < 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
        if hi - lo <= 2.0 * EPS * lo.abs().max(hi.abs()) {
            break;
        }
        // Two-pole rational model of f matched in value and slope at tau.
        let a = delta[j];
        let bb = rho * dpsi * (a - tau) * (a - tau);
        let aa = rho * psi - rho * dpsi * (a - tau);
        let next = if j + 1 < k {
            let b = delta[j + 1];
            let dd = rho * dphi * (b - tau) * (b - tau);
            let cc = rho * phi - rho * dphi * (b - tau);
            let c0 = 1.0 + aa + cc;
            let qa = c0;
            let qb = -(c0 * (a + b) + bb + dd);
            let qc = c0 * a * b + bb * b + dd * a;
            solve_quadratic_in(qa, qb, qc, lo, hi)
        } else {
            let c0 = 1.0 + aa;
            if c0 > 0.0 {
                Some(a + bb / c0)
            } else {
                None
            }
        };
        tau = match next {
            Some(x) if x > lo && x < hi => x,
            _ => 0.5 * (lo + hi),
        };
    }
    (origin, tau)
}

fn solve_quadratic_in(qa: f64, qb: f64, qc: f64, lo: f64, hi: f64) -> Option<f64> {
    let inside = |x: f64| x > lo && x < hi;
    if qa == 0.0 {
        return if qb != 0.0 { Some(-qc / qb) } else { None };
    }
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    let q = -0.5 * (qb + if qb >= 0.0 { disc } else { -disc });
    let r1 = q / qa;
    let r2 = if q != 0.0 { qc / q } else { r1 };
    match (inside(r1), inside(r2)) {
        (true, _) => Some(r1),
        (false, true) => Some(r2),
        _ => None,
    }
}

/// Merges two solved halves coupled by `rho z z^T`.
fn merge(l1: Vec<f64>, q1: DenseMatrix, l2: Vec<f64>, q2: DenseMatrix, rho: f64, sgn: f64) -> (Vec<f64>, DenseMatrix) {
    let (n1, n2) = (l1.len(), l2.len());
    let n = n1 + n2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut z: Vec<f64> = q1.row(n1 - 1).iter().map(|x| x * s).collect();
    z.extend(q2.row(0).iter().map(|x| sgn * s * x));
    let rho = 2.0 * rho;
    let mut dv = l1;
    dv.extend(l2);
    // Columns of blkdiag(q1, q2); `mask` records which halves a column touches.
    let mut qb = DenseMatrix::zeros(n, n);
    for i in 0..n1 {
        qb.row_mut(i)[..n1].copy_from_slice(q1.row(i));
    }
    for i in 0..n2 {
        qb.row_mut(n1 + i)[n1..].copy_from_slice(q2.row(i));
    }
    let mut mask: Vec<u8> = (0..n).map(|j| if j < n1 { 1 } else { 2 }).collect();

    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| dv[a].total_cmp(&dv[b]));
    let dmax = dv.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let zmax = z.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tol = 8.0 * EPS * dmax.max(rho * zmax);

    let mut deflated: Vec<usize> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut pending: Option<usize> = None;
    for &nj in &perm {
        if rho * z[nj].abs() <= tol {
            deflated.push(nj);
            continue;
        }
        let Some(pj) = pending else {
            pending = Some(nj);
            continue;
        };
        let (s0, c0) = (z[pj], z[nj]);
        let tau = c0.hypot(s0);
        let t = dv[nj] - dv[pj];
        let (c, s) = (c0 / tau, -s0 / tau);
        if (t * c * s).abs() <= tol {
            z[nj] = tau;
            z[pj] = 0.0;
            for i in 0..n {
                let row = qb.row_mut(i);
                let (x, y) = (row[pj], row[nj]);
                row[pj] = c * x + s * y;
                row[nj] = c * y - s * x;
            }
            mask[nj] |= mask[pj];
            mask[pj] = mask[nj];
            let (dp, dn) = (dv[pj], dv[nj]);
            dv[pj] = dp * c * c + dn * s * s;
            dv[nj] = dp * s * s + dn * c * c;
            deflated.push(pj);
        } else {
            kept.push(pj);
        }
        pending = Some(nj);
    }
    if let Some(pj) = pending {
        kept.push(pj);
    }

    let k = kept.len();
    let dd: Vec<f64> = kept.iter().map(|&j| dv[j]).collect();
    let zz: Vec<f64> = kept.iter().map(|&j| z[j]).collect();
    let z2: Vec<f64> = zz.iter().map(|x| x * x).collect();

    let mut lam_k = vec![0.0; k];
    let mut delta = DenseMatrix::zeros(k, k);
    for j in 0..k {
        let (org, tau) = secular_root(j, &dd, &z2, rho);
        lam_k[j] = dd[org] + tau;
        for i in 0..k {
            delta[(i, j)] = (dd[i] - dd[org]) - tau;
        }
    }
    // Gu–Eisenstat: recompute z so the eigenvectors are numerically orthogonal.
    let mut u = DenseMatrix::zeros(k, k);
    let mut zhat = vec![0.0; k];
    for i in 0..k {
        let mut w = delta[(i, i)];
        for j in 0..k {
            if j != i {
                w *= delta[(i, j)] / (dd[i] - dd[j]);
            }
        }
        zhat[i] = w.abs().sqrt().copysign(zz[i]);
    }
    for i in 0..k {
        for j in 0..k {
            u[(i, j)] = zhat[i] / delta[(i, j)];
        }
    }
    let mut norms = vec![0.0; k];
    for i in 0..k {
        for (nj, x) in norms.iter_mut().zip(u.row(i)) {
            *nj += x * x;
        }
    }
    for i in 0..k {
        for (x, nj) in u.row_mut(i).iter_mut().zip(&norms) {
            *x /= nj.sqrt();
        }
    }

    // Eigenvectors of the kept part: qb[:, kept] u, exploiting the block structure.
    let mut vk = DenseMatrix::zeros(n, k);
    if k > 0 {
        let top: Vec<usize> = (0..k).filter(|&i| mask[kept[i]] & 1 != 0).collect();
        let bot: Vec<usize> = (0..k).filter(|&i| mask[kept[i]] & 2 != 0).collect();
        for (rows, sel, r0) in [(0..n1, &top, 0usize), (n1..n, &bot, n1)] {
            if sel.is_empty() {
                continue;
            }
            let cols: Vec<usize> = sel.iter().map(|&i| kept[i]).collect();
            let qpart = qb.submatrix(rows.clone(), 0..n).select_columns(&cols);
            let upart = DenseMatrix::from_fn(sel.len(), k, |a, b| u[(sel[a], b)]);
            gemm_block(1.0, qpart.view(), upart.view(), 0.0, &mut vk, r0, 0);
        }
    }

    let mut values: Vec<(f64, bool, usize)> = Vec::with_capacity(n);
    values.extend((0..k).map(|j| (lam_k[j], true, j)));
    values.extend(deflated.iter().map(|&c| (dv[c], false, c)));
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut q = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let (src_k, src_b) = (vk.row(i), qb.row(i));
        let dst = q.row_mut(i);
        for (col, &(_, is_kept, idx)) in values.iter().enumerate() {
            dst[col] = if is_kept { src_k[idx] } else { src_b[idx] };
        }
    }
    (values.into_iter().map(|v| v.0).collect(), q)
}

/// Orthonormal basis (`rank` columns) for the column space of `e`.
fn column_basis(e: &DenseMatrix, rank: usize) -> Result<DenseMatrix> {
    let g = matmul(e.t(), e.view());
    let g = crate::dense::sym_part(&g)?;
    let evd = symmetric_evd_with(&g, tridiagonal_qr)?;
    let w = evd.r.columns(0..rank).to_owned();
    let mut b = matmul(e.view(), w.view());
    orthonormalize_columns(&mut b);
    Ok(b)
}

/// Two passes of modified Gram–Schmidt over the columns of `b`.
fn orthonormalize_columns(b: &mut DenseMatrix) {
    let (m, k) = b.shape();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| b.column(j)).collect();
    for _ in 0..2 {
        for j in 0..k {
            for i in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let h = crate::dense::dot(&head[i], &tail[0]);
                crate::dense::axpy(-h, &head[i], &mut tail[0]);
            }
            let nrm = crate::dense::norm2(&cols[j]);
            if nrm > 0.0 {
                cols[j].iter_mut().for_each(|x| *x /= nrm);
            }
        }
    }
    for (j, c) in cols.iter().enumerate() {
        for i in 0..m {
            b[(i, j)] = c[i];
        }
    }
}

/// Symmetric (Löwdin) orthonormalization of the listed columns: the closest
/// matrix with orthonormal columns in the Frobenius norm.
fn lowdin(m: &mut DenseMatrix, idx: &[usize]) -> Result<()> {
    if idx.is_empty() {
        return Ok(());
    }
    let part = m.select_columns(idx);
    let g = crate::dense::sym_part(&matmul(part.t(), part.view()))?;
    let evd = symmetric_evd_with(&g, tridiagonal_qr)?;
    let k = idx.len();
    let scaled = DenseMatrix::from_fn(k, k, |i, j| evd.r[(i, j)] / evd.lam[j].max(f64::MIN_POSITIVE).sqrt());
    let inv_sqrt = matmul(scaled.view(), evd.r.t());
    let fixed = matmul(part.view(), inv_sqrt.view());
    m.scatter_columns(idx, &fixed);
    Ok(())
}

/// Below this size implicit QR beats the doubled-size tridiagonal problem.
const SVD_QR_CROSSOVER: usize = 160;

pub(crate) fn bidiagonal_svd_dc(b: &Bidiagonal) -> Result<BidiagonalSvd> {
    if b.size() < SVD_QR_CROSSOVER {
        return super::bidiag_qr::bidiagonal_svd_qr(b);
    }
    bidiagonal_svd_tgk(b)
}

fn bidiagonal_svd_tgk(b: &Bidiagonal) -> Result<BidiagonalSvd> {
    let p = b.size();
    if p == 1 {
        let d = b.diag[0];
        let sign = if d < 0.0 { -1.0 } else { 1.0 };
        return Ok(BidiagonalSvd {
            u: DenseMatrix::from_diag(&[sign]),
            sigma: vec![d.abs()],
            v: DenseMatrix::identity(1),
        });
    }
    // Entries at rounding level split the problem; for rank-deficient input
    // this peels the null part off before the expensive solve.
    let negligible = EPS * b.frobenius_norm();
    let mut off = Vec::with_capacity(2 * p - 1);
    for i in 0..p {
        off.push(b.diag[i]);
        if i + 1 < p {
            off.push(b.superdiag[i]);
        }
    }
    off.iter_mut().filter(|x| x.abs() <= negligible).for_each(|x| *x = 0.0);
    let (lam, y) = tridiagonal_dc(&vec![0.0; 2 * p], &off)?;
    let smax = lam[0].max(0.0);
    if smax == 0.0 {
        return Ok(BidiagonalSvd {
            u: DenseMatrix::identity(p),
            sigma: vec![0.0; p],
            v: DenseMatrix::identity(p),
        });
    }
    let null_tol = 4.0 * p as f64 * EPS * smax;
    let nn = lam[..p].iter().take_while(|&&l| l > null_tol).count();
    let z = p - nn;

    let mut v = DenseMatrix::zeros(p, p);
    let mut u = DenseMatrix::zeros(p, p);
    for i in 0..p {
        v.row_mut(i)[..nn].copy_from_slice(&y.row(2 * i)[..nn]);
        u.row_mut(i)[..nn].copy_from_slice(&y.row(2 * i + 1)[..nn]);
    }
    for m in [&mut v, &mut u] {
        let mut norms = vec![0.0; nn];
        for i in 0..p {
            for (s, x) in norms.iter_mut().zip(&m.row(i)[..nn]) {
                *s += x * x;
            }
        }
        for i in 0..p {
            for (x, s) in m.row_mut(i)[..nn].iter_mut().zip(&norms) {
                *x /= s.sqrt();
            }
        }
    }
    if z > 0 {
        let mid: Vec<usize> = (nn..2 * p - nn).collect();
        let even = DenseMatrix::from_fn(p, mid.len(), |i, j| y[(2 * i, mid[j])]);
        let odd = DenseMatrix::from_fn(p, mid.len(), |i, j| y[(2 * i + 1, mid[j])]);
        let nv = column_basis(&even, z)?;
        let nu = column_basis(&odd, z)?;
        let cols: Vec<usize> = (nn..p).collect();
        v.scatter_columns(&cols, &nv);
        u.scatter_columns(&cols, &nu);
    }
    let mut sigma: Vec<f64> = lam[..nn].to_vec();
    sigma.resize(p, 0.0);

    // Pairs (+s, -s) of small singular values mix in the tridiagonal
    // eigenvectors; that mixing only breaks orthogonality among small ones.
    let small: Vec<usize> = (0..p).filter(|&k| sigma[k] < 0.1 * smax).collect();
    if small.len() > 1 {
        lowdin(&mut v, &small)?;
        lowdin(&mut u, &small)?;
    }
    Ok(BidiagonalSvd { u, sigma, v })
}
