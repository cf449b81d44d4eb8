//! Subproblem for a cluster of `m` equal singular values.
//!
//! With `V` the `n x 2m` block of Schur vectors of `skew(A)` for the cluster,
//! `V^T A V = [[W, -X - sI], [X + sI, W]]` with `W` symmetric and `X` skew.
//! An orthogonal `R` with `R^T (V^T A V) R = [[D, -sI], [sI, D]]`, `D`
//! diagonal, turns `V R` into real Schur vectors of `A`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dense::{frobenius_norm, matmul, skew_part, sym_part, DenseMatrix, EPS};
use crate::error::{Error, Result};
use crate::kernels::KernelProvider;
use crate::symplectic_lanczos::{wx_eigen, WXMatrix};

/// How the cluster subproblem is solved when `D` is not a multiple of `I`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Group2Path {
    /// General real Schur form of the `2m x 2m` matrix.
    #[default]
    Default,
    /// Lanczos on the symmetric part, falling back to `Default` on breakdown
    /// or loss of orthogonality.
    Symplectic,
}

impl std::str::FromStr for Group2Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "default" => Ok(Self::Default),
            "symplectic" => Ok(Self::Symplectic),
            other => Err(Error::UnknownStrategy {
                kind: "group-2 path",
                name: other.to_string(),
                available: "default, symplectic".into(),
            }),
        }
    }
}

/// Which branch produced a [`Group2Result`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group2Scenario {
    /// `D = dI`: nothing to do.
    Scalar,
    Symplectic,
    GeneralSchur,
}

#[derive(Debug, Clone)]
pub struct Group2Result {
    pub r_block: DenseMatrix,
    pub d: Vec<f64>,
    pub scenario: Group2Scenario,
}

#[derive(Debug, Clone, Copy)]
pub struct Group2Options {
    pub tol_scn: f64,
    /// Absolute tolerance on recovered imaginary parts (`eps1 * sigma_max`).
    pub sigma_tol: f64,
    pub path: Group2Path,
    pub seed: u64,
}

/// Solves the cluster subproblem for `v` (`n x 2m`, columns `[pairs | partners]`).
pub fn group2_subproblem(
    a: &DenseMatrix,
    v: &DenseMatrix,
    sigma: f64,
    kp: &dyn KernelProvider,
    opts: &Group2Options,
) -> Result<Group2Result> {
    let two_m = v.cols();
    if !two_m.is_multiple_of(2) || v.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "cluster basis is {}x{} for a {}x{} matrix",
            v.rows(),
            two_m,
            a.rows(),
            a.cols()
        )));
    }
    let m = two_m / 2;
    let av = matmul(a.view(), v.view());
    let vt = matmul(v.t(), av.view());
    let vnorm = frobenius_norm(&vt);

    let sym = sym_part(&vt)?;
    let w = sym.submatrix(0..m, 0..m);
    let x = sym.submatrix(m..two_m, 0..m);
    let wbar = (0..m).map(|i| w[(i, i)]).sum::<f64>() / m as f64;
    let spread = frobenius_norm(&w.sub(&DenseMatrix::identity(m).scale(wbar)));
    if spread <= opts.tol_scn * vnorm && frobenius_norm(&x) <= opts.tol_scn * vnorm {
        return Ok(Group2Result {
            r_block: DenseMatrix::identity(two_m),
            d: vec![wbar; m],
            scenario: Group2Scenario::Scalar,
        });
    }

    if opts.path == Group2Path::Symplectic {
        if let Some(res) = symplectic_path(&sym, m, kp, opts.seed) {
            return Ok(res);
        }
    }
    general_schur_path(&vt, m, sigma, vnorm, kp, opts)
}

fn symplectic_path(sym: &DenseMatrix, m: usize, kp: &dyn KernelProvider, seed: u64) -> Option<Group2Result> {
    // sym(V^T A V) = [[W, -X], [X, W]]; average the duplicated blocks.
    let w = DenseMatrix::from_fn(m, m, |i, j| 0.5 * (sym[(i, j)] + sym[(m + i, m + j)]));
    let x = DenseMatrix::from_fn(m, m, |i, j| 0.5 * (sym[(m + i, j)] - sym[(i, m + j)]));
    let w = sym_part(&w).ok()?;
    let x = skew_part(&x).ok()?;
    let wx = WXMatrix::new(w, x).ok()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = wx_eigen(&wx, kp, &mut rng).ok()?;
    if res.degraded {
        return None;
    }
    Some(Group2Result {
        r_block: res.rotation(),
        d: res.d.clone(),
        scenario: Group2Scenario::Symplectic,
    })
}

fn general_schur_path(
    vt: &DenseMatrix,
    m: usize,
    sigma: f64,
    vnorm: f64,
    kp: &dyn KernelProvider,
    opts: &Group2Options,
) -> Result<Group2Result> {
    let two_m = 2 * m;
    let schur = kp.general_real_schur(vt)?;
    let t = &schur.t;
    let tol = opts.sigma_tol.max(EPS.sqrt() * vnorm);
    // (real part, first column, second column with sign) per 2x2 block.
    let mut blocks: Vec<(f64, usize, usize, f64)> = Vec::with_capacity(m);
    let mut i = 0;
    while i < two_m {
        if i + 1 == two_m || t[(i + 1, i)] == 0.0 {
            return Err(Error::ClusterMismatch {
                sigma,
                detail: format!("real eigenvalue {:.6e} inside the cluster", t[(i, i)]),
            });
        }
        let (b, c) = (t[(i, i + 1)], t[(i + 1, i)]);
        let imag = (-(b * c)).max(0.0).sqrt();
        if (imag - sigma).abs() > tol {
            return Err(Error::ClusterMismatch {
                sigma,
                detail: format!("imaginary part {imag:.6e} deviates by more than {tol:.3e}"),
            });
        }
        let re = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
        blocks.push((re, i, i + 1, if c > 0.0 { 1.0 } else { -1.0 }));
        i += 2;
    }
    blocks.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut r = DenseMatrix::zeros(two_m, two_m);
    for (k, &(_, c1, c2, sign)) in blocks.iter().enumerate() {
        for row in 0..two_m {
            r[(row, k)] = schur.q[(row, c1)];
            r[(row, m + k)] = sign * schur.q[(row, c2)];
        }
    }
    Ok(Group2Result {
        r_block: r,
        d: blocks.iter().map(|b| b.0).collect(),
        scenario: Group2Scenario::GeneralSchur,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::provider;

    fn opts(path: Group2Path) -> Group2Options {
        Group2Options {
            tol_scn: 1e-10,
            sigma_tol: 1e-12,
            path,
            seed: 7,
        }
    }

    #[test]
    fn scalar_cluster_needs_no_work() {
        // A = [[2I, -I], [I, 2I]] with V = I: W = 2I, X = 0, sigma = 1.
        let a = DenseMatrix::from_fn(4, 4, |i, j| match (i < 2, j < 2, i % 2 == j % 2) {
            (true, true, true) | (false, false, true) => 2.0,
            (false, true, true) => 1.0,
            (true, false, true) => -1.0,
            _ => 0.0,
        });
        let kp = provider("reference").unwrap();
        let res = group2_subproblem(&a, &DenseMatrix::identity(4), 1.0, kp.as_ref(), &opts(Group2Path::Default)).unwrap();
        assert_eq!(res.scenario, Group2Scenario::Scalar);
        assert_eq!(res.r_block, DenseMatrix::identity(4));
        assert_eq!(res.d, vec![2.0, 2.0]);
    }

    #[test]
    fn path_names_parse() {
        assert_eq!("Symplectic".parse::<Group2Path>().unwrap(), Group2Path::Symplectic);
        assert!("lanczos".parse::<Group2Path>().is_err());
    }
}
