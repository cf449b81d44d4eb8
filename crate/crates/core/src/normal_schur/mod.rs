//! Real Schur decomposition of normal matrices through their skew-symmetric part.
//!
//! The Schur vectors of `skew(A)` already block-diagonalize `A` for simple
//! singular values. Clusters of equal singular values get a small `2m x 2m`
//! correction, and the null space of `skew(A)` carries a symmetric
//! eigenproblem for the real eigenvalues.

mod cluster;
mod group2;
mod real_block;

pub use cluster::{cluster_sigmas, cluster_sigmas_abs, SigmaCluster};
pub use group2::{group2_subproblem, Group2Options, Group2Path, Group2Result, Group2Scenario};
pub use real_block::{real_block_evd, ASYMMETRY_TOL};
use real_block::real_block_evd_with_product;

use crate::dense::{frobenius_norm, gemm_block, matmul, normality_defect, skew_part, BlockSchur, DenseMatrix, EPS};
use crate::error::{Error, Result};
use crate::kernels::KernelProvider;
use crate::skew_schur::skew_schur_with_floor;

#[derive(Debug, Clone)]
pub struct NormalSchurOptions {
    /// Relative threshold for equal and zero singular values.
    pub eps1: f64,
    /// Largest accepted normality defect.
    pub normality_tol: f64,
    /// Skip the `O(n^3)` normality check (benchmarks on known-normal input).
    pub skip_check: bool,
    /// Relative tolerance for the `D = dI` shortcut in clusters.
    pub tol_scn: f64,
    /// Largest accepted relative mass left outside the `2x2` blocks.
    pub offdiag_tol: f64,
    pub group2_path: Group2Path,
    /// Seed for the randomized start vectors of the symplectic path.
    pub seed: u64,
}

impl Default for NormalSchurOptions {
    fn default() -> Self {
        Self {
            eps1: 10.0 * EPS,
            normality_tol: 1e-8,
            skip_check: false,
            tol_scn: 1e-10,
            offdiag_tol: 1e-6,
            group2_path: Group2Path::Default,
            seed: 0x5eed,
        }
    }
}

/// Computed singular values of `skew(A)` scatter by roughly `sqrt(n) eps ||A||`
/// after tridiagonalization, so a fixed `eps1` splits exact clusters at large `n`.
/// Merging too much only costs time; splitting leaves coupled blocks behind.
pub fn effective_eps1(eps1: f64, n: usize) -> f64 {
    eps1.max(4.0 * (n as f64).sqrt() * EPS)
}

/// Intermediate state exposed for diagnostics and structural tests.
#[derive(Debug, Clone)]
pub struct NormalSchurTrace {
    pub clusters: Vec<SigmaCluster>,
    pub scenarios: Vec<Group2Scenario>,
    /// `||A Q1 - Q1 diag(c) - Q3 diag(sigma)||_F / ||A||_F` after cluster corrections.
    pub offdiag_mass: f64,
}

/// Real Schur form of a normal matrix; see the module docs.
pub fn normal_schur(a: &DenseMatrix, kp: &dyn KernelProvider, opts: &NormalSchurOptions) -> Result<BlockSchur> {
    normal_schur_traced(a, kp, opts).map(|(bs, _)| bs)
}

pub fn normal_schur_traced(
    a: &DenseMatrix,
    kp: &dyn KernelProvider,
    opts: &NormalSchurOptions,
) -> Result<(BlockSchur, NormalSchurTrace)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !opts.skip_check {
        let defect = normality_defect(a)?;
        if defect > opts.normality_tol {
            return Err(Error::NotNormal {
                defect,
                tol: opts.normality_tol,
            });
        }
    }
    let n = a.rows();
    let anorm = frobenius_norm(a);
    let eps1 = effective_eps1(opts.eps1, n);
    let skew = skew_schur_with_floor(&skew_part(a)?, kp, eps1, eps1 * anorm)?;
    let (p, r) = (skew.p(), skew.r);
    debug_assert_eq!(r % 2, n % 2);
    let sigma = skew.sigma;
    let mut q = skew.q_hat;

    // Rounding in A perturbs the singular values on the scale of A, not of
    // skew(A), so clusters are measured against the larger of the two.
    let smax = sigma.first().copied().unwrap_or(0.0);
    let sigma_tol = eps1 * smax.max(anorm / (n as f64).sqrt());
    let clusters = cluster_sigmas_abs(&sigma, sigma_tol);
    let mut scenarios = Vec::new();
    for (k, c) in clusters.iter().enumerate().filter(|(_, c)| c.m > 1) {
        let idx: Vec<usize> = c.indices().chain(c.indices().map(|j| p + r + j)).collect();
        let v = q.select_columns(&idx);
        let g2 = group2_subproblem(
            a,
            &v,
            c.value,
            kp,
            &Group2Options {
                tol_scn: opts.tol_scn,
                sigma_tol,
                path: opts.group2_path,
                seed: opts.seed.wrapping_add(k as u64),
            },
        )?;
        scenarios.push(g2.scenario);
        if g2.scenario != Group2Scenario::Scalar {
            q.scatter_columns(&idx, &matmul(v.view(), g2.r_block.view()));
        }
    }

    // Real parts of the pairs from the diagonal of Q1^T A Q1, with a residual
    // check that the 2x2 blocks decouple. A Q_r comes out of the same product.
    let mut aq1 = DenseMatrix::zeros(n, p + r);
    gemm_block(1.0, a.view(), q.columns(0..p + r), 0.0, &mut aq1, 0, 0);
    let mut cos_part = vec![0.0; p];
    let mut mass2 = 0.0;
    for i in 0..n {
        let (qi, ai) = (q.row(i), aq1.row(i));
        for j in 0..p {
            cos_part[j] += qi[j] * ai[j];
        }
    }
    for i in 0..n {
        let (qi, ai) = (q.row(i), aq1.row(i));
        for j in 0..p {
            let e = ai[j] - qi[j] * cos_part[j] - qi[p + r + j] * sigma[j];
            mass2 += e * e;
        }
    }
    let offdiag_mass = if anorm > 0.0 { mass2.sqrt() / anorm } else { 0.0 };
    if offdiag_mass > opts.offdiag_tol {
        return Err(Error::OffDiagonalMass {
            mass: offdiag_mass,
            tol: opts.offdiag_tol,
        });
    }

    let q_r = q.columns(p..p + r).to_owned();
    let (r_breve, lambda_real) = real_block_evd_with_product(a, &q_r, &aq1.columns(p..p + r).to_owned(), kp)?;
    if r > 0 {
        let rotated = matmul(q_r.view(), r_breve.view());
        let cols: Vec<usize> = (p..p + r).collect();
        q.scatter_columns(&cols, &rotated);
    }

    let lambda = (0..p).map(|j| cos_part[j].hypot(sigma[j])).collect();
    let theta = (0..p).map(|j| sigma[j].atan2(cos_part[j])).collect();
    let bs = BlockSchur::new(q, lambda, theta, lambda_real)?;
    Ok((
        bs,
        NormalSchurTrace {
            clusters,
            scenarios,
            offdiag_mass,
        },
    ))
}
