//! Karcher (Riemannian) mean of rotations by gradient descent with unit step.

use crate::dense::{determinant, frobenius_norm, matmul, orthogonality_defect, skew_part, tol_orth, DenseMatrix};
use crate::error::{Error, Result};
use crate::schur_backend::SchurBackend;
use crate::spectral::{expm_skew_with, logm_with};

/// Largest accepted `|det - 1|` for a sample.
pub const DET_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct KarcherProblem {
    samples: Vec<DenseMatrix>,
    pub max_iters: usize,
    /// Stop once the gradient Frobenius norm drops below this.
    pub tol_grad: f64,
}

impl KarcherProblem {
    /// Checks that every sample is a rotation of a common size.
    pub fn new(samples: Vec<DenseMatrix>, max_iters: usize) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidParameter("at least one sample is required".into()))?;
        let n = first.rows();
        for (index, q) in samples.iter().enumerate() {
            if q.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "sample {index} is {}x{}, expected {n}x{n}",
                    q.rows(),
                    q.cols()
                )));
            }
            let orth = orthogonality_defect(q);
            let det = determinant(q)?;
            if orth > tol_orth(n) || (det - 1.0).abs() > DET_TOL {
                return Err(Error::NotSpecialOrthogonal { index, orth, det });
            }
        }
        Ok(Self {
            samples,
            max_iters,
            tol_grad: 1e-12,
        })
    }

    pub fn samples(&self) -> &[DenseMatrix] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples[0].rows()
    }
}

#[derive(Debug, Clone)]
pub struct KarcherResult {
    pub mean: DenseMatrix,
    /// Gradient norm at the start of every iteration.
    pub history: Vec<f64>,
}

/// Mean gradient `(1/N) sum log(Q_i^T X)`.
fn gradient(problem: &KarcherProblem, x: &DenseMatrix, backend: &dyn SchurBackend) -> Result<DenseMatrix> {
    let n = problem.n();
    let mut g = DenseMatrix::zeros(n, n);
    for (index, q) in problem.samples.iter().enumerate() {
        let l = logm_with(&matmul(q.t(), x.view()), backend).map_err(|e| Error::SampleLog {
            index,
            source: Box::new(e),
        })?;
        g = g.add(&l);
    }
    Ok(g.scale(1.0 / problem.samples.len() as f64))
}

/// Iterates `X <- X exp(-grad)` from the first sample.
pub fn karcher_mean(problem: &KarcherProblem, backend: &dyn SchurBackend) -> Result<KarcherResult> {
    let mut x = problem.samples[0].clone();
    let mut history = Vec::with_capacity(problem.max_iters);
    for _ in 0..problem.max_iters {
        let g = skew_part(&gradient(problem, &x, backend)?)?;
        let norm = frobenius_norm(&g);
        history.push(norm);
        if norm < problem.tol_grad {
            break;
        }
        x = matmul(x.view(), expm_skew_with(&g.scale(-1.0), backend)?.view());
    }
    Ok(KarcherResult { mean: x, history })
}
