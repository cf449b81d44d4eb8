//! Karcher mean timing with the two Schur backends.

use nrmschur::dense::{determinant, frobenius_norm};
use nrmschur::karcher::{karcher_mean, KarcherProblem};
use nrmschur::sampling::{haar_orthogonal, rotation_near};
use nrmschur::schur_backend::schur_backend;
use nrmschur::DenseMatrix;
use rand::Rng;

use crate::config::RunConfig;
use crate::error::BenchResult;
use crate::output::{fmt_float, CsvRow};
use crate::timing::{seconds, Timing};

/// Largest rotation angle between a sample and the base point.
pub const SAMPLE_SPREAD: f64 = 0.5;

pub const BACKENDS: [&str; 2] = ["nrmschur", "gees"];

#[derive(Debug, Clone, PartialEq)]
pub struct KarcherRow {
    pub n: usize,
    pub samples: usize,
    pub backend: &'static str,
    pub iterations: usize,
    pub timing: Timing,
    pub final_gradient: f64,
    /// Baseline median over this backend's median.
    pub speedup: f64,
    /// `||X_nrmschur - X_gees||_F`.
    pub mean_gap: f64,
}

impl CsvRow for KarcherRow {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "samples",
            "backend",
            "iterations",
            "median_seconds",
            "mean_seconds",
            "final_gradient",
            "speedup",
            "mean_gap",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.samples.to_string(),
            self.backend.to_string(),
            self.iterations.to_string(),
            fmt_float(self.timing.median),
            fmt_float(self.timing.mean),
            fmt_float(self.final_gradient),
            fmt_float(self.speedup),
            fmt_float(self.mean_gap),
        ]
    }
}

/// `count` rotations within [`SAMPLE_SPREAD`] of a random base rotation.
pub fn concentrated_rotations<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> BenchResult<Vec<DenseMatrix>> {
    let mut base = haar_orthogonal(n, rng);
    if determinant(&base)? < 0.0 {
        for i in 0..n {
            base[(i, 0)] = -base[(i, 0)];
        }
    }
    (0..count)
        .map(|_| Ok(rotation_near(&base, SAMPLE_SPREAD, rng)?))
        .collect()
}

/// Runs exactly `iters` gradient steps per backend, `trials` times each.
pub fn cmd_karcher(
    sizes: &[usize],
    sample_counts: &[usize],
    iters: usize,
    trials: usize,
    cfg: &RunConfig,
) -> BenchResult<Vec<KarcherRow>> {
    let kp = cfg.provider()?;
    let mut rows = Vec::new();
    for &n in sizes {
        for &count in sample_counts {
            let mut rng = cfg.trial_rng(n, count);
            let mut problem = KarcherProblem::new(concentrated_rotations(n, count, &mut rng)?, iters)?;
            problem.tol_grad = 0.0;
            let mut results = Vec::with_capacity(BACKENDS.len());
            for name in BACKENDS {
                let backend = schur_backend(name, kp.clone(), cfg.schur_options(true))?;
                let mut samples = Vec::with_capacity(trials.max(1));
                let mut last = None;
                for _ in 0..trials.max(1) {
                    let (res, secs) = seconds(|| karcher_mean(&problem, backend.as_ref()));
                    last = Some(res?);
                    samples.push(secs);
                }
                results.push((name, Timing::from_samples(&samples), last.expect("at least one trial")));
            }
            let gap = frobenius_norm(&results[0].2.mean.sub(&results[1].2.mean));
            let baseline = results[1].1.median;
            for (backend, timing, res) in results {
                rows.push(KarcherRow {
                    n,
                    samples: count,
                    backend,
                    iterations: res.history.len(),
                    timing,
                    final_gradient: res.history.last().copied().unwrap_or(0.0),
                    speedup: baseline / timing.median,
                    mean_gap: gap,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_study_agrees() {
        let cfg = RunConfig {
            kernels: Some("reference".into()),
            ..Default::default()
        };
        let rows = cmd_karcher(&[6], &[4], 20, 1, &cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].mean_gap < 1e-10);
        assert_eq!(rows[1].speedup, 1.0);
        assert!(rows.iter().all(|r| r.iterations == 20));
    }
}
