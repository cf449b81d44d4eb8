//! Accuracy table: residual, orthogonality and the discrepancy of the
//! symmetric part against the general real Schur baseline.

use nrmschur::dense::{orthogonality_defect, schur_residual, BlockSchur};
use nrmschur::kernels::KernelProvider;
use nrmschur::normal_schur::normal_schur;
use nrmschur::sampling::{random_normal_matrix, Scenario, SpectrumSpec};
use nrmschur::schur_backend::block_schur_from_real_schur;

use crate::config::RunConfig;
use crate::error::BenchResult;
use crate::output::{fmt_float, CsvRow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub residual: f64,
    pub orthogonality: f64,
    pub sym_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub n: usize,
    pub scenario: Scenario,
    pub trials: usize,
    pub residual: f64,
    pub orthogonality: f64,
    pub sym_discrepancy: f64,
}

impl CsvRow for AccuracyRow {
    fn header() -> &'static [&'static str] {
        &["n", "scenario", "trials", "residual", "orthogonality", "sym_discrepancy"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.scenario.to_string(),
            self.trials.to_string(),
            fmt_float(self.residual),
            fmt_float(self.orthogonality),
            fmt_float(self.sym_discrepancy),
        ]
    }
}

/// Diagonal of `sym(S)`: each pair's real part twice, then the real eigenvalues.
fn sym_diagonal(bs: &BlockSchur) -> Vec<f64> {
    let re = bs.real_parts();
    let mut d: Vec<f64> = re.iter().chain(re.iter()).chain(bs.lambda_real.iter()).copied().collect();
    d.sort_by(f64::total_cmp);
    d
}

/// `||sym(S_b - S)||_F / ||sym(S_b)||_F` over sorted diagonals.
pub fn sym_discrepancy(ours: &BlockSchur, baseline: &BlockSchur) -> f64 {
    let (a, b) = (sym_diagonal(ours), sym_diagonal(baseline));
    let num = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

pub fn trial_metrics(
    spec: &SpectrumSpec,
    cfg: &RunConfig,
    kp: &dyn KernelProvider,
    trial: usize,
) -> BenchResult<TrialMetrics> {
    let mut rng = cfg.trial_rng(spec.n, trial);
    let (a, _) = random_normal_matrix(spec, &mut rng)?;
    let bs = normal_schur(&a, kp, &cfg.schur_options(false))?;
    let baseline = block_schur_from_real_schur(&kp.general_real_schur(&a)?)?;
    Ok(TrialMetrics {
        residual: schur_residual(&a, &bs.q, &bs.schur_matrix()),
        orthogonality: orthogonality_defect(&bs.q),
        sym_discrepancy: sym_discrepancy(&bs, &baseline),
    })
}

/// Means of the three metrics over `trials` matrices per size.
pub fn cmd_accuracy(
    sizes: &[usize],
    scenario: Scenario,
    trials: usize,
    cfg: &RunConfig,
    parallel: bool,
) -> BenchResult<Vec<AccuracyRow>> {
    let kp = cfg.provider()?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let spec = SpectrumSpec { n, scenario };
        let metrics = if parallel {
            run_parallel(trials, |t| trial_metrics(&spec, cfg, kp.as_ref(), t))?
        } else {
            (0..trials)
                .map(|t| trial_metrics(&spec, cfg, kp.as_ref(), t))
                .collect::<BenchResult<Vec<_>>>()?
        };
        let k = metrics.len().max(1) as f64;
        rows.push(AccuracyRow {
            n,
            scenario,
            trials,
            residual: metrics.iter().map(|m| m.residual).sum::<f64>() / k,
            orthogonality: metrics.iter().map(|m| m.orthogonality).sum::<f64>() / k,
            sym_discrepancy: metrics.iter().map(|m| m.sym_discrepancy).sum::<f64>() / k,
        });
    }
    Ok(rows)
}

/// Runs `f(0..count)` on scoped threads; output order matches the input.
fn run_parallel<T: Send>(count: usize, f: impl Fn(usize) -> BenchResult<T> + Sync) -> BenchResult<Vec<T>> {
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(count.max(1));
    let f = &f;
    let chunks: Vec<BenchResult<Vec<T>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| s.spawn(move || (w..count).step_by(workers).map(f).collect::<BenchResult<Vec<T>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial thread panicked")).collect()
    });
    let mut per_worker: Vec<std::vec::IntoIter<T>> = Vec::with_capacity(workers);
    for c in chunks {
        per_worker.push(c?.into_iter());
    }
    let mut out = Vec::with_capacity(count);
    for t in 0..count {
        out.push(per_worker[t % workers].next().expect("missing trial result"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_serial() {
        let cfg = RunConfig {
            kernels: Some("reference".into()),
            seed: 3,
            ..Default::default()
        };
        let a = cmd_accuracy(&[6, 9], Scenario::UniformSo, 5, &cfg, false).unwrap();
        let b = cmd_accuracy(&[6, 9], Scenario::UniformSo, 5, &cfg, true).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.residual < 1e-14 && r.orthogonality < 1e-14));
    }

    #[test]
    fn discrepancy_of_identical_forms_is_zero() {
        let bs = BlockSchur::new(nrmschur::DenseMatrix::identity(3), vec![2.0], vec![1.0], vec![-0.5]).unwrap();
        assert_eq!(sym_discrepancy(&bs, &bs), 0.0);
    }
}
