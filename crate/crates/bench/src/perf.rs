//! Timing studies: normal_schur against the Hessenberg and general real
//! Schur baselines, and the sweep over the proportion of real eigenvalues.

use nrmschur::kernels::hessenberg_with_assembly;
use nrmschur::normal_schur::normal_schur;
use nrmschur::sampling::{random_normal_matrix, Scenario, SpectrumSpec};
use nrmschur::DenseMatrix;

use crate::config::RunConfig;
use crate::error::{BenchError, BenchResult};
use crate::output::{fmt_float, CsvRow};
use crate::timing::{seconds, Timing};

pub const METHODS: [&str; 3] = ["nrmschur", "hessenberg", "gees"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub scenario: Scenario,
    pub method: &'static str,
    pub timing: Option<Timing>,
    /// Failure reason when `timing` is missing.
    pub note: String,
}

impl CsvRow for BenchRow {
    fn header() -> &'static [&'static str] {
        &["n", "scenario", "method", "median_seconds", "mean_seconds", "std_seconds", "runs", "note"]
    }

    fn fields(&self) -> Vec<String> {
        let t = self.timing.map_or([f64::NAN; 3], |t| [t.median, t.mean, t.std]);
        vec![
            self.n.to_string(),
            self.scenario.to_string(),
            self.method.to_string(),
            fmt_float(t[0]),
            fmt_float(t[1]),
            fmt_float(t[2]),
            self.timing.map_or(0, |t| t.runs).to_string(),
            self.note.clone(),
        ]
    }
}

fn matrices(n: usize, scenario: Scenario, count: usize, cfg: &RunConfig, offset: usize) -> BenchResult<Vec<DenseMatrix>> {
    (0..count)
        .map(|t| {
            let mut rng = cfg.trial_rng(n, offset + t);
            Ok(random_normal_matrix(&SpectrumSpec { n, scenario }, &mut rng)?.0)
        })
        .collect()
}

/// Median wall-clock time of each method over `trials` matrices per size.
/// Methods are interleaved per matrix so that slow drifts hit all equally;
/// each method gets one untimed warmup call.
pub fn cmd_bench(sizes: &[usize], scenario: Scenario, trials: usize, cfg: &RunConfig) -> BenchResult<Vec<BenchRow>> {
    let kp = cfg.provider()?;
    let opts = cfg.schur_options(true);
    let run = |method: &str, a: &DenseMatrix| -> BenchResult<()> {
        match method {
            "nrmschur" => {
                normal_schur(a, kp.as_ref(), &opts)?;
            }
            "hessenberg" => {
                hessenberg_with_assembly(a);
            }
            _ => {
                kp.general_real_schur(a)?;
            }
        }
        Ok(())
    };
    let mut rows = Vec::new();
    for &n in sizes {
        let mats = matrices(n, scenario, trials.max(1), cfg, 0)?;
        let mut samples: Vec<Vec<f64>> = vec![Vec::new(); METHODS.len()];
        let mut notes: Vec<Option<String>> = vec![None; METHODS.len()];
        for (m, method) in METHODS.iter().enumerate() {
            if let Err(e) = run(method, &mats[0]) {
                notes[m] = Some(e.to_string());
            }
        }
        for a in &mats {
            for (m, method) in METHODS.iter().enumerate() {
                if notes[m].is_some() {
                    continue;
                }
                let (res, t) = seconds(|| run(method, a));
                match res {
                    Ok(()) => samples[m].push(t),
                    Err(e) => notes[m] = Some(e.to_string()),
                }
            }
        }
        for (m, method) in METHODS.iter().enumerate() {
            let note = notes[m].take();
            rows.push(BenchRow {
                n,
                scenario,
                method,
                timing: note.is_none().then(|| Timing::from_samples(&samples[m])),
                note: note.unwrap_or_default(),
            });
        }
    }
    Ok(rows)
}

/// Flop-count model `8/3 a^3 + 5 a^2 - a + 14/3` (in units of `n^3`).
pub fn alpha_polynomial(alpha: f64) -> f64 {
    8.0 / 3.0 * alpha.powi(3) + 5.0 * alpha * alpha - alpha + 14.0 / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRow {
    pub n: usize,
    pub alpha: f64,
    pub timing: Timing,
    /// Median over rounds of this alpha's time over the smallest alpha's
    /// time in the same round; insensitive to drift between rounds.
    pub paired_ratio: f64,
    pub polynomial: f64,
    /// Polynomial rescaled to the measured time at the smallest alpha.
    pub polynomial_scaled: f64,
}

impl CsvRow for AlphaRow {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "alpha",
            "median_seconds",
            "mean_seconds",
            "std_seconds",
            "paired_ratio",
            "polynomial",
            "polynomial_scaled",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_float(self.alpha),
            fmt_float(self.timing.median),
            fmt_float(self.timing.mean),
            fmt_float(self.timing.std),
            fmt_float(self.paired_ratio),
            fmt_float(self.polynomial),
            fmt_float(self.polynomial_scaled),
        ]
    }
}

fn median_ratio(num: &[f64], den: &[f64]) -> f64 {
    let ratios: Vec<f64> = num.iter().zip(den).map(|(a, b)| a / b).collect();
    Timing::from_samples(&ratios).median
}

/// Times normal_schur on `alpha_mix` matrices. Every round visits all alphas
/// on fresh matrices, so drift is shared across the grid.
pub fn cmd_alpha_sweep(n: usize, alphas: &[f64], trials: usize, cfg: &RunConfig) -> BenchResult<Vec<AlphaRow>> {
    if alphas.is_empty() {
        return Err(BenchError::Argument("alpha grid is empty".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(BenchError::Argument(format!("alpha {a} outside [0, 1]")));
    }
    let kp = cfg.provider()?;
    let opts = cfg.schur_options(true);
    let trials = trials.max(1);
    let mut mats = Vec::with_capacity(alphas.len());
    for (k, &alpha) in alphas.iter().enumerate() {
        mats.push(matrices(n, Scenario::AlphaMix(alpha), trials, cfg, k * trials)?);
    }
    normal_schur(&mats[0][0], kp.as_ref(), &opts)?;
    let mut samples = vec![Vec::with_capacity(trials); alphas.len()];
    for t in 0..trials {
        for (k, set) in mats.iter().enumerate() {
            let (res, secs) = seconds(|| normal_schur(&set[t], kp.as_ref(), &opts));
            res?;
            samples[k].push(secs);
        }
    }
    let timings: Vec<Timing> = samples.iter().map(|s| Timing::from_samples(s)).collect();
    let k0 = (0..alphas.len()).min_by(|&a, &b| alphas[a].total_cmp(&alphas[b])).unwrap_or(0);
    let scale = timings[k0].median / alpha_polynomial(alphas[k0]);
    Ok(alphas
        .iter()
        .zip(timings)
        .enumerate()
        .map(|(k, (&alpha, timing))| AlphaRow {
            n,
            alpha,
            timing,
            paired_ratio: median_ratio(&samples[k], &samples[k0]),
            polynomial: alpha_polynomial(alpha),
            polynomial_scaled: scale * alpha_polynomial(alpha),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_landmarks() {
        assert!((alpha_polynomial(0.0) - 14.0 / 3.0).abs() < 1e-15);
        let amin = (33f64.sqrt() - 5.0) / 8.0;
        assert!((amin - 0.093).abs() < 1e-3);
        assert!((alpha_polynomial(amin) - 4.61).abs() < 1e-2);
        assert!(alpha_polynomial(amin) < alpha_polynomial(amin - 0.01));
        assert!(alpha_polynomial(amin) < alpha_polynomial(amin + 0.01));
    }

    #[test]
    fn smoke_rows_per_method() {
        let cfg = RunConfig::default();
        let rows = cmd_bench(&[10], Scenario::BestSo, 1, &cfg).unwrap();
        assert_eq!(rows.len(), METHODS.len());
        assert!(rows.iter().all(|r| r.timing.is_some() && r.note.is_empty()));
        let sweep = cmd_alpha_sweep(12, &[0.0, 1.0], 1, &cfg).unwrap();
        assert_eq!(sweep.len(), 2);
        assert_eq!(sweep[0].polynomial_scaled, sweep[0].timing.median);
        assert_eq!(sweep[0].paired_ratio, 1.0);
    }
}
