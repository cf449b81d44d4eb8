use std::time::Instant;

/// Summary of repeated wall-clock measurements, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub median: f64,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
}

impl Timing {
    pub fn from_samples(samples: &[f64]) -> Self {
        assert!(!samples.is_empty(), "no timing samples");
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let k = sorted.len();
        let median = if k % 2 == 1 {
            sorted[k / 2]
        } else {
            0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
        };
        let mean = sorted.iter().sum::<f64>() / k as f64;
        let var = sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k.max(2).saturating_sub(1) as f64;
        Self {
            median,
            mean,
            std: var.sqrt(),
            runs: k,
        }
    }
}

pub fn seconds<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// One warmup call, then `f(k)` timed for every `k < runs`.
pub fn time_runs<E>(runs: usize, mut f: impl FnMut(usize) -> Result<(), E>) -> Result<Timing, E> {
    f(0)?;
    let mut samples = Vec::with_capacity(runs);
    for k in 0..runs.max(1) {
        let (res, t) = seconds(|| f(k));
        res?;
        samples.push(t);
    }
    Ok(Timing::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_statistics() {
        let t = Timing::from_samples(&[3.0, 1.0, 2.0, 10.0]);
        assert_eq!(t.median, 2.5);
        assert_eq!(t.mean, 4.0);
        assert!((t.std - (50.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(Timing::from_samples(&[5.0]).std, 0.0);
    }

    #[test]
    fn warmup_is_not_counted() {
        let mut calls = 0;
        let t = time_runs::<()>(3, |_| {
            calls += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!((calls, t.runs), (4, 3));
    }
}
