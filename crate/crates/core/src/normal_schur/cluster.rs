//! Grouping of numerically equal singular values.

/// A run of singular values `sigma[start..start + m]` treated as equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaCluster {
    pub start: usize,
    pub m: usize,
    /// The first member of the run.
    pub value: f64,
}

impl SigmaCluster {
    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.m
    }
}

/// Greedy left-to-right clustering of a descending sequence: a value joins the
/// current cluster iff it lies within `eps1 * sigma[0]` of the cluster's first
/// member.
pub fn cluster_sigmas(sigma: &[f64], eps1: f64) -> Vec<SigmaCluster> {
    cluster_sigmas_abs(sigma, eps1 * sigma.first().copied().unwrap_or(0.0))
}

/// As [`cluster_sigmas`] with an absolute tolerance.
pub fn cluster_sigmas_abs(sigma: &[f64], tol: f64) -> Vec<SigmaCluster> {
    let mut out: Vec<SigmaCluster> = Vec::new();
    for (i, &s) in sigma.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (c.value - s).abs() < tol || c.value == s => c.m += 1,
            _ => out.push(SigmaCluster { start: i, m: 1, value: s }),
        }
    }
    out
}
