use std::sync::Arc;

use nrmschur::kernels::{default_provider, provider, KernelProvider};
use nrmschur::normal_schur::{Group2Path, NormalSchurOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::BenchResult;

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Kernel provider name; `None` defers to the environment default.
    pub kernels: Option<String>,
    pub group2_path: Group2Path,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kernels: None,
            group2_path: Group2Path::Default,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn provider(&self) -> BenchResult<Arc<dyn KernelProvider>> {
        Ok(match &self.kernels {
            Some(name) => provider(name)?,
            None => default_provider()?,
        })
    }

    pub fn schur_options(&self, skip_check: bool) -> NormalSchurOptions {
        NormalSchurOptions {
            group2_path: self.group2_path,
            skip_check,
            ..Default::default()
        }
    }

    /// Independent stream per `(n, trial)`, so results do not depend on the
    /// order or thread in which trials run.
    pub fn trial_rng(&self, n: usize, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ((n as u64) << 32));
        rng.set_stream(trial as u64);
        rng
    }
}
