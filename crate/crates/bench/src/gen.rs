use std::path::{Path, PathBuf};

use nrmschur::io::{write_matrix, write_schur};
use nrmschur::sampling::{random_normal_matrix, Scenario, SpectrumSpec};

use crate::config::RunConfig;
use crate::error::BenchResult;

/// Path of the ground-truth file written next to a generated matrix.
pub fn sidecar_path(matrix: &Path) -> PathBuf {
    let mut name = matrix.as_os_str().to_owned();
    name.push(".truth");
    PathBuf::from(name)
}

/// Writes a normal matrix and its exact Schur form; returns both paths.
pub fn cmd_gen(n: usize, scenario: Scenario, cfg: &RunConfig, out: &Path) -> BenchResult<(PathBuf, PathBuf)> {
    let mut rng = cfg.trial_rng(n, 0);
    let (a, truth) = random_normal_matrix(&SpectrumSpec { n, scenario }, &mut rng)?;
    write_matrix(out, &a)?;
    let side = sidecar_path(out);
    write_schur(&side, &truth)?;
    Ok((out.to_path_buf(), side))
}
