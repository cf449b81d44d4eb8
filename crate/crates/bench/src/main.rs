use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nrmschur::normal_schur::Group2Path;
use nrmschur::sampling::Scenario;
use nrmschur_bench::output::emit;
use nrmschur_bench::{
    cmd_accuracy, cmd_alpha_sweep, cmd_bench, cmd_fundamental_formula, cmd_gen, cmd_karcher, BenchError, BenchResult,
    RunConfig,
};

#[derive(Debug, Parser)]
#[command(name = "nrmschur-bench", version, about = "Timing and accuracy experiments for normal_schur")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Kernel provider (reference or native); defaults to $NRMSCHUR_KERNELS, then native.
    #[arg(long, global = true)]
    kernels: Option<String>,

    /// Solver for clusters of equal imaginary parts.
    #[arg(long = "group2-path", global = true, default_value = "default", value_parser = parse_group2)]
    group2_path: Group2Path,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file; CSV goes to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time normal_schur against Hessenberg reduction and general real Schur.
    Bench {
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [10, 34, 100, 334])]
        n: Vec<usize>,
        #[arg(long, default_value = "best_so", value_parser = parse_scenario)]
        scenario: Scenario,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Residual, orthogonality and symmetric-part discrepancy, averaged over trials.
    Accuracy {
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [10, 33, 100])]
        n: Vec<usize>,
        #[arg(long, default_value = "best_so", value_parser = parse_scenario)]
        scenario: Scenario,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Spread trials over all available cores.
        #[arg(long = "parallel-trials")]
        parallel_trials: bool,
    },
    /// Time normal_schur as the proportion of real eigenvalues varies.
    AlphaSweep {
        #[arg(long, default_value_t = 600)]
        n: usize,
        /// Comma-separated alphas; defaults to 0, 0.05, ..., 1.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        alphas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Karcher mean with both Schur backends.
    Karcher {
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [25, 100])]
        n: Vec<usize>,
        /// Number of rotations averaged.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [16])]
        samples: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Error of cos(theta) recovered from a perturbed sin(theta).
    Ffdiag {
        /// Comma-separated angles; defaults to 0, pi/4, pi/2.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        thetas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
    },
    /// Write a random normal matrix and its exact Schur form (`<out>.truth`).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "random_normal", value_parser = parse_scenario)]
        scenario: Scenario,
    },
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: nrmschur::Error| e.to_string())
}

fn parse_group2(s: &str) -> Result<Group2Path, String> {
    s.parse().map_err(|e: nrmschur::Error| e.to_string())
}

fn run(cli: Cli) -> BenchResult<()> {
    let Common {
        kernels,
        group2_path,
        seed,
        out,
    } = cli.common;
    let cfg = RunConfig {
        kernels,
        group2_path,
        seed,
    };
    // Fail on a bad provider name before any work.
    cfg.provider()?;
    let out = out.as_deref();
    match cli.command {
        Command::Bench { n, scenario, trials } => emit(&cmd_bench(&n, scenario, trials, &cfg)?, out),
        Command::Accuracy {
            n,
            scenario,
            trials,
            parallel_trials,
        } => emit(&cmd_accuracy(&n, scenario, trials, &cfg, parallel_trials)?, out),
        Command::AlphaSweep { n, alphas, trials } => {
            let alphas = alphas.unwrap_or_else(|| (0..=20).map(|k| k as f64 / 20.0).collect());
            emit(&cmd_alpha_sweep(n, &alphas, trials, &cfg)?, out)
        }
        Command::Karcher {
            n,
            samples,
            iters,
            trials,
        } => emit(&cmd_karcher(&n, &samples, iters, trials, &cfg)?, out),
        Command::Ffdiag { thetas, eps } => {
            let thetas = thetas.unwrap_or_else(|| vec![0.0, FRAC_PI_4, FRAC_PI_2]);
            emit(&cmd_fundamental_formula(&thetas, eps), out)
        }
        Command::Gen { n, scenario } => {
            let path = out.ok_or_else(|| BenchError::Argument("gen needs --out".into()))?;
            let (m, side) = cmd_gen(n, scenario, &cfg, path)?;
            eprintln!("wrote {} and {}", m.display(), side.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
