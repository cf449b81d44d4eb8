//! Experiment drivers behind the `nrmschur-bench` binary. Every command
//! returns its table as rows; the binary only parses flags and writes CSV.

pub mod accuracy;
pub mod config;
pub mod error;
pub mod ffdiag;
pub mod gen;
pub mod karcher_study;
pub mod output;
pub mod perf;
pub mod timing;

pub use accuracy::cmd_accuracy;
pub use config::RunConfig;
pub use error::{BenchError, BenchResult};
pub use ffdiag::cmd_fundamental_formula;
pub use gen::cmd_gen;
pub use karcher_study::cmd_karcher;
pub use perf::{cmd_alpha_sweep, cmd_bench};
