//! Configuration files, experiment runners and CSV output for `adelic-core`.

pub mod config;
pub mod experiments;

pub use config::ExperimentConfig;
pub use experiments::{run_convergence, run_measure, run_quasitile, run_snf, run_spectral, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },
    #[error(transparent)]
    Core(#[from] adelic_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
