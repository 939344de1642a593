use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adelic_cli::{run_convergence, run_measure, run_quasitile, run_snf, run_spectral, CliError, ExperimentConfig, Report};
use adelic_core::Ring;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adelic", version, about = "Adelic measures, spectral moments and quasitilings on sofic samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure convergence table, one row per family and index.
    Converge(RunArgs),
    /// Spectral moments, gaps and zero-mass audits.
    Spectral(RunArgs),
    /// Quasitiling stage report.
    Quasitile(RunArgs),
    /// Smith normal form of a CSV matrix.
    Snf {
        matrix: PathBuf,
        /// Z or Z[i]; detected from the entries when omitted.
        #[arg(long)]
        ring: Option<String>,
    },
    /// Full measure of every configured family at one index.
    Measure {
        config: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    config: PathBuf,
    /// Output path; `-` for stdout. Defaults to the config's `output`, else stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)?;
    ExperimentConfig::parse(&text)
}

fn emit(text: &str, target: Option<&Path>) -> Result<(), CliError> {
    match target {
        Some(p) if p != Path::new("-") => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        _ => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let experiment = |args: &RunArgs, f: fn(&ExperimentConfig) -> Result<Report, CliError>| {
        let config = load(&args.config)?;
        let report = f(&config)?;
        emit(&report.csv, args.output.as_deref().or(config.output.as_deref()))?;
        Ok(report.audits_ok)
    };
    match &cli.command {
        Command::Converge(args) => experiment(args, run_convergence),
        Command::Spectral(args) => experiment(args, run_spectral),
        Command::Quasitile(args) => experiment(args, run_quasitile),
        Command::Snf { matrix, ring } => {
            let ring = ring.as_deref().map(str::parse::<Ring>).transpose()?;
            emit(&run_snf(&fs::read_to_string(matrix)?, ring)?, None)?;
            Ok(true)
        }
        Command::Measure { config, n } => {
            let report = run_measure(&load(config)?, *n)?;
            emit(&report.csv, None)?;
            Ok(report.audits_ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("audit failure: at least one check column is false");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
