//! Command-line front end for `ncvar`: the built-in suite, scenario checks
//! and Monte Carlo experiments.
//!
//! Exit codes: 0 when every check holds or is not applicable, 1 when any
//! check is violated or fails to evaluate, 2 for usage, parse and input
//! errors.

pub mod error;
pub mod output;
pub mod scenario;
pub mod suite;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ncvar::Tolerances;

pub use error::CliError;
use output::{summarize, write_records, Format, Record};
use scenario::{load, run_checks, run_experiments, CheckScenario, McScenario};
use suite::{run_suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ncvar",
    version,
    about = "Check noncommutative variance inequalities on finite matrix algebras"
)]
#[command(
    after_help = "Set NCVAR_THREADS to cap the number of worker threads.\nExit codes: 0 all pass, 1 a check failed, 2 usage or input error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write reports here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value = "ndjson", global = true)]
    pub format: Format,
    /// Override every check tolerance (inequality slack and identity errors).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the hand-derived cases and a seeded fuzz campaign.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        fuzz_count: usize,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=8))]
        max_factors: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=16))]
        max_local_dim: u64,
        /// Upper bound on the total dimension of fuzz shapes.
        #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..=4096))]
        max_total_dim: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the checks listed in a scenario file.
    Check {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the Monte Carlo experiments of a scenario file.
    Mc {
        file: PathBuf,
        /// Override the sample count of every experiment.
        #[arg(long)]
        n_samples: Option<usize>,
        /// Override the seed of every experiment.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn tolerances(tol: Option<f64>) -> Result<Tolerances, CliError> {
    match tol {
        None => Ok(Tolerances::default()),
        Some(t) if t.is_finite() && t > 0.0 => Ok(Tolerances::with_check_tol(t)),
        Some(t) => Err(CliError::Usage(format!("--tol must be positive and finite, got {t}"))),
    }
}

fn emit(records: &[Record], output: &OutputArgs) -> Result<i32, CliError> {
    let io_err = |path: PathBuf| move |source| CliError::Io { path, source };
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path.clone()))?;
            let mut w = BufWriter::new(file);
            write_records(records, output.format, &mut w).map_err(io_err(path.clone()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_records(records, output.format, &mut w).map_err(io_err("<stdout>".into()))?;
        }
    }
    let (total, _) = summarize(records);
    let mut err = io::stderr().lock();
    let _ = writeln!(
        err,
        "{} reports: {} hold, {} not applicable, {} violated, {} errors",
        total.total, total.holds, total.not_applicable, total.violated, total.errors
    );
    for r in records.iter().filter(|r| !r.is_ok()) {
        let _ = writeln!(err, "FAILED {} {}", r.scenario, r.name());
    }
    Ok(if total.all_ok() { EXIT_OK } else { EXIT_FAILED })
}

/// Executes a parsed command and returns the exit code.
pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Suite {
            seed,
            fuzz_count,
            max_factors,
            max_local_dim,
            max_total_dim,
            output,
        } => {
            let opts = SuiteOptions {
                seed,
                fuzz_count,
                max_factors: max_factors as usize,
                max_local_dim: max_local_dim as usize,
                max_total_dim: max_total_dim as usize,
                tol: tolerances(output.tol)?,
            };
            emit(&run_suite(&opts), &output)
        }
        Command::Check { file, output } => {
            let tol = tolerances(output.tol)?;
            let sc: CheckScenario = load(&file)?;
            emit(&run_checks(&sc, &tol)?, &output)
        }
        Command::Mc {
            file,
            n_samples,
            seed,
            output,
        } => {
            if output.tol.is_some() {
                return Err(CliError::Usage(
                    "--tol does not apply to mc; the criterion is 3 standard errors".into(),
                ));
            }
            let sc: McScenario = load(&file)?;
            emit(&run_experiments(&sc, n_samples, seed)?, &output)
        }
    }
}

/// Parses `args` (including the program name) and runs; never panics on bad
/// input.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Caps the global thread pool from `NCVAR_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NCVAR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("NCVAR_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}
