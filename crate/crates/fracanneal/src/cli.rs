//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Command;
use crate::error::{Category, CliError, CliResult};
use crate::exec::Rayon;
use crate::output::{write_manifest, Staging};
use crate::scenario::{Run, Scenario};

#[derive(Debug, Parser)]
#[command(name = "fracanneal", version, about = "Fractional annealing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Sample exact and ε-approximate fBm paths (fbm_paths.csv).
    SimulateFbm(Common),
    /// Integrate the annealing SDE (anneal_paths.csv, anneal_summary.csv).
    Anneal(Common),
    /// Steady state, linearisation and linear solutions (linear_model.csv, linear_paths.csv).
    Linearize(Common),
    /// ε-rate fits and the Gronwall bound check (rate_report.csv, gronwall_report.csv).
    Converge(Common),
    /// Monte Carlo covariance against the oracles (covariance.csv).
    Covcheck(Common),
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario's master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    threads: Option<usize>,
}

/// Parses `args`, runs the command and returns the files written,
/// manifest last.
pub fn run<I, T>(args: I) -> CliResult<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        let text = e.to_string();
        let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
        CliError::new(Category::Usage, first)
    })?;
    let (cmd, common) = match cli.command {
        Sub::SimulateFbm(c) => (Command::SimulateFbm, c),
        Sub::Anneal(c) => (Command::Anneal, c),
        Sub::Linearize(c) => (Command::Linearize, c),
        Sub::Converge(c) => (Command::Converge, c),
        Sub::Covcheck(c) => (Command::Covcheck, c),
    };
    if common.threads == Some(0) {
        return Err(CliError::new(Category::Usage, "--threads must be at least 1"));
    }

    // all validation happens before the output directory is touched
    let run = Run::new(Scenario::load(&common.config)?, common.seed)?;
    cmd.check(&run)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::new(Category::Usage, format!("thread pool: {e}")))?;
    let threads = pool.current_num_threads();

    let mut staging = Staging::new(&common.out)?;
    pool.install(|| cmd.execute(&run, &mut staging, &Rayon))?;
    let mut files = staging.commit()?;
    let manifest = write_manifest(&common.out, cmd.name(), &run, threads, &files)?;
    files.push(manifest);
    Ok(files)
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    // help and version go to stdout with a zero exit code
    if let Err(e) = Cli::try_parse_from(&args) {
        if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
        ) {
            print!("{e}");
            return if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                2
            } else {
                0
            };
        }
    }
    match run(args) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
