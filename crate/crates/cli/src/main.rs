use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use reflab::harness::{run_experiment, ConfigFile, Experiment};

#[derive(Parser)]
#[command(name = "reflab", version, about = "Refutation and agnostic learning experiments")]
struct Cli {
    #[command(subcommand)]
    experiment: Command,

    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for report.json and the CSV tables.
    #[arg(long, global = true, default_value = "reflab-out")]
    out: PathBuf,

    #[arg(long, global = true)]
    trials: Option<usize>,

    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Correlation refuter in both regimes.
    RefuteTest,
    /// ERM learner wrapped as a refuter.
    LearnerAsRefuter,
    /// Weak learner extracted from a refuter.
    WeakExtract,
    /// Rademacher complexity oracle.
    Rademacher,
    /// Refuter to weak learner to boosted learner, checked exactly.
    End2end,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::RefuteTest => Experiment::RefuteTest,
            Command::LearnerAsRefuter => Experiment::LearnerAsRefuter,
            Command::WeakExtract => Experiment::WeakExtract,
            Command::Rademacher => Experiment::Rademacher,
            Command::End2end => Experiment::End2end,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn run(cli: Cli) -> Result<bool> {
    let mut file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ConfigFile::from_toml(&text)?
        }
        None => ConfigFile::default(),
    };
    if cli.seed.is_some() {
        file.seed = cli.seed;
    }
    if cli.trials.is_some() {
        file.trials = cli.trials;
    }
    let cfg = file.resolve(Some(cli.experiment.into()))?;
    let run = run_experiment(&cfg);
    run.write(&cli.out).with_context(|| format!("writing {}", cli.out.display()))?;
    match cli.format {
        Format::Json => println!("{}", run.report.to_json()),
        Format::Csv => print!("{}", run.report.metrics_csv()),
    }
    if let Some(e) = &run.report.error {
        eprintln!("reflab: {} failed: {e}", cfg.experiment);
    }
    eprintln!("reflab: {} {} ({})", cfg.experiment, if run.report.verdict.pass { "PASS" } else { "FAIL" }, run.report.verdict.predicate);
    Ok(run.report.verdict.pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("reflab: {e:#}");
            ExitCode::from(2)
        }
    }
}
