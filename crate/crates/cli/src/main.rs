//! `bbdep`: train, parse, evaluate, compare and sample dependency models.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 failed internal
//! check (an oracle mismatch).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "bbdep",
    version,
    about = "Generative dependency parsing over bare-bones structures"
)]
pub struct Cli {
    /// TOML file with a table per subcommand; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    show_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model from an annotated corpus.
    Train(TrainArgs),
    /// Tag and parse a corpus with a trained model.
    Parse(ParseArgs),
    /// Score system output against gold.
    Eval(EvalArgs),
    /// Paired significance test between two systems.
    Compare(CompareArgs),
    /// Sample an annotated corpus from a grammar or a trained model C.
    Synth(SynthArgs),
}

#[derive(Debug, Default, Args)]
pub struct TrainArgs {
    /// A, B1, B2, B3, C, C' (or CNOLEX), CDIST, D, X or BASELINE [default: C]
    #[arg(long)]
    pub model: Option<String>,
    /// Distance-augmented link factor (model D only).
    #[arg(long)]
    pub distance: bool,
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    /// Corpus whose vocabulary is never attenuated (usually the test input).
    #[arg(long)]
    pub protect: Option<PathBuf>,
    /// Train on the raw forms.
    #[arg(long)]
    pub no_attenuate: bool,
    #[arg(long)]
    pub base_add_num: Option<f64>,
    #[arg(long)]
    pub base_add_den: Option<f64>,
    #[arg(long)]
    pub backoff_weight: Option<f64>,
    /// Return the raw relative frequency once a condition count reaches this.
    #[arg(long)]
    pub skip_threshold: Option<u64>,
}

#[derive(Debug, Default, Args)]
pub struct ParseArgs {
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// BASELINE parses with the modal-tag and modal-offset rules stored in
    /// the model file.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    /// Exact search (the default).
    #[arg(long, conflicts_with = "beam")]
    pub exact: bool,
    /// Keep at most W items per chart cell and item type.
    #[arg(long, value_name = "W")]
    pub beam: Option<usize>,
    /// Corpus whose tags restrict each word's candidates.
    #[arg(long)]
    pub true_tags: Option<PathBuf>,
    /// Brute-force sentences of at most N words and fail on any disagreement.
    #[arg(long, value_name = "N")]
    pub oracle_check: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Enables unknown-word columns and the search-error column.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Random coloring passes [default: 10000]
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Args)]
pub struct SynthArgs {
    /// TOML grammar.
    #[arg(long, conflicts_with = "model_file")]
    pub grammar: Option<PathBuf>,
    /// Trained model C or C'.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    #[arg(long)]
    pub sentences: Option<usize>,
    #[arg(long)]
    pub length_cap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub section_size: Option<usize>,
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
}

/// How a run failed, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
    Check(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let Some(cmd) = cli.command else {
        if cli.show_config {
            print!("{}", RunConfig::all_defaults());
            return Ok(());
        }
        return Err(Failure::Usage("a subcommand is required; see --help".into()));
    };
    let cfg = RunConfig::resolve(&cmd, &file);
    if cli.show_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    commands::run(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(3)
        }
    }
}
