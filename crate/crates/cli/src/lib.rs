//! Command-line front end: argument parsing, configuration and corpus I/O.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;

use std::path::PathBuf;

use abex_core::metrics::DiversityMode;
use abex_core::smatch::{SimilarityMode, DEFAULT_RESTARTS};
use clap::{Parser, Subcommand, ValueEnum};

use commands::abstract_run::AbstractOptions;
use commands::smatch::SmatchOptions;
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "abex",
    version,
    about = "Abstract documents by editing and mixing their AMR graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and write it back with normalized single-line graphs.
    Parse {
        input: PathBuf,
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
    },
    /// Run the abstraction rounds and write one line per augmentation.
    Abstract {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(short, long, env = "ABEX_CONFIG")]
        config: Option<PathBuf>,
        /// Never mix graphs of two documents.
        #[arg(long)]
        no_mix: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rounds: Option<u64>,
    },
    /// Graft subtrees of each partner graph into the source graph at the same position.
    Mix {
        source: PathBuf,
        partner: PathBuf,
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
        /// Maximum number of grafts per pair.
        #[arg(short, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Similarity::F1)]
        similarity: Similarity,
    },
    /// Score graphs pairwise by position: `idA idB F P R F1`.
    Smatch {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
        /// Exhaustive search; fails on graphs with more than 8 variables.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Token and length diversity of augmentations against their sources.
    Metrics {
        original: PathBuf,
        augmented: PathBuf,
        /// Table output; the JSON report goes next to it with a `.json` suffix.
        #[arg(short, long)]
        output: PathBuf,
        /// Average new-token share per augmentation instead of pooling.
        #[arg(long)]
        per_augmentation: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Similarity {
    F1,
    RawF,
}

impl From<Similarity> for SimilarityMode {
    fn from(s: Similarity) -> Self {
        match s {
            Similarity::F1 => SimilarityMode::F1,
            Similarity::RawF => SimilarityMode::RawF,
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Parse { input, output } => commands::parse::run(&input, &output),
        Command::Abstract {
            input,
            output,
            config,
            no_mix,
            seed,
            rounds,
        } => commands::abstract_run::run(&AbstractOptions {
            input,
            output,
            config,
            no_mix,
            seed,
            rounds: rounds.map(|r| r as usize),
        }),
        Command::Mix {
            source,
            partner,
            output,
            k,
            similarity,
        } => commands::mix::run(&source, &partner, &output, k, similarity.into()),
        Command::Smatch {
            a,
            b,
            output,
            exact,
            restarts,
            seed,
        } => commands::smatch::run(&a, &b, &output, SmatchOptions { exact, restarts, seed }),
        Command::Metrics {
            original,
            augmented,
            output,
            per_augmentation,
        } => {
            let mode = if per_augmentation {
                DiversityMode::PerAugmentation
            } else {
                DiversityMode::Pooled
            };
            commands::metrics::run(&original, &augmented, &output, mode).map(|_| ())
        }
    }
}
