use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "phonolint",
    version,
    about = "Flag phonotactically unusual forms in fieldwork wordlists"
)]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a wordlist for parse, tokenization and syllabification problems.
    Validate(ValidateArgs),
    /// Score every entry with one feature configuration and one detector.
    Score(ScoreArgs),
    /// Evaluate every configuration of a setup against gold labels.
    Grid(GridArgs),
    /// Write the synthetic gold-labeled wordlist.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Tab-separated wordlist with concept_id, variety_id and form columns.
    pub wordlist: PathBuf,

    /// Symbol table overriding the default multigraphs, marks and strip set.
    #[arg(long, value_name = "PATH")]
    pub symbols: Option<PathBuf>,

    /// Sonority scale overriding the default classes.
    #[arg(long, value_name = "PATH")]
    pub sonority: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Random seed for the isolation forest.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Neighborhood size for LOF.
    #[arg(long, value_name = "N", default_value_t = 20)]
    pub k: usize,

    /// Fit one model and one detector over all varieties instead of one per variety.
    #[arg(long)]
    pub pool: bool,

    /// Score each entry against models that exclude its own n-grams.
    #[arg(long)]
    pub loo: bool,

    /// Standardize every feature column before detection.
    #[arg(long)]
    pub zscore: bool,

    /// Aggregate each n-gram order separately instead of pooling the orders.
    #[arg(long)]
    pub per_order_agg: bool,

    /// Additive smoothing constant.
    #[arg(long, value_name = "K", default_value_t = 1.0)]
    pub smoothing: f64,

    /// Use joint n-gram probabilities instead of conditional ones.
    #[arg(long)]
    pub joint: bool,

    /// Pad words with start and end symbols (plain and boundary_phoneme only).
    #[arg(long)]
    pub padding: bool,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    /// character | syllable
    #[arg(long, default_value = "syllable")]
    pub setup: String,

    /// within_syllable | cross_boundary | boundary_phoneme | all (syllable setup only)
    #[arg(long)]
    pub analysis: Option<String>,

    /// 1 | 2 | 3 | 1+2 | 2+3 | 1+2+3
    #[arg(long, default_value = "2+3")]
    pub ngrams: String,

    /// sum | mean | min | max | all
    #[arg(long, default_value = "all")]
    pub agg: String,

    /// iforest | lof | ocsvm
    #[arg(long, default_value = "iforest")]
    pub algorithm: String,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    /// character | syllable
    #[arg(long, default_value = "syllable")]
    pub setup: String,

    /// Rows shown in the top table.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(long, default_value_t = 20)]
    pub varieties: usize,

    #[arg(long, default_value_t = 306)]
    pub concepts: usize,

    /// Share of each variety's entries replaced by a planted anomaly.
    #[arg(long, default_value_t = 0.05)]
    pub rate: f64,

    #[arg(long, default_value_t = phonolint_core::fixture::DEFAULT_SEED)]
    pub seed: u64,

    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
