//! `tweetiment`: batch tweet sentiment tool.
//!
//! Exit status: 0 on success, 2 for usage errors, 3 for data errors and 4
//! for unreadable model files.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tweetiment::features::FeatureMode;
use tweetiment::models::TrainerAlgorithm;

#[derive(Parser, Debug)]
#[command(name = "tweetiment", version, about = "Tweet sentiment classification toolkit")]
pub struct Cli {
    /// `key = value` config file; falls back to $TWEETIMENT_CONFIG
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Positive and negative emoticon tables replacing the built-in ones
    #[arg(long, global = true, num_args = 2, value_names = ["POS", "NEG"])]
    pub emoticons: Option<Vec<PathBuf>>,

    /// Accept rows with unquoted commas inside the tweet text
    #[arg(long, global = true)]
    pub lenient: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normalize a raw CSV into `tweet_id[,sentiment],tokens` rows
    Preprocess(PreprocessArgs),
    /// Corpus statistics and rank-frequency tables
    Stats(StatsArgs),
    /// Train a model and write it to a file
    Train(TrainArgs),
    /// Predict sentiments for an unlabeled CSV
    Predict(PredictArgs),
    /// Evaluate a model on a labeled CSV
    Eval(EvalArgs),
    /// Shuffle and split a dataset into train and test files
    Split(SplitArgs),
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Input CSV (`-` for stdin)
    #[arg(short, long)]
    pub input: PathBuf,

    /// Input was already written by `preprocess`
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    /// Raw CSV (`-` for stdin)
    #[arg(short, long)]
    pub input: PathBuf,
    /// Output CSV; stdout when omitted
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Input has no sentiment column
    #[arg(long)]
    pub unlabeled: bool,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Input has no sentiment column
    #[arg(long)]
    pub unlabeled: bool,
    /// Also write the statistics table as CSV
    #[arg(long, value_name = "PATH")]
    pub report_csv: Option<PathBuf>,
    /// Write the unigram rank-frequency table (`rank,term,count`)
    #[arg(long, value_name = "PATH")]
    pub unigram_ranks: Option<PathBuf>,
    /// Write the bigram rank-frequency table (`rank,term,count`)
    #[arg(long, value_name = "PATH")]
    pub bigram_ranks: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Nb,
    Maxent,
    Baseline,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Where to write the model file
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    /// presence or frequency
    #[arg(long)]
    pub features: Option<FeatureMode>,
    /// Unigram vocabulary budget
    #[arg(long)]
    pub unigrams: Option<usize>,
    /// Bigram vocabulary budget (0 disables bigrams)
    #[arg(long)]
    pub bigrams: Option<usize>,
    /// Maxent trainer: gis or iis
    #[arg(long)]
    pub trainer: Option<TrainerAlgorithm>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Stop when the relative log-likelihood gain drops below this
    #[arg(long)]
    pub tol: Option<f64>,
    /// Naive Bayes smoothing constant
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Opinion lexicon for `--model baseline`
    #[arg(long, num_args = 2, value_names = ["POS", "NEG"])]
    pub lexicon: Option<Vec<PathBuf>>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Model file written by `train`
    #[arg(short, long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: InputArgs,
    /// Prediction CSV; stdout when omitted
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Model file written by `train`
    #[arg(short, long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: InputArgs,
    /// Also score the lexicon-counting baseline on the same data
    #[arg(long, num_args = 2, value_names = ["POS", "NEG"])]
    pub baseline_lexicon: Option<Vec<PathBuf>>,
    /// Also write the report as CSV
    #[arg(long, value_name = "PATH")]
    pub report_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Raw CSV (`-` for stdin)
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Fraction of records sent to the training file
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Input has no sentiment column
    #[arg(long)]
    pub unlabeled: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors and 0 for --help / --version
        Err(err) => err.exit(),
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("tweetiment: {err}");
            err.exit_code()
        }
    }
}
