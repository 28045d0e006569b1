use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sensefold::compress::CompressionLevel;
use sensefold::model::ModelConfig;

#[derive(Debug, Parser, Serialize)]
#[command(name = "sensefold", version, about = "Sense vocabulary compression and supervised WSD over WordNet 3.0")]
pub struct Cli {
    /// Worker threads for multi-model training and inference (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Build a sense mapping and print vocabulary statistics
    Compress(CompressArgs),
    /// Rewrite corpora with tags at a compression level
    Convert(ConvertArgs),
    /// Vocabulary statistics for WordNet and, optionally, corpora
    Stats(StatsArgs),
    /// Share of evaluation instances annotatable from a training vocabulary
    Coverage(CoverageArgs),
    /// Train one or more models
    Train(TrainArgs),
    /// Write sense predictions for a corpus
    Disambiguate(DisambiguateArgs),
    /// Score predictions, models or the first-sense baseline
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct WordNetArgs {
    /// WordNet 3.0 dict directory (data.noun, ..., index.sense)
    #[arg(long)]
    pub wordnet: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MappingArgs {
    /// Mapping file written by `compress`
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    /// Compression level; builds the mapping when no file is given
    #[arg(long)]
    pub level: Option<CompressionLevel>,
}

#[derive(Debug, Args, Serialize)]
pub struct CompressArgs {
    #[command(flatten)]
    pub wordnet: WordNetArgs,
    #[arg(long, default_value = "reduced")]
    pub level: CompressionLevel,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub wordnet: WordNetArgs,
    #[command(flatten)]
    pub mapping: MappingArgs,
    /// Input corpora, concatenated into the output in order
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    pub wordnet: WordNetArgs,
    #[command(flatten)]
    pub mapping: MappingArgs,
    /// Corpora whose tag vocabulary is reported
    #[arg(long)]
    pub corpus: Vec<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub wordnet: WordNetArgs,
    #[command(flatten)]
    pub mapping: MappingArgs,
    /// Training corpora
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// Evaluation corpora, each reported separately
    #[arg(long, required = true)]
    pub eval: Vec<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct HyperArgs {
    /// Training epochs (default 20)
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Word embedding size (default 100)
    #[arg(long)]
    pub embedding_dim: Option<usize>,
    /// Hidden layer size (default 256)
    #[arg(long)]
    pub hidden_dim: Option<usize>,
    /// Dropout rate after the hidden layer (default 0.5)
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Adam learning rate (default 1e-4)
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Sentences per mini-batch (default 100)
    #[arg(long)]
    pub batch: Option<usize>,
    /// Training truncation length in tokens (default 80)
    #[arg(long)]
    pub max_tokens: Option<usize>,
    /// Held-out dev sentences when no --dev is given (default 4000)
    #[arg(long)]
    pub dev_sentences: Option<usize>,
    /// Words seen fewer times become <unk> (default 1)
    #[arg(long)]
    pub min_word_count: Option<u64>,
}

impl HyperArgs {
    pub fn config(&self, seed: u64) -> ModelConfig {
        let d = ModelConfig::default();
        ModelConfig {
            embedding_dim: self.embedding_dim.unwrap_or(d.embedding_dim),
            hidden_dim: self.hidden_dim.unwrap_or(d.hidden_dim),
            dropout_rate: self.dropout.unwrap_or(d.dropout_rate),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            batch_sentences: self.batch.unwrap_or(d.batch_sentences),
            max_tokens_per_sentence: self.max_tokens.unwrap_or(d.max_tokens_per_sentence),
            epochs: self.epochs.unwrap_or(d.epochs),
            dev_sentences: self.dev_sentences.unwrap_or(d.dev_sentences),
            min_word_count: self.min_word_count.unwrap_or(d.min_word_count),
            seed,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub wordnet: WordNetArgs,
    #[command(flatten)]
    pub mapping: MappingArgs,
    /// Training corpora
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// Dev corpus; without it dev sentences are held out of training
    #[arg(long)]
    pub dev: Option<PathBuf>,
    /// Output directory for model files and training reports
    #[arg(long)]
    pub out: PathBuf,
    /// Number of models
    #[arg(long)]
    pub models: Option<usize>,
    /// Seed `N` (models get N, N+1, ...) or inclusive range `A..B`
    #[arg(long, default_value = "1")]
    pub seed: String,
    /// Pretrained word vectors, `word v1 ... vE` per line
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelSource {
    /// Model file (repeatable)
    #[arg(long)]
    pub model: Vec<PathBuf>,
    /// Directory whose `*.sfm` files are all used
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DisambiguateArgs {
    #[command(flatten)]
    pub wordnet: WordNetArgs,
    #[command(flatten)]
    pub mapping: MappingArgs,
    #[command(flatten)]
    pub models: ModelSource,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Predictions file, `instance_id<TAB>sense_key` per line
    #[arg(long)]
    pub out: PathBuf,
    /// Leave words without a known candidate tag unannotated
    #[arg(long)]
    pub no_backoff: bool,
    /// Annotate every word with WordNet senses, not only annotated instances
    #[arg(long)]
    pub all_words: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub wordnet: WordNetArgs,
    #[command(flatten)]
    pub mapping: MappingArgs,
    /// Gold corpora, each scored separately
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// Score a predictions file
    #[arg(long, conflicts_with_all = ["first_sense", "model", "model_dir"])]
    pub predictions: Option<PathBuf>,
    /// Score the first-sense baseline
    #[arg(long, conflicts_with_all = ["model", "model_dir"])]
    pub first_sense: bool,
    #[command(flatten)]
    pub models: ModelSource,
    /// Score the geometric-mean ensemble of the models instead of each model
    #[arg(long)]
    pub ensemble: bool,
    #[arg(long)]
    pub no_backoff: bool,
    /// Print `metric<TAB>value` lines instead of a table
    #[arg(long)]
    pub kv: bool,
}
