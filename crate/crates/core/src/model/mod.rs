//! Softmax sense disambiguator.
//!
//! Each token is encoded as its word embedding concatenated with the mean
//! embedding of the other tokens of its sentence, passed through one `tanh`
//! hidden layer, dropout, and a softmax over the tags seen in training.
//! Tokens without a tag are skipped by the loss.

mod adam;
mod disambiguate;
mod ensemble;
mod io;
mod network;
mod train;

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use adam::Adam;
pub use disambiguate::{Decision, Disambiguator};
pub use ensemble::ensemble;
pub use io::{
    load_embeddings, load_model, model_from_bytes, model_to_bytes, save_model, Embeddings, MODEL_MAGIC, MODEL_VERSION,
};
pub use network::{EncodedSentence, Matrix, Params};
pub use train::{split_dev, train, train_with_embeddings, TrainReport};

use crate::compress::{CompressError, CompressionLevel, SenseMapping};
use crate::corpus::{CorpusError, Sentence};
use crate::wordnet::WordNetDb;

/// Index of the unknown word in every input vocabulary.
pub const UNK: usize = 0;
pub const UNK_WORD: &str = "<unk>";

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("empty {0} corpus")]
    EmptyCorpus(&'static str),
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("models disagree: {0}")]
    Mismatch(String),
    #[error("model was built for a different {what} (model {model}, given {given})")]
    Stale { what: &'static str, model: String, given: String },
    #[error("unsupported model file version {0}")]
    Version(u32),
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error("embeddings line {line}: {msg}")]
    Embeddings { line: usize, msg: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Compress(#[from] CompressError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Eval(#[from] crate::eval::EvalError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub batch_sentences: usize,
    pub max_tokens_per_sentence: usize,
    pub epochs: usize,
    pub dev_sentences: usize,
    /// Words seen fewer times than this in training map to the unknown word.
    pub min_word_count: u64,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            embedding_dim: 100,
            hidden_dim: 256,
            dropout_rate: 0.5,
            learning_rate: 1e-4,
            batch_sentences: 100,
            max_tokens_per_sentence: 80,
            epochs: 20,
            dev_sentences: 4000,
            min_word_count: 1,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("embedding_dim", self.embedding_dim),
            ("hidden_dim", self.hidden_dim),
            ("batch_sentences", self.batch_sentences),
            ("max_tokens_per_sentence", self.max_tokens_per_sentence),
            ("epochs", self.epochs),
            ("dev_sentences", self.dev_sentences),
            ("min_word_count", self.min_word_count as usize),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(ModelError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(ModelError::InvalidConfig(format!("dropout_rate {} not in [0, 1)", self.dropout_rate)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ModelError::InvalidConfig(format!("learning_rate {} must be positive", self.learning_rate)));
        }
        Ok(())
    }
}

/// String vocabulary with dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    items: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn from_items(items: Vec<String>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            if index.insert(item.clone(), i).is_some() {
                return Err(ModelError::Corrupt(format!("duplicate vocabulary entry '{item}'")));
            }
        }
        Ok(Vocab { items, index })
    }

    pub fn get(&self, item: &str) -> Option<usize> {
        self.index.get(item).copied()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Input words (lowercased surfaces, unknown word first) and output tags of
/// a training corpus. Skipped tokens never contribute an output class.
pub fn build_vocabularies(sentences: &[Sentence], min_word_count: u64) -> Result<(Vocab, Vocab), ModelError> {
    let mut words: BTreeMap<String, u64> = BTreeMap::new();
    let mut tags: BTreeMap<&str, ()> = BTreeMap::new();
    for token in sentences.iter().flat_map(|s| &s.tokens) {
        *words.entry(token.surface.to_lowercase()).or_insert(0) += 1;
        if let Some(tag) = token.target() {
            tags.insert(tag, ());
        }
    }
    if tags.is_empty() {
        return Err(ModelError::EmptyCorpus("training"));
    }
    let mut word_items = vec![UNK_WORD.to_string()];
    word_items.extend(words.into_iter().filter(|(w, n)| *n >= min_word_count && w != UNK_WORD).map(|(w, _)| w));
    let tag_items = tags.into_keys().map(str::to_string).collect();
    Ok((Vocab::from_items(word_items)?, Vocab::from_items(tag_items)?))
}

/// Provenance recorded with a trained model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub wordnet_fingerprint: String,
    pub mapping_fingerprint: String,
    pub corpus_fingerprints: Vec<String>,
    pub best_dev_f1: f64,
    /// 1-based epoch whose weights were kept; 0 for an untrained model.
    pub selected_epoch: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub level: CompressionLevel,
    pub words: Vocab,
    pub tags: Vocab,
    pub params: Params,
    pub meta: ModelMeta,
}

impl Model {
    /// Randomly initialized model: weights uniform in (-0.05, 0.05), biases zero.
    pub fn new(config: ModelConfig, level: CompressionLevel, words: Vocab, tags: Vocab, rng: &mut ChaCha8Rng) -> Self {
        let e = config.embedding_dim;
        let h = config.hidden_dim;
        let mut uniform = |rows, cols| {
            let data = (0..rows * cols).map(|_| rng.gen_range(-0.05..0.05)).collect();
            Matrix { rows, cols, data }
        };
        let embeddings = uniform(words.len(), e);
        let hidden_w = uniform(h, 2 * e);
        let output_w = uniform(tags.len(), h);
        let params = Params { embeddings, hidden_w, hidden_b: vec![0.0; h], output_w, output_b: vec![0.0; tags.len()] };
        Model { config, level, words, tags, params, meta: ModelMeta::default() }
    }

    pub fn word_index(&self, surface: &str) -> usize {
        self.words.get(&surface.to_lowercase()).unwrap_or(UNK)
    }

    /// Word ids and training targets of a sentence, truncated to `limit` tokens.
    pub fn encode(&self, sentence: &Sentence, limit: Option<usize>) -> EncodedSentence {
        let n = limit.map_or(sentence.tokens.len(), |l| l.min(sentence.tokens.len()));
        let tokens = &sentence.tokens[..n];
        let mut targets = Vec::with_capacity(n);
        let mut supervised = Vec::with_capacity(n);
        for token in tokens {
            match token.target().and_then(|t| self.tags.get(t)) {
                Some(t) => {
                    targets.push(t);
                    supervised.push(true);
                }
                None => {
                    targets.push(0);
                    supervised.push(false);
                }
            }
        }
        EncodedSentence { words: tokens.iter().map(|t| self.word_index(&t.surface)).collect(), targets, supervised }
    }

    /// Output distribution of every token, in inference mode. The whole
    /// sentence is used; truncation applies to training only.
    pub fn forward(&self, sentence: &Sentence) -> Vec<Vec<f64>> {
        let positions: Vec<usize> = (0..sentence.tokens.len()).collect();
        self.distributions(sentence, &positions)
    }

    /// Output distributions of the tokens at `positions`, in inference mode.
    pub fn distributions(&self, sentence: &Sentence, positions: &[usize]) -> Vec<Vec<f64>> {
        let ids: Vec<usize> = sentence.tokens.iter().map(|t| self.word_index(&t.surface)).collect();
        self.params.infer(&ids, positions)
    }

    /// Mean loss over supervised tokens and its gradient. Dropout is applied
    /// when `dropout` carries a random source.
    pub fn loss_and_grad(&self, batch: &[EncodedSentence], dropout: Option<&mut ChaCha8Rng>) -> (f64, usize, Params) {
        let rate = if dropout.is_some() { self.config.dropout_rate } else { 0.0 };
        self.params.loss_and_grad(batch, rate, dropout)
    }

    pub fn loss(&self, batch: &[EncodedSentence]) -> f64 {
        self.loss_and_grad(batch, None).0
    }

    /// Checks that the model was trained against this database and mapping.
    pub fn check_compatible(&self, db: &WordNetDb, mapping: &SenseMapping) -> Result<(), ModelError> {
        if self.meta.wordnet_fingerprint != db.fingerprint() {
            return Err(ModelError::Stale {
                what: "WordNet",
                model: self.meta.wordnet_fingerprint.clone(),
                given: db.fingerprint().to_string(),
            });
        }
        if self.level != mapping.level {
            return Err(ModelError::Stale {
                what: "compression level",
                model: self.level.to_string(),
                given: mapping.level.to_string(),
            });
        }
        let fp = mapping.fingerprint();
        if self.meta.mapping_fingerprint != fp {
            return Err(ModelError::Stale { what: "mapping", model: self.meta.mapping_fingerprint.clone(), given: fp });
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.params.n_params()
    }
}
