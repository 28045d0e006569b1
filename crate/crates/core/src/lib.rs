//! Sense vocabulary compression over WordNet and a supervised word sense
//! disambiguation pipeline built on it.
//!
//! The [`compress`] module maps sense keys onto synsets, or onto the smaller
//! set of "necessary" hypernyms that still tells apart every sense of every
//! word. [`corpus`] converts sense-annotated XML corpora into those tag
//! spaces, [`model`] trains and ensembles a softmax disambiguator over them,
//! and [`eval`] scores predictions and measures coverage.

pub mod compress;
pub mod corpus;
pub mod eval;
pub mod fingerprint;
pub mod fixtures;
pub mod model;
pub mod wordnet;

pub use compress::{
    build_mapping, compress_sense_key, mark_necessary, read_mapping, vocab_stats, write_mapping, CompressError,
    CompressionLevel, SenseMapping, Tag, VocabStats,
};
pub use corpus::{Sentence, TagVocabulary, Token};
pub use eval::{coverage, first_sense_baseline, score, CoverageReport, EvalReport, PredictedInstance};
pub use model::{ensemble, load_model, save_model, train, Disambiguator, Model, ModelConfig, ModelError, TrainReport};
pub use wordnet::{load_wordnet, Pos, SenseKey, Synset, SynsetId, WordNetDb, WordNetError};
