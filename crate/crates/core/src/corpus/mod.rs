//! Sense-annotated corpora in UFSAC-style XML.
//!
//! A corpus is `corpus > document > paragraph > sentence > word`, where each
//! `word` carries `surface_form`, optional `lemma`/`pos`, and optional
//! `wn30_key` (several keys separated by `;`). Converted tags are written to
//! the `sensefold_tag` attribute so the gold keys are never overwritten.
//!
//! Corpora are processed as a stream of [`Sentence`]s.

mod convert;
mod reader;
mod vocab;
mod writer;

use std::sync::Arc;

pub use convert::{convert_corpus, ConvertStats, Converter};
pub use reader::{read_corpus, CorpusReader};
pub use vocab::{corpus_vocab, TagVocabulary};
pub use writer::{write_corpus, CorpusWriter};

use crate::wordnet::{normalize_lemma, Pos, SenseKey};

pub const ATTR_SURFACE: &str = "surface_form";
pub const ATTR_LEMMA: &str = "lemma";
pub const ATTR_POS: &str = "pos";
pub const ATTR_SENSE_KEY: &str = "wn30_key";
pub const ATTR_CONVERTED: &str = "sensefold_tag";
/// Corpus-level attributes recording a conversion.
pub const ATTR_LEVEL: &str = "sensefold_level";
pub const ATTR_MAPPING: &str = "sensefold_mapping";

/// Label of tokens that carry no supervision.
pub const SKIP_TAG: &str = "<skip>";

pub type Attrs = Vec<(String, String)>;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("malformed XML at byte {offset}: {msg}")]
    Xml { offset: u64, msg: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Compress(#[from] crate::compress::CompressError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: Option<String>,
    /// POS annotation as found in the corpus (Penn, universal or WordNet letters).
    pub pos: Option<String>,
    /// Gold sense keys as written in the corpus.
    pub gold_keys: Vec<String>,
    /// Converted tags, one per gold key that resolved in WordNet, in gold order.
    /// Empty means the token is skipped.
    pub converted: Vec<String>,
    /// Other attributes, kept verbatim and in order.
    pub attrs: Attrs,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        Token { surface: surface.into(), ..Token::default() }
    }

    pub fn with_annotation(mut self, lemma: &str, pos: &str, keys: &[&str]) -> Self {
        self.lemma = Some(lemma.to_string());
        self.pos = Some(pos.to_string());
        self.gold_keys = keys.iter().map(|k| k.to_string()).collect();
        self
    }

    pub fn is_annotated(&self) -> bool {
        !self.gold_keys.is_empty()
    }

    /// Gold keys that parse as sense keys.
    pub fn sense_keys(&self) -> impl Iterator<Item = SenseKey> + '_ {
        self.gold_keys.iter().filter_map(|k| SenseKey::parse(k).ok())
    }

    pub fn word_class(&self) -> Option<Pos> {
        self.pos.as_deref().and_then(Pos::from_annotation)
    }

    pub fn normalized_lemma(&self) -> Option<String> {
        self.lemma.as_deref().map(normalize_lemma)
    }

    /// Training target: the first converted tag, if any.
    pub fn target(&self) -> Option<&str> {
        self.converted.first().map(String::as_str)
    }

    /// Value of an extra attribute.
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }
}

/// A `document` or `paragraph` element around sentences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Division {
    /// Ordinal of the element within the corpus, starting at 0.
    pub index: usize,
    pub attrs: Arc<Attrs>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub attrs: Attrs,
    pub document: Option<Division>,
    pub paragraph: Option<Division>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence { tokens, ..Sentence::default() }
    }
}

/// Fingerprint of the words, gold keys and converted tags of a corpus.
pub fn corpus_fingerprint(sentences: &[Sentence]) -> String {
    let mut fp = crate::fingerprint::Fingerprinter::new();
    for sentence in sentences {
        for token in &sentence.tokens {
            fp.add("w", token.surface.as_bytes());
            fp.add("k", token.gold_keys.join(";").as_bytes());
            fp.add("t", token.converted.join(";").as_bytes());
        }
        fp.add("s", b"");
    }
    fp.finish()
}
