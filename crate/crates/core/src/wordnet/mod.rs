//! In-memory WordNet 3.0 lexical database.
//!
//! The database is read from the plain-text `data.{noun,verb,adj,adv}` and
//! `index.sense` files and is immutable once loaded. Only the fields needed
//! for hypernymy navigation and sense lookup are retained.

mod builder;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use builder::DictBuilder;
pub use parse::load_from_sources;

/// Files a WordNet dictionary directory must provide, in fingerprint order.
pub const DICT_FILES: [&str; 5] = ["data.noun", "data.verb", "data.adj", "data.adv", "index.sense"];

#[derive(Debug, thiserror::Error)]
pub enum WordNetError {
    #[error("missing WordNet file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("inconsistent database: {0}")]
    Inconsistent(String),
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
    #[error("unknown sense key {0}")]
    UnknownSenseKey(String),
    #[error("I/O error reading {}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

/// Part of speech as used by WordNet synset types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    AdjSat,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 5] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::AdjSat, Pos::Adv];

    pub fn as_char(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adj => 'a',
            Pos::AdjSat => 's',
            Pos::Adv => 'r',
        }
    }

    pub fn from_char(c: char) -> Option<Pos> {
        Some(match c {
            'n' => Pos::Noun,
            'v' => Pos::Verb,
            'a' => Pos::Adj,
            's' => Pos::AdjSat,
            'r' => Pos::Adv,
            _ => return None,
        })
    }

    /// The `ss_type` digit used inside sense keys.
    pub fn from_ss_type(digit: u8) -> Option<Pos> {
        Some(match digit {
            1 => Pos::Noun,
            2 => Pos::Verb,
            3 => Pos::Adj,
            4 => Pos::Adv,
            5 => Pos::AdjSat,
            _ => return None,
        })
    }

    pub fn ss_type(self) -> u8 {
        match self {
            Pos::Noun => 1,
            Pos::Verb => 2,
            Pos::Adj => 3,
            Pos::Adv => 4,
            Pos::AdjSat => 5,
        }
    }

    /// Word class used to group senses of a lemma: satellites fold into adjectives.
    pub fn word_class(self) -> Pos {
        match self {
            Pos::AdjSat => Pos::Adj,
            p => p,
        }
    }

    /// Name of the data file holding synsets of this POS.
    pub fn data_file(self) -> &'static str {
        match self {
            Pos::Noun => "data.noun",
            Pos::Verb => "data.verb",
            Pos::Adj | Pos::AdjSat => "data.adj",
            Pos::Adv => "data.adv",
        }
    }

    /// Maps a corpus POS annotation onto a WordNet word class.
    ///
    /// Accepts WordNet letters (`n`, `v`, `a`, `s`, `r`), Penn Treebank tags
    /// (`NN*`, `VB*`, `JJ*`, `RB*`) and universal tags (`NOUN`, `VERB`, `ADJ`, `ADV`).
    pub fn from_annotation(tag: &str) -> Option<Pos> {
        let tag = tag.trim();
        if tag.len() == 1 {
            return Pos::from_char(tag.chars().next()?.to_ascii_lowercase()).map(Pos::word_class);
        }
        let upper = tag.to_ascii_uppercase();
        match upper.as_str() {
            "NOUN" | "PROPN" => return Some(Pos::Noun),
            "VERB" => return Some(Pos::Verb),
            "ADJ" => return Some(Pos::Adj),
            "ADV" => return Some(Pos::Adv),
            _ => {}
        }
        if upper.starts_with("NN") {
            Some(Pos::Noun)
        } else if upper.starts_with("VB") {
            Some(Pos::Verb)
        } else if upper.starts_with("JJ") {
            Some(Pos::Adj)
        } else if upper.starts_with("RB") {
            Some(Pos::Adv)
        } else {
            None
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Pos::from_char(c).ok_or_else(|| format!("invalid POS '{s}'")),
            _ => Err(format!("invalid POS '{s}'")),
        }
    }
}

/// Synset identifier: POS letter plus byte offset in the data file, rendered `n02330245`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId {
    pub pos: Pos,
    pub offset: u32,
}

impl SynsetId {
    pub fn new(pos: Pos, offset: u32) -> Self {
        SynsetId { pos, offset }
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:08}", self.pos.as_char(), self.offset)
    }
}

impl FromStr for SynsetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let pos = chars.next().and_then(Pos::from_char).ok_or_else(|| format!("invalid synset id '{s}'"))?;
        let digits = chars.as_str();
        if digits.len() != 8 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("invalid synset id '{s}'"));
        }
        let offset = digits.parse().map_err(|_| format!("invalid synset id '{s}'"))?;
        Ok(SynsetId { pos, offset })
    }
}

/// A canonical WordNet sense key such as `mouse%1:05:00::`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SenseKey(String);

impl SenseKey {
    /// Parses and validates the key, lowercasing it.
    pub fn parse(s: &str) -> Result<SenseKey, String> {
        let key = s.trim().to_lowercase();
        let (lemma, rest) = key.split_once('%').ok_or_else(|| format!("invalid sense key '{s}'"))?;
        if lemma.is_empty() {
            return Err(format!("invalid sense key '{s}'"));
        }
        let ss_type = rest.split(':').next().and_then(|d| d.parse::<u8>().ok()).and_then(Pos::from_ss_type);
        if ss_type.is_none() || rest.split(':').count() != 5 {
            return Err(format!("invalid sense key '{s}'"));
        }
        Ok(SenseKey(key))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn lemma(&self) -> &str {
        self.0.split_once('%').map(|(l, _)| l).unwrap_or(&self.0)
    }

    pub fn pos(&self) -> Pos {
        // validated in `parse`
        let digit = self.0.split_once('%').map(|(_, r)| &r[..1]).unwrap_or("1");
        Pos::from_ss_type(digit.parse().unwrap_or(1)).unwrap_or(Pos::Noun)
    }
}

impl fmt::Display for SenseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for SenseKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SenseKey::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    /// Hypernym (`@`) pointers in file order. These form the hierarchy.
    pub hypernyms: Vec<SynsetId>,
    /// Instance-hypernym (`@i`) pointers. Not part of the hierarchy: an
    /// instance synset heads its own chain.
    pub instance_of: Vec<SynsetId>,
    pub hyponym_count: usize,
}

/// Sense entry of a word, ordered by WordNet sense number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSense {
    pub key: SenseKey,
    pub synset: SynsetId,
    pub sense_number: u32,
}

/// Immutable WordNet database.
#[derive(Debug, Clone)]
pub struct WordNetDb {
    synsets: Vec<Synset>,
    by_id: HashMap<SynsetId, usize>,
    sense_index: HashMap<SenseKey, SynsetId>,
    word_senses: HashMap<(String, Pos), Vec<WordSense>>,
    fingerprint: String,
}

impl WordNetDb {
    pub(crate) fn from_parts(
        mut synsets: Vec<Synset>,
        sense_index: HashMap<SenseKey, SynsetId>,
        word_senses: HashMap<(String, Pos), Vec<WordSense>>,
        fingerprint: String,
    ) -> Self {
        synsets.sort_by_key(|s| s.id);
        let by_id = synsets.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        WordNetDb { synsets, by_id, sense_index, word_senses, fingerprint }
    }

    /// Synsets sorted by id.
    pub fn synsets(&self) -> &[Synset] {
        &self.synsets
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.by_id.get(&id).map(|&i| &self.synsets[i])
    }

    pub fn contains(&self, id: SynsetId) -> bool {
        self.by_id.contains_key(&id)
    }

    pub fn synset_of(&self, key: &SenseKey) -> Option<SynsetId> {
        self.sense_index.get(key).copied()
    }

    pub fn sense_count(&self) -> usize {
        self.sense_index.len()
    }

    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }

    /// All sense keys with their synsets, sorted by key.
    pub fn sense_keys(&self) -> Vec<(&SenseKey, SynsetId)> {
        let mut keys: Vec<_> = self.sense_index.iter().map(|(k, &s)| (k, s)).collect();
        keys.sort_by(|a, b| a.0.cmp(b.0));
        keys
    }

    /// Words as `(lemma, word class)` with their senses, sorted by word.
    pub fn words(&self) -> Vec<(&(String, Pos), &[WordSense])> {
        let mut words: Vec<_> = self.word_senses.iter().map(|(w, s)| (w, s.as_slice())).collect();
        words.sort_by(|a, b| a.0.cmp(b.0));
        words
    }

    /// Checksum of the source files this database was loaded from.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Follows first-listed hypernyms from `id` up to a root.
    ///
    /// The result starts with `id` itself. A revisited node ends the walk.
    pub fn hypernym_chain(&self, id: SynsetId) -> Result<Vec<SynsetId>, WordNetError> {
        let mut current = self.synset(id).ok_or(WordNetError::UnknownSynset(id))?;
        let mut chain = vec![id];
        while let Some(&parent) = current.hypernyms.first() {
            if chain.contains(&parent) {
                break;
            }
            match self.synset(parent) {
                Some(next) => {
                    chain.push(parent);
                    current = next;
                }
                None => break,
            }
        }
        Ok(chain)
    }

    /// Senses of `(lemma, pos)` in WordNet sense-number order.
    pub fn senses_of(&self, lemma: &str, pos: Pos) -> &[WordSense] {
        let lemma = normalize_lemma(lemma);
        self.word_senses.get(&(lemma, pos.word_class())).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn first_sense(&self, lemma: &str, pos: Pos) -> Option<&SenseKey> {
        self.senses_of(lemma, pos).first().map(|s| &s.key)
    }
}

/// Lowercases a lemma and joins multiword expressions with underscores.
pub fn normalize_lemma(lemma: &str) -> String {
    lemma.trim().to_lowercase().replace(' ', "_")
}

/// Loads a WordNet 3.0 dictionary directory.
pub fn load_wordnet(dict_dir: impl AsRef<Path>) -> Result<WordNetDb, WordNetError> {
    let dir = dict_dir.as_ref();
    let mut sources = Vec::with_capacity(DICT_FILES.len());
    for name in DICT_FILES {
        let path = dir.join(name);
        if !path.is_file() {
            return Err(WordNetError::MissingFile(path));
        }
        let bytes = std::fs::read(&path).map_err(|source| WordNetError::Io { path: path.clone(), source })?;
        sources.push((name, bytes));
    }
    let view: Vec<(&str, &[u8])> = sources.iter().map(|(n, b)| (*n, b.as_slice())).collect();
    load_from_sources(&view)
}
