//! Sense vocabulary compression through the hypernymy hierarchy.
//!
//! Two reductions are provided. The `synset` level replaces each sense key by
//! its synset. The `reduced` level first marks, for every word, the most
//! generic ancestor of each sense that no other sense of the word shares
//! ("necessary" synsets), then maps every synset to the nearest necessary
//! synset on its hypernym chain.

mod file;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

pub use file::{parse_mapping, read_mapping, render_mapping, write_mapping, MAPPING_VERSION};

use crate::wordnet::{Pos, SenseKey, SynsetId, WordNetDb, WordNetError};

#[derive(Debug, thiserror::Error)]
pub enum CompressError {
    #[error("mapping was built from WordNet {mapping} but database is {db}")]
    StaleMapping { mapping: String, db: String },
    #[error("unknown sense key {0}")]
    UnknownSenseKey(String),
    #[error("unsupported mapping file version '{0}'")]
    Version(String),
    #[error("mapping file checksum mismatch: expected {expected}, computed {actual}")]
    Checksum { expected: String, actual: String },
    #[error("mapping file line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    WordNet(#[from] WordNetError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompressionLevel {
    Sense,
    Synset,
    Reduced,
}

impl CompressionLevel {
    pub const ALL: [CompressionLevel; 3] =
        [CompressionLevel::Sense, CompressionLevel::Synset, CompressionLevel::Reduced];

    pub fn as_str(self) -> &'static str {
        match self {
            CompressionLevel::Sense => "sense",
            CompressionLevel::Synset => "synset",
            CompressionLevel::Reduced => "reduced",
        }
    }
}

impl fmt::Display for CompressionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CompressionLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sense" => Ok(CompressionLevel::Sense),
            "synset" => Ok(CompressionLevel::Synset),
            "reduced" => Ok(CompressionLevel::Reduced),
            _ => Err(format!("unknown compression level '{s}' (expected sense, synset or reduced)")),
        }
    }
}

/// A sense tag at some compression level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Sense(SenseKey),
    Synset(SynsetId),
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Sense(k) => k.fmt(f),
            Tag::Synset(s) => s.fmt(f),
        }
    }
}

/// The compression table: sense key to synset to compressed synset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseMapping {
    pub level: CompressionLevel,
    /// Necessary synsets; empty unless `level` is `Reduced`.
    pub necessary: BTreeSet<SynsetId>,
    pub synset_map: BTreeMap<SynsetId, SynsetId>,
    pub sense_synsets: BTreeMap<SenseKey, SynsetId>,
    pub wordnet_fingerprint: String,
}

impl SenseMapping {
    pub fn map_synset(&self, id: SynsetId) -> Option<SynsetId> {
        self.synset_map.get(&id).copied()
    }

    /// Distinct compressed synsets.
    pub fn image(&self) -> BTreeSet<SynsetId> {
        self.synset_map.values().copied().collect()
    }

    /// Fingerprint of the rendered mapping file.
    pub fn fingerprint(&self) -> String {
        crate::fingerprint::of_bytes(render_mapping(self).as_bytes())
    }

    pub fn check_db(&self, db: &WordNetDb) -> Result<(), CompressError> {
        if self.wordnet_fingerprint != db.fingerprint() {
            return Err(CompressError::StaleMapping {
                mapping: self.wordnet_fingerprint.clone(),
                db: db.fingerprint().to_string(),
            });
        }
        Ok(())
    }

    /// Tag of a sense key without re-checking the database fingerprint.
    pub fn tag_of(&self, key: &SenseKey) -> Option<Tag> {
        match self.level {
            CompressionLevel::Sense => self.sense_synsets.contains_key(key).then(|| Tag::Sense(key.clone())),
            _ => {
                let synset = self.sense_synsets.get(key)?;
                self.synset_map.get(synset).map(|&s| Tag::Synset(s))
            }
        }
    }
}

/// Per-word chains, memoized by synset.
struct Chains<'a> {
    db: &'a WordNetDb,
    cache: HashMap<SynsetId, Vec<SynsetId>>,
}

impl<'a> Chains<'a> {
    fn new(db: &'a WordNetDb) -> Self {
        Chains { db, cache: HashMap::new() }
    }

    fn get(&mut self, id: SynsetId) -> Result<&[SynsetId], WordNetError> {
        if !self.cache.contains_key(&id) {
            let chain = self.db.hypernym_chain(id)?;
            self.cache.insert(id, chain);
        }
        Ok(&self.cache[&id])
    }
}

/// Marks, for every sense of every word, the most generic synset of its chain
/// that lies on no other sense's chain. When the whole chain is shared the
/// sense's own synset is marked.
pub fn mark_necessary(db: &WordNetDb) -> BTreeSet<SynsetId> {
    let mut chains = Chains::new(db);
    let mut marked = BTreeSet::new();
    for (_, senses) in db.words() {
        let mut synsets: Vec<SynsetId> = Vec::with_capacity(senses.len());
        for s in senses {
            if !synsets.contains(&s.synset) {
                synsets.push(s.synset);
            }
        }
        for (i, &s) in synsets.iter().enumerate() {
            let mut shared: HashSet<SynsetId> = HashSet::new();
            for (j, &other) in synsets.iter().enumerate() {
                if i != j {
                    shared.extend(chains.get(other).expect("sense synsets exist").iter().copied());
                }
            }
            let chain = chains.get(s).expect("sense synsets exist");
            let pick = chain.iter().rev().find(|a| !shared.contains(a)).copied().unwrap_or(s);
            marked.insert(pick);
        }
    }
    marked
}

pub fn build_mapping(db: &WordNetDb, level: CompressionLevel) -> SenseMapping {
    let (necessary, synset_map) = match level {
        CompressionLevel::Sense | CompressionLevel::Synset => {
            (BTreeSet::new(), db.synsets().iter().map(|s| (s.id, s.id)).collect())
        }
        CompressionLevel::Reduced => {
            let necessary = mark_necessary(db);
            let mut map = BTreeMap::new();
            for s in db.synsets() {
                let chain = db.hypernym_chain(s.id).expect("synset exists");
                let target =
                    chain.iter().find(|a| necessary.contains(a)).or_else(|| chain.last()).copied().unwrap_or(s.id);
                map.insert(s.id, target);
            }
            (necessary, map)
        }
    };
    SenseMapping {
        level,
        necessary,
        synset_map,
        sense_synsets: db.sense_keys().into_iter().map(|(k, s)| (k.clone(), s)).collect(),
        wordnet_fingerprint: db.fingerprint().to_string(),
    }
}

/// Compresses a sense key to its tag at the mapping's level.
pub fn compress_sense_key(mapping: &SenseMapping, db: &WordNetDb, key: &SenseKey) -> Result<Tag, CompressError> {
    mapping.check_db(db)?;
    let synset = db.synset_of(key).ok_or_else(|| CompressError::UnknownSenseKey(key.to_string()))?;
    match mapping.level {
        CompressionLevel::Sense => Ok(Tag::Sense(key.clone())),
        _ => mapping.map_synset(synset).map(Tag::Synset).ok_or_else(|| CompressError::UnknownSenseKey(key.to_string())),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct PosStats {
    pub sense_keys: usize,
    pub synsets: usize,
    pub reduced: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct VocabStats {
    pub level: CompressionLevel,
    pub n_sense_keys: usize,
    /// Sense keys of words with two or more senses.
    pub n_polysemous_sense_keys: usize,
    /// Synsets holding a sense of a word with two or more senses.
    pub n_polysemous_synsets: usize,
    pub n_synsets: usize,
    /// Distinct synsets in the image of the mapping.
    pub n_reduced: usize,
    /// Image restricted to synsets of words with two or more senses.
    pub n_reduced_polysemous_only: usize,
    pub per_pos: BTreeMap<char, PosStats>,
}

impl VocabStats {
    /// Size of the full WordNet tag vocabulary at `level`, for all words and
    /// for polysemous words only.
    pub fn level_totals(&self, level: CompressionLevel) -> (usize, usize) {
        match level {
            CompressionLevel::Sense => (self.n_sense_keys, self.n_polysemous_sense_keys),
            CompressionLevel::Synset => (self.n_synsets, self.n_polysemous_synsets),
            CompressionLevel::Reduced => (self.n_reduced, self.n_reduced_polysemous_only),
        }
    }

    /// `key=value` lines in a fixed order.
    pub fn to_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("level={}", self.level),
            format!("sense_keys={}", self.n_sense_keys),
            format!("synsets={}", self.n_synsets),
            format!("reduced={}", self.n_reduced),
            format!("reduced_polysemous={}", self.n_reduced_polysemous_only),
        ];
        for (pos, s) in &self.per_pos {
            lines.push(format!("{pos}.sense_keys={}", s.sense_keys));
            lines.push(format!("{pos}.synsets={}", s.synsets));
            lines.push(format!("{pos}.reduced={}", s.reduced));
        }
        lines
    }
}

pub fn vocab_stats(db: &WordNetDb, mapping: &SenseMapping) -> VocabStats {
    let mut stats = VocabStats {
        level: mapping.level,
        n_sense_keys: db.sense_count(),
        n_polysemous_sense_keys: 0,
        n_polysemous_synsets: 0,
        n_synsets: db.synset_count(),
        n_reduced: 0,
        n_reduced_polysemous_only: 0,
        per_pos: BTreeMap::new(),
    };
    let mut per_pos_image: BTreeMap<char, BTreeSet<SynsetId>> = BTreeMap::new();
    for pos in Pos::ALL {
        stats.per_pos.insert(pos.as_char(), PosStats::default());
        per_pos_image.insert(pos.as_char(), BTreeSet::new());
    }
    for (key, _) in db.sense_keys() {
        stats.per_pos.get_mut(&key.pos().as_char()).unwrap().sense_keys += 1;
    }
    let mut image = BTreeSet::new();
    for s in db.synsets() {
        let c = s.id.pos.as_char();
        stats.per_pos.get_mut(&c).unwrap().synsets += 1;
        if let Some(target) = mapping.map_synset(s.id) {
            image.insert(target);
            per_pos_image.get_mut(&c).unwrap().insert(target);
        }
    }
    stats.n_reduced = image.len();
    for (c, img) in per_pos_image {
        stats.per_pos.get_mut(&c).unwrap().reduced = img.len();
    }
    let mut poly = BTreeSet::new();
    let mut poly_synsets = BTreeSet::new();
    for (_, senses) in db.words() {
        if senses.len() >= 2 {
            stats.n_polysemous_sense_keys += senses.len();
            poly_synsets.extend(senses.iter().map(|s| s.synset));
            poly.extend(senses.iter().filter_map(|s| mapping.map_synset(s.synset)));
        }
    }
    stats.n_polysemous_synsets = poly_synsets.len();
    stats.n_reduced_polysemous_only = poly.len();
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Mwn1;

    #[test]
    fn mwn1_marks_living_thing_artifact_and_root() {
        let f = Mwn1::build();
        let marked = mark_necessary(&f.db);
        let expected: BTreeSet<_> = [f.n(5), f.n(10), f.n(1)].into_iter().collect();
        assert_eq!(marked, expected);
    }

    #[test]
    fn mwn1_reduced_mapping() {
        let f = Mwn1::build();
        let m = build_mapping(&f.db, CompressionLevel::Reduced);
        for (from, to) in [(9, 5), (13, 10), (8, 5), (6, 5), (12, 10), (2, 1), (1, 1)] {
            assert_eq!(m.map_synset(f.n(from)), Some(f.n(to)), "n{from}");
        }
        assert_eq!(m.image().len(), 3);
    }

    #[test]
    fn synset_level_is_identity() {
        let f = Mwn1::build();
        let m = build_mapping(&f.db, CompressionLevel::Synset);
        assert!(m.necessary.is_empty());
        assert!(m.synset_map.iter().all(|(a, b)| a == b));
        assert_eq!(m.synset_map.len(), 13);
    }

    #[test]
    fn compress_key_at_each_level() {
        let f = Mwn1::build();
        let key = f.db.first_sense("mouse", Pos::Noun).unwrap().clone();
        let reduced = build_mapping(&f.db, CompressionLevel::Reduced);
        assert_eq!(compress_sense_key(&reduced, &f.db, &key).unwrap(), Tag::Synset(f.n(5)));
        let synset = build_mapping(&f.db, CompressionLevel::Synset);
        assert_eq!(compress_sense_key(&synset, &f.db, &key).unwrap(), Tag::Synset(f.n(9)));
        let sense = build_mapping(&f.db, CompressionLevel::Sense);
        assert_eq!(compress_sense_key(&sense, &f.db, &key).unwrap(), Tag::Sense(key.clone()));
    }

    #[test]
    fn unknown_key_and_stale_mapping() {
        let f = Mwn1::build();
        let mut m = build_mapping(&f.db, CompressionLevel::Reduced);
        let unknown = SenseKey::parse("gerbil%1:05:00::").unwrap();
        assert!(matches!(compress_sense_key(&m, &f.db, &unknown), Err(CompressError::UnknownSenseKey(_))));
        m.wordnet_fingerprint = "0000000000000000".into();
        let key = f.db.first_sense("mouse", Pos::Noun).unwrap().clone();
        assert!(matches!(compress_sense_key(&m, &f.db, &key), Err(CompressError::StaleMapping { .. })));
    }

    #[test]
    fn mwn1_stats() {
        let f = Mwn1::build();
        let m = build_mapping(&f.db, CompressionLevel::Reduced);
        let stats = vocab_stats(&f.db, &m);
        assert_eq!(stats.n_synsets, 13);
        assert_eq!(stats.n_reduced, 3);
        // only mouse is polysemous: {n5, n10}
        assert_eq!(stats.n_reduced_polysemous_only, 2);
        assert_eq!(stats.per_pos[&'n'].synsets, 13);
        assert!(stats.n_reduced <= stats.n_synsets && stats.n_synsets <= stats.n_sense_keys);
    }

    #[test]
    fn empty_database_stats_are_zero() {
        let (db, _) = crate::wordnet::DictBuilder::new().build().unwrap();
        let m = build_mapping(&db, CompressionLevel::Reduced);
        let stats = vocab_stats(&db, &m);
        assert_eq!(
            (stats.n_sense_keys, stats.n_synsets, stats.n_reduced, stats.n_reduced_polysemous_only),
            (0, 0, 0, 0)
        );
    }

    #[test]
    fn single_monosemous_word_marks_its_root() {
        let mut b = crate::wordnet::DictBuilder::new();
        let r = b.synset(Pos::Noun, &["root"], &[]);
        let s = b.synset(Pos::Noun, &["leaf"], &[r]);
        let (db, ids) = b.build().unwrap();
        let marked = mark_necessary(&db);
        assert_eq!(marked, [ids[r]].into_iter().collect());
        let m = build_mapping(&db, CompressionLevel::Reduced);
        assert_eq!(m.map_synset(ids[s]), Some(ids[r]));
    }

    #[test]
    fn ancestor_sense_falls_back_to_itself() {
        let mut b = crate::wordnet::DictBuilder::new();
        let root = b.synset(Pos::Noun, &["thing"], &[]);
        let s1 = b.synset(Pos::Noun, &["bank"], &[root]);
        let child = b.synset(Pos::Noun, &["depository"], &[s1]);
        let s2 = b.synset(Pos::Noun, &["bank", "savings_bank"], &[child]);
        let (db, ids) = b.build().unwrap();
        let marked = mark_necessary(&db);
        assert!(marked.contains(&ids[s1]));
        assert!(marked.contains(&ids[child]));
        let m = build_mapping(&db, CompressionLevel::Reduced);
        assert_ne!(m.map_synset(ids[s1]), m.map_synset(ids[s2]));
    }
}
