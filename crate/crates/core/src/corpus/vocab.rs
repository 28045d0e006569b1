use std::collections::{BTreeMap, BTreeSet};

use super::{CorpusError, Sentence};
use crate::compress::{CompressionLevel, VocabStats};
use crate::wordnet::{SenseKey, WordNetDb};

/// Distinct converted tags of a corpus with occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagVocabulary {
    pub level: CompressionLevel,
    pub counts: BTreeMap<String, u64>,
    /// Tags contributed by keys of words with two or more senses.
    pub polysemous: BTreeSet<String>,
}

impl TagVocabulary {
    pub fn new(level: CompressionLevel) -> Self {
        TagVocabulary { level, counts: BTreeMap::new(), polysemous: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.counts.contains_key(tag)
    }

    /// Adds the converted tags of one sentence.
    pub fn add_sentence(&mut self, sentence: &Sentence, db: &WordNetDb) {
        for token in &sentence.tokens {
            let resolved =
                token.gold_keys.iter().filter_map(|k| SenseKey::parse(k).ok()).filter(|k| db.synset_of(k).is_some());
            for (key, tag) in resolved.zip(&token.converted) {
                *self.counts.entry(tag.clone()).or_insert(0) += 1;
                if db.senses_of(key.lemma(), key.pos()).len() >= 2 {
                    self.polysemous.insert(tag.clone());
                }
            }
        }
    }

    pub fn merge(&mut self, other: &TagVocabulary) {
        for (tag, n) in &other.counts {
            *self.counts.entry(tag.clone()).or_insert(0) += n;
        }
        self.polysemous.extend(other.polysemous.iter().cloned());
    }

    /// Fractions of the full WordNet vocabulary at this level covered by the
    /// corpus: `(all words, polysemous words only)`.
    pub fn fraction_of(&self, stats: &VocabStats) -> (f64, f64) {
        let (all, poly) = stats.level_totals(self.level);
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        (ratio(self.len(), all), ratio(self.polysemous.len(), poly))
    }
}

/// Collects the tag vocabulary of a converted corpus.
pub fn corpus_vocab<I>(sentences: I, level: CompressionLevel, db: &WordNetDb) -> Result<TagVocabulary, CorpusError>
where
    I: IntoIterator<Item = Result<Sentence, CorpusError>>,
{
    let mut vocab = TagVocabulary::new(level);
    for sentence in sentences {
        vocab.add_sentence(&sentence?, db);
    }
    Ok(vocab)
}
