use std::collections::BTreeSet;

use super::{CorpusError, Sentence};
use crate::compress::{CompressError, SenseMapping};
use crate::wordnet::{SenseKey, WordNetDb};

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct ConvertStats {
    pub sentences: usize,
    pub tokens: usize,
    /// Tokens that received at least one tag.
    pub tagged: usize,
    /// Tokens with more than one converted tag.
    pub multi_key: usize,
    /// Gold keys that were malformed or absent from WordNet.
    pub unresolvable_keys: usize,
    /// Annotated tokens left untagged because none of their keys resolved.
    pub untagged_annotated: usize,
}

/// Converts gold sense keys to tags at a mapping's level, sentence by sentence.
pub struct Converter<'a> {
    mapping: &'a SenseMapping,
    db: &'a WordNetDb,
    pub stats: ConvertStats,
    reported: BTreeSet<String>,
}

impl<'a> Converter<'a> {
    pub fn new(mapping: &'a SenseMapping, db: &'a WordNetDb) -> Result<Self, CompressError> {
        mapping.check_db(db)?;
        Ok(Converter { mapping, db, stats: ConvertStats::default(), reported: BTreeSet::new() })
    }

    /// Replaces the converted tags of every token. Tokens whose keys do not
    /// resolve end up untagged.
    pub fn convert_sentence(&mut self, mut sentence: Sentence) -> Sentence {
        self.stats.sentences += 1;
        for token in &mut sentence.tokens {
            self.stats.tokens += 1;
            token.converted.clear();
            for raw in &token.gold_keys {
                let tag = SenseKey::parse(raw)
                    .ok()
                    .filter(|k| self.db.synset_of(k).is_some())
                    .and_then(|k| self.mapping.tag_of(&k));
                match tag {
                    Some(tag) => token.converted.push(tag.to_string()),
                    None => {
                        self.stats.unresolvable_keys += 1;
                        if self.reported.insert(raw.clone()) {
                            log::warn!("unresolvable sense key '{raw}' treated as untagged");
                        }
                    }
                }
            }
            if !token.converted.is_empty() {
                self.stats.tagged += 1;
                if token.converted.len() > 1 {
                    self.stats.multi_key += 1;
                }
            } else if token.is_annotated() {
                self.stats.untagged_annotated += 1;
            }
        }
        sentence
    }
}

/// Lazily converts a sentence stream.
pub fn convert_corpus<'a, I>(
    sentences: I,
    mapping: &'a SenseMapping,
    db: &'a WordNetDb,
) -> Result<impl Iterator<Item = Result<Sentence, CorpusError>> + 'a, CompressError>
where
    I: IntoIterator<Item = Result<Sentence, CorpusError>> + 'a,
{
    let mut converter = Converter::new(mapping, db)?;
    Ok(sentences.into_iter().map(move |s| s.map(|s| converter.convert_sentence(s))))
}
