use rayon::prelude::*;

use super::{ensemble, Model, ModelError};
use crate::compress::SenseMapping;
use crate::corpus::Sentence;
use crate::eval::{candidates, instance_id, PredictedInstance};
use crate::wordnet::{SenseKey, WordNetDb};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    NotTarget,
    /// Missing lemma or part of speech, or a word unknown to WordNet.
    Unattemptable,
    Predicted {
        key: SenseKey,
        backoff: bool,
    },
}

/// Picks senses with one model or a geometric-mean ensemble of models.
pub struct Disambiguator<'a> {
    models: &'a [Model],
    db: &'a WordNetDb,
    mapping: &'a SenseMapping,
    /// Fall back to the first WordNet sense when no candidate tag is known.
    pub backoff: bool,
    /// Treat every token with WordNet senses as a target, not only annotated ones.
    pub all_words: bool,
}

impl<'a> Disambiguator<'a> {
    pub fn new(models: &'a [Model], db: &'a WordNetDb, mapping: &'a SenseMapping) -> Result<Self, ModelError> {
        let first = models.first().ok_or_else(|| ModelError::Mismatch("no models given".into()))?;
        mapping.check_db(db)?;
        for (i, m) in models.iter().enumerate() {
            m.check_compatible(db, mapping)?;
            if m.tags != first.tags {
                return Err(ModelError::Mismatch(format!(
                    "model {} has a different output vocabulary than model 0",
                    i
                )));
            }
        }
        Ok(Disambiguator { models, db, mapping, backoff: true, all_words: false })
    }

    pub fn sentence(&self, sentence: &Sentence) -> Vec<Decision> {
        let tags = &self.models[0].tags;
        let mut decisions = vec![Decision::NotTarget; sentence.tokens.len()];
        // (position, candidate keys with their output index)
        let mut pending: Vec<(usize, Vec<(&SenseKey, usize)>)> = Vec::new();
        for (i, token) in sentence.tokens.iter().enumerate() {
            let senses = candidates(self.db, token);
            let target = token.is_annotated() || (self.all_words && senses.is_some_and(|s| !s.is_empty()));
            if !target {
                continue;
            }
            let senses = match senses {
                Some(s) if !s.is_empty() => s,
                _ => {
                    decisions[i] = Decision::Unattemptable;
                    continue;
                }
            };
            if senses.len() == 1 {
                decisions[i] = Decision::Predicted { key: senses[0].key.clone(), backoff: false };
                continue;
            }
            let known: Vec<(&SenseKey, usize)> = senses
                .iter()
                .filter_map(|s| {
                    let tag = self.mapping.tag_of(&s.key)?;
                    tags.get(&tag.to_string()).map(|t| (&s.key, t))
                })
                .collect();
            if known.is_empty() {
                decisions[i] = if self.backoff {
                    Decision::Predicted { key: senses[0].key.clone(), backoff: true }
                } else {
                    Decision::Unattemptable
                };
            } else {
                pending.push((i, known));
            }
        }
        if pending.is_empty() {
            return decisions;
        }
        let positions: Vec<usize> = pending.iter().map(|(i, _)| *i).collect();
        let per_model: Vec<Vec<Vec<f64>>> = self.models.iter().map(|m| m.distributions(sentence, &positions)).collect();
        for (k, (i, known)) in pending.into_iter().enumerate() {
            let dists: Vec<&[f64]> = per_model.iter().map(|d| d[k].as_slice()).collect();
            let q = ensemble(&dists).expect("models share one output vocabulary");
            // candidates are in sense-number order, so ties keep the lowest
            let mut best = known[0];
            for &cand in &known[1..] {
                if q[cand.1] > q[best.1] {
                    best = cand;
                }
            }
            decisions[i] = Decision::Predicted { key: best.0.clone(), backoff: false };
        }
        decisions
    }

    /// Predictions for every target of a corpus, in corpus order, and the
    /// number of targets left unattempted. Sentences run in parallel.
    pub fn predict_corpus(&self, sentences: &[Sentence]) -> (Vec<PredictedInstance>, usize) {
        let per_sentence: Vec<Vec<Decision>> = sentences.par_iter().map(|s| self.sentence(s)).collect();
        let mut out = Vec::new();
        let mut unattempted = 0;
        for (i, (sentence, decisions)) in sentences.iter().zip(per_sentence).enumerate() {
            for (j, decision) in decisions.into_iter().enumerate() {
                match decision {
                    Decision::NotTarget => {}
                    Decision::Unattemptable => unattempted += 1,
                    Decision::Predicted { key, backoff } => out.push(PredictedInstance {
                        id: instance_id(i, j, &sentence.tokens[j]),
                        key: key.to_string(),
                        backoff,
                    }),
                }
            }
        }
        (out, unattempted)
    }
}
