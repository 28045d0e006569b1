//! Coverage analysis and F1 scoring against gold sense keys.
//!
//! Instances are tokens with at least one gold key. A prediction is correct
//! when it equals any of the instance's gold keys.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::compress::{CompressError, CompressionLevel, SenseMapping};
use crate::corpus::{CorpusError, Sentence, TagVocabulary, Token};
use crate::wordnet::{WordNetDb, WordSense};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("predictions do not align with the gold corpus; unknown instance ids: {}", .0.join(", "))]
    Alignment(Vec<String>),
    #[error("instance '{0}' appears twice")]
    Duplicate(String),
    #[error("vocabulary is at level {vocab} but the mapping is at level {mapping}")]
    LevelMismatch { vocab: CompressionLevel, mapping: CompressionLevel },
    #[error("predictions line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Compress(#[from] CompressError),
}

/// A predicted sense key for one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredictedInstance {
    pub id: String,
    pub key: String,
    /// The key came from the first-sense backoff rather than a model.
    pub backoff: bool,
}

/// Identifier of token `j` of sentence `i`: its `id` attribute, else `s{i}.t{j}`.
pub fn instance_id(sentence: usize, token_index: usize, token: &Token) -> String {
    match token.attr("id") {
        Some(id) => id.to_string(),
        None => format!("s{sentence}.t{token_index}"),
    }
}

/// Candidate senses of a token, by WordNet sense number. `None` when the
/// token lacks a lemma or a usable part of speech.
pub fn candidates<'a>(db: &'a WordNetDb, token: &Token) -> Option<&'a [WordSense]> {
    let lemma = token.lemma.as_deref()?;
    let pos = token.word_class()?;
    Some(db.senses_of(lemma, pos))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub total_instances: usize,
    pub attempted: usize,
    pub correct: usize,
    pub backoff_count: usize,
    pub unannotatable_count: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalReport {
    pub fn from_counts(total: usize, attempted: usize, correct: usize, backoff: usize) -> Self {
        let pct = |n: usize, d: usize| if d == 0 { 0.0 } else { 100.0 * n as f64 / d as f64 };
        let precision = pct(correct, attempted);
        let recall = pct(correct, total);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        EvalReport {
            total_instances: total,
            attempted,
            correct,
            backoff_count: backoff,
            unannotatable_count: total - attempted,
            precision,
            recall,
            f1,
        }
    }

    /// `metric<TAB>value` lines.
    pub fn to_kv(&self) -> String {
        format!(
            "total\t{}\nattempted\t{}\ncorrect\t{}\nbackoff\t{}\nunannotatable\t{}\nprecision\t{:.2}\nrecall\t{:.2}\nf1\t{:.2}\n",
            self.total_instances,
            self.attempted,
            self.correct,
            self.backoff_count,
            self.unannotatable_count,
            self.precision,
            self.recall,
            self.f1
        )
    }

    pub fn to_table(&self) -> String {
        let rows = [
            ("instances", self.total_instances.to_string()),
            ("attempted", self.attempted.to_string()),
            ("correct", self.correct.to_string()),
            ("backoff", self.backoff_count.to_string()),
            ("unannotatable", self.unannotatable_count.to_string()),
            ("P", format!("{:.2}", self.precision)),
            ("R", format!("{:.2}", self.recall)),
            ("F1", format!("{:.2}", self.f1)),
        ];
        let mut out = String::new();
        for (name, value) in rows {
            writeln!(out, "{name:<14}{value:>10}").unwrap();
        }
        out
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().to_lowercase()
}

/// Gold instances of a corpus as `(id, normalized gold keys)`, in corpus order.
pub fn gold_instances<I>(gold: I) -> Result<Vec<(String, Vec<String>)>, EvalError>
where
    I: IntoIterator<Item = Result<Sentence, CorpusError>>,
{
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, sentence) in gold.into_iter().enumerate() {
        for (j, token) in sentence?.tokens.iter().enumerate() {
            if token.is_annotated() {
                let id = instance_id(i, j, token);
                if !seen.insert(id.clone()) {
                    return Err(EvalError::Duplicate(id));
                }
                out.push((id, token.gold_keys.iter().map(|k| normalize_key(k)).collect()));
            }
        }
    }
    Ok(out)
}

/// Scores predictions against the gold instances of a corpus.
pub fn score<I>(gold: I, predictions: &[PredictedInstance]) -> Result<EvalReport, EvalError>
where
    I: IntoIterator<Item = Result<Sentence, CorpusError>>,
{
    score_instances(&gold_instances(gold)?, predictions)
}

pub fn score_instances(
    gold: &[(String, Vec<String>)],
    predictions: &[PredictedInstance],
) -> Result<EvalReport, EvalError> {
    let index: HashMap<&str, &[String]> = gold.iter().map(|(id, keys)| (id.as_str(), keys.as_slice())).collect();
    let unknown: Vec<String> =
        predictions.iter().filter(|p| !index.contains_key(p.id.as_str())).map(|p| p.id.clone()).collect();
    if !unknown.is_empty() {
        return Err(EvalError::Alignment(unknown));
    }
    let mut seen = BTreeSet::new();
    let mut correct = 0;
    let mut backoff = 0;
    for p in predictions {
        if !seen.insert(p.id.as_str()) {
            return Err(EvalError::Duplicate(p.id.clone()));
        }
        if index[p.id.as_str()].contains(&normalize_key(&p.key)) {
            correct += 1;
        }
        backoff += usize::from(p.backoff);
    }
    Ok(EvalReport::from_counts(gold.len(), predictions.len(), correct, backoff))
}

/// Predicts the first WordNet sense of every instance that has one.
pub fn first_sense_baseline<I>(corpus: I, db: &WordNetDb) -> Result<Vec<PredictedInstance>, CorpusError>
where
    I: IntoIterator<Item = Result<Sentence, CorpusError>>,
{
    let mut out = Vec::new();
    for (i, sentence) in corpus.into_iter().enumerate() {
        for (j, token) in sentence?.tokens.iter().enumerate() {
            if !token.is_annotated() {
                continue;
            }
            if let Some(first) = candidates(db, token).and_then(<[WordSense]>::first) {
                out.push(PredictedInstance { id: instance_id(i, j, token), key: first.key.to_string(), backoff: true });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub level: CompressionLevel,
    pub total_instances: usize,
    pub coverable_instances: usize,
    pub percentage: f64,
}

impl CoverageReport {
    pub fn uncovered(&self) -> usize {
        self.total_instances - self.coverable_instances
    }

    pub fn to_kv(&self) -> String {
        format!(
            "level\t{}\ntotal\t{}\ncoverable\t{}\nuncovered\t{}\ncoverage\t{:.2}\n",
            self.level,
            self.total_instances,
            self.coverable_instances,
            self.uncovered(),
            self.percentage
        )
    }
}

/// Share of annotated instances with at least one candidate sense whose tag
/// was seen in training.
pub fn coverage<I>(
    train_vocab: &TagVocabulary,
    eval_corpus: I,
    db: &WordNetDb,
    mapping: &SenseMapping,
) -> Result<CoverageReport, EvalError>
where
    I: IntoIterator<Item = Result<Sentence, CorpusError>>,
{
    if train_vocab.level != mapping.level {
        return Err(EvalError::LevelMismatch { vocab: train_vocab.level, mapping: mapping.level });
    }
    mapping.check_db(db)?;
    let mut total = 0;
    let mut coverable = 0;
    for sentence in eval_corpus {
        for token in sentence?.tokens.iter().filter(|t| t.is_annotated()) {
            total += 1;
            let covered = candidates(db, token).is_some_and(|senses| {
                senses.iter().any(|s| mapping.tag_of(&s.key).is_some_and(|tag| train_vocab.contains(&tag.to_string())))
            });
            coverable += usize::from(covered);
        }
    }
    let percentage = if total == 0 { 0.0 } else { 100.0 * coverable as f64 / total as f64 };
    Ok(CoverageReport { level: mapping.level, total_instances: total, coverable_instances: coverable, percentage })
}

pub fn write_predictions(predictions: &[PredictedInstance], path: impl AsRef<Path>) -> Result<(), EvalError> {
    let mut out = BufWriter::new(File::create(path)?);
    for p in predictions {
        writeln!(out, "{}\t{}", p.id, p.key)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `instance_id<TAB>sense_key` lines. Blank lines are ignored.
pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictedInstance>, EvalError> {
    let mut out = Vec::new();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, key) = line
            .split_once('\t')
            .ok_or_else(|| EvalError::Parse { line: n + 1, msg: "expected instance_id<TAB>sense_key".into() })?;
        out.push(PredictedInstance { id: id.to_string(), key: key.trim().to_string(), backoff: false });
    }
    Ok(out)
}

/// Mean and sample standard deviation.
pub fn mean_stdev(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
