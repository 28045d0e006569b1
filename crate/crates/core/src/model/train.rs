use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_vocabularies, Adam, Disambiguator, Embeddings, Model, ModelConfig, ModelError};
use crate::compress::SenseMapping;
use crate::corpus::{corpus_fingerprint, Sentence};
use crate::eval::{gold_instances, score_instances};
use crate::wordnet::WordNetDb;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean training loss of each epoch, over supervised tokens.
    pub epoch_loss: Vec<f64>,
    /// Dev F1 after each epoch, with first-sense backoff.
    pub dev_f1: Vec<f64>,
    /// 1-based epoch with the best dev F1; the latest wins ties.
    pub selected_epoch: usize,
    pub train_sentences: usize,
    pub dev_sentences: usize,
}

/// Seeded dev split. With a separate dev corpus its first `dev_sentences`
/// sentences after a shuffle are used. Otherwise `min(dev_sentences, n / 10)`
/// sentences (at least one) are held out of the training corpus.
pub fn split_dev(
    train: &[Sentence],
    dev: Option<&[Sentence]>,
    dev_sentences: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Sentence>, Vec<Sentence>), ModelError> {
    match dev {
        Some(dev) => {
            if dev.is_empty() {
                return Err(ModelError::EmptyCorpus("dev"));
            }
            let mut order: Vec<usize> = (0..dev.len()).collect();
            order.shuffle(rng);
            let picked = order.into_iter().take(dev_sentences).map(|i| dev[i].clone()).collect();
            Ok((train.to_vec(), picked))
        }
        None => {
            if train.len() < 2 {
                return Err(ModelError::EmptyCorpus("dev"));
            }
            let n_dev = dev_sentences.min(train.len() / 10).max(1);
            let mut order: Vec<usize> = (0..train.len()).collect();
            order.shuffle(rng);
            let dev = order[..n_dev].iter().map(|&i| train[i].clone()).collect();
            let mut rest = order[n_dev..].to_vec();
            rest.sort_unstable();
            Ok((rest.into_iter().map(|i| train[i].clone()).collect(), dev))
        }
    }
}

/// Trains one model on a converted corpus and keeps the weights of the epoch
/// with the best dev F1.
pub fn train(
    config: &ModelConfig,
    train: &[Sentence],
    dev: Option<&[Sentence]>,
    db: &WordNetDb,
    mapping: &SenseMapping,
) -> Result<(Model, TrainReport), ModelError> {
    train_with_embeddings(config, train, dev, db, mapping, None)
}

/// [`train`], with word embeddings initialized from pretrained vectors.
pub fn train_with_embeddings(
    config: &ModelConfig,
    train: &[Sentence],
    dev: Option<&[Sentence]>,
    db: &WordNetDb,
    mapping: &SenseMapping,
    embeddings: Option<&Embeddings>,
) -> Result<(Model, TrainReport), ModelError> {
    config.validate()?;
    mapping.check_db(db)?;
    if train.is_empty() {
        return Err(ModelError::EmptyCorpus("training"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (train, dev) = split_dev(train, dev, config.dev_sentences, &mut rng)?;
    let (words, tags) = build_vocabularies(&train, config.min_word_count)?;
    let mut model = Model::new(config.clone(), mapping.level, words, tags, &mut rng);
    if let Some(e) = embeddings {
        let set = e.apply(&mut model)?;
        log::info!("initialized {set} of {} word vectors from pretrained embeddings", model.words.len());
    }
    model.meta.wordnet_fingerprint = db.fingerprint().to_string();
    model.meta.mapping_fingerprint = mapping.fingerprint();
    model.meta.corpus_fingerprints = vec![corpus_fingerprint(&train), corpus_fingerprint(&dev)];
    log::info!(
        "training on {} sentences ({} dev), {} words, {} tags, {} parameters",
        train.len(),
        dev.len(),
        model.words.len(),
        model.tags.len(),
        model.n_params()
    );

    let encoded: Vec<_> = train.iter().map(|s| model.encode(s, Some(config.max_tokens_per_sentence))).collect();
    let dev_gold = gold_instances(dev.iter().cloned().map(Ok))?;
    let mut adam = Adam::new(&model.params, config.learning_rate);
    let mut report = TrainReport {
        epoch_loss: Vec::with_capacity(config.epochs),
        dev_f1: Vec::with_capacity(config.epochs),
        selected_epoch: 0,
        train_sentences: train.len(),
        dev_sentences: dev.len(),
    };
    let mut best: Option<(f64, super::Params)> = None;
    let mut order: Vec<usize> = (0..encoded.len()).collect();

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut n_total = 0;
        for (b, chunk) in order.chunks(config.batch_sentences).enumerate() {
            let batch: Vec<_> = chunk.iter().map(|&i| encoded[i].clone()).collect();
            let (loss, n, grad) = model.loss_and_grad(&batch, Some(&mut rng));
            if !loss.is_finite() {
                return Err(ModelError::NonFiniteLoss { epoch, batch: b + 1 });
            }
            if n > 0 {
                adam.step(&mut model.params, &grad);
                total += loss * n as f64;
                n_total += n;
            }
        }
        let epoch_loss = if n_total == 0 { 0.0 } else { total / n_total as f64 };
        let f1 = {
            let models = std::slice::from_ref(&model);
            let (predictions, _) = Disambiguator::new(models, db, mapping)?.predict_corpus(&dev);
            score_instances(&dev_gold, &predictions)?.f1
        };
        log::info!("epoch {epoch}: loss {epoch_loss:.6}, dev F1 {f1:.2}");
        report.epoch_loss.push(epoch_loss);
        report.dev_f1.push(f1);
        if best.as_ref().is_none_or(|(b, _)| f1 >= *b) {
            best = Some((f1, model.params.clone()));
            report.selected_epoch = epoch;
        }
    }
    let (best_f1, params) = best.expect("at least one epoch");
    model.params = params;
    model.meta.best_dev_f1 = best_f1;
    model.meta.selected_epoch = report.selected_epoch;
    Ok((model, report))
}
