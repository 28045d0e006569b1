use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensefold::compress::{build_mapping, CompressionLevel, SenseMapping};
use sensefold::corpus::{Converter, Sentence, Token};
use sensefold::eval::{score, PredictedInstance};
use sensefold::fixtures::{mouse_corpus, Mwn1};
use sensefold::model::{
    build_vocabularies, load_model, save_model, train, Decision, Disambiguator, EncodedSentence, Model, ModelConfig,
    Params,
};

fn converted(f: &Mwn1, mapping: &SenseMapping, sentences: Vec<Sentence>) -> Vec<Sentence> {
    let mut c = Converter::new(mapping, &f.db).unwrap();
    sentences.into_iter().map(|s| c.convert_sentence(s)).collect()
}

fn small_config(seed: u64) -> ModelConfig {
    ModelConfig {
        embedding_dim: 16,
        hidden_dim: 32,
        learning_rate: 0.01,
        batch_sentences: 10,
        epochs: 30,
        seed,
        ..ModelConfig::default()
    }
}

fn tiny_model(seed: u64) -> (Model, Vec<EncodedSentence>) {
    let f = Mwn1::build();
    let m = build_mapping(&f.db, CompressionLevel::Synset);
    let corpus = converted(&f, &m, mouse_corpus(&f, 4, seed));
    let (words, tags) = build_vocabularies(&corpus, 1).unwrap();
    let config = ModelConfig { embedding_dim: 3, hidden_dim: 4, ..ModelConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = Model::new(config, m.level, words, tags, &mut rng);
    // larger weights than the default init so that every gradient is far from zero
    for t in model.params.tensors_mut() {
        t.iter_mut().for_each(|v| *v = rng.gen_range(-0.8..0.8));
    }
    let batch = corpus.iter().map(|s| model.encode(s, None)).collect();
    (model, batch)
}

fn flat(p: &Params) -> Vec<f64> {
    p.tensors().iter().flat_map(|t| t.iter().copied()).collect()
}

fn set_flat(p: &mut Params, k: usize, v: f64) {
    let mut k = k;
    for t in p.tensors_mut() {
        if k < t.len() {
            t[k] = v;
            return;
        }
        k -= t.len();
    }
    panic!("index out of range");
}

#[test]
fn gradient_matches_central_differences() {
    let (mut model, batch) = tiny_model(3);
    assert!(model.n_params() <= 1000, "{} parameters", model.n_params());
    let (_, _, grad) = model.loss_and_grad(&batch, None);
    let analytic = flat(&grad);
    let theta = flat(&model.params);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..theta.len() {
        set_flat(&mut model.params, k, theta[k] + h);
        let up = model.loss(&batch);
        set_flat(&mut model.params, k, theta[k] - h);
        let down = model.loss(&batch);
        set_flat(&mut model.params, k, theta[k]);
        let numeric = (up - down) / (2.0 * h);
        let rel = (analytic[k] - numeric).abs() / (analytic[k].abs() + numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    assert!(worst < 1e-4, "worst relative error {worst:e}");
}

#[test]
fn skip_tokens_contribute_nothing() {
    let (model, batch) = tiny_model(5);
    let (loss, n, grad) = model.loss_and_grad(&batch, None);
    let mut perturbed = batch.clone();
    let mut changed = 0;
    for s in &mut perturbed {
        for (t, sup) in s.targets.iter_mut().zip(&s.supervised) {
            if !sup {
                *t = (*t + 1) % model.tags.len();
                changed += 1;
            }
        }
    }
    assert!(changed > 0);
    let (loss2, n2, grad2) = model.loss_and_grad(&perturbed, None);
    assert_eq!(loss.to_bits(), loss2.to_bits());
    assert_eq!(n, n2);
    assert_eq!(grad, grad2);

    let all_skip: Vec<_> =
        batch.iter().map(|s| EncodedSentence { supervised: vec![false; s.words.len()], ..s.clone() }).collect();
    let (loss, n, grad) = model.loss_and_grad(&all_skip, None);
    assert_eq!((loss, n), (0.0, 0));
    assert!(flat(&grad).iter().all(|&g| g == 0.0));
}

fn token_accuracy(model: &Model, corpus: &[Sentence]) -> f64 {
    let (mut right, mut total) = (0, 0);
    for s in corpus {
        let dists = model.forward(s);
        for (tok, q) in s.tokens.iter().zip(dists) {
            if let Some(t) = tok.target() {
                let best = (0..q.len()).fold(0, |b, i| if q[i] > q[b] { i } else { b });
                right += usize::from(model.tags.items()[best] == t);
                total += 1;
            }
        }
    }
    right as f64 / total as f64
}

#[test]
fn overfits_fifty_sentences_and_loss_decreases() {
    let f = Mwn1::build();
    let m = build_mapping(&f.db, CompressionLevel::Synset);
    let corpus = converted(&f, &m, mouse_corpus(&f, 50, 11));
    let config = ModelConfig { epochs: 200, ..small_config(7) };
    let (model, report) = train(&config, &corpus, Some(&corpus), &f.db, &m).unwrap();
    let l = &report.epoch_loss;
    assert!(l[0] > l[1] && l[1] > l[2], "first losses {:?}", &l[..3]);
    let acc = token_accuracy(&model, &corpus);
    assert!(acc >= 0.95, "training accuracy {acc} at epoch {}", report.selected_epoch);
    let best = report.dev_f1.iter().copied().fold(f64::MIN, f64::max);
    assert_eq!(report.dev_f1[report.selected_epoch - 1], best);
    assert_eq!(report.dev_f1.iter().rposition(|&x| x == best).unwrap() + 1, report.selected_epoch);
}

#[test]
fn training_is_deterministic() {
    let f = Mwn1::build();
    let m = build_mapping(&f.db, CompressionLevel::Reduced);
    let corpus = converted(&f, &m, mouse_corpus(&f, 30, 2));
    let config = ModelConfig { epochs: 5, ..small_config(4) };
    let (m1, r1) = train(&config, &corpus, None, &f.db, &m).unwrap();
    let (m2, r2) = train(&config, &corpus, None, &f.db, &m).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(m1, m2);
    let (_, r3) = train(&ModelConfig { seed: 5, ..config }, &corpus, None, &f.db, &m).unwrap();
    assert_ne!(r1.epoch_loss, r3.epoch_loss);
}

#[test]
fn inference_is_bit_identical_and_normalized() {
    let (model, _) = tiny_model(8);
    let f = Mwn1::build();
    for s in mouse_corpus(&f, 5, 1) {
        let a = model.forward(&s);
        let b = model.forward(&s);
        assert_eq!(a, b);
        for q in a {
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        }
    }
    assert!(model.forward(&Sentence::new(vec![])).is_empty());
}

fn trained(level: CompressionLevel, seed: u64) -> (Mwn1, SenseMapping, Model) {
    let f = Mwn1::build();
    let m = build_mapping(&f.db, level);
    let corpus = converted(&f, &m, mouse_corpus(&f, 40, 21));
    let (model, _) = train(&small_config(seed), &corpus, Some(&corpus), &f.db, &m).unwrap();
    (f, m, model)
}

#[test]
fn mouse_in_animal_context_maps_to_living_thing() {
    let (f, m, model) = trained(CompressionLevel::Reduced, 1);
    let s = Sentence::new(vec![
        Token::new("the"),
        Token::new("cat"),
        Token::new("chased"),
        Token::new("mouse").with_annotation("mouse", "NN", &[&f.key("mouse", 1)]),
        Token::new("cheese"),
    ]);
    let models = [model];
    let d = Disambiguator::new(&models, &f.db, &m).unwrap();
    let Decision::Predicted { key, backoff } = &d.sentence(&s)[3] else { panic!("no prediction") };
    assert!(!backoff);
    assert_eq!(m.tag_of(key).unwrap().to_string(), f.n(5).to_string());
    let s = Sentence::new(vec![
        Token::new("click"),
        Token::new("the"),
        Token::new("mouse").with_annotation("mouse", "NN", &[&f.key("mouse", 2)]),
        Token::new("button"),
    ]);
    let Decision::Predicted { key, .. } = &d.sentence(&s)[2] else { panic!("no prediction") };
    assert_eq!(key.as_str(), f.key("mouse", 2));
}

#[test]
fn backoff_forced_choice_and_unattemptable() {
    let (f, m, model) = trained(CompressionLevel::Synset, 2);
    // a second polysemous word whose senses were never seen in training
    let s = Sentence::new(vec![
        Token::new("whole").with_annotation("whole", "NN", &[&f.key("whole", 1)]),
        Token::new("gerbil").with_annotation("gerbil", "NN", &["gerbil%1:05:00::"]),
        Token::new("thing").with_annotation("thing", "", &["thing%1:03:00::"]),
        Token::new("cat"),
    ]);
    let models = [model];
    let d = Disambiguator::new(&models, &f.db, &m).unwrap();
    let out = d.sentence(&s);
    // one candidate: chosen whatever the model says
    assert_eq!(
        out[0],
        Decision::Predicted { key: f.db.senses_of("whole", sensefold::Pos::Noun)[0].key.clone(), backoff: false }
    );
    assert_eq!(out[1], Decision::Unattemptable);
    assert_eq!(out[2], Decision::Unattemptable);
    assert_eq!(out[3], Decision::NotTarget);
}

#[test]
fn unseen_polysemous_word_backs_off_to_first_sense() {
    let f = Mwn1::build();
    let m = build_mapping(&f.db, CompressionLevel::Synset);
    // no mouse token in training, so neither mouse tag is in the output vocabulary
    let corpus: Vec<_> = converted(&f, &m, mouse_corpus(&f, 20, 3))
        .into_iter()
        .map(|mut s| {
            s.tokens.retain(|t| t.surface != "mouse");
            s
        })
        .collect();
    let (model, _) = train(&ModelConfig { epochs: 2, ..small_config(1) }, &corpus, Some(&corpus), &f.db, &m).unwrap();
    let s = Sentence::new(vec![Token::new("mouse").with_annotation("mouse", "NN", &[&f.key("mouse", 2)])]);
    let models = [model];
    let mut d = Disambiguator::new(&models, &f.db, &m).unwrap();
    assert_eq!(
        d.sentence(&s)[0],
        Decision::Predicted { key: f.db.first_sense("mouse", sensefold::Pos::Noun).unwrap().clone(), backoff: true }
    );
    d.backoff = false;
    assert_eq!(d.sentence(&s)[0], Decision::Unattemptable);
}

#[test]
fn predictions_stay_within_candidates_and_reduced_tags_are_fixed_points() {
    let (f, m, model) = trained(CompressionLevel::Reduced, 3);
    let models = [model];
    let d = Disambiguator::new(&models, &f.db, &m).unwrap();
    let eval = mouse_corpus(&f, 30, 99);
    for s in &eval {
        for (tok, dec) in s.tokens.iter().zip(d.sentence(s)) {
            if let Decision::Predicted { key, .. } = dec {
                let senses = f.db.senses_of(tok.lemma.as_deref().unwrap(), tok.word_class().unwrap());
                assert!(senses.iter().any(|x| x.key == key));
                let tag = f.db.synset_of(&key).and_then(|s| m.map_synset(s)).unwrap();
                assert_eq!(m.map_synset(tag), Some(tag));
            }
        }
    }
}

#[test]
fn saved_models_round_trip() {
    let (f, _, model) = trained(CompressionLevel::Synset, 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.sfm");
    save_model(&model, &path).unwrap();
    let back = load_model(&path).unwrap();
    assert_eq!(back, model);
    for s in mouse_corpus(&f, 5, 8) {
        assert_eq!(back.forward(&s), model.forward(&s));
    }
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 7]).unwrap();
    assert!(matches!(load_model(&path), Err(sensefold::ModelError::Corrupt(_))));
}

#[test]
fn twenty_reloaded_models_score_like_the_in_memory_ensemble() {
    let f = Mwn1::build();
    let m = build_mapping(&f.db, CompressionLevel::Reduced);
    let corpus = converted(&f, &m, mouse_corpus(&f, 20, 5));
    let config = ModelConfig { epochs: 3, embedding_dim: 8, hidden_dim: 8, ..small_config(0) };
    let models: Vec<Model> = (1..=20)
        .map(|seed| train(&ModelConfig { seed, ..config.clone() }, &corpus, None, &f.db, &m).unwrap().0)
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let reloaded: Vec<Model> = models
        .iter()
        .enumerate()
        .map(|(i, model)| {
            let p = dir.path().join(format!("{i}.sfm"));
            save_model(model, &p).unwrap();
            load_model(&p).unwrap()
        })
        .collect();
    let eval = mouse_corpus(&f, 25, 77);
    let run =
        |ms: &[Model]| -> Vec<PredictedInstance> { Disambiguator::new(ms, &f.db, &m).unwrap().predict_corpus(&eval).0 };
    let a = run(&models);
    let b = run(&reloaded);
    assert_eq!(a, b);
    let ra = score(eval.iter().cloned().map(Ok), &a).unwrap();
    let rb = score(eval.iter().cloned().map(Ok), &b).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(ra.attempted, ra.total_instances);
    assert_eq!(ra.precision, ra.recall);
    assert_eq!(ra.f1, ra.precision);
}

#[test]
fn ensembling_models_with_different_tags_is_refused() {
    let (f, m, a) = trained(CompressionLevel::Synset, 1);
    let mut b = a.clone();
    b.tags = sensefold::model::Vocab::from_items(vec!["n99999999".into()]).unwrap();
    let models = [a, b];
    assert!(Disambiguator::new(&models, &f.db, &m).is_err());
}

#[test]
fn stale_models_are_refused() {
    let (f, _, model) = trained(CompressionLevel::Synset, 1);
    let reduced = build_mapping(&f.db, CompressionLevel::Reduced);
    let models = [model];
    assert!(matches!(Disambiguator::new(&models, &f.db, &reduced), Err(sensefold::ModelError::Stale { .. })));
}
