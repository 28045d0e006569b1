use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensefold::compress::{build_mapping, CompressionLevel};
use sensefold::corpus::{convert_corpus, read_corpus, write_corpus, Attrs, Converter};
use sensefold::fixtures::{mouse_corpus, random_dict, Mwn1};
use sensefold::load_wordnet;
use sensefold::model::{build_vocabularies, ensemble, Model, ModelConfig};

fn mapping_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("mapping_build");
    for n in [500, 5_000] {
        let (db, _) = random_dict(1, n, n / 4).build().unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("random", n), &db, |b, db| {
            b.iter(|| build_mapping(black_box(db), CompressionLevel::Reduced))
        });
    }
    if let Some(dir) = std::env::var_os("SENSEFOLD_WORDNET_DIR") {
        let db = load_wordnet(dir).unwrap();
        group.sample_size(10);
        group.bench_function("wordnet-3.0", |b| b.iter(|| build_mapping(black_box(&db), CompressionLevel::Reduced)));
    }
    group.finish();
}

fn forward_pass(c: &mut Criterion) {
    let f = Mwn1::build();
    let m = build_mapping(&f.db, CompressionLevel::Synset);
    let mut conv = Converter::new(&m, &f.db).unwrap();
    let corpus: Vec<_> = mouse_corpus(&f, 200, 1).into_iter().map(|s| conv.convert_sentence(s)).collect();
    let (words, tags) = build_vocabularies(&corpus, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let model = Model::new(ModelConfig::default(), m.level, words, tags, &mut rng);
    let sentence = corpus.iter().max_by_key(|s| s.tokens.len()).unwrap();
    let mut group = c.benchmark_group("forward");
    group.throughput(Throughput::Elements(sentence.tokens.len() as u64));
    group.bench_function("default_dims", |b| b.iter(|| model.forward(black_box(sentence))));
    let batch: Vec<_> = corpus.iter().take(100).map(|s| model.encode(s, Some(80))).collect();
    group.bench_function("loss_and_grad_100_sentences", |b| b.iter(|| model.loss_and_grad(black_box(&batch), None)));
    group.finish();
}

fn ensembling(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut group = c.benchmark_group("ensemble");
    for classes in [100, 40_000] {
        let dists: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                let raw: Vec<f64> = (0..classes).map(|_| rng.gen_range(1e-6..1.0)).collect();
                let z: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / z).collect()
            })
            .collect();
        let refs: Vec<&[f64]> = dists.iter().map(Vec::as_slice).collect();
        group.bench_with_input(BenchmarkId::new("20_models", classes), &refs, |b, refs| {
            b.iter(|| ensemble(black_box(refs)).unwrap())
        });
    }
    group.finish();
}

fn corpus_convert(c: &mut Criterion) {
    let f = Mwn1::build();
    let m = build_mapping(&f.db, CompressionLevel::Reduced);
    let dir = std::env::temp_dir().join(format!("sensefold-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corpus.xml");
    write_corpus(mouse_corpus(&f, 2_000, 4).into_iter().map(Ok), &Attrs::default(), &path).unwrap();
    let mut group = c.benchmark_group("corpus");
    group.throughput(Throughput::Bytes(std::fs::metadata(&path).unwrap().len()));
    group.bench_function("read_and_convert_2000_sentences", |b| {
        b.iter(|| convert_corpus(read_corpus(&path).unwrap(), &m, &f.db).unwrap().map(Result::unwrap).count())
    });
    group.finish();
    std::fs::remove_dir_all(&dir).ok();
}

criterion_group!(benches, mapping_build, forward_pass, ensembling, corpus_convert);
criterion_main!(benches);
