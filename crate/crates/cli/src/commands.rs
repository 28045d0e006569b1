use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sensefold::compress::{build_mapping, read_mapping, vocab_stats, write_mapping, CompressionLevel, SenseMapping};
use sensefold::corpus::{Converter, CorpusReader, CorpusWriter, Sentence, TagVocabulary, ATTR_LEVEL, ATTR_MAPPING};
use sensefold::eval::{
    coverage, first_sense_baseline, gold_instances, mean_stdev, read_predictions, score, score_instances,
    write_predictions, EvalReport,
};
use sensefold::fingerprint;
use sensefold::model::{load_model, save_model, train_with_embeddings, Disambiguator, Embeddings, Model};
use sensefold::wordnet::{load_wordnet, WordNetDb};

use crate::args::*;
use crate::error::CliError;

/// Inputs and seeds seen while running a command, for the run manifest.
#[derive(Debug, Default)]
pub struct Context {
    pub inputs: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
}

impl Context {
    fn record(&mut self, path: &Path) -> Result<(), CliError> {
        let fp = fingerprint::of_file(path)?;
        self.inputs.insert(path.display().to_string(), fp);
        Ok(())
    }

    fn wordnet(&mut self, args: &WordNetArgs) -> Result<WordNetDb, CliError> {
        if !args.wordnet.is_dir() {
            return Err(CliError::usage(format!("WordNet directory {} does not exist", args.wordnet.display())));
        }
        let start = Instant::now();
        let db = load_wordnet(&args.wordnet)?;
        log::info!(
            "loaded WordNet in {:.2?}: {} synsets, {} sense keys",
            start.elapsed(),
            db.synset_count(),
            db.sense_count()
        );
        self.inputs.insert(args.wordnet.display().to_string(), db.fingerprint().to_string());
        Ok(db)
    }

    fn mapping(
        &mut self,
        db: &WordNetDb,
        args: &MappingArgs,
        fallback: Option<CompressionLevel>,
    ) -> Result<SenseMapping, CliError> {
        match (&args.mapping, args.level) {
            (Some(path), level) => {
                require(path)?;
                self.record(path)?;
                let m = read_mapping(path)?;
                m.check_db(db)?;
                if let Some(level) = level.filter(|&l| l != m.level) {
                    return Err(CliError::usage(format!("--level {level} disagrees with mapping level {}", m.level)));
                }
                Ok(m)
            }
            (None, Some(level)) => Ok(build_mapping(db, level)),
            (None, None) => match fallback {
                Some(level) => Ok(build_mapping(db, level)),
                None => Err(CliError::usage("one of --mapping or --level is required")),
            },
        }
    }

    fn corpus(&mut self, path: &Path) -> Result<CorpusReader<BufReader<File>>, CliError> {
        require(path)?;
        self.record(path)?;
        Ok(CorpusReader::new(BufReader::new(File::open(path)?))?)
    }

    /// Sentences of several corpora, converted at the mapping's level.
    fn converted(
        &mut self,
        paths: &[PathBuf],
        db: &WordNetDb,
        mapping: &SenseMapping,
    ) -> Result<Vec<Sentence>, CliError> {
        let mut converter = Converter::new(mapping, db)?;
        let mut out = Vec::new();
        for path in paths {
            for sentence in self.corpus(path)? {
                out.push(converter.convert_sentence(sentence?));
            }
        }
        log_convert_stats(&converter);
        Ok(out)
    }

    fn gold(&mut self, path: &Path) -> Result<Vec<Sentence>, CliError> {
        Ok(self.corpus(path)?.collect::<Result<_, _>>()?)
    }

    fn models(&mut self, src: &ModelSource) -> Result<Vec<Model>, CliError> {
        let mut paths = src.model.clone();
        if let Some(dir) = &src.model_dir {
            require(dir)?;
            let mut found: Vec<PathBuf> = fs::read_dir(dir)?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .filter(|p| p.extension().is_some_and(|e| e == "sfm"))
                .collect();
            found.sort();
            paths.extend(found);
        }
        if paths.is_empty() {
            return Err(CliError::usage("no models given; use --model or --model-dir"));
        }
        for p in &paths {
            require(p)?;
            self.record(p)?;
        }
        let models = paths.par_iter().map(load_model).collect::<Result<Vec<_>, _>>()?;
        Ok(models)
    }
}

fn require(path: &Path) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::usage(format!("{} does not exist", path.display())))
    }
}

fn log_convert_stats(c: &Converter<'_>) {
    let s = &c.stats;
    log::info!(
        "converted {} sentences, {} tokens: {} tagged, {} multi-key, {} unresolvable keys",
        s.sentences,
        s.tokens,
        s.tagged,
        s.multi_key,
        s.unresolvable_keys
    );
}

fn create_parent(path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(())
}

/// `N` or an inclusive range `A..B`. A single seed with `--models K` expands
/// to `N..N+K-1`.
pub fn parse_seeds(spec: &str, models: Option<usize>) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::usage(format!("bad --seed '{spec}': expected N or A..B"));
    let seeds: Vec<u64> = match spec.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if b < a {
                return Err(bad());
            }
            (a..=b).collect()
        }
        None => {
            let n: u64 = spec.trim().parse().map_err(|_| bad())?;
            (0..models.unwrap_or(1) as u64).map(|i| n + i).collect()
        }
    };
    match models {
        Some(0) => Err(CliError::usage("--models must be positive")),
        Some(k) if k != seeds.len() => {
            Err(CliError::usage(format!("--models {k} but --seed {spec} gives {} seeds", seeds.len())))
        }
        _ => Ok(seeds),
    }
}

pub fn compress(ctx: &mut Context, args: &CompressArgs) -> Result<(), CliError> {
    let db = ctx.wordnet(&args.wordnet)?;
    let start = Instant::now();
    let mapping = build_mapping(&db, args.level);
    log::info!("built {} mapping in {:.2?}", args.level, start.elapsed());
    create_parent(&args.out)?;
    write_mapping(&mapping, &args.out)?;
    for line in vocab_stats(&db, &mapping).to_lines() {
        println!("{line}");
    }
    Ok(())
}

pub fn convert(ctx: &mut Context, args: &ConvertArgs) -> Result<(), CliError> {
    let db = ctx.wordnet(&args.wordnet)?;
    let mapping = ctx.mapping(&db, &args.mapping, None)?;
    let mut converter = Converter::new(&mapping, &db)?;
    let mut readers = Vec::new();
    for path in &args.corpus {
        readers.push(ctx.corpus(path)?);
    }
    let mut attrs: Vec<(String, String)> =
        readers[0].corpus_attrs().iter().filter(|(k, _)| k != ATTR_LEVEL && k != ATTR_MAPPING).cloned().collect();
    attrs.push((ATTR_LEVEL.to_string(), mapping.level.to_string()));
    attrs.push((ATTR_MAPPING.to_string(), mapping.fingerprint()));
    create_parent(&args.out)?;
    let mut writer = CorpusWriter::new(BufWriter::new(File::create(&args.out)?), &attrs)?;
    for reader in readers {
        for sentence in reader {
            writer.write_sentence(&converter.convert_sentence(sentence?))?;
        }
    }
    writer.finish()?;
    log_convert_stats(&converter);
    let s = &converter.stats;
    println!("sentences={}", s.sentences);
    println!("tokens={}", s.tokens);
    println!("tagged={}", s.tagged);
    println!("multi_key={}", s.multi_key);
    println!("unresolvable_keys={}", s.unresolvable_keys);
    println!("untagged_annotated={}", s.untagged_annotated);
    Ok(())
}

pub fn stats(ctx: &mut Context, args: &StatsArgs) -> Result<(), CliError> {
    let db = ctx.wordnet(&args.wordnet)?;
    let mapping = ctx.mapping(&db, &args.mapping, Some(CompressionLevel::Reduced))?;
    let stats = vocab_stats(&db, &mapping);
    for line in stats.to_lines() {
        println!("{line}");
    }
    for path in &args.corpus {
        let sentences = ctx.converted(std::slice::from_ref(path), &db, &mapping)?;
        let mut vocab = TagVocabulary::new(mapping.level);
        sentences.iter().for_each(|s| vocab.add_sentence(s, &db));
        let (all, poly) = vocab.fraction_of(&stats);
        println!(
            "corpus={} tags={} tags_polysemous={} fraction={:.4} fraction_polysemous={:.4}",
            path.display(),
            vocab.len(),
            vocab.polysemous.len(),
            all,
            poly
        );
    }
    Ok(())
}

pub fn coverage_cmd(ctx: &mut Context, args: &CoverageArgs) -> Result<(), CliError> {
    let db = ctx.wordnet(&args.wordnet)?;
    let mapping = ctx.mapping(&db, &args.mapping, None)?;
    let mut vocab = TagVocabulary::new(mapping.level);
    for s in ctx.converted(&args.corpus, &db, &mapping)? {
        vocab.add_sentence(&s, &db);
    }
    for path in &args.eval {
        let report = coverage(&vocab, ctx.corpus(path)?, &db, &mapping)?;
        println!("corpus\t{}", path.display());
        print!("{}", report.to_kv());
    }
    Ok(())
}

pub fn train(ctx: &mut Context, args: &TrainArgs) -> Result<(), CliError> {
    let seeds = parse_seeds(&args.seed, args.models)?;
    let base = args.hyper.config(seeds[0]);
    base.validate()?;
    ctx.seeds = seeds.clone();
    let db = ctx.wordnet(&args.wordnet)?;
    let mapping = ctx.mapping(&db, &args.mapping, None)?;
    let train_set = ctx.converted(&args.corpus, &db, &mapping)?;
    let dev_set = match &args.dev {
        Some(p) => Some(ctx.converted(std::slice::from_ref(p), &db, &mapping)?),
        None => None,
    };
    let embeddings = match &args.embeddings {
        Some(p) => {
            require(p)?;
            ctx.record(p)?;
            Some(Embeddings::read(p)?)
        }
        None => None,
    };
    fs::create_dir_all(&args.out)?;
    let results: Vec<(u64, f64, usize, PathBuf)> = seeds
        .par_iter()
        .map(|&seed| -> Result<_, CliError> {
            let config = args.hyper.config(seed);
            let (model, report) =
                train_with_embeddings(&config, &train_set, dev_set.as_deref(), &db, &mapping, embeddings.as_ref())?;
            let path = args.out.join(format!("model-seed{seed}.sfm"));
            save_model(&model, &path)?;
            let report_path = args.out.join(format!("model-seed{seed}.report.json"));
            let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::internal(e.to_string()))?;
            fs::write(report_path, json + "\n")?;
            Ok((seed, model.meta.best_dev_f1, report.selected_epoch, path))
        })
        .collect::<Result<_, _>>()?;
    for (seed, f1, epoch, path) in &results {
        println!("seed={seed} selected_epoch={epoch} dev_f1={f1:.2} model={}", path.display());
    }
    if results.len() > 1 {
        let f1s: Vec<f64> = results.iter().map(|r| r.1).collect();
        let (mean, sd) = mean_stdev(&f1s);
        println!("dev_f1_mean={mean:.2} dev_f1_stdev={sd:.2} models={}", results.len());
    }
    Ok(())
}

fn disambiguator<'a>(
    models: &'a [Model],
    db: &'a WordNetDb,
    mapping: &'a SenseMapping,
    no_backoff: bool,
) -> Result<Disambiguator<'a>, CliError> {
    let mut d = Disambiguator::new(models, db, mapping)?;
    d.backoff = !no_backoff;
    Ok(d)
}

pub fn disambiguate(ctx: &mut Context, args: &DisambiguateArgs) -> Result<(), CliError> {
    let db = ctx.wordnet(&args.wordnet)?;
    let models = ctx.models(&args.models)?;
    let mapping = ctx.mapping(&db, &args.mapping, Some(models[0].level))?;
    let corpus = ctx.gold(&args.corpus)?;
    let mut d = disambiguator(&models, &db, &mapping, args.no_backoff)?;
    d.all_words = args.all_words;
    let (predictions, unattempted) = d.predict_corpus(&corpus);
    create_parent(&args.out)?;
    write_predictions(&predictions, &args.out)?;
    let backoff = predictions.iter().filter(|p| p.backoff).count();
    println!("predicted={} backoff={} unattempted={} models={}", predictions.len(), backoff, unattempted, models.len());
    Ok(())
}

fn print_report(path: &Path, label: &str, report: &EvalReport, kv: bool) {
    if kv {
        println!("corpus\t{}", path.display());
        println!("system\t{label}");
        print!("{}", report.to_kv());
    } else {
        println!("{} [{label}]", path.display());
        print!("{}", report.to_table());
    }
}

pub fn evaluate(ctx: &mut Context, args: &EvaluateArgs) -> Result<(), CliError> {
    let db = ctx.wordnet(&args.wordnet)?;
    if let Some(pred_path) = &args.predictions {
        if args.corpus.len() != 1 {
            return Err(CliError::usage("--predictions scores exactly one --corpus"));
        }
        require(pred_path)?;
        ctx.record(pred_path)?;
        let predictions = read_predictions(pred_path)?;
        let report = score(ctx.corpus(&args.corpus[0])?, &predictions)?;
        print_report(&args.corpus[0], "predictions", &report, args.kv);
        return Ok(());
    }
    if args.first_sense {
        for path in &args.corpus {
            let predictions = first_sense_baseline(ctx.corpus(path)?, &db)?;
            let report = score(ctx.corpus(path)?, &predictions)?;
            print_report(path, "first-sense", &report, args.kv);
        }
        return Ok(());
    }
    let models = ctx.models(&args.models)?;
    let mapping = ctx.mapping(&db, &args.mapping, Some(models[0].level))?;
    for path in &args.corpus {
        let corpus = ctx.gold(path)?;
        let gold = gold_instances(corpus.iter().cloned().map(Ok))?;
        if args.ensemble || models.len() == 1 {
            let d = disambiguator(&models, &db, &mapping, args.no_backoff)?;
            let report = score_instances(&gold, &d.predict_corpus(&corpus).0)?;
            let label = if models.len() == 1 { "model".to_string() } else { format!("ensemble of {}", models.len()) };
            print_report(path, &label, &report, args.kv);
        } else {
            let reports = models
                .par_iter()
                .map(|m| -> Result<EvalReport, CliError> {
                    let one = std::slice::from_ref(m);
                    let d = disambiguator(one, &db, &mapping, args.no_backoff)?;
                    Ok(score_instances(&gold, &d.predict_corpus(&corpus).0)?)
                })
                .collect::<Result<Vec<_>, _>>()?;
            println!("corpus\t{}", path.display());
            for (i, r) in reports.iter().enumerate() {
                println!("model{i}\tf1\t{:.2}", r.f1);
            }
            let f1s: Vec<f64> = reports.iter().map(|r| r.f1).collect();
            let (mean, sd) = mean_stdev(&f1s);
            println!("f1_mean\t{mean:.2}");
            println!("f1_stdev\t{sd:.2}");
        }
    }
    Ok(())
}

pub fn flush_stdout() -> Result<(), CliError> {
    std::io::stdout().flush()?;
    Ok(())
}
