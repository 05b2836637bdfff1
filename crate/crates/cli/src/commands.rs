use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use bbdep_core::{
    aggregate, attenuate_training_corpus, baseline_parse, brute_force_parse, dp_parse, monte_carlo_compare,
    read_corpus_with, sample_model, score_sentences, train, write_corpus, BruteForceLimits, Corpus, DecodeError,
    EvalError, Grammar, ModelKind, ModelSpec, ReadOptions, SearchSettings, Section, Sentence, SentenceResult,
    SmoothingConfig, SystemParse, TagLattice, TagSet, TrainedModel,
};
use rayon::prelude::*;

use crate::config::{CompareConfig, EvalConfig, ParseConfig, RunConfig, SynthConfig, TrainConfig};
use crate::Failure;

pub fn run(cfg: &RunConfig) -> Result<(), Failure> {
    match cfg {
        RunConfig::Train(c) => cmd_train(c),
        RunConfig::Parse(c) => cmd_parse(c),
        RunConfig::Eval(c) => cmd_eval(c),
        RunConfig::Compare(c) => cmd_compare(c),
        RunConfig::Synth(c) => cmd_synth(c),
    }
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    p.as_deref()
        .ok_or_else(|| Failure::Usage(format!("{flag} is required")))
}

fn read(path: &Path, allow_ill_formed: bool) -> anyhow::Result<Corpus> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_corpus_with(BufReader::new(f), ReadOptions { allow_ill_formed })
        .with_context(|| format!("reading {}", path.display()))
}

/// Reads a corpus that must be fully annotated, listing every problem.
fn read_annotated(path: &Path) -> anyhow::Result<Corpus> {
    let corpus = read(path, true)?;
    let problems = corpus.annotation_problems();
    if !problems.is_empty() {
        for p in &problems {
            eprintln!("{}: {p}", path.display());
        }
        return Err(anyhow!(
            "{}: {} sentences lack usable annotation",
            path.display(),
            problems.len()
        ));
    }
    Ok(corpus)
}

fn load_model(path: &Path) -> anyhow::Result<TrainedModel> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    TrainedModel::load(BufReader::new(f)).with_context(|| format!("loading {}", path.display()))
}

/// Runs `write` against the file, or standard output when no path is given.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(f);
            write(&mut w)
                .and_then(|_| w.flush())
                .with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w).context("writing standard output")
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, Failure> {
    if workers == 0 {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::Data(e.into()))
}

fn cmd_train(c: &TrainConfig) -> Result<(), Failure> {
    let input = required(&c.input, "--in")?;
    let output = required(&c.output, "--out")?;
    let kind: ModelKind = c.model.parse().map_err(Failure::Usage)?;
    let spec = if c.distance {
        ModelSpec::with_distance(kind).map_err(|e| Failure::Usage(e.to_string()))?
    } else {
        ModelSpec::new(kind)
    };
    let smoothing = SmoothingConfig {
        base_add_num: c.base_add_num,
        base_add_den: c.base_add_den,
        backoff_weight: c.backoff_weight,
        skip_threshold: c.skip_threshold,
    };
    smoothing.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let mut corpus = read_annotated(input)?;
    if c.attenuate {
        let protected = match &c.protect {
            Some(p) => read(p, true)?.vocabulary(),
            None => Default::default(),
        };
        corpus = attenuate_training_corpus(&corpus, &protected);
    }
    let m = train(spec, &corpus, smoothing).map_err(|e| Failure::Data(e.into()))?;
    emit(Some(output), |w| m.save(w))?;
    println!("trained model {} on {} sentences", kind.name(), corpus.sentence_count());
    for (family, n) in m.event_counts() {
        println!("{family}\t{n}");
    }
    Ok(())
}

/// Outcome of comparing the span decoder with exhaustive search.
enum Oracle {
    Agreed,
    /// Too long or too ambiguous to enumerate.
    Skipped,
    Mismatch(String),
}

struct Parsed {
    tags: Vec<String>,
    parents: Vec<usize>,
    pruned: bool,
    oracle: Option<Oracle>,
}

fn same_tagset(a: &TagSet, b: &TagSet) -> bool {
    a.entries().eq(b.entries())
}

fn cmd_parse(c: &ParseConfig) -> Result<(), Failure> {
    let model_path = required(&c.model_file, "--model-file")?;
    let input_path = required(&c.input, "--in")?;
    let pool = pool(c.workers)?;
    let m = load_model(model_path)?;
    let baseline = match &c.model {
        None => m.kind() == ModelKind::Baseline,
        Some(name) => {
            let kind: ModelKind = name.parse().map_err(Failure::Usage)?;
            if kind != ModelKind::Baseline && kind != m.kind() {
                return Err(Failure::Usage(format!("model file holds {}, not {}", m.kind(), kind)));
            }
            kind == ModelKind::Baseline || m.kind() == ModelKind::Baseline
        }
    };
    let input = read(input_path, true)?;
    if !same_tagset(&input.tagset, m.tagset()) {
        return Err(Failure::Data(anyhow!(
            "{}: tag set differs from the model's",
            input_path.display()
        )));
    }
    let sentences: Vec<&Sentence> = input.sentences().collect();
    let constraints: Option<Vec<Vec<String>>> = match &c.true_tags {
        None => None,
        Some(p) => {
            let t = read(p, true)?;
            let tagged: Vec<&Sentence> = t.sentences().collect();
            if tagged.len() != sentences.len() {
                return Err(Failure::Data(anyhow!(
                    "{}: {} sentences, input has {}",
                    p.display(),
                    tagged.len(),
                    sentences.len()
                )));
            }
            let mut out = Vec::with_capacity(tagged.len());
            for (k, (s, g)) in tagged.iter().zip(&sentences).enumerate() {
                match &s.gold_tags {
                    Some(tags) if tags.len() == g.len() => out.push(tags.clone()),
                    _ => {
                        return Err(Failure::Data(anyhow!(
                            "{}: sentence {} has no aligned tags",
                            p.display(),
                            k + 1
                        )))
                    }
                }
            }
            Some(out)
        }
    };
    if baseline && (c.beam.is_some() || c.true_tags.is_some() || c.oracle_check.is_some()) {
        eprintln!("note: search options are ignored by the baseline");
    }
    let settings = c.beam.map_or(SearchSettings::exact(), SearchSettings::beam);
    let parse_one = |i: usize| -> Result<Parsed, DecodeError> {
        let s = sentences[i];
        if baseline {
            let (tags, parents) = baseline_parse(&m, s);
            return Ok(Parsed {
                tags,
                parents,
                pruned: false,
                oracle: None,
            });
        }
        let mut lattice = TagLattice::from_model(&m, s);
        if let Some(cs) = &constraints {
            lattice = lattice.restrict(m.tagset(), &cs[i]);
        }
        let out = dp_parse(&m, s, &lattice, settings)?;
        let oracle = match c.oracle_check {
            Some(limit) if s.len() <= limit => {
                let exact = if settings.beam.is_none() {
                    out.clone()
                } else {
                    dp_parse(&m, s, &lattice, SearchSettings::exact())?
                };
                let limits = BruteForceLimits {
                    max_len: limit,
                    ..BruteForceLimits::default()
                };
                match brute_force_parse(&m, s, &lattice, limits) {
                    Ok(b) => Some(
                        if (b.log_score - exact.log_score).abs() <= 1e-9
                            && b.parents == exact.parents
                            && b.tags == exact.tags
                        {
                            Oracle::Agreed
                        } else {
                            Oracle::Mismatch(format!(
                                "sentence {}: dynamic program {:.12} {:?}, exhaustive search {:.12} {:?}",
                                i + 1,
                                exact.log_score,
                                exact.parents,
                                b.log_score,
                                b.parents
                            ))
                        },
                    ),
                    Err(DecodeError::TooManyTaggings(_) | DecodeError::TooLong { .. }) => Some(Oracle::Skipped),
                    Err(e) => return Err(e),
                }
            }
            _ => None,
        };
        Ok(Parsed {
            tags: out.tags,
            parents: out.parents,
            pruned: out.pruned,
            oracle,
        })
    };
    let parsed: Vec<Parsed> = pool
        .install(|| {
            (0..sentences.len())
                .into_par_iter()
                .map(parse_one)
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(|e| Failure::Data(e.into()))?;

    let (mut agreed, mut skipped, mut mismatches) = (0, 0, Vec::new());
    for p in &parsed {
        match &p.oracle {
            Some(Oracle::Agreed) => agreed += 1,
            Some(Oracle::Skipped) => skipped += 1,
            Some(Oracle::Mismatch(msg)) => mismatches.push(msg.as_str()),
            None => {}
        }
    }
    let mode = if baseline {
        "baseline".to_string()
    } else {
        c.beam.map_or("exact".to_string(), |w| format!("beam {w}"))
    };
    eprintln!("parsed {} sentences ({mode})", parsed.len());
    if c.beam.is_some() && !baseline {
        eprintln!(
            "pruning occurred in {} sentences",
            parsed.iter().filter(|p| p.pruned).count()
        );
    }
    if c.oracle_check.is_some() && !baseline {
        eprintln!(
            "oracle check: {agreed} agreed, {skipped} skipped, {} mismatched",
            mismatches.len()
        );
        if !mismatches.is_empty() {
            for msg in &mismatches {
                eprintln!("  {msg}");
            }
            return Err(Failure::Check(format!("{} oracle mismatches", mismatches.len())));
        }
    }

    let mut it = parsed.into_iter();
    let sections = input
        .sections
        .iter()
        .map(|sec| Section {
            id: sec.id.clone(),
            sentences: sec
                .sentences
                .iter()
                .map(|s| {
                    let p = it.next().expect("one parse per sentence");
                    Sentence::annotated(s.words.clone(), p.tags, p.parents)
                })
                .collect(),
        })
        .collect();
    let out = Corpus {
        tagset: m.tagset().clone(),
        sections,
    };
    emit(c.output.as_deref(), |w| write_corpus(&out, w))?;
    Ok(())
}

fn system_parses(path: &Path, gold: &[&Sentence]) -> anyhow::Result<Vec<SystemParse>> {
    let sys = read(path, true)?;
    let sentences: Vec<&Sentence> = sys.sentences().collect();
    if sentences.len() != gold.len() {
        return Err(anyhow!(
            "{}: {} sentences, gold has {}",
            path.display(),
            sentences.len(),
            gold.len()
        ));
    }
    sentences
        .iter()
        .zip(gold)
        .enumerate()
        .map(|(k, (s, g))| match (&s.gold_tags, &s.gold_parents) {
            (Some(tags), Some(parents)) if s.words == g.words => Ok(SystemParse {
                tags: tags.clone(),
                parents: parents.clone(),
            }),
            (Some(_), Some(_)) => Err(anyhow!(
                "{}: sentence {} has different words from gold",
                path.display(),
                k + 1
            )),
            _ => Err(anyhow!("{}: sentence {} lacks tags or parents", path.display(), k + 1)),
        })
        .collect()
}

/// Scores sentence by sentence so the work can be spread over `pool`.
fn score_parallel(
    pool: &rayon::ThreadPool,
    gold: &[Sentence],
    sys: &[SystemParse],
    tagset: &TagSet,
    m: Option<&TrainedModel>,
) -> Result<Vec<SentenceResult>, EvalError> {
    if gold.len() != sys.len() {
        return Err(EvalError::SentenceCount {
            gold: gold.len(),
            system: sys.len(),
        });
    }
    pool.install(|| {
        (0..gold.len())
            .into_par_iter()
            .map(|i| match score_sentences(&gold[i..=i], &sys[i..=i], tagset, m) {
                Ok(mut v) => Ok(v.remove(0)),
                Err(EvalError::Misaligned { msg, .. }) => Err(EvalError::Misaligned { index: i + 1, msg }),
                Err(e) => Err(e),
            })
            .collect()
    })
}

fn cmd_eval(c: &EvalConfig) -> Result<(), Failure> {
    let gold_path = required(&c.gold, "--gold")?;
    let sys_path = required(&c.system, "--system")?;
    let pool = pool(c.workers)?;
    let gold = read_annotated(gold_path)?;
    let gold_refs: Vec<&Sentence> = gold.sentences().collect();
    let sys = system_parses(sys_path, &gold_refs)?;
    let m = c.model_file.as_deref().map(load_model).transpose()?;
    if let Some(m) = &m {
        if !same_tagset(&gold.tagset, m.tagset()) {
            return Err(Failure::Data(anyhow!(
                "{}: tag set differs from the model's",
                gold_path.display()
            )));
        }
    }
    let gold_sentences: Vec<Sentence> = gold_refs.into_iter().cloned().collect();
    let results =
        score_parallel(&pool, &gold_sentences, &sys, &gold.tagset, m.as_ref()).map_err(|e| Failure::Data(e.into()))?;
    let report = aggregate(&results).map_err(|e| Failure::Data(e.into()))?;
    emit(c.report.as_deref(), |w| w.write_all(report.render().as_bytes()))?;
    Ok(())
}

fn cmd_compare(c: &CompareConfig) -> Result<(), Failure> {
    let gold_path = required(&c.gold, "--gold")?;
    let a_path = required(&c.a, "--a")?;
    let b_path = required(&c.b, "--b")?;
    if c.iterations == 0 {
        return Err(Failure::Usage("--iterations must be at least 1".into()));
    }
    let gold = read_annotated(gold_path)?;
    let gold_refs: Vec<&Sentence> = gold.sentences().collect();
    let gold_sentences: Vec<Sentence> = gold_refs.iter().map(|s| (*s).clone()).collect();
    let score = |p: &Path| -> Result<Vec<SentenceResult>, Failure> {
        let sys = system_parses(p, &gold_refs)?;
        score_sentences(&gold_sentences, &sys, &gold.tagset, None).map_err(|e| Failure::Data(e.into()))
    };
    let (a, b) = (score(a_path)?, score(b_path)?);
    let r = monte_carlo_compare(&a, &b, c.iterations, c.seed).map_err(|e| Failure::Data(e.into()))?;
    println!("{r}");
    Ok(())
}

fn cmd_synth(c: &SynthConfig) -> Result<(), Failure> {
    let cfg = bbdep_core::SynthConfig {
        sentences: c.sentences,
        length_cap: c.length_cap,
        seed: c.seed,
        section_size: c.section_size,
        ..bbdep_core::SynthConfig::default()
    };
    if cfg.length_cap == 0 || cfg.section_size == 0 {
        return Err(Failure::Usage(
            "--length-cap and --section-size must be at least 1".into(),
        ));
    }
    let corpus = match (&c.grammar, &c.model_file) {
        (Some(g), None) => {
            let text = std::fs::read_to_string(g).with_context(|| format!("reading {}", g.display()))?;
            let grammar = Grammar::parse(&text).with_context(|| g.display().to_string())?;
            grammar.sample(&cfg).map_err(|e| Failure::Data(e.into()))?
        }
        (None, Some(p)) => sample_model(&load_model(p)?, &cfg).map_err(|e| Failure::Data(e.into()))?,
        _ => return Err(Failure::Usage("give exactly one of --grammar and --model-file".into())),
    };
    emit(c.output.as_deref(), |w| write_corpus(&corpus, w))?;
    Ok(())
}
