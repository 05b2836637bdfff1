//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use bbdep_core::decoder::SCORE_EPS;
use bbdep_core::{
    attenuate_token, attenuate_training_corpus, baseline_parse, brute_force_parse, detect_search_error, dp_parse,
    enumerate_projective, monte_carlo_compare, projective_count, read_corpus, score_sentences, train,
    validate_structure, BruteForceLimits, Corpus, CountTable, Grammar, ModelKind, ModelSpec, ReductionList,
    SearchSettings, Section, Sentence, SentenceResult, SmoothingConfig, SynthConfig, SystemParse, TagLattice, TagSet,
    TinyClass, TrainedModel,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Log-space agreement required between two scores of the same structure.
const LOG_TOL: f64 = 1e-9;
/// Criterion 6: required attachment advantage of model C over the baseline, in points.
const MIN_ADVANTAGE_PTS: f64 = 10.0;
/// Criterion 8: largest acceptable p for the systematically worse system.
const MAX_P_WORSE: f64 = 0.01;

const VOCAB: [&str; 5] = ["the", "dog", "saw", "in", "Cats"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn grammar(name: &str) -> Grammar {
    Grammar::parse(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn small_tagset() -> TagSet {
    TagSet::new([
        ("DT".to_string(), "D".to_string(), TinyClass::NounModifier),
        ("NN".to_string(), "N".to_string(), TinyClass::Noun),
        ("NNS".to_string(), "N".to_string(), TinyClass::Noun),
        ("VB".to_string(), "V".to_string(), TinyClass::Verb),
        ("IN".to_string(), "IN".to_string(), TinyClass::Preposition),
    ])
    .unwrap()
}

fn random_words(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    (0..n).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect()
}

/// Random annotated sentences over the five-word vocabulary.
fn random_corpus(rng: &mut ChaCha8Rng, sentences: usize, max_len: usize) -> Corpus {
    let ts = small_tagset();
    let mut out = Vec::new();
    for _ in 0..sentences {
        let n = rng.gen_range(1..=max_len);
        let parents = enumerate_projective(n).unwrap().choose(rng).unwrap().clone();
        let tags = (0..n).map(|_| ts.tags().choose(rng).unwrap().clone()).collect();
        out.push(Sentence::annotated(random_words(rng, n), tags, parents));
    }
    Corpus {
        tagset: ts,
        sections: vec![Section {
            id: "rand".into(),
            sentences: out,
        }],
    }
}

/// One to three candidates per word from the five tags.
fn random_lattice(rng: &mut ChaCha8Rng, n: usize) -> TagLattice {
    TagLattice::from_indices(
        (0..n)
            .map(|_| {
                let mut all: Vec<usize> = (0..5).collect();
                all.shuffle(rng);
                all.truncate(rng.gen_range(1..=3));
                all
            })
            .collect(),
    )
}

fn oracle_equivalence() -> Outcome {
    let kinds = [
        ModelKind::X,
        ModelKind::B1,
        ModelKind::B2,
        ModelKind::B3,
        ModelKind::C,
        ModelKind::CNoLex,
        ModelKind::CDist,
        ModelKind::D,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut checked, mut failures) = (0, Vec::new());
    for kind in kinds {
        for round in 0..25 {
            let corpus = random_corpus(&mut rng, 15, 6);
            let spec = if kind == ModelKind::D && round % 2 == 1 {
                ModelSpec::with_distance(kind).unwrap()
            } else {
                ModelSpec::new(kind)
            };
            let m = train(spec, &corpus, SmoothingConfig::default()).unwrap();
            for _ in 0..8 {
                let n = rng.gen_range(1..=6);
                let s = Sentence::new(random_words(&mut rng, n));
                let lattice = random_lattice(&mut rng, n);
                let dp = dp_parse(&m, &s, &lattice, SearchSettings::exact()).unwrap();
                let bf = brute_force_parse(&m, &s, &lattice, BruteForceLimits::default()).unwrap();
                checked += 1;
                let same =
                    (dp.log_score - bf.log_score).abs() <= LOG_TOL && dp.parents == bf.parents && dp.tags == bf.tags;
                if !same {
                    failures.push(format!("{kind} {:?}: {:?} vs {:?}", s.words, dp.parents, bf.parents));
                }
            }
        }
    }
    let per_model = checked / kinds.len();
    outcome(
        failures.is_empty() && per_model >= 200,
        format!(
            "{checked} sentences ({per_model} per model), {} disagreements{}",
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(", first: {f}"))
        ),
    )
}

fn factorization_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let corpus = random_corpus(&mut rng, 60, 7);
    let sm = SmoothingConfig::default();
    let b3 = train(ModelSpec::new(ModelKind::B3), &corpus, sm).unwrap();
    let c = train(ModelSpec::new(ModelKind::C), &corpus, sm).unwrap();
    let x = train(ModelSpec::new(ModelKind::X), &corpus, sm).unwrap();
    let mut worst: f64 = 0.0;
    let trials = 1000;
    for _ in 0..trials {
        let n = rng.gen_range(1..=8);
        let parents = enumerate_projective(n).unwrap().choose(&mut rng).unwrap().clone();
        let s = Sentence::new(random_words(&mut rng, n));
        let tags: Vec<String> = (0..n)
            .map(|_| corpus.tagset.tags().choose(&mut rng).unwrap().clone())
            .collect();
        let score = |m: &TrainedModel| m.score(&m.structure_for(&s, &tags, &parents)).unwrap();
        worst = worst.max((score(&b3) - (score(&c) + score(&x))).abs());
    }
    outcome(
        worst <= LOG_TOL,
        format!("{trials} structures, max |B3 - (C + X)| = {worst:.2e}"),
    )
}

/// Number of well-formed structures over `n >= 1` words in closed form,
/// `C(3n - 2, n - 1) / n`.
fn closed_form_count(n: u64) -> u128 {
    let (top, k) = (3 * n - 2, n - 1);
    let mut binom: u128 = 1;
    for i in 0..k {
        binom = binom * (top - i) as u128 / (i + 1) as u128;
    }
    binom / n as u128
}

/// The same count by recursion on the head: a tree over `k` words is a head
/// with a left and a right sequence of subtrees, and a sequence over `m`
/// words starts with a tree over some prefix.
fn recursive_count(n: usize) -> u128 {
    let mut trees = vec![0u128; n + 1];
    let mut seqs = vec![1u128; n + 1];
    for k in 1..=n {
        trees[k] = (1..=k).map(|r| seqs[r - 1] * seqs[k - r]).sum();
        seqs[k] = (1..=k).map(|j| trees[j] * seqs[k - j]).sum();
    }
    trees[n]
}

fn enumeration_soundness() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for n in 1..=8usize {
        // Every vector over 1..=n+1, decoded most significant digit first so
        // the filter keeps lexicographic order.
        let base = n + 1;
        let filtered: Vec<Vec<usize>> = (0..base.pow(n as u32))
            .map(|mut code| {
                let mut v = vec![0; n];
                for slot in v.iter_mut().rev() {
                    *slot = code % base + 1;
                    code /= base;
                }
                v
            })
            .filter(|v| validate_structure(v).is_ok())
            .collect();
        let enumerated = enumerate_projective(n).unwrap();
        let ok = enumerated == filtered
            && enumerated.len() as u128 == closed_form_count(n as u64)
            && projective_count(n) == closed_form_count(n as u64)
            && recursive_count(n) == closed_form_count(n as u64);
        pass &= ok;
        notes.push(format!("n={n}:{}", enumerated.len()));
    }
    pass &= enumerate_projective(1).unwrap().len() == 1 && enumerate_projective(2).unwrap().len() == 2;
    outcome(pass, notes.join(" "))
}

/// Naive counts over raw observations: the estimator's definition, computed
/// without the count table.
struct NaiveBackoff {
    obs: Vec<([u32; 3], u32)>,
    levels: Vec<Vec<Vec<usize>>>,
}

impl NaiveBackoff {
    fn counts(&self, level: usize, cond: &[u32; 3], out: u32) -> (f64, f64) {
        let (mut num, mut den) = (0.0, 0.0);
        for proj in &self.levels[level] {
            for (c, o) in &self.obs {
                if proj.iter().all(|&s| c[s] == cond[s]) {
                    den += 1.0;
                    if *o == out {
                        num += 1.0;
                    }
                }
            }
        }
        (num, den)
    }

    fn estimate(&self, level: usize, cond: &[u32; 3], out: u32) -> f64 {
        let (num, den) = self.counts(level, cond, out);
        if level + 1 == self.levels.len() {
            return (num + 0.005) / (den + 0.5);
        }
        (num + 3.0 * self.estimate(level + 1, cond, out)) / (den + 3.0)
    }
}

fn smoothing_exactness() -> Outcome {
    let sm = SmoothingConfig::default();
    let empty = CountTable::new();
    let single = ReductionList::from_slots(900, &[&[&[0, 1]]]);
    let two = ReductionList::from_slots(901, &[&[&[0, 1]], &[&[1]]]);
    let zero_single = empty.estimate(&[20, 21], &[30], &single, &sm);
    let zero_two = empty.estimate(&[20, 21], &[30], &two, &sm);

    let levels: &[&[&[usize]]] = &[&[&[0, 1]], &[&[0], &[1]], &[&[2]]];
    let list = ReductionList::from_slots(902, levels);
    let obs: Vec<([u32; 3], u32)> = vec![
        ([1, 1, 1], 7),
        ([1, 2, 1], 7),
        ([1, 2, 1], 8),
        ([2, 1, 1], 8),
        ([2, 2, 2], 7),
        ([3, 3, 1], 9),
        ([1, 2, 2], 7),
    ];
    let mut table = CountTable::new();
    for (c, o) in &obs {
        table.observe(c, &[*o], &list);
    }
    let naive = NaiveBackoff {
        obs,
        levels: levels.iter().map(|l| l.iter().map(|p| p.to_vec()).collect()).collect(),
    };
    let queries: [([u32; 3], u32); 10] = [
        ([1, 2, 1], 7),
        ([1, 2, 1], 8),
        ([1, 1, 1], 8),
        ([2, 2, 2], 7),
        ([3, 1, 1], 9),
        ([4, 4, 1], 7),
        ([4, 4, 3], 7),
        ([2, 1, 1], 7),
        ([1, 3, 2], 9),
        ([3, 3, 1], 9),
    ];
    let mut worst: f64 = 0.0;
    for (c, o) in &queries {
        worst = worst.max((table.estimate(c, &[*o], &list, &sm) - naive.estimate(0, c, *o)).abs());
    }
    // Written out by hand for [1, 2, 1] -> 7: level 0 is (1, 2) with 2 of 3,
    // level 1 sums a=1 (3 of 4) and b=2 (3 of 4), level 2 is c=1 (2 of 5).
    let p2 = (2.0 + 0.005) / (5.0 + 0.5);
    let p1 = (6.0 + 3.0 * p2) / (8.0 + 3.0);
    let by_hand = (2.0 + 3.0 * p1) / (3.0 + 3.0);
    let hand_ok = (table.estimate(&[1, 2, 1], &[7], &list, &sm) - by_hand).abs() <= 1e-15;

    // The count-threshold shortcut on a two-level list: 8 observations of a
    // condition give the raw relative frequency, 7 fall through to backoff.
    let skip = SmoothingConfig::with_skip();
    let observed = |times: usize| {
        let mut t = CountTable::new();
        for k in 0..times {
            t.observe(&[5, 5], &[if k < 5 { 7 } else { 8 }], &two);
        }
        t
    };
    let (t8, t7) = (observed(8), observed(7));
    let skipped = t8.estimate(&[5, 5], &[7], &two, &skip);
    let backed_off = (5.0 + 3.0 * ((5.0 + 0.005) / (7.0 + 0.5))) / (7.0 + 3.0);
    let skip_ok = skipped == 5.0 / 8.0
        && skipped != t8.estimate(&[5, 5], &[7], &two, &sm)
        && t7.estimate(&[5, 5], &[7], &two, &skip) == backed_off;

    let pass = zero_single == 0.01 && zero_two == 0.01 && worst <= 1e-15 && hand_ok && skip_ok;
    outcome(
        pass,
        format!(
            "zero-count {zero_single} / {zero_two}, 10 disjunctive cases max diff {worst:.1e}, hand case {hand_ok}, threshold 8 gives {skipped}"
        ),
    )
}

fn search_error_rate(m: &TrainedModel, test: &[Sentence], settings: SearchSettings, true_tags: bool) -> f64 {
    let mut errors = 0;
    for s in test {
        let (tags, parents) = (s.gold_tags.as_ref().unwrap(), s.gold_parents.as_ref().unwrap());
        let mut lattice = TagLattice::from_model(m, s);
        if true_tags {
            lattice = lattice.restrict(m.tagset(), tags);
        }
        let out = dp_parse(m, s, &lattice, settings).unwrap();
        let gold = m.structure_for(s, tags, parents);
        if detect_search_error(m, &gold, &out.structure(m, s)).unwrap() {
            errors += 1;
        }
    }
    100.0 * errors as f64 / test.len() as f64
}

fn search_error_property() -> Outcome {
    let g = grammar("garden_path.toml");
    let cfg = |sentences, seed| SynthConfig {
        sentences,
        seed,
        ..SynthConfig::default()
    };
    let train_set = g.sample(&cfg(1000, 1)).unwrap();
    let test: Vec<Sentence> = g.sample(&cfg(300, 2)).unwrap().sentences().cloned().collect();
    let mut exact_rates = Vec::new();
    for kind in [ModelKind::C, ModelKind::D, ModelKind::B2] {
        let m = train(ModelSpec::new(kind), &train_set, SmoothingConfig::default()).unwrap();
        exact_rates.push(search_error_rate(&m, &test, SearchSettings::exact(), false));
    }
    let c = train(ModelSpec::new(ModelKind::C), &train_set, SmoothingConfig::default()).unwrap();
    let beam = search_error_rate(&c, &test, SearchSettings::beam(1), false);
    let beam_true = search_error_rate(&c, &test, SearchSettings::beam(1), true);
    outcome(
        exact_rates.iter().all(|&r| r == 0.0) && beam > 0.0 && beam_true < beam,
        format!("exact C/D/B2 {exact_rates:?}%, beam(1) {beam:.1}%, beam(1) with true tags {beam_true:.1}%"),
    )
}

fn attachment(gold: &[Sentence], system: &[SystemParse], tagset: &TagSet) -> f64 {
    let results = score_sentences(gold, system, tagset, None).unwrap();
    let (hits, total) = results.iter().fold((0, 0), |(h, t), r| {
        (h + r.scored_words() - r.attachment_errors(), t + r.scored_words())
    });
    100.0 * hits as f64 / total as f64
}

fn end_to_end_learning() -> Outcome {
    let g = grammar("toy_grammar.toml");
    let cap = 10;
    let sample = |sentences, seed| {
        g.sample(&SynthConfig {
            sentences,
            seed,
            length_cap: cap,
            ..SynthConfig::default()
        })
    };
    let train_set = sample(2000, 11).unwrap();
    let test: Vec<Sentence> = sample(200, 12).unwrap().sentences().cloned().collect();
    let vocab = train_set.vocabulary().len();
    let c = train(ModelSpec::new(ModelKind::C), &train_set, SmoothingConfig::default()).unwrap();
    let base = train(
        ModelSpec::new(ModelKind::Baseline),
        &train_set,
        SmoothingConfig::default(),
    )
    .unwrap();
    let parse_c: Vec<SystemParse> = test
        .iter()
        .map(|s| {
            let out = dp_parse(&c, s, &TagLattice::from_model(&c, s), SearchSettings::exact()).unwrap();
            SystemParse {
                tags: out.tags,
                parents: out.parents,
            }
        })
        .collect();
    let parse_b: Vec<SystemParse> = test
        .iter()
        .map(|s| {
            let (tags, parents) = baseline_parse(&base, s);
            SystemParse { tags, parents }
        })
        .collect();
    let (ac, ab) = (
        attachment(&test, &parse_c, &train_set.tagset),
        attachment(&test, &parse_b, &train_set.tagset),
    );
    let shape_ok = vocab <= 30 && train_set.tagset.len() <= 6 && test.iter().all(|s| s.len() <= cap);
    outcome(
        shape_ok && ac - ab >= MIN_ADVANTAGE_PTS,
        format!(
            "vocabulary {vocab}, {} tags; model C {ac:.1}% vs baseline {ab:.1}% attachment",
            train_set.tagset.len()
        ),
    )
}

fn tagger_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut disagreements = 0;
    let sentences = 100;
    for k in 0..sentences {
        let corpus = random_corpus(&mut rng, 20, 6);
        let m = train(ModelSpec::new(ModelKind::X), &corpus, SmoothingConfig::default()).unwrap();
        let n = 1 + k % 6;
        let s = Sentence::new(random_words(&mut rng, n));
        let lattice = random_lattice(&mut rng, n);
        let dp = dp_parse(&m, &s, &lattice, SearchSettings::exact()).unwrap();
        // Every tag sequence scored by the sum of its trigram factors; the
        // first within tolerance of the best, in lexicographic order, wins.
        let mut all = Vec::new();
        let mut choice = vec![0usize; n];
        'outer: loop {
            let tags: Vec<String> = (0..n)
                .map(|i| m.tagset().tags()[lattice.candidates(i)[choice[i]]].clone())
                .collect();
            let d = m.structure_for(&s, &tags, &vec![n + 1; n]);
            let tw = |p: isize| -> bbdep_core::TaggedWord {
                if p < 1 {
                    bbdep_core::TaggedWord::special("BOS")
                } else if p as usize > n {
                    bbdep_core::TaggedWord::special("EOS")
                } else {
                    d.words[p as usize - 1].clone()
                }
            };
            let score: f64 = (1..=n as isize + 1)
                .map(|j| m.trigram_factor(&tw(j - 2), &tw(j - 1), &tw(j)).unwrap())
                .sum();
            all.push((score, tags));
            for i in (0..n).rev() {
                choice[i] += 1;
                if choice[i] < lattice.candidates(i).len() {
                    continue 'outer;
                }
                choice[i] = 0;
            }
            break;
        }
        let top = all.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
        let (score, tags) = all.into_iter().find(|a| a.0 >= top - SCORE_EPS).unwrap();
        if tags != dp.tags || (score - dp.log_score).abs() > LOG_TOL {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!("{sentences} sentences, {disagreements} disagreements"),
    )
}

fn synthetic_results(errors: &[usize]) -> Vec<SentenceResult> {
    let word = |ok: bool| bbdep_core::evaluation::WordResult {
        correct_tag: true,
        correct_parent: ok,
        punctuation: false,
        tiny: TinyClass::Noun,
        parent_tiny: Some(TinyClass::Verb),
        unknown: false,
    };
    errors
        .iter()
        .map(|&e| SentenceResult {
            words: (0..10).map(|i| word(i >= e)).collect(),
            search_error: None,
        })
        .collect()
}

fn significance_test() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let base: Vec<usize> = (0..50).map(|_| rng.gen_range(0..=3)).collect();
    let worse: Vec<usize> = base.iter().map(|e| e + 3).collect();
    let (a, b) = (synthetic_results(&base), synthetic_results(&worse));
    let same = monte_carlo_compare(&a, &a, 10_000, 5).unwrap();
    let diff = monte_carlo_compare(&a, &b, 10_000, 5).unwrap();
    let again = monte_carlo_compare(&a, &b, 10_000, 5).unwrap();
    let mixed = monte_carlo_compare(
        &a,
        &synthetic_results(&[&base[..25], &worse[25..]].concat()),
        10_000,
        17,
    )
    .unwrap();
    let mixed_again = monte_carlo_compare(
        &a,
        &synthetic_results(&[&base[..25], &worse[25..]].concat()),
        10_000,
        17,
    )
    .unwrap();
    let pass = same.p_value == 1.0
        && diff.p_value <= MAX_P_WORSE
        && diff.p_value.to_bits() == again.p_value.to_bits()
        && mixed.p_value.to_bits() == mixed_again.p_value.to_bits();
    outcome(
        pass,
        format!(
            "identical p = {}, +3 errors x 50 sentences p = {:.6} (mu {:.3}), reruns bit-identical",
            same.p_value, diff.p_value, diff.mu
        ),
    )
}

fn serialization() -> Outcome {
    let g = grammar("toy_grammar.toml");
    let corpus = g
        .sample(&SynthConfig {
            sentences: 150,
            seed: 21,
            ..SynthConfig::default()
        })
        .unwrap();
    let corpus = attenuate_training_corpus(&corpus, &HashSet::new());
    let probe: Vec<Sentence> = g
        .sample(&SynthConfig {
            sentences: 30,
            seed: 22,
            ..SynthConfig::default()
        })
        .unwrap()
        .sentences()
        .cloned()
        .collect();
    let mut specs: Vec<ModelSpec> = ModelKind::ALL.iter().map(|&k| ModelSpec::new(k)).collect();
    specs.push(ModelSpec::with_distance(ModelKind::D).unwrap());
    specs.push(ModelSpec::with_distance(ModelKind::A).unwrap());
    let mut failures = Vec::new();
    for spec in &specs {
        for sm in [SmoothingConfig::default(), SmoothingConfig::with_skip()] {
            let m = train(*spec, &corpus, sm).unwrap();
            let mut buf = Vec::new();
            m.save(&mut buf).unwrap();
            let back = TrainedModel::load(buf.as_slice()).unwrap();
            let mut again = Vec::new();
            back.save(&mut again).unwrap();
            let mut same = buf == again;
            for s in &probe {
                if spec.kind == ModelKind::Baseline {
                    same &= baseline_parse(&m, s) == baseline_parse(&back, s);
                    continue;
                }
                let (tags, parents) = (s.gold_tags.as_ref().unwrap(), s.gold_parents.as_ref().unwrap());
                let x = m.score(&m.structure_for(s, tags, parents)).unwrap();
                let y = back.score(&back.structure_for(s, tags, parents)).unwrap();
                same &= x.to_bits() == y.to_bits();
            }
            if !same {
                failures.push(format!("{}{}", spec.kind, if spec.use_distance { "+dist" } else { "" }));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} model variants x 2 smoothing settings, {} probe sentences each; failures {failures:?}",
            specs.len(),
            probe.len()
        ),
    )
}

fn attenuation() -> Outcome {
    let table = std::fs::read_to_string(fixture("attenuation_words.tsv")).unwrap();
    let mut cases = 0;
    let mut wrong = Vec::new();
    let mut kinds = HashSet::new();
    for line in table.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
        let (form, expected) = line.split_once('\t').unwrap();
        cases += 1;
        let got = attenuate_token(form);
        kinds.insert(if expected == "MORPH-NUM" || expected == "MORPH-SHORT" {
            expected
        } else {
            "MORPH-XX"
        });
        if got != expected {
            wrong.push(format!("{form}->{got}"));
        }
    }

    // Each word is replaced throughout the first section in which it
    // appears, and nowhere else; protected words never are.
    let corpus = read_corpus(
        std::fs::File::open(fixture("three_sections.dep"))
            .map(std::io::BufReader::new)
            .unwrap(),
    )
    .unwrap();
    let protected: HashSet<String> = ["barked".to_string()].into();
    let att = attenuate_training_corpus(&corpus, &protected);
    let forms: Vec<Vec<Vec<String>>> = att
        .sections
        .iter()
        .map(|sec| {
            sec.sentences
                .iter()
                .map(|s| s.forms_and_caps().into_iter().map(|f| f.0).collect())
                .collect()
        })
        .collect();
    let expected: Vec<Vec<Vec<&str>>> = vec![
        vec![
            vec!["MORPH-SHORT", "MORPH-SHORT", "barked"],
            vec!["MORPH-SHORT", "MORPH-ED"],
        ],
        vec![vec!["the", "MORPH-SHORT", "barked"], vec!["MORPH-SHORT", "snoozed"]],
        vec![vec!["the", "cat", "MORPH-SHORT"]],
    ];
    let sections_ok = forms == expected;
    let caps_kept = att.sections[0].sentences[1].forms_and_caps()[0].1 == bbdep_core::CapClass::Init;
    outcome(
        wrong.is_empty() && cases == 20 && kinds.len() == 3 && sections_ok && caps_kept,
        format!(
            "{cases} words, wrong {wrong:?}; first-section replacement {sections_ok}, capitalization kept {caps_kept}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("factorization identity", factorization_identity),
        ("enumeration soundness", enumeration_soundness),
        ("smoothing exactness", smoothing_exactness),
        ("search-error property", search_error_property),
        ("end-to-end learning signal", end_to_end_learning),
        ("tagger correctness", tagger_correctness),
        ("significance test", significance_test),
        ("serialization", serialization),
        ("attenuation", attenuation),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| outcome(false, format!("panicked: {:?}", e.downcast_ref::<String>())));
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        failed += !result.pass as usize;
        println!(
            "criterion {:>2} {verdict} {name}: {} [{:.1}s]",
            k + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
