//! Input generators shared by the benchmarks.

use bbdep_core::{train, Corpus, Grammar, ModelKind, ModelSpec, Sentence, SmoothingConfig, SynthConfig, TrainedModel};

const GRAMMAR: &str = include_str!("../../core/tests/fixtures/toy_grammar.toml");

/// A corpus sampled from the toy grammar with sentences of up to `length_cap` words.
pub fn toy_corpus(sentences: usize, length_cap: usize, seed: u64) -> Corpus {
    let g = Grammar::parse(GRAMMAR).expect("bundled grammar parses");
    let cfg = SynthConfig {
        sentences,
        length_cap,
        seed,
        ..SynthConfig::default()
    };
    g.sample(&cfg).expect("grammar terminates")
}

/// Model `kind` trained on 500 toy sentences.
pub fn toy_model(kind: ModelKind) -> TrainedModel {
    train(
        ModelSpec::new(kind),
        &toy_corpus(500, 12, 1),
        SmoothingConfig::default(),
    )
    .expect("toy corpus trains")
}

/// Up to `count` sampled sentences of exactly `n` words.
pub fn sentences_of_length(n: usize, count: usize) -> Vec<Sentence> {
    let corpus = toy_corpus(4000, n.max(1), 99);
    corpus
        .sentences()
        .filter(|s| s.len() == n)
        .take(count)
        .cloned()
        .collect()
}
