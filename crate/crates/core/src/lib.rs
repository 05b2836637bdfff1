//! Statistical dependency parsing over bare-bones dependency structures:
//! corpus handling, backed-off estimation, generative models, exact span
//! decoding with a brute-force oracle, and evaluation.

pub mod corpus;
pub mod decoder;
pub mod error;
pub mod estimation;
pub mod evaluation;
pub mod models;
pub mod symbols;
pub mod synth;

pub use corpus::{
    attenuate_token, attenuate_training_corpus, cap, dist, read_corpus, read_corpus_with, validate_structure,
    write_corpus, CapClass, Corpus, DependencyStructure, Dir, DistBucket, ReadOptions, Section, Sentence, TagSet,
    TaggedWord, TinyClass,
};
pub use decoder::{
    brute_force_parse, detect_search_error, dp_parse, enumerate_projective, projective_count, BruteForceLimits,
    ParseOutput, SearchSettings, TagLattice,
};
pub use error::{CorpusError, DecodeError, EvalError, ModelError, StructureError, SynthError};
pub use estimation::{CountTable, Projection, Reduction, ReductionList, SmoothingConfig};
pub use evaluation::{
    aggregate, monte_carlo_compare, monte_carlo_counts, score_sentences, split_test_sections, EvalReport,
    SentenceResult, SignificanceResult, SystemParse,
};
pub use models::{baseline_parse, train, FactorTrace, ModelKind, ModelSpec, TrainedModel};
pub use synth::{sample_model, Grammar, SynthConfig};
