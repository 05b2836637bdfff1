use thiserror::Error;

/// Why a parent vector is not a well-formed dependency structure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("empty sentence")]
    Empty,
    #[error("{words} words but {parents} parents")]
    Length { words: usize, parents: usize },
    #[error("parent of word {word} out of range: {parent}")]
    ParentOutOfRange { word: usize, parent: usize },
    #[error("no word attaches to EOS")]
    NoRoot,
    #[error("multiple words attach to EOS: {words:?}")]
    MultipleRoots { words: Vec<usize> },
    #[error("links of words {first} and {second} cross")]
    Crossing { first: usize, second: usize },
    #[error("word {word} lies on a cycle")]
    Cycle { word: usize },
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: field {field}: {msg}")]
    Parse {
        line: usize,
        field: &'static str,
        msg: String,
    },
    #[error("invalid tag set: {0}")]
    TagSet(String),
    #[error("section {section}, sentence {sentence}: {msg}")]
    Annotation {
        section: String,
        sentence: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model {model} does not use factor {factor}")]
    UnsupportedFactor { model: &'static str, factor: &'static str },
    #[error("ill-formed structure: {0}")]
    IllFormed(#[from] StructureError),
    #[error("tag {0} is not in the model's tag set")]
    UnknownTag(String),
    #[error("training data: {0}")]
    Training(#[from] CorpusError),
    #[error("model file line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("model {0} cannot be decoded by the span dynamic program")]
    UnsupportedModel(&'static str),
    #[error("sentence of length {n} exceeds the brute-force cap of {cap}")]
    TooLong { n: usize, cap: usize },
    #[error("{0} candidate taggings exceed the brute-force bound")]
    TooManyTaggings(u128),
    #[error("no tag candidates at position {0}")]
    EmptyLattice(usize),
    #[error("lattice has {lattice} positions, sentence has {sentence}")]
    LatticeLength { lattice: usize, sentence: usize },
    #[error("no well-formed structure satisfies the constraints")]
    NoParse,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold has {gold} sentences, system has {system}")]
    SentenceCount { gold: usize, system: usize },
    #[error("sentence {index}: {msg}")]
    Misaligned { index: usize, msg: String },
    #[error("no sentences to evaluate")]
    Empty,
    #[error("iterations must be at least 1")]
    NoIterations,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("grammar: {0}")]
    Grammar(String),
    #[error("model {0} cannot be sampled; use C or C'")]
    UnsupportedModel(&'static str),
    #[error("no sentence within {cap} words after {attempts} attempts")]
    Exhausted { cap: usize, attempts: usize },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}
