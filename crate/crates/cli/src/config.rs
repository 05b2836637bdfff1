//! Configuration files and their merge with command-line flags.
//!
//! Every subcommand has a table in the file. A value given as a flag wins
//! over the file, which wins over the built-in default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Command, CompareArgs, EvalArgs, ParseArgs, SynthArgs, TrainArgs};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub train: TrainFile,
    #[serde(default)]
    pub parse: ParseFile,
    #[serde(default)]
    pub eval: EvalFile,
    #[serde(default)]
    pub compare: CompareFile,
    #[serde(default)]
    pub synth: SynthFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainFile {
    pub model: Option<String>,
    pub distance: Option<bool>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub protect: Option<PathBuf>,
    pub attenuate: Option<bool>,
    pub base_add_num: Option<f64>,
    pub base_add_den: Option<f64>,
    pub backoff_weight: Option<f64>,
    pub skip_threshold: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParseFile {
    pub model_file: Option<PathBuf>,
    pub model: Option<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub beam: Option<usize>,
    pub true_tags: Option<PathBuf>,
    pub oracle_check: Option<usize>,
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalFile {
    pub gold: Option<PathBuf>,
    pub system: Option<PathBuf>,
    pub model_file: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareFile {
    pub gold: Option<PathBuf>,
    pub a: Option<PathBuf>,
    pub b: Option<PathBuf>,
    pub iterations: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthFile {
    pub grammar: Option<PathBuf>,
    pub model_file: Option<PathBuf>,
    pub sentences: Option<usize>,
    pub length_cap: Option<usize>,
    pub seed: Option<u64>,
    pub section_size: Option<usize>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainConfig {
    pub model: String,
    pub distance: bool,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub protect: Option<PathBuf>,
    pub attenuate: bool,
    pub base_add_num: f64,
    pub base_add_den: f64,
    pub backoff_weight: f64,
    pub skip_threshold: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParseConfig {
    pub model_file: Option<PathBuf>,
    pub model: Option<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Absent means exact search.
    pub beam: Option<usize>,
    pub true_tags: Option<PathBuf>,
    pub oracle_check: Option<usize>,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalConfig {
    pub gold: Option<PathBuf>,
    pub system: Option<PathBuf>,
    pub model_file: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareConfig {
    pub gold: Option<PathBuf>,
    pub a: Option<PathBuf>,
    pub b: Option<PathBuf>,
    pub iterations: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthConfig {
    pub grammar: Option<PathBuf>,
    pub model_file: Option<PathBuf>,
    pub sentences: usize,
    pub length_cap: usize,
    pub seed: u64,
    pub section_size: usize,
    pub output: Option<PathBuf>,
}

/// A subcommand's fully resolved settings.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunConfig {
    Train(TrainConfig),
    Parse(ParseConfig),
    Eval(EvalConfig),
    Compare(CompareConfig),
    Synth(SynthConfig),
}

impl RunConfig {
    pub fn resolve(cmd: &Command, file: &FileConfig) -> RunConfig {
        match cmd {
            Command::Train(a) => RunConfig::Train(train(a, &file.train)),
            Command::Parse(a) => RunConfig::Parse(parse(a, &file.parse)),
            Command::Eval(a) => RunConfig::Eval(eval(a, &file.eval)),
            Command::Compare(a) => RunConfig::Compare(compare(a, &file.compare)),
            Command::Synth(a) => RunConfig::Synth(synth(a, &file.synth)),
        }
    }

    /// Defaults of every subcommand, as a config file would spell them.
    pub fn all_defaults() -> String {
        let file = FileConfig::default();
        #[derive(Serialize)]
        struct All {
            train: TrainConfig,
            parse: ParseConfig,
            eval: EvalConfig,
            compare: CompareConfig,
            synth: SynthConfig,
        }
        let all = All {
            train: train(&TrainArgs::default(), &file.train),
            parse: parse(&ParseArgs::default(), &file.parse),
            eval: eval(&EvalArgs::default(), &file.eval),
            compare: compare(&CompareArgs::default(), &file.compare),
            synth: synth(&SynthArgs::default(), &file.synth),
        };
        toml::to_string(&all).expect("config serializes")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

fn train(a: &TrainArgs, f: &TrainFile) -> TrainConfig {
    let d = bbdep_core::SmoothingConfig::default();
    TrainConfig {
        model: pick(&a.model, &f.model).unwrap_or_else(|| "C".into()),
        distance: a.distance || f.distance.unwrap_or(false),
        input: pick(&a.input, &f.input),
        output: pick(&a.output, &f.output),
        protect: pick(&a.protect, &f.protect),
        attenuate: !a.no_attenuate && f.attenuate.unwrap_or(true),
        base_add_num: pick(&a.base_add_num, &f.base_add_num).unwrap_or(d.base_add_num),
        base_add_den: pick(&a.base_add_den, &f.base_add_den).unwrap_or(d.base_add_den),
        backoff_weight: pick(&a.backoff_weight, &f.backoff_weight).unwrap_or(d.backoff_weight),
        skip_threshold: pick(&a.skip_threshold, &f.skip_threshold),
    }
}

fn parse(a: &ParseArgs, f: &ParseFile) -> ParseConfig {
    ParseConfig {
        model_file: pick(&a.model_file, &f.model_file),
        model: pick(&a.model, &f.model),
        input: pick(&a.input, &f.input),
        output: pick(&a.output, &f.output),
        beam: if a.exact { None } else { pick(&a.beam, &f.beam) },
        true_tags: pick(&a.true_tags, &f.true_tags),
        oracle_check: pick(&a.oracle_check, &f.oracle_check),
        workers: pick(&a.workers, &f.workers).unwrap_or(1),
    }
}

fn eval(a: &EvalArgs, f: &EvalFile) -> EvalConfig {
    EvalConfig {
        gold: pick(&a.gold, &f.gold),
        system: pick(&a.system, &f.system),
        model_file: pick(&a.model_file, &f.model_file),
        report: pick(&a.report, &f.report),
        workers: pick(&a.workers, &f.workers).unwrap_or(1),
    }
}

fn compare(a: &CompareArgs, f: &CompareFile) -> CompareConfig {
    CompareConfig {
        gold: pick(&a.gold, &f.gold),
        a: pick(&a.a, &f.a),
        b: pick(&a.b, &f.b),
        iterations: pick(&a.iterations, &f.iterations).unwrap_or(10_000),
        seed: pick(&a.seed, &f.seed).unwrap_or(0),
    }
}

fn synth(a: &SynthArgs, f: &SynthFile) -> SynthConfig {
    let d = bbdep_core::SynthConfig::default();
    SynthConfig {
        grammar: pick(&a.grammar, &f.grammar),
        model_file: pick(&a.model_file, &f.model_file),
        sentences: pick(&a.sentences, &f.sentences).unwrap_or(d.sentences),
        length_cap: pick(&a.length_cap, &f.length_cap).unwrap_or(d.length_cap),
        seed: pick(&a.seed, &f.seed).unwrap_or(d.seed),
        section_size: pick(&a.section_size, &f.section_size).unwrap_or(d.section_size),
        output: pick(&a.output, &f.output),
    }
}
