//! Probability models over tagged dependency structures: training, factor
//! scores, whole-structure scores and the deterministic baseline.

mod baseline;
mod events;
pub mod features;
mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::corpus::{
    attenuate_token, CapClass, Corpus, DependencyStructure, Dir, DistBucket, Sentence, TagSet, TaggedWord,
};
use crate::error::ModelError;
use crate::estimation::{CountTable, SmoothingConfig};
use crate::symbols::{Sym, Symbols};

pub use baseline::{baseline_parse, BaselineStats};
pub use events::FactorEvent;
pub(crate) use events::Walker;
use features::{family, TagFeatures, Tw};

/// Model identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Trigram tagging plus a yes/no decision for every word pair.
    A,
    /// Trigram tagging, child sequences, and a parent expectation per word.
    B1,
    /// B1 plus the side on which each word expects its parent.
    B2,
    /// Trigram tagging and child sequences.
    B3,
    /// Child sequences generated top-down from EOS.
    C,
    /// C with child words predicted from their tag alone.
    CNoLex,
    /// C plus a distance factor per child.
    CDist,
    /// Trigram tagging plus child selection among the words of the sentence.
    D,
    /// Trigram tagger.
    X,
    /// Modal tag and modal parent offset.
    Baseline,
}

impl ModelKind {
    pub const ALL: [ModelKind; 10] = [
        ModelKind::A,
        ModelKind::B1,
        ModelKind::B2,
        ModelKind::B3,
        ModelKind::C,
        ModelKind::CNoLex,
        ModelKind::CDist,
        ModelKind::D,
        ModelKind::X,
        ModelKind::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::A => "A",
            ModelKind::B1 => "B1",
            ModelKind::B2 => "B2",
            ModelKind::B3 => "B3",
            ModelKind::C => "C",
            ModelKind::CNoLex => "C_nolex",
            ModelKind::CDist => "C_dist",
            ModelKind::D => "D",
            ModelKind::X => "X",
            ModelKind::Baseline => "BASELINE",
        }
    }

    pub fn has_trigram(self) -> bool {
        matches!(
            self,
            ModelKind::A | ModelKind::B1 | ModelKind::B2 | ModelKind::B3 | ModelKind::D | ModelKind::X
        )
    }

    /// Whether the model generates child sequences (child factors or model D links).
    pub fn has_child_sequences(self) -> bool {
        matches!(
            self,
            ModelKind::B1
                | ModelKind::B2
                | ModelKind::B3
                | ModelKind::C
                | ModelKind::CNoLex
                | ModelKind::CDist
                | ModelKind::D
        )
    }

    pub fn has_child_factor(self) -> bool {
        self.has_child_sequences() && self != ModelKind::D
    }

    pub fn has_parent_factor(self) -> bool {
        matches!(self, ModelKind::B1 | ModelKind::B2)
    }

    pub fn has_link_factor(self) -> bool {
        matches!(self, ModelKind::A | ModelKind::D)
    }

    pub fn has_distance_factor(self) -> bool {
        self == ModelKind::CDist
    }

    pub fn is_probabilistic(self) -> bool {
        self != ModelKind::Baseline
    }

    /// Link factors see the previous child through `tiny` as well as `short`.
    pub(crate) fn sibling_uses_tiny(self) -> bool {
        self.has_link_factor()
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || (s.eq_ignore_ascii_case("C'") && *k == ModelKind::CNoLex))
            .ok_or_else(|| {
                let names: Vec<&str> = ModelKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown model {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// A model identifier with its flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Distance-augmented link reductions (models A and D only).
    pub use_distance: bool,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> ModelSpec {
        ModelSpec {
            kind,
            use_distance: false,
        }
    }

    pub fn with_distance(kind: ModelKind) -> Result<ModelSpec, ModelError> {
        let spec = ModelSpec {
            kind,
            use_distance: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.use_distance && !self.kind.has_link_factor() {
            return Err(ModelError::Invalid(format!(
                "the distance flag applies to models A and D, not {}",
                self.kind
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.use_distance {
            f.write_str("+distance")?;
        }
        Ok(())
    }
}

/// One estimator lookup: list, condition and outcome.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lookup {
    pub list: u16,
    pub condition: Vec<Sym>,
    pub outcome: Vec<Sym>,
}

impl Lookup {
    pub fn family(&self) -> &'static str {
        family::name(self.list)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub event: FactorEvent,
    pub condition: String,
    pub outcome: String,
    pub log_score: f64,
}

impl TraceEntry {
    pub fn family(&self) -> &'static str {
        self.event.kind_name()
    }
}

/// The factors contributing to a structure's score, in generation order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FactorTrace {
    pub entries: Vec<TraceEntry>,
}

impl FactorTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.log_score).sum()
    }

    pub fn count(&self, family: &str) -> usize {
        self.entries.iter().filter(|e| e.family() == family).count()
    }
}

impl fmt::Display for FactorTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<9} {:>12.6}  {} -> {}",
                e.family(),
                e.log_score,
                e.condition,
                e.outcome
            )?;
        }
        Ok(())
    }
}

/// A trained model. Immutable once built.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    spec: ModelSpec,
    smoothing: SmoothingConfig,
    tagset: TagSet,
    symbols: Symbols,
    features: TagFeatures,
    counts: CountTable,
    /// Training form (after attenuation) to the tags it was seen with, in tag-set order.
    tag_dictionary: BTreeMap<String, Vec<String>>,
    /// Lowercased training surfaces, before attenuation.
    lexicon: BTreeSet<String>,
    baseline: BaselineStats,
}

/// Trains `spec` on a fully annotated corpus whose attenuation marks are already set.
pub fn train(spec: ModelSpec, corpus: &Corpus, smoothing: SmoothingConfig) -> Result<TrainedModel, ModelError> {
    spec.validate()?;
    smoothing.validate()?;
    corpus.check_annotated()?;
    let mut symbols = Symbols::new();
    let features = TagFeatures::new(&corpus.tagset, &mut symbols);
    let mut dict: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut structures = Vec::with_capacity(corpus.sentence_count());
    for s in corpus.sentences() {
        let d = s.gold_structure().expect("checked annotation");
        for w in &d.words {
            symbols.intern(&w.form);
            let idx = corpus.tagset.index_of(&w.tag).expect("checked tags");
            dict.entry(w.form.clone()).or_default().insert(idx);
        }
        structures.push(d);
    }
    let tag_dictionary = dict
        .into_iter()
        .map(|(form, idx)| (form, idx.into_iter().map(|i| corpus.tagset.tags()[i].clone()).collect()))
        .collect();
    let mut model = TrainedModel {
        spec,
        smoothing,
        tagset: corpus.tagset.clone(),
        symbols,
        features,
        counts: CountTable::new(),
        tag_dictionary,
        lexicon: corpus.vocabulary().into_iter().collect(),
        baseline: BaselineStats::from_structures(&structures, &corpus.tagset),
    };
    let mut counts = CountTable::new();
    for d in &structures {
        let words = model.intern_words(&d.words)?;
        model.walker().training_events(&words, &d.parents, |e| {
            e.for_each_lookup(&model.features, |list, cond, out| counts.observe(cond, out, list));
        });
    }
    model.counts = counts;
    Ok(model)
}

impl TrainedModel {
    pub fn spec(&self) -> ModelSpec {
        self.spec
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub fn smoothing(&self) -> &SmoothingConfig {
        &self.smoothing
    }

    pub fn tagset(&self) -> &TagSet {
        &self.tagset
    }

    pub fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    pub fn counts(&self) -> &CountTable {
        &self.counts
    }

    pub fn baseline_stats(&self) -> &BaselineStats {
        &self.baseline
    }

    /// Tags seen with a (post-attenuation) training form.
    pub fn dictionary_tags(&self, form: &str) -> Option<&[String]> {
        self.tag_dictionary.get(form).map(Vec::as_slice)
    }

    /// Every (post-attenuation) training form with its tags, in form order.
    pub fn dictionary(&self) -> impl Iterator<Item = (&str, &[String])> + '_ {
        self.tag_dictionary.iter().map(|(f, t)| (f.as_str(), t.as_slice()))
    }

    /// Whether a lowercased surface form occurred anywhere in training.
    pub fn in_lexicon(&self, lower: &str) -> bool {
        self.lexicon.contains(lower)
    }

    /// A copy with different smoothing constants over the same counts.
    pub fn with_smoothing(&self, smoothing: SmoothingConfig) -> Result<TrainedModel, ModelError> {
        smoothing.validate()?;
        Ok(TrainedModel {
            smoothing,
            ..self.clone()
        })
    }

    /// Forms the model sees for an input sentence: known forms lowercased,
    /// forms absent from the tag dictionary attenuated.
    pub fn input_forms(&self, s: &Sentence) -> Vec<(String, CapClass)> {
        s.forms_and_caps()
            .into_iter()
            .map(|(form, cap)| {
                if self.tag_dictionary.contains_key(&form) {
                    (form, cap)
                } else {
                    (attenuate_token(&form), cap)
                }
            })
            .collect()
    }

    /// The structure the model scores for `s` under the given tags and parents.
    pub fn structure_for(&self, s: &Sentence, tags: &[String], parents: &[usize]) -> DependencyStructure {
        let words = self
            .input_forms(s)
            .into_iter()
            .zip(tags)
            .map(|((form, cap), tag)| TaggedWord {
                form,
                tag: tag.clone(),
                cap,
            })
            .collect();
        DependencyStructure {
            words,
            parents: parents.to_vec(),
        }
    }

    /// Number of observations recorded per reduction list, by family name.
    pub fn event_counts(&self) -> Vec<(&'static str, u64)> {
        use family::*;
        [
            TRI_TAG,
            TRI_WORD,
            TRI_CAP,
            CHILD_TAG,
            CHILD_WORD,
            CHILD_WORD_NOLEX,
            CHILD_CAP,
            DIST,
            PARENT_TAG,
            PARENT_WORD,
            PARENT_CAP,
            PARENT_DIR,
            LINK,
            LINK_DIST,
        ]
        .into_iter()
        .map(|id| (family::name(id), self.counts.observations(id)))
        .filter(|&(_, c)| c > 0)
        .collect()
    }

    pub(crate) fn walker(&self) -> Walker<'_> {
        Walker {
            spec: self.spec,
            feat: &self.features,
        }
    }

    pub(crate) fn tw(&self, w: &TaggedWord) -> Tw {
        if w.is_special() {
            return Tw::special(self.symbols.get(&w.tag));
        }
        Tw::intern(w, &self.symbols)
    }

    fn intern_words(&self, words: &[TaggedWord]) -> Result<Vec<Tw>, ModelError> {
        words
            .iter()
            .map(|w| {
                if !self.tagset.contains(&w.tag) {
                    return Err(ModelError::UnknownTag(w.tag.clone()));
                }
                Ok(self.tw(w))
            })
            .collect()
    }

    /// Log score of one composite factor.
    pub fn event_log_score(&self, e: &FactorEvent) -> f64 {
        let mut total = 0.0;
        e.for_each_lookup(&self.features, |list, cond, out| {
            total += self.counts.estimate(cond, out, list, &self.smoothing).ln();
        });
        total
    }

    fn require(&self, ok: bool, factor: &'static str) -> Result<(), ModelError> {
        if ok {
            Ok(())
        } else {
            Err(ModelError::UnsupportedFactor {
                model: self.spec.kind.name(),
                factor,
            })
        }
    }

    fn sibling(&self, w: &TaggedWord) -> Sym {
        self.walker().sibling(self.tw(w))
    }

    /// Log score of tagged word `next` following `prev2 prev`.
    pub fn trigram_factor(&self, prev2: &TaggedWord, prev: &TaggedWord, next: &TaggedWord) -> Result<f64, ModelError> {
        self.require(self.spec.kind.has_trigram(), "trigram")?;
        Ok(self.event_log_score(&FactorEvent::Trigram {
            prev2: self.tw(prev2),
            prev: self.tw(prev),
            next: self.tw(next),
        }))
    }

    /// Log score of `child` (or EOKIDS) as the next child of `parent` on side
    /// `dir`, after `prev_sibling` (or BOKIDS).
    pub fn child_factor(
        &self,
        parent: &TaggedWord,
        prev_sibling: &TaggedWord,
        child: &TaggedWord,
        dir: Dir,
    ) -> Result<f64, ModelError> {
        self.require(self.spec.kind.has_child_factor(), "child")?;
        Ok(self.event_log_score(&FactorEvent::Child {
            parent: self.tw(parent),
            sibling: self.sibling(prev_sibling),
            child: self.tw(child),
            dir,
            nolex: self.spec.kind == ModelKind::CNoLex,
        }))
    }

    /// Log score of the distance bucket between `child` and `parent`.
    pub fn distance_factor(&self, parent: &TaggedWord, child: &TaggedWord, d: DistBucket) -> Result<f64, ModelError> {
        self.require(self.spec.kind.has_distance_factor(), "distance")?;
        Ok(self.event_log_score(&FactorEvent::Distance {
            parent: self.tw(parent),
            child: self.tw(child),
            bucket: d,
        }))
    }

    /// Log score of `child` expecting `parent` (and, for B2, the parent's side).
    pub fn parent_factor(
        &self,
        child: &TaggedWord,
        parent: &TaggedWord,
        parent_dir: Option<Dir>,
    ) -> Result<f64, ModelError> {
        self.require(self.spec.kind.has_parent_factor(), "parent")?;
        if parent_dir.is_some() != (self.spec.kind == ModelKind::B2) {
            return Err(ModelError::Invalid(
                "parent direction is given exactly for model B2".into(),
            ));
        }
        Ok(self.event_log_score(&FactorEvent::Parent {
            child: self.tw(child),
            parent: self.tw(parent),
            dir: parent_dir,
        }))
    }

    /// Log score of a link decision. Model D only scores accepted links.
    pub fn link_factor(
        &self,
        candidate: &TaggedWord,
        head: &TaggedWord,
        prev_child: &TaggedWord,
        yes: bool,
        d: Option<DistBucket>,
    ) -> Result<f64, ModelError> {
        self.require(self.spec.kind.has_link_factor(), "link")?;
        if self.spec.kind == ModelKind::D && !yes {
            return Err(ModelError::Invalid("model D never scores a rejected link".into()));
        }
        let is_stop = candidate.is_special();
        if d.is_some() != (self.spec.use_distance && !is_stop) {
            return Err(ModelError::Invalid(
                "a distance is given exactly when the model uses distance".into(),
            ));
        }
        Ok(self.event_log_score(&FactorEvent::Link {
            candidate: self.tw(candidate),
            head: self.tw(head),
            prev_child: self.sibling(prev_child),
            yes,
            dist: d,
        }))
    }

    fn checked_words(&self, d: &DependencyStructure) -> Result<Vec<Tw>, ModelError> {
        d.validate()?;
        self.intern_words(&d.words)
    }

    /// Log score of a structure and the factors it is made of.
    pub fn score_structure(&self, d: &DependencyStructure) -> Result<(f64, FactorTrace), ModelError> {
        let words = self.checked_words(d)?;
        let mut trace = FactorTrace::default();
        let mut total = 0.0;
        self.walker().walk(&words, &d.parents, |e| {
            let log_score = self.event_log_score(&e);
            total += log_score;
            let (condition, outcome) = e.describe(&self.symbols);
            trace.entries.push(TraceEntry {
                event: e,
                condition,
                outcome,
                log_score,
            });
        });
        Ok((total, trace))
    }

    /// Log score of a structure without building a trace.
    pub fn score(&self, d: &DependencyStructure) -> Result<f64, ModelError> {
        let words = self.checked_words(d)?;
        let mut total = 0.0;
        self.walker()
            .walk(&words, &d.parents, |e| total += self.event_log_score(&e));
        Ok(total)
    }

    /// Estimator lookups `score_structure` performs on `d`.
    pub fn scoring_lookups(&self, d: &DependencyStructure) -> Result<Vec<Lookup>, ModelError> {
        let words = self.checked_words(d)?;
        let mut out = Vec::new();
        self.walker()
            .walk(&words, &d.parents, |e| self.push_lookups(&e, &mut out));
        Ok(out)
    }

    /// Estimator observations training records for `d`.
    pub fn training_lookups(&self, d: &DependencyStructure) -> Result<Vec<Lookup>, ModelError> {
        let words = self.checked_words(d)?;
        let mut out = Vec::new();
        self.walker()
            .training_events(&words, &d.parents, |e| self.push_lookups(&e, &mut out));
        Ok(out)
    }

    fn push_lookups(&self, e: &FactorEvent, out: &mut Vec<Lookup>) {
        e.for_each_lookup(&self.features, |list, cond, o| {
            out.push(Lookup {
                list: list.id(),
                condition: cond.to_vec(),
                outcome: o.to_vec(),
            })
        });
    }

    /// Condition count of a lookup at its least-reduced level.
    pub fn first_level_condition_count(&self, l: &Lookup) -> u64 {
        let list = features::list_by_id(l.list);
        self.counts.level_counts(&l.condition, &l.outcome, list, 0).1
    }
}

#[cfg(test)]
mod tests;
