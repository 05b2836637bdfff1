//! Synthetic treebanks sampled from model C's generative process.
//!
//! Every word generates its left children (closest first) and then its right
//! children, each one chosen given the head and the previous sibling, until
//! the sequence stops. EOS generates the sentence head on its left. Choices
//! come either from a hand-written grammar or from a trained model C whose
//! smoothed scores are normalized over a closed vocabulary.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::corpus::{CapClass, Corpus, Dir, Section, Sentence, TagSet, TinyClass, EOKIDS, EOS};
use crate::error::SynthError;
use crate::models::features::Tw;
use crate::models::{FactorEvent, ModelKind, TrainedModel};
use crate::symbols::{self, cap_sym};

/// Sampling controls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthConfig {
    pub sentences: usize,
    /// Samples with more words are rejected.
    pub length_cap: usize,
    pub seed: u64,
    /// Sentences per output section.
    pub section_size: usize,
    /// Rejected samples tolerated per sentence before giving up.
    pub max_attempts: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            sentences: 100,
            length_cap: 10,
            seed: 0,
            section_size: 100,
            max_attempts: 10_000,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GrammarFile {
    tag: Vec<TagDef>,
    #[serde(default)]
    rule: Vec<RuleDef>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TagDef {
    name: String,
    short: Option<String>,
    tiny: String,
    words: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDef {
    head: String,
    dir: String,
    #[serde(default = "any_sibling")]
    after: String,
    emit: BTreeMap<String, f64>,
}

fn any_sibling() -> String {
    "*".to_string()
}

/// A head automaton grammar in model C's shape: child tags depend on the
/// head's tag, the side and the previous sibling's tag; words depend on
/// their tag alone.
///
/// ```toml
/// [[tag]]
/// name = "NN"
/// tiny = "Noun"
/// words = { dog = 2.0, cat = 1.0 }
///
/// [[rule]]
/// head = "EOS"        # a tag or EOS
/// dir = "left"
/// after = "BOKIDS"    # previous sibling's tag, BOKIDS, or * (default)
/// emit = { NN = 1.0 } # tags or EOKIDS, with weights
/// ```
///
/// A rule with an exact `after` wins over a `*` rule. When no rule matches,
/// the sequence stops.
#[derive(Clone, Debug)]
pub struct Grammar {
    tagset: TagSet,
    words: Vec<Vec<(String, f64)>>,
    rules: BTreeMap<RuleKey, Vec<(Option<usize>, f64)>>,
}

/// Head tag (or EOS), direction and previous child.
type RuleKey = (String, Dir, String);

fn check_weight(w: f64, what: &str) -> Result<(), SynthError> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(SynthError::Grammar(format!("{what}: weight must be positive, got {w}")))
    }
}

impl Grammar {
    pub fn parse(text: &str) -> Result<Grammar, SynthError> {
        let file: GrammarFile = toml::from_str(text).map_err(|e| SynthError::Grammar(e.to_string()))?;
        let mut entries = Vec::new();
        let mut words = Vec::new();
        for t in &file.tag {
            let tiny = TinyClass::parse(&t.tiny)
                .ok_or_else(|| SynthError::Grammar(format!("tag {}: unknown tiny class {}", t.name, t.tiny)))?;
            entries.push((t.name.clone(), t.short.clone().unwrap_or_else(|| t.name.clone()), tiny));
            if t.words.is_empty() {
                return Err(SynthError::Grammar(format!("tag {} has no words", t.name)));
            }
            for (w, &p) in &t.words {
                check_weight(p, &format!("word {w}"))?;
                if w.is_empty() || w.chars().any(char::is_whitespace) {
                    return Err(SynthError::Grammar(format!("tag {}: bad word {w:?}", t.name)));
                }
            }
            words.push(t.words.iter().map(|(w, &p)| (w.clone(), p)).collect());
        }
        let tagset = TagSet::new(entries)?;
        let mut rules = BTreeMap::new();
        for r in file.rule {
            if r.head != EOS && !tagset.contains(&r.head) {
                return Err(SynthError::Grammar(format!("rule head {} is not a tag", r.head)));
            }
            let dir = match r.dir.as_str() {
                "left" => Dir::Left,
                "right" => Dir::Right,
                d => return Err(SynthError::Grammar(format!("rule dir must be left or right, got {d}"))),
            };
            if r.after != "*" && r.after != crate::corpus::BOKIDS && !tagset.contains(&r.after) {
                return Err(SynthError::Grammar(format!("rule after {} is not a tag", r.after)));
            }
            let mut emit = Vec::new();
            for (t, &p) in &r.emit {
                check_weight(p, &format!("emit {t}"))?;
                let out = if t == EOKIDS {
                    None
                } else {
                    Some(
                        tagset
                            .index_of(t)
                            .ok_or_else(|| SynthError::Grammar(format!("emit {t} is not a tag")))?,
                    )
                };
                emit.push((out, p));
            }
            if emit.is_empty() {
                return Err(SynthError::Grammar(format!(
                    "rule {} {} {} emits nothing",
                    r.head, r.dir, r.after
                )));
            }
            if rules.insert((r.head.clone(), dir, r.after.clone()), emit).is_some() {
                return Err(SynthError::Grammar(format!(
                    "duplicate rule {} {} {}",
                    r.head, r.dir, r.after
                )));
            }
        }
        Ok(Grammar { tagset, words, rules })
    }

    pub fn tagset(&self) -> &TagSet {
        &self.tagset
    }

    pub fn sample(&self, cfg: &SynthConfig) -> Result<Corpus, SynthError> {
        sample_corpus(&mut GrammarSource { g: self }, self.tagset.clone(), cfg)
    }
}

/// Samples a corpus from a trained model C (or C'). Outcomes are the
/// training forms (attenuation symbols excluded) with every tag the
/// dictionary lists for them, in lowercase, capitalized and uppercase
/// spellings, plus EOKIDS.
pub fn sample_model(m: &TrainedModel, cfg: &SynthConfig) -> Result<Corpus, SynthError> {
    if !matches!(m.kind(), ModelKind::C | ModelKind::CNoLex) {
        return Err(SynthError::UnsupportedModel(m.kind().name()));
    }
    let sy = m.symbols();
    let mut vocab = Vec::new();
    for (form, tags) in m.dictionary() {
        if crate::corpus::is_attenuation_symbol(form) {
            continue;
        }
        let letters = form.chars().filter(|c| c.is_alphabetic()).count();
        let mut spellings = vec![(form.to_string(), CapClass::Down)];
        if form.chars().next().is_some_and(char::is_alphabetic) {
            let mut c = form.chars();
            let first: String = c.next().into_iter().flat_map(char::to_uppercase).collect();
            spellings.push((first + c.as_str(), CapClass::Cap));
        }
        if letters >= 2 {
            spellings.push((form.to_uppercase(), CapClass::Up));
        }
        for tag in tags {
            for (surface, c) in &spellings {
                let tw = Tw {
                    word: sy.get(form),
                    tag: sy.get(tag),
                    cap: cap_sym(*c),
                };
                vocab.push(Item {
                    surface: surface.clone(),
                    tag: tag.clone(),
                    tw,
                });
            }
        }
    }
    if vocab.is_empty() {
        return Err(SynthError::Grammar("model has no sampleable vocabulary".into()));
    }
    sample_corpus(&mut ModelSource { m, vocab }, m.tagset().clone(), cfg)
}

#[derive(Clone, Debug)]
struct Item {
    surface: String,
    tag: String,
    tw: Tw,
}

struct Node {
    item: Item,
    left: Vec<Node>,
    right: Vec<Node>,
}

/// Weighted choices for the next child of `head` (`None` is EOS) after
/// `prev`; a `None` outcome stops the sequence.
trait ChildSource {
    fn choices(&mut self, head: Option<&Item>, dir: Dir, prev: Option<&Item>) -> Vec<(Option<Item>, f64)>;
}

struct GrammarSource<'a> {
    g: &'a Grammar,
}

impl ChildSource for GrammarSource<'_> {
    fn choices(&mut self, head: Option<&Item>, dir: Dir, prev: Option<&Item>) -> Vec<(Option<Item>, f64)> {
        let h = head.map_or(EOS, |i| i.tag.as_str()).to_string();
        let after = prev.map_or(crate::corpus::BOKIDS, |i| i.tag.as_str()).to_string();
        let rules = &self.g.rules;
        let Some(emit) = rules
            .get(&(h.clone(), dir, after))
            .or_else(|| rules.get(&(h, dir, "*".to_string())))
        else {
            return vec![(None, 1.0)];
        };
        let mut out = Vec::new();
        for &(t, p) in emit {
            match t {
                None => out.push((None, p)),
                Some(t) => {
                    let tag = &self.g.tagset.tags()[t];
                    let z: f64 = self.g.words[t].iter().map(|w| w.1).sum();
                    for (w, q) in &self.g.words[t] {
                        let item = Item {
                            surface: w.clone(),
                            tag: tag.clone(),
                            tw: Tw::special(symbols::UNSEEN),
                        };
                        out.push((Some(item), p * q / z));
                    }
                }
            }
        }
        out
    }
}

struct ModelSource<'a> {
    m: &'a TrainedModel,
    vocab: Vec<Item>,
}

impl ChildSource for ModelSource<'_> {
    fn choices(&mut self, head: Option<&Item>, dir: Dir, prev: Option<&Item>) -> Vec<(Option<Item>, f64)> {
        let walker = self.m.walker();
        let parent = head.map_or(Tw::eos(), |i| i.tw);
        let sibling = prev.map_or(symbols::BOKIDS, |i| walker.sibling(i.tw));
        let nolex = self.m.kind() == ModelKind::CNoLex;
        let score = |child: Tw| {
            self.m.event_log_score(&FactorEvent::Child {
                parent,
                sibling,
                child,
                dir,
                nolex,
            })
        };
        let mut scored: Vec<(Option<Item>, f64)> = vec![(None, score(Tw::eokids()))];
        scored.extend(self.vocab.iter().map(|i| (Some(i.clone()), score(i.tw))));
        let top = scored.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        scored.into_iter().map(|(o, s)| (o, (s - top).exp())).collect()
    }
}

/// The sample grew past the length cap.
struct Overflow;

fn pick<R: rand::Rng>(choices: Vec<(Option<Item>, f64)>, rng: &mut R) -> Option<Item> {
    let dist = WeightedIndex::new(choices.iter().map(|c| c.1)).expect("positive weights");
    choices.into_iter().nth(dist.sample(rng)).and_then(|c| c.0)
}

fn sequence<S: ChildSource, R: rand::Rng>(
    src: &mut S,
    rng: &mut R,
    head: Option<&Item>,
    dir: Dir,
    words: &mut usize,
    cap: usize,
) -> Result<Vec<Node>, Overflow> {
    let mut kids: Vec<Node> = Vec::new();
    loop {
        let prev = kids.last().map(|n| &n.item);
        let Some(item) = pick(src.choices(head, dir, prev), rng) else {
            return Ok(kids);
        };
        *words += 1;
        if *words > cap {
            return Err(Overflow);
        }
        kids.push(expand(src, rng, item, words, cap)?);
    }
}

fn expand<S: ChildSource, R: rand::Rng>(
    src: &mut S,
    rng: &mut R,
    item: Item,
    words: &mut usize,
    cap: usize,
) -> Result<Node, Overflow> {
    let left = sequence(src, rng, Some(&item), Dir::Left, words, cap)?;
    let right = sequence(src, rng, Some(&item), Dir::Right, words, cap)?;
    Ok(Node { item, left, right })
}

/// Writes the subtree in surface order (left children farthest first) and
/// returns the 1-based position of its head.
fn flatten(node: &Node, words: &mut Vec<Item>, parents: &mut Vec<usize>) -> usize {
    let mut roots: Vec<usize> = node.left.iter().rev().map(|c| flatten(c, words, parents)).collect();
    words.push(node.item.clone());
    parents.push(0);
    let me = words.len();
    roots.extend(node.right.iter().map(|c| flatten(c, words, parents)));
    for r in roots {
        parents[r - 1] = me;
    }
    me
}

fn sample_sentence<S: ChildSource, R: rand::Rng>(
    src: &mut S,
    rng: &mut R,
    cfg: &SynthConfig,
) -> Result<Sentence, SynthError> {
    for _ in 0..cfg.max_attempts {
        let mut count = 0;
        let Ok(roots) = sequence(src, rng, None, Dir::Left, &mut count, cfg.length_cap) else {
            continue;
        };
        let [root] = roots.as_slice() else {
            continue;
        };
        let mut items = Vec::new();
        let mut parents = Vec::new();
        flatten(root, &mut items, &mut parents);
        let n = items.len();
        for p in &mut parents {
            if *p == 0 {
                *p = n + 1;
            }
        }
        let words = items.iter().map(|i| i.surface.clone()).collect();
        let tags = items.into_iter().map(|i| i.tag).collect();
        return Ok(Sentence::annotated(words, tags, parents));
    }
    Err(SynthError::Exhausted {
        cap: cfg.length_cap,
        attempts: cfg.max_attempts,
    })
}

fn sample_corpus<S: ChildSource>(src: &mut S, tagset: TagSet, cfg: &SynthConfig) -> Result<Corpus, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sentences = Vec::with_capacity(cfg.sentences);
    for _ in 0..cfg.sentences {
        sentences.push(sample_sentence(src, &mut rng, cfg)?);
    }
    let size = cfg.section_size.max(1);
    let sections = sentences
        .chunks(size)
        .enumerate()
        .map(|(k, c)| Section {
            id: format!("synth{:03}", k + 1),
            sentences: c.to_vec(),
        })
        .collect();
    Ok(Corpus { tagset, sections })
}
