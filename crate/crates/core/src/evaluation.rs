//! Attachment and tagging scores, error histograms, contagion, search error
//! and the paired Monte Carlo significance test.

use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Section, Sentence, TagSet, TinyClass};
use crate::decoder::detect_search_error;
use crate::error::EvalError;
use crate::models::TrainedModel;

/// Flags for one word of a system output against gold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordResult {
    pub correct_tag: bool,
    pub correct_parent: bool,
    pub punctuation: bool,
    /// Tiny class of the gold tag.
    pub tiny: TinyClass,
    /// Tiny class of the gold parent's tag; `None` when the parent is EOS.
    pub parent_tiny: Option<TinyClass>,
    /// Not seen in training (only known when a model is supplied).
    pub unknown: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentenceResult {
    pub words: Vec<WordResult>,
    /// Whether the model prefers gold over the output; `None` without a model
    /// or when the output cannot be scored.
    pub search_error: Option<bool>,
}

impl SentenceResult {
    /// Misattached words, punctuation excluded.
    pub fn attachment_errors(&self) -> usize {
        self.words
            .iter()
            .filter(|w| !w.punctuation && !w.correct_parent)
            .count()
    }

    /// Words that count towards attachment scores.
    pub fn scored_words(&self) -> usize {
        self.words.iter().filter(|w| !w.punctuation).count()
    }
}

/// A system's tags and parents for one sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemParse {
    pub tags: Vec<String>,
    pub parents: Vec<usize>,
}

/// Compares system parses with gold. With a model, also flags unknown words
/// and search errors.
pub fn score_sentences(
    gold: &[Sentence],
    system: &[SystemParse],
    tagset: &TagSet,
    model: Option<&TrainedModel>,
) -> Result<Vec<SentenceResult>, EvalError> {
    if gold.len() != system.len() {
        return Err(EvalError::SentenceCount {
            gold: gold.len(),
            system: system.len(),
        });
    }
    gold.iter()
        .zip(system)
        .enumerate()
        .map(|(k, (g, sys))| {
            let bad = |msg: String| EvalError::Misaligned { index: k + 1, msg };
            let (Some(gtags), Some(gparents)) = (&g.gold_tags, &g.gold_parents) else {
                return Err(bad("gold sentence is not annotated".into()));
            };
            let n = g.len();
            if sys.tags.len() != n || sys.parents.len() != n {
                return Err(bad(format!("gold has {n} words, system has {}", sys.tags.len())));
            }
            let tiny_of = |t: &str| tagset.tiny(t).ok_or_else(|| bad(format!("tag {t} not in tag set")));
            let mut words = Vec::with_capacity(n);
            for i in 0..n {
                let tiny = tiny_of(&gtags[i])?;
                let p = gparents[i];
                let parent_tiny = if p == n + 1 {
                    None
                } else {
                    Some(tiny_of(&gtags[p - 1])?)
                };
                words.push(WordResult {
                    correct_tag: sys.tags[i] == gtags[i],
                    correct_parent: sys.parents[i] == p,
                    punctuation: tiny == TinyClass::Punctuation,
                    tiny,
                    parent_tiny,
                    unknown: model.is_some_and(|m| !m.in_lexicon(&g.words[i].to_lowercase())),
                });
            }
            let search_error = model.and_then(|m| {
                let gold_d = m.structure_for(g, gtags, gparents);
                let out_d = m.structure_for(g, &sys.tags, &sys.parents);
                detect_search_error(m, &gold_d, &out_d).ok()
            });
            Ok(SentenceResult { words, search_error })
        })
        .collect()
}

/// A count of successes over a total.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rate {
    pub hits: usize,
    pub total: usize,
}

impl Rate {
    fn add(&mut self, hit: bool) {
        self.total += 1;
        self.hits += hit as usize;
    }

    pub fn percent(&self) -> Option<f64> {
        (self.total > 0).then(|| 100.0 * self.hits as f64 / self.total as f64)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TagAttach {
    pub tag: Rate,
    pub attach: Rate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Contagion {
    /// P(at least one error), percent.
    pub p_one: f64,
    /// P(at least two errors | at least one), percent; `None` without errors.
    pub p_two_given_one: Option<f64>,
    /// `p_two_given_one / p_one`.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub sentences: usize,
    /// Non-punctuation words.
    pub overall: TagAttach,
    /// By tiny class of the word's own gold tag.
    pub by_class: Vec<(TinyClass, TagAttach)>,
    /// Attachment of words by tiny class of their gold parent.
    pub by_parent_class: Vec<(TinyClass, Rate)>,
    /// Non-punctuation words unseen in training.
    pub unknown: TagAttach,
    /// Percent of sentences with at most 0..=4 misattachments.
    pub histogram: [f64; 5],
    pub contagion: Contagion,
    /// Percent of sentences with a search error, over sentences where it is known.
    pub search_error: Option<f64>,
}

pub fn aggregate(results: &[SentenceResult]) -> Result<EvalReport, EvalError> {
    if results.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut overall = TagAttach::default();
    let mut by_class = [TagAttach::default(); 7];
    let mut by_parent = [Rate::default(); 7];
    let mut unknown = TagAttach::default();
    let class_index = |c: TinyClass| TinyClass::ALL.iter().position(|&x| x == c).unwrap();
    for r in results {
        for w in &r.words {
            let k = class_index(w.tiny);
            by_class[k].tag.add(w.correct_tag);
            by_class[k].attach.add(w.correct_parent);
            if w.punctuation {
                continue;
            }
            overall.tag.add(w.correct_tag);
            overall.attach.add(w.correct_parent);
            if let Some(p) = w.parent_tiny {
                by_parent[class_index(p)].add(w.correct_parent);
            }
            if w.unknown {
                unknown.tag.add(w.correct_tag);
                unknown.attach.add(w.correct_parent);
            }
        }
    }
    let errors: Vec<usize> = results.iter().map(SentenceResult::attachment_errors).collect();
    let n = results.len() as f64;
    let at_most = |k: usize| 100.0 * errors.iter().filter(|&&e| e <= k).count() as f64 / n;
    let histogram = [at_most(0), at_most(1), at_most(2), at_most(3), at_most(4)];
    let one = errors.iter().filter(|&&e| e >= 1).count();
    let two = errors.iter().filter(|&&e| e >= 2).count();
    let p_one = 100.0 * one as f64 / n;
    let p_two_given_one = (one > 0).then(|| 100.0 * two as f64 / one as f64);
    let contagion = Contagion {
        p_one,
        p_two_given_one,
        ratio: p_two_given_one.map(|p| p / p_one),
    };
    let known: Vec<bool> = results.iter().filter_map(|r| r.search_error).collect();
    let search_error =
        (!known.is_empty()).then(|| 100.0 * known.iter().filter(|&&e| e).count() as f64 / known.len() as f64);
    Ok(EvalReport {
        sentences: results.len(),
        overall,
        by_class: TinyClass::ALL.iter().copied().zip(by_class).collect(),
        by_parent_class: TinyClass::ALL.iter().copied().zip(by_parent).collect(),
        unknown,
        histogram,
        contagion,
        search_error,
    })
}

fn pct(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |v| format!("{v:.1}"))
}

impl EvalReport {
    /// Aligned tables followed by a `key=value` block.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let cell = |ta: &TagAttach| format!("{}/{}", pct(ta.tag.percent()), pct(ta.attach.percent()));
        let mut head = format!("{:<11}", "all");
        let mut row = format!("{:<11}", cell(&self.overall));
        for (c, ta) in &self.by_class {
            let _ = write!(head, " {:>11}", c.label());
            let _ = write!(row, " {:>11}", cell(ta));
        }
        let _ = write!(head, " {:>11}", "unknown");
        let _ = write!(row, " {:>11}", cell(&self.unknown));
        let _ = writeln!(out, "Tag/attachment accuracy (%), by the word's own class");
        let _ = writeln!(out, "{head}\n{row}\n");

        let mut head = format!("{:<10}", "all");
        let mut row = format!("{:<10}", pct(self.overall.attach.percent()));
        for (c, r) in &self.by_parent_class {
            let _ = write!(head, " {:>7}", c.label());
            let _ = write!(row, " {:>7}", pct(r.percent()));
        }
        let _ = writeln!(out, "Attachment accuracy (%), by the class of the correct parent");
        let _ = writeln!(out, "{head}\n{row}\n");

        let _ = writeln!(
            out,
            "{:>6} {:>6} {:>6} {:>6} {:>6} | {:>8} {:>11} {:>6} | {:>8}",
            "0", "<=1", "<=2", "<=3", "<=4", ">=1 err", ">=2|>=1", "ratio", "search"
        );
        let h = &self.histogram;
        let c = &self.contagion;
        let _ = writeln!(
            out,
            "{:>6.1} {:>6.1} {:>6.1} {:>6.1} {:>6.1} | {:>8.1} {:>11} {:>6} | {:>8}\n",
            h[0],
            h[1],
            h[2],
            h[3],
            h[4],
            c.p_one,
            pct(c.p_two_given_one),
            c.ratio.map_or("-".into(), |r| format!("{r:.2}")),
            pct(self.search_error)
        );
        for (k, v) in self.key_values() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("sentences".to_string(), self.sentences.to_string()),
            ("words".to_string(), self.overall.attach.total.to_string()),
            ("attachment".to_string(), pct(self.overall.attach.percent())),
            ("tagging".to_string(), pct(self.overall.tag.percent())),
        ];
        for (c, ta) in &self.by_class {
            kv.push((format!("tag.{}", c.as_str()), pct(ta.tag.percent())));
            kv.push((format!("attach.{}", c.as_str()), pct(ta.attach.percent())));
        }
        for (c, r) in &self.by_parent_class {
            kv.push((format!("attach_to.{}", c.as_str()), pct(r.percent())));
        }
        kv.push(("unknown.tag".into(), pct(self.unknown.tag.percent())));
        kv.push(("unknown.attach".into(), pct(self.unknown.attach.percent())));
        for (k, v) in ["0", "le1", "le2", "le3", "le4"].iter().zip(self.histogram) {
            kv.push((format!("errors.{k}"), format!("{v:.1}")));
        }
        kv.push(("contagion.p1".into(), format!("{:.1}", self.contagion.p_one)));
        kv.push(("contagion.p2_given_1".into(), pct(self.contagion.p_two_given_one)));
        kv.push((
            "contagion.ratio".into(),
            self.contagion.ratio.map_or("-".into(), |r| format!("{r:.3}")),
        ));
        kv.push(("search_error".into(), pct(self.search_error)));
        kv
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignificanceResult {
    /// Attachment error rate of B minus that of A, over scored words.
    pub mu: f64,
    pub iterations: u64,
    pub p_value: f64,
    pub seed: u64,
}

impl fmt::Display for SignificanceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mu={:.6} p={:.6} iterations={} seed={}",
            self.mu, self.p_value, self.iterations, self.seed
        )
    }
}

/// Paired randomization test on per-sentence attachment error counts.
///
/// Each pass swaps the two systems' results on every sentence with
/// probability 1/2 and counts the passes whose total difference is at least
/// as large in magnitude as the observed one. `p = (count + 1) / (passes + 1)`.
pub fn monte_carlo_compare(
    a: &[SentenceResult],
    b: &[SentenceResult],
    iterations: u64,
    seed: u64,
) -> Result<SignificanceResult, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::SentenceCount {
            gold: a.len(),
            system: b.len(),
        });
    }
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        if x.scored_words() != y.scored_words() {
            return Err(EvalError::Misaligned {
                index: k + 1,
                msg: "different word counts".into(),
            });
        }
    }
    let ea: Vec<u64> = a.iter().map(|r| r.attachment_errors() as u64).collect();
    let eb: Vec<u64> = b.iter().map(|r| r.attachment_errors() as u64).collect();
    let words = a.iter().map(|r| r.scored_words() as u64).sum();
    monte_carlo_counts(&ea, &eb, words, iterations, seed)
}

/// [`monte_carlo_compare`] over raw per-sentence error counts.
pub fn monte_carlo_counts(
    a: &[u64],
    b: &[u64],
    words: u64,
    iterations: u64,
    seed: u64,
) -> Result<SignificanceResult, EvalError> {
    if a.is_empty() || words == 0 {
        return Err(EvalError::Empty);
    }
    if a.len() != b.len() {
        return Err(EvalError::SentenceCount {
            gold: a.len(),
            system: b.len(),
        });
    }
    if iterations == 0 {
        return Err(EvalError::NoIterations);
    }
    let d: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| y as i64 - x as i64).collect();
    let observed: i64 = d.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strong = 0u64;
    for _ in 0..iterations {
        let recolored: i64 = d.iter().map(|&x| if rng.gen::<bool>() { -x } else { x }).sum();
        if recolored.abs() >= observed.abs() {
            strong += 1;
        }
    }
    Ok(SignificanceResult {
        mu: observed as f64 / words as f64,
        iterations,
        p_value: (strong + 1) as f64 / (iterations + 1) as f64,
        seed,
    })
}

/// Splits a corpus into training and test parts by repeatedly picking a
/// random sentence and moving its whole section to the test side, until at
/// least `min_test_sentences` sentences are there (or nothing is left).
pub fn split_test_sections(corpus: &Corpus, min_test_sentences: usize, seed: u64) -> (Corpus, Corpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let owners: Vec<usize> = corpus
        .sections
        .iter()
        .enumerate()
        .flat_map(|(k, s)| std::iter::repeat_n(k, s.sentences.len()))
        .collect();
    let mut is_test = vec![false; corpus.sections.len()];
    let mut marked = 0;
    while marked < min_test_sentences && marked < owners.len() {
        let &k = owners.choose(&mut rng).expect("non-empty corpus");
        if !is_test[k] {
            is_test[k] = true;
            marked += corpus.sections[k].sentences.len();
        }
    }
    let part = |want: bool| Corpus {
        tagset: corpus.tagset.clone(),
        sections: corpus
            .sections
            .iter()
            .zip(&is_test)
            .filter(|(_, &t)| t == want)
            .map(|(s, _)| Section {
                id: s.id.clone(),
                sentences: s.sentences.clone(),
            })
            .collect(),
    };
    (part(false), part(true))
}
