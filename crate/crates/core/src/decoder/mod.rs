//! Decoding: the tag lattice, enumeration of projective structures, the
//! brute-force oracle and the span dynamic program.

mod brute;
mod chart;
mod enumerate;

use crate::corpus::{Sentence, TagSet};
use crate::error::{DecodeError, ModelError};
use crate::models::features::Tw;
use crate::models::TrainedModel;
use crate::symbols::cap_sym;

pub use brute::{brute_force_parse, BruteForceLimits};
pub use chart::dp_parse;
pub use enumerate::{enumerate_projective, projective_count, MAX_ENUMERATION_LEN};

use crate::corpus::DependencyStructure;

/// Tolerance for comparing log scores.
pub const SCORE_EPS: f64 = 1e-9;

/// Candidate tags per position, as tag-set indices in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagLattice {
    candidates: Vec<Vec<usize>>,
}

impl TagLattice {
    /// Tags seen in training with each (possibly attenuated) form; every tag
    /// for forms the dictionary has never seen.
    pub fn from_model(m: &TrainedModel, s: &Sentence) -> TagLattice {
        let tagset = m.tagset();
        let candidates = m
            .input_forms(s)
            .iter()
            .map(|(form, _)| match m.dictionary_tags(form) {
                Some(tags) => tags.iter().filter_map(|t| tagset.index_of(t)).collect(),
                None => (0..tagset.len()).collect(),
            })
            .collect();
        TagLattice { candidates }
    }

    pub fn from_indices(candidates: Vec<Vec<usize>>) -> TagLattice {
        let candidates = candidates
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        TagLattice { candidates }
    }

    pub fn from_tags(tagset: &TagSet, tags: &[Vec<String>]) -> Result<TagLattice, ModelError> {
        let candidates = tags
            .iter()
            .map(|c| {
                c.iter()
                    .map(|t| tagset.index_of(t).ok_or_else(|| ModelError::UnknownTag(t.clone())))
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        Ok(TagLattice::from_indices(candidates))
    }

    /// Keeps the candidates equal to the supplied tag or whose shortened tag
    /// equals it. A position left empty falls back to the tags matching the
    /// constraint in the whole tag set, or keeps its candidates if none do.
    pub fn restrict(&self, tagset: &TagSet, constraint: &[String]) -> TagLattice {
        let matches = |i: usize, t: &str| tagset.tags()[i] == t || tagset.short(&tagset.tags()[i]) == Some(t);
        let candidates = self
            .candidates
            .iter()
            .zip(constraint)
            .map(|(cands, t)| {
                let kept: Vec<usize> = cands.iter().copied().filter(|&i| matches(i, t)).collect();
                if !kept.is_empty() {
                    return kept;
                }
                let any: Vec<usize> = (0..tagset.len()).filter(|&i| matches(i, t)).collect();
                if any.is_empty() {
                    cands.clone()
                } else {
                    any
                }
            })
            .collect();
        TagLattice { candidates }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Candidates of word `i` (0-based).
    pub fn candidates(&self, i: usize) -> &[usize] {
        &self.candidates[i]
    }

    pub fn taggings(&self) -> u128 {
        self.candidates.iter().map(|c| c.len() as u128).product()
    }

    pub(crate) fn check(&self, n: usize) -> Result<(), DecodeError> {
        if self.candidates.len() != n {
            return Err(DecodeError::LatticeLength {
                lattice: self.candidates.len(),
                sentence: n,
            });
        }
        if let Some(i) = self.candidates.iter().position(Vec::is_empty) {
            return Err(DecodeError::EmptyLattice(i + 1));
        }
        Ok(())
    }

    /// Interned tagged word for every position and candidate.
    pub(crate) fn tagged(&self, m: &TrainedModel, s: &Sentence) -> Vec<Vec<Tw>> {
        let sy = m.symbols();
        m.input_forms(s)
            .iter()
            .zip(&self.candidates)
            .map(|((form, cap), cands)| {
                let word = sy.get(form);
                cands
                    .iter()
                    .map(|&t| Tw {
                        word,
                        tag: sy.get(&m.tagset().tags()[t]),
                        cap: cap_sym(*cap),
                    })
                    .collect()
            })
            .collect()
    }
}

/// Search mode for [`dp_parse`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchSettings {
    /// Items kept per chart cell and item type; `None` is exact search.
    pub beam: Option<usize>,
}

impl SearchSettings {
    pub fn exact() -> SearchSettings {
        SearchSettings { beam: None }
    }

    pub fn beam(width: usize) -> SearchSettings {
        SearchSettings {
            beam: Some(width.max(1)),
        }
    }
}

/// A decoded sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseOutput {
    pub tags: Vec<String>,
    pub parents: Vec<usize>,
    pub log_score: f64,
    /// Whether beam pruning discarded any chart item.
    pub pruned: bool,
    /// Item pairs the chart tried to combine.
    pub combinations: u64,
}

impl ParseOutput {
    pub fn structure(&self, m: &TrainedModel, s: &Sentence) -> DependencyStructure {
        m.structure_for(s, &self.tags, &self.parents)
    }
}

/// True when the model prefers the gold structure over the decoder's output.
pub fn detect_search_error(
    m: &TrainedModel,
    gold: &DependencyStructure,
    output: &DependencyStructure,
) -> Result<bool, ModelError> {
    if gold.len() != output.len() {
        return Err(ModelError::Invalid("structures cover different sentences".into()));
    }
    Ok(m.score(gold)? > m.score(output)? + SCORE_EPS)
}
