use std::collections::HashMap;

use crate::corpus::Sentence;
use crate::error::DecodeError;
use crate::models::features::Tw;
use crate::models::{FactorEvent, TrainedModel};

use super::{enumerate_projective, ParseOutput, TagLattice, SCORE_EPS};

/// Size bounds for exhaustive search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceLimits {
    pub max_len: usize,
    pub max_taggings: u128,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        BruteForceLimits {
            max_len: 8,
            max_taggings: 100_000,
        }
    }
}

/// Highest-scoring tagging and structure by exhaustive enumeration. Among
/// structures within [`SCORE_EPS`] of the best, the one with the smallest
/// parent vector, then the smallest tag indices, wins.
pub fn brute_force_parse(
    m: &TrainedModel,
    s: &Sentence,
    lattice: &TagLattice,
    limits: BruteForceLimits,
) -> Result<ParseOutput, DecodeError> {
    let n = s.len();
    if !m.kind().is_probabilistic() {
        return Err(DecodeError::UnsupportedModel(m.kind().name()));
    }
    if n == 0 {
        return Err(DecodeError::NoParse);
    }
    lattice.check(n)?;
    if n > limits.max_len.min(super::MAX_ENUMERATION_LEN) {
        return Err(DecodeError::TooLong {
            n,
            cap: limits.max_len.min(super::MAX_ENUMERATION_LEN),
        });
    }
    let taggings = lattice.taggings();
    if taggings > limits.max_taggings {
        return Err(DecodeError::TooManyTaggings(taggings));
    }
    let structures = enumerate_projective(n)?;
    let tws = lattice.tagged(m, s);
    let walker = m.walker();
    let mut cache: HashMap<FactorEvent, f64> = HashMap::new();
    let mut scores = Vec::with_capacity(structures.len() * taggings as usize);
    let mut words: Vec<Tw> = vec![tws[0][0]; n];
    for parents in &structures {
        let mut choice = vec![0usize; n];
        loop {
            for i in 0..n {
                words[i] = tws[i][choice[i]];
            }
            let mut total = 0.0;
            walker.walk(&words, parents, |e| {
                total += *cache.entry(e).or_insert_with(|| m.event_log_score(&e));
            });
            scores.push(total);
            if !next_choice(&mut choice, lattice) {
                break;
            }
        }
    }
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pick = scores
        .iter()
        .position(|&v| v >= best - SCORE_EPS)
        .ok_or(DecodeError::NoParse)?;
    let per = taggings as usize;
    let parents = structures[pick / per].clone();
    let mut choice = vec![0usize; n];
    for _ in 0..pick % per {
        next_choice(&mut choice, lattice);
    }
    let tags = choice
        .iter()
        .enumerate()
        .map(|(i, &c)| m.tagset().tags()[lattice.candidates(i)[c]].clone())
        .collect();
    Ok(ParseOutput {
        tags,
        parents,
        log_score: scores[pick],
        pruned: false,
        combinations: 0,
    })
}

/// Advances an odometer over candidate indices; the last position moves fastest.
fn next_choice(choice: &mut [usize], lattice: &TagLattice) -> bool {
    for i in (0..choice.len()).rev() {
        choice[i] += 1;
        if choice[i] < lattice.candidates(i).len() {
            return true;
        }
        choice[i] = 0;
    }
    false
}
