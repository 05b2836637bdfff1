use std::collections::BTreeMap;

use crate::corpus::{is_attenuation_symbol, CapClass, DependencyStructure, Sentence, TagSet};

use super::TrainedModel;

/// Modal tag per form and modal signed parent offset per tag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BaselineStats {
    pub(super) tag_by_key: BTreeMap<String, String>,
    pub(super) offset_by_tag: BTreeMap<String, i64>,
    /// Modal tag of attenuated training tokens.
    pub(super) unknown_tag: Option<String>,
    pub(super) default_tag: String,
    pub(super) default_offset: i64,
}

/// Attenuated forms are keyed together with their capitalization class.
pub(super) fn key(form: &str, cap: CapClass) -> String {
    if is_attenuation_symbol(form) {
        format!("{form} {cap}")
    } else {
        form.to_string()
    }
}

/// Most frequent value; ties go to the smallest.
fn modal<K: Ord + Clone>(counts: &BTreeMap<K, u64>) -> Option<K> {
    let mut best: Option<(&K, u64)> = None;
    for (k, &c) in counts {
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((k, c));
        }
    }
    best.map(|(k, _)| k.clone())
}

impl BaselineStats {
    pub(super) fn from_structures(structures: &[DependencyStructure], tagset: &TagSet) -> BaselineStats {
        let idx = |t: &str| tagset.index_of(t).unwrap_or(usize::MAX);
        let mut by_key: BTreeMap<String, BTreeMap<usize, u64>> = BTreeMap::new();
        let mut unknown: BTreeMap<usize, u64> = BTreeMap::new();
        let mut all: BTreeMap<usize, u64> = BTreeMap::new();
        let mut offsets: BTreeMap<String, BTreeMap<i64, u64>> = BTreeMap::new();
        let mut all_offsets: BTreeMap<i64, u64> = BTreeMap::new();
        for d in structures {
            for (i, w) in d.words.iter().enumerate() {
                let t = idx(&w.tag);
                *by_key.entry(key(&w.form, w.cap)).or_default().entry(t).or_insert(0) += 1;
                if is_attenuation_symbol(&w.form) {
                    *unknown.entry(t).or_insert(0) += 1;
                }
                *all.entry(t).or_insert(0) += 1;
                let off = d.parents[i] as i64 - (i as i64 + 1);
                *offsets.entry(w.tag.clone()).or_default().entry(off).or_insert(0) += 1;
                *all_offsets.entry(off).or_insert(0) += 1;
            }
        }
        let tag_name = |t: usize| tagset.tags()[t].clone();
        BaselineStats {
            tag_by_key: by_key
                .iter()
                .filter_map(|(k, c)| modal(c).map(|t| (k.clone(), tag_name(t))))
                .collect(),
            offset_by_tag: offsets
                .iter()
                .filter_map(|(t, c)| modal(c).map(|o| (t.clone(), o)))
                .collect(),
            unknown_tag: modal(&unknown).map(tag_name),
            default_tag: modal(&all).map(tag_name).unwrap_or_else(|| tagset.tags()[0].clone()),
            default_offset: modal(&all_offsets).unwrap_or(1),
        }
    }

    pub fn tag_for(&self, form: &str, cap: CapClass) -> &str {
        if let Some(t) = self.tag_by_key.get(&key(form, cap)) {
            return t;
        }
        if is_attenuation_symbol(form) {
            if let Some(t) = &self.unknown_tag {
                return t;
            }
        }
        &self.default_tag
    }

    pub fn offset_for(&self, tag: &str) -> i64 {
        self.offset_by_tag.get(tag).copied().unwrap_or(self.default_offset)
    }
}

/// Modal tag for every word, then the parent at its tag's modal offset,
/// clamped into `1..=n+1` and away from the word itself. The result need
/// not be well formed.
pub fn baseline_parse(m: &TrainedModel, s: &Sentence) -> (Vec<String>, Vec<usize>) {
    let stats = m.baseline_stats();
    let n = s.len() as i64;
    let mut tags = Vec::with_capacity(s.len());
    let mut parents = Vec::with_capacity(s.len());
    for (i, (form, cap)) in m.input_forms(s).into_iter().enumerate() {
        let tag = stats.tag_for(&form, cap).to_string();
        let pos = i as i64 + 1;
        let mut p = (pos + stats.offset_for(&tag)).clamp(1, n + 1);
        if p == pos {
            p = pos + 1;
        }
        tags.push(tag);
        parents.push(p as usize);
    }
    (tags, parents)
}
