//! Tagged words, sentences, sections and dependency structures.
//!
//! Positions are 1-based throughout: a sentence of `n` words has words
//! `1..=n` and the end-of-sentence mark sits at position `n + 1`. Parent
//! vectors are stored 0-indexed by child (`parents[i - 1]` is the parent of
//! word `i`) but hold 1-based positions.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use crate::error::{CorpusError, StructureError};

pub const BOS: &str = "BOS";
pub const EOS: &str = "EOS";
pub const BOKIDS: &str = "BOKIDS";
pub const EOKIDS: &str = "EOKIDS";
pub const MORPH_PREFIX: &str = "MORPH-";
pub const MORPH_NUM: &str = "MORPH-NUM";
pub const MORPH_SHORT: &str = "MORPH-SHORT";

/// Symbols that may never be used as ordinary tags.
pub const SPECIAL_SYMBOLS: [&str; 4] = [BOS, EOS, BOKIDS, EOKIDS];

/// Capitalization class of a token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CapClass {
    /// No uppercase letters.
    Down,
    /// All letters uppercase, at least two of them.
    Up,
    /// First non-punctuation word of the sentence with only its first letter capitalized.
    Init,
    /// Everything else.
    Cap,
}

impl CapClass {
    pub const ALL: [CapClass; 4] = [CapClass::Down, CapClass::Up, CapClass::Init, CapClass::Cap];

    pub fn as_str(self) -> &'static str {
        match self {
            CapClass::Down => "DOWN",
            CapClass::Up => "UP",
            CapClass::Init => "INIT",
            CapClass::Cap => "CAP",
        }
    }

    pub fn parse(s: &str) -> Option<CapClass> {
        CapClass::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for CapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Capitalization class of `form`.
///
/// Only alphabetic characters are inspected; a form without letters is `Down`.
pub fn cap(form: &str, is_first_nonpunct: bool) -> CapClass {
    let letters: Vec<char> = form.chars().filter(|c| c.is_alphabetic()).collect();
    let upper = letters.iter().filter(|c| c.is_uppercase()).count();
    if upper == 0 {
        return CapClass::Down;
    }
    if upper == letters.len() && letters.len() >= 2 {
        return CapClass::Up;
    }
    if is_first_nonpunct && letters[0].is_uppercase() && upper == 1 {
        return CapClass::Init;
    }
    CapClass::Cap
}

/// A form with no letters or digits counts as punctuation.
pub fn is_punctuation_form(form: &str) -> bool {
    !form.chars().any(|c| c.is_alphanumeric())
}

/// Index of the first word of `words` that is not punctuation.
pub fn first_nonpunct<S: AsRef<str>>(words: &[S]) -> Option<usize> {
    words.iter().position(|w| !is_punctuation_form(w.as_ref()))
}

/// Distance between two word positions, in four ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistBucket {
    One,
    Two,
    ThreeToSix,
    SevenPlus,
}

impl DistBucket {
    pub const ALL: [DistBucket; 4] = [
        DistBucket::One,
        DistBucket::Two,
        DistBucket::ThreeToSix,
        DistBucket::SevenPlus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DistBucket::One => "1",
            DistBucket::Two => "2",
            DistBucket::ThreeToSix => "3-6",
            DistBucket::SevenPlus => "7+",
        }
    }
}

/// Bucketed distance `|i - j|`. Panics when `i == j`.
pub fn dist(i: usize, j: usize) -> DistBucket {
    assert!(i != j, "dist is undefined for identical positions ({i})");
    match i.abs_diff(j) {
        1 => DistBucket::One,
        2 => DistBucket::Two,
        3..=6 => DistBucket::ThreeToSix,
        _ => DistBucket::SevenPlus,
    }
}

/// Side of a head on which a word lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    pub fn as_str(self) -> &'static str {
        match self {
            Dir::Left => "L",
            Dir::Right => "R",
        }
    }

    /// Side of `head` on which `word` lies.
    pub fn of(word: usize, head: usize) -> Dir {
        if word < head {
            Dir::Left
        } else {
            Dir::Right
        }
    }
}

/// The seven coarse equivalence classes every tag maps into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TinyClass {
    Noun,
    Verb,
    NounModifier,
    Adverb,
    Preposition,
    WhWord,
    Punctuation,
}

impl TinyClass {
    pub const ALL: [TinyClass; 7] = [
        TinyClass::Noun,
        TinyClass::Verb,
        TinyClass::NounModifier,
        TinyClass::Adverb,
        TinyClass::Preposition,
        TinyClass::WhWord,
        TinyClass::Punctuation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TinyClass::Noun => "Noun",
            TinyClass::Verb => "Verb",
            TinyClass::NounModifier => "NounModifier",
            TinyClass::Adverb => "Adverb",
            TinyClass::Preposition => "Preposition",
            TinyClass::WhWord => "WhWord",
            TinyClass::Punctuation => "Punctuation",
        }
    }

    /// Column label used in evaluation reports.
    pub fn label(self) -> &'static str {
        match self {
            TinyClass::Noun => "N",
            TinyClass::Verb => "V",
            TinyClass::NounModifier => "NMod",
            TinyClass::Adverb => "Adv",
            TinyClass::Preposition => "Prep",
            TinyClass::WhWord => "Wh",
            TinyClass::Punctuation => "Punc",
        }
    }

    pub fn parse(s: &str) -> Option<TinyClass> {
        TinyClass::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

/// The tags of a corpus with their shortened and tiny classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagSet {
    tags: Vec<String>,
    short: Vec<String>,
    tiny: Vec<TinyClass>,
    index: HashMap<String, usize>,
}

impl TagSet {
    pub fn new<I>(entries: I) -> Result<TagSet, CorpusError>
    where
        I: IntoIterator<Item = (String, String, TinyClass)>,
    {
        let mut set = TagSet {
            tags: Vec::new(),
            short: Vec::new(),
            tiny: Vec::new(),
            index: HashMap::new(),
        };
        for (tag, short, tiny) in entries {
            if tag.is_empty() || short.is_empty() {
                return Err(CorpusError::TagSet(format!("empty tag or short tag for {tag:?}")));
            }
            if tag == "_" {
                return Err(CorpusError::TagSet("\"_\" is reserved for missing tags".into()));
            }
            if SPECIAL_SYMBOLS.contains(&tag.as_str()) || tag.starts_with(MORPH_PREFIX) {
                return Err(CorpusError::TagSet(format!("{tag} is a reserved symbol")));
            }
            if set.index.contains_key(&tag) {
                return Err(CorpusError::TagSet(format!("duplicate tag {tag}")));
            }
            set.index.insert(tag.clone(), set.tags.len());
            set.tags.push(tag);
            set.short.push(short);
            set.tiny.push(tiny);
        }
        if set.tags.is_empty() {
            return Err(CorpusError::TagSet("tag set is empty".into()));
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.index.contains_key(tag)
    }

    pub fn index_of(&self, tag: &str) -> Option<usize> {
        self.index.get(tag).copied()
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn short(&self, tag: &str) -> Option<&str> {
        self.index_of(tag).map(|i| self.short[i].as_str())
    }

    pub fn tiny(&self, tag: &str) -> Option<TinyClass> {
        self.index_of(tag).map(|i| self.tiny[i])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, TinyClass)> + '_ {
        (0..self.tags.len()).map(move |i| (self.tags[i].as_str(), self.short[i].as_str(), self.tiny[i]))
    }
}

/// A word form paired with a tag and a capitalization class.
///
/// Ordinary forms are lowercased. Special symbols and attenuation symbols
/// are uppercase, so they can never collide with a real word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaggedWord {
    pub form: String,
    pub tag: String,
    pub cap: CapClass,
}

impl TaggedWord {
    /// Builds a tagged word from a surface form, lowercasing it.
    pub fn from_surface(surface: &str, tag: &str, is_first_nonpunct: bool) -> TaggedWord {
        TaggedWord {
            form: surface.to_lowercase(),
            tag: tag.to_string(),
            cap: cap(surface, is_first_nonpunct),
        }
    }

    /// One of the distinguished pairs such as `<EOS, EOS>`.
    pub fn special(symbol: &str) -> TaggedWord {
        TaggedWord {
            form: symbol.to_string(),
            tag: symbol.to_string(),
            cap: CapClass::Down,
        }
    }

    pub fn is_special(&self) -> bool {
        self.form == self.tag && SPECIAL_SYMBOLS.contains(&self.tag.as_str())
    }
}

impl fmt::Display for TaggedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.form, self.tag)
    }
}

/// Attenuation symbol for a word form.
pub fn attenuate_token(form: &str) -> String {
    if is_attenuation_symbol(form) {
        return form.to_string();
    }
    let chars: Vec<char> = form.chars().collect();
    match chars.last() {
        Some(c) if c.is_ascii_digit() || c.is_numeric() => MORPH_NUM.to_string(),
        _ if chars.len() >= 6 => {
            let tail: String = chars[chars.len() - 2..].iter().collect();
            format!("{MORPH_PREFIX}{}", tail.to_uppercase())
        }
        _ => MORPH_SHORT.to_string(),
    }
}

pub fn is_attenuation_symbol(form: &str) -> bool {
    form.strip_prefix(MORPH_PREFIX)
        .is_some_and(|rest| !rest.is_empty() && !rest.chars().any(|c| c.is_lowercase()))
}

/// A sentence: surface forms plus optional gold tags and parents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    /// Surface forms, positions `1..=n`.
    pub words: Vec<String>,
    pub gold_tags: Option<Vec<String>>,
    /// Parent positions in `1..=n+1`; `n + 1` is EOS.
    pub gold_parents: Option<Vec<usize>>,
    /// Tokens replaced by their attenuation symbol. Empty means none.
    pub attenuated: Vec<bool>,
}

impl Sentence {
    pub fn new(words: Vec<String>) -> Sentence {
        Sentence {
            words,
            gold_tags: None,
            gold_parents: None,
            attenuated: Vec::new(),
        }
    }

    pub fn annotated(words: Vec<String>, tags: Vec<String>, parents: Vec<usize>) -> Sentence {
        Sentence {
            words,
            gold_tags: Some(tags),
            gold_parents: Some(parents),
            attenuated: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_attenuated(&self, i: usize) -> bool {
        self.attenuated.get(i).copied().unwrap_or(false)
    }

    /// Lowercased (or attenuated) form and capitalization class of every word.
    pub fn forms_and_caps(&self) -> Vec<(String, CapClass)> {
        let first = first_nonpunct(&self.words);
        self.words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let c = cap(w, first == Some(i));
                let form = if self.is_attenuated(i) {
                    attenuate_token(w)
                } else {
                    w.to_lowercase()
                };
                (form, c)
            })
            .collect()
    }

    /// Tagged words under the gold tags, if present.
    pub fn tagged_words(&self) -> Option<Vec<TaggedWord>> {
        let tags = self.gold_tags.as_ref()?;
        Some(
            self.forms_and_caps()
                .into_iter()
                .zip(tags)
                .map(|((form, cap), tag)| TaggedWord {
                    form,
                    tag: tag.clone(),
                    cap,
                })
                .collect(),
        )
    }

    /// The gold dependency structure, if tags and parents are both present.
    pub fn gold_structure(&self) -> Option<DependencyStructure> {
        let words = self.tagged_words()?;
        let parents = self.gold_parents.clone()?;
        Some(DependencyStructure { words, parents })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub tagset: TagSet,
    pub sections: Vec<Section>,
}

impl Corpus {
    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> + '_ {
        self.sections.iter().flat_map(|s| s.sentences.iter())
    }

    pub fn sentence_count(&self) -> usize {
        self.sections.iter().map(|s| s.sentences.len()).sum()
    }

    /// Checks that every sentence is fully tagged and parsed with a well-formed structure.
    pub fn check_annotated(&self) -> Result<(), CorpusError> {
        match self.annotation_problems().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Every sentence that lacks tags or parents, uses an unknown tag, or has
    /// an ill-formed structure, in corpus order.
    pub fn annotation_problems(&self) -> Vec<CorpusError> {
        let mut out = Vec::new();
        for section in &self.sections {
            for (k, s) in section.sentences.iter().enumerate() {
                let at = |msg: String| CorpusError::Annotation {
                    section: section.id.clone(),
                    sentence: k + 1,
                    msg,
                };
                let (Some(tags), Some(parents)) = (&s.gold_tags, &s.gold_parents) else {
                    let missing = if s.gold_tags.is_none() { "tags" } else { "parents" };
                    out.push(at(format!("missing {missing}")));
                    continue;
                };
                if let Some(t) = tags.iter().find(|t| !self.tagset.contains(t)) {
                    out.push(at(format!("tag {t} not in tag set")));
                } else if let Err(e) = validate_structure(parents) {
                    out.push(at(e.to_string()));
                }
            }
        }
        out
    }

    /// Every lowercased surface form in the corpus.
    pub fn vocabulary(&self) -> HashSet<String> {
        self.sentences()
            .flat_map(|s| s.words.iter().map(|w| w.to_lowercase()))
            .collect()
    }
}

/// Marks, for every word type, all of its tokens in the first section where it
/// occurs for attenuation, unless the type is protected.
pub fn attenuate_training_corpus(train: &Corpus, protected_vocab: &HashSet<String>) -> Corpus {
    let mut first_section: HashMap<String, usize> = HashMap::new();
    for (k, section) in train.sections.iter().enumerate() {
        for s in &section.sentences {
            for w in &s.words {
                first_section.entry(w.to_lowercase()).or_insert(k);
            }
        }
    }
    let mut out = train.clone();
    for (k, section) in out.sections.iter_mut().enumerate() {
        for s in &mut section.sentences {
            let marks: Vec<bool> = s
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let lower = w.to_lowercase();
                    s.is_attenuated(i) || (first_section[&lower] == k && !protected_vocab.contains(&lower))
                })
                .collect();
            s.attenuated = marks;
        }
    }
    out
}

/// A tagged sentence with a parent for every word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DependencyStructure {
    pub words: Vec<TaggedWord>,
    pub parents: Vec<usize>,
}

impl DependencyStructure {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Position of the end-of-sentence mark.
    pub fn eos(&self) -> usize {
        self.words.len() + 1
    }

    pub fn validate(&self) -> Result<(), StructureError> {
        if self.parents.len() != self.words.len() {
            return Err(StructureError::Length {
                words: self.words.len(),
                parents: self.parents.len(),
            });
        }
        validate_structure(&self.parents)
    }

    /// Children of `k` on one side, closest first.
    pub fn kids(&self, k: usize, side: Dir) -> Vec<usize> {
        kids(&self.parents, k, side)
    }

    /// `kid(k, c)`: the `|c|`-th closest child on the side given by the sign of `c`.
    /// `kid(k, 0)` is `k` itself.
    pub fn kid(&self, k: usize, c: isize) -> Option<usize> {
        match c.cmp(&0) {
            std::cmp::Ordering::Equal => Some(k),
            std::cmp::Ordering::Less => self.kids(k, Dir::Left).get(c.unsigned_abs() - 1).copied(),
            std::cmp::Ordering::Greater => self.kids(k, Dir::Right).get(c as usize - 1).copied(),
        }
    }
}

/// Children of `k` on one side of it, closest first.
pub fn kids(parents: &[usize], k: usize, side: Dir) -> Vec<usize> {
    let n = parents.len();
    match side {
        Dir::Left => (1..k.min(n + 1)).rev().filter(|&i| parents[i - 1] == k).collect(),
        Dir::Right => (k + 1..=n).filter(|&i| parents[i - 1] == k).collect(),
    }
}

/// Checks that a parent vector forms a well-formed bare-bones structure:
/// one word attached to EOS, no crossing links, no cycles.
pub fn validate_structure(parents: &[usize]) -> Result<(), StructureError> {
    let n = parents.len();
    if n == 0 {
        return Err(StructureError::Empty);
    }
    for (i, &p) in parents.iter().enumerate() {
        if p == 0 || p > n + 1 {
            return Err(StructureError::ParentOutOfRange { word: i + 1, parent: p });
        }
        if p == i + 1 {
            return Err(StructureError::Cycle { word: i + 1 });
        }
    }
    let roots: Vec<usize> = (1..=n).filter(|&i| parents[i - 1] == n + 1).collect();
    match roots.len() {
        0 => return Err(StructureError::NoRoot),
        1 => {}
        _ => return Err(StructureError::MultipleRoots { words: roots }),
    }
    let span = |i: usize| {
        let p = parents[i - 1];
        (i.min(p), i.max(p))
    };
    for i in 1..=n {
        let (a1, b1) = span(i);
        for j in i + 1..=n {
            let (a2, b2) = span(j);
            if (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1) {
                return Err(StructureError::Crossing { first: i, second: j });
            }
        }
    }
    for start in 1..=n {
        let mut k = start;
        for _ in 0..=n {
            if k == n + 1 {
                break;
            }
            k = parents[k - 1];
        }
        if k != n + 1 {
            return Err(StructureError::Cycle { word: start });
        }
    }
    Ok(())
}

/// Options for [`read_corpus`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ReadOptions {
    /// Accept parent vectors that are in range but not well-formed
    /// (system output of the baseline, for instance).
    pub allow_ill_formed: bool,
}

/// Reads a corpus in the line-oriented text format.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    read_corpus_with(reader, ReadOptions::default())
}

pub fn read_corpus_with<R: BufRead>(reader: R, opts: ReadOptions) -> Result<Corpus, CorpusError> {
    let mut parser = CorpusParser::default();
    for (k, line) in reader.lines().enumerate() {
        parser.line(k + 1, &line?, opts)?;
    }
    parser.finish(opts)
}

#[derive(Default)]
struct CorpusParser {
    in_tagset: bool,
    tagset_done: bool,
    tag_entries: Vec<(String, String, TinyClass)>,
    tagset: Option<TagSet>,
    sections: Vec<Section>,
    section_ids: HashSet<String>,
    rows: Vec<(usize, Row)>,
    last_line: usize,
}

struct Row {
    form: String,
    tag: Option<String>,
    parent: Option<usize>,
}

impl CorpusParser {
    fn err(line: usize, field: &'static str, msg: impl Into<String>) -> CorpusError {
        CorpusError::Parse {
            line,
            field,
            msg: msg.into(),
        }
    }

    fn line(&mut self, no: usize, line: &str, opts: ReadOptions) -> Result<(), CorpusError> {
        self.last_line = no;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if self.in_tagset {
            if line == "#END" {
                self.in_tagset = false;
                self.tagset_done = true;
                let entries = std::mem::take(&mut self.tag_entries);
                self.tagset = Some(TagSet::new(entries).map_err(|e| Self::err(no, "tagset", e.to_string()))?);
                return Ok(());
            }
            if line.trim().is_empty() {
                return Ok(());
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Self::err(no, "tagset", "expected tag<TAB>short<TAB>tiny"));
            }
            let tiny = TinyClass::parse(fields[2])
                .ok_or_else(|| Self::err(no, "tiny", format!("unknown tiny class {:?}", fields[2])))?;
            self.tag_entries
                .push((fields[0].to_string(), fields[1].to_string(), tiny));
            return Ok(());
        }
        if line == "#TAGSET" {
            if self.tagset_done {
                return Err(Self::err(no, "tagset", "duplicate #TAGSET block"));
            }
            self.in_tagset = true;
            return Ok(());
        }
        if let Some(id) = line.strip_prefix("#SECTION") {
            self.flush(opts)?;
            let id = id.trim();
            if id.is_empty() {
                return Err(Self::err(no, "section", "missing section id"));
            }
            if !self.section_ids.insert(id.to_string()) {
                return Err(Self::err(no, "section", format!("duplicate section id {id}")));
            }
            self.sections.push(Section {
                id: id.to_string(),
                sentences: Vec::new(),
            });
            return Ok(());
        }
        if line.starts_with('#') {
            return Err(Self::err(no, "directive", format!("unknown directive {line:?}")));
        }
        if line.trim().is_empty() {
            return self.flush(opts);
        }
        if self.tagset.is_none() {
            return Err(Self::err(no, "tagset", "token line before the #TAGSET block"));
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Self::err(no, "token", "expected index<TAB>form<TAB>tag<TAB>parent"));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| Self::err(no, "index", format!("bad index {:?}", fields[0])))?;
        if index != self.rows.len() + 1 {
            return Err(Self::err(
                no,
                "index",
                format!("expected index {}, found {index}", self.rows.len() + 1),
            ));
        }
        if fields[1].is_empty() {
            return Err(Self::err(no, "form", "empty form"));
        }
        let tag = match fields[2] {
            "_" => None,
            t => {
                if !self.tagset.as_ref().is_some_and(|ts| ts.contains(t)) {
                    return Err(Self::err(no, "tag", format!("tag {t} not declared in #TAGSET")));
                }
                Some(t.to_string())
            }
        };
        let parent = match fields[3] {
            "_" => None,
            p => Some(
                p.parse()
                    .map_err(|_| Self::err(no, "parent", format!("bad parent {p:?}")))?,
            ),
        };
        self.rows.push((
            no,
            Row {
                form: fields[1].to_string(),
                tag,
                parent,
            },
        ));
        Ok(())
    }

    fn flush(&mut self, opts: ReadOptions) -> Result<(), CorpusError> {
        if self.rows.is_empty() {
            return Ok(());
        }
        let rows = std::mem::take(&mut self.rows);
        let first_line = rows[0].0;
        let n = rows.len();
        let tagged = rows.iter().filter(|(_, r)| r.tag.is_some()).count();
        if tagged != 0 && tagged != n {
            return Err(Self::err(first_line, "tag", "sentence is only partially tagged"));
        }
        let parsed = rows.iter().filter(|(_, r)| r.parent.is_some()).count();
        if parsed != 0 && parsed != n {
            return Err(Self::err(first_line, "parent", "sentence is only partially parsed"));
        }
        let mut parents = Vec::with_capacity(n);
        for (line, row) in &rows {
            if let Some(p) = row.parent {
                if p > n {
                    return Err(Self::err(
                        *line,
                        "parent",
                        format!("parent out of range: {p} in a {n}-word sentence"),
                    ));
                }
                parents.push(if p == 0 { n + 1 } else { p });
            }
        }
        if parsed == n && !opts.allow_ill_formed {
            validate_structure(&parents).map_err(|e| Self::err(first_line, "parent", e.to_string()))?;
        }
        let sentence = Sentence {
            words: rows.iter().map(|(_, r)| r.form.clone()).collect(),
            gold_tags: (tagged == n).then(|| rows.iter().map(|(_, r)| r.tag.clone().unwrap()).collect()),
            gold_parents: (parsed == n).then_some(parents),
            attenuated: Vec::new(),
        };
        if self.sections.is_empty() {
            self.section_ids.insert("default".into());
            self.sections.push(Section {
                id: "default".into(),
                sentences: Vec::new(),
            });
        }
        self.sections.last_mut().unwrap().sentences.push(sentence);
        Ok(())
    }

    fn finish(mut self, opts: ReadOptions) -> Result<Corpus, CorpusError> {
        if self.in_tagset {
            return Err(Self::err(self.last_line, "tagset", "unterminated #TAGSET block"));
        }
        self.flush(opts)?;
        let tagset = self
            .tagset
            .ok_or_else(|| Self::err(self.last_line, "tagset", "missing #TAGSET block"))?;
        if let Some(s) = self.sections.iter().find(|s| s.sentences.is_empty()) {
            return Err(Self::err(
                self.last_line,
                "section",
                format!("section {} is empty", s.id),
            ));
        }
        Ok(Corpus {
            tagset,
            sections: self.sections,
        })
    }
}

/// Writes a corpus in the text format read by [`read_corpus`].
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<()> {
    writeln!(out, "#TAGSET")?;
    for (tag, short, tiny) in corpus.tagset.entries() {
        writeln!(out, "{tag}\t{short}\t{}", tiny.as_str())?;
    }
    writeln!(out, "#END")?;
    for section in &corpus.sections {
        writeln!(out, "#SECTION {}", section.id)?;
        for s in &section.sentences {
            write_sentence(s, &mut out)?;
        }
    }
    Ok(())
}

fn write_sentence<W: Write>(s: &Sentence, out: &mut W) -> io::Result<()> {
    let n = s.len();
    for (i, w) in s.words.iter().enumerate() {
        let tag = s.gold_tags.as_ref().map_or("_", |t| t[i].as_str());
        let parent = match &s.gold_parents {
            Some(p) if p[i] == n + 1 => "0".to_string(),
            Some(p) => p[i].to_string(),
            None => "_".to_string(),
        };
        writeln!(out, "{}\t{w}\t{tag}\t{parent}", i + 1)?;
    }
    writeln!(out)
}
