//! Count tables and the recursive backed-off estimator.
//!
//! A conditional probability `Pr(outcome | condition)` is estimated through a
//! list of increasingly severe reductions of the condition. The last level
//! returns `(count(o & R(c)) + 0.005) / (count(R(c)) + 0.5)`; every earlier
//! level mixes its own counts with the estimate `p` of the remaining list as
//! `(count(o & R(c)) + 3p) / (count(R(c)) + 3)`. A disjunctive level sums the
//! numerators and the denominators of its disjuncts before smoothing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::ModelError;
use crate::symbols::{Sym, Symbols};

const MAX_KEY: usize = 16;

/// Selects condition slots, in order, to form a reduced condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection(pub Vec<usize>);

impl Projection {
    pub fn new(slots: &[usize]) -> Projection {
        Projection(slots.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    Single(Projection),
    Disjunction(Vec<Projection>),
}

impl Reduction {
    pub fn disjuncts(&self) -> &[Projection] {
        match self {
            Reduction::Single(p) => std::slice::from_ref(p),
            Reduction::Disjunction(ps) => ps,
        }
    }
}

/// An ordered list of reductions for one conditional probability.
///
/// `id` keeps the counts of different lists apart even when their reduced
/// tuples coincide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionList {
    id: u16,
    levels: Vec<Reduction>,
}

impl ReductionList {
    pub fn new(id: u16, levels: Vec<Reduction>) -> ReductionList {
        assert!(!levels.is_empty(), "reduction list {id} is empty");
        assert!(levels.len() < 256, "reduction list {id} is too long");
        assert!(
            matches!(levels.last(), Some(Reduction::Single(_))),
            "last reduction of list {id} must not be disjunctive"
        );
        for level in &levels {
            if let Reduction::Disjunction(ds) = level {
                assert!((2..=3).contains(&ds.len()), "disjunctions have 2 or 3 disjuncts");
            }
        }
        ReductionList { id, levels }
    }

    /// Convenience constructor: each inner slice is a level, and a level with
    /// several projections is a disjunction.
    pub fn from_slots(id: u16, levels: &[&[&[usize]]]) -> ReductionList {
        let levels = levels
            .iter()
            .map(|ds| match ds {
                [one] => Reduction::Single(Projection::new(one)),
                many => Reduction::Disjunction(many.iter().map(|d| Projection::new(d)).collect()),
            })
            .collect();
        ReductionList::new(id, levels)
    }

    pub fn id(&self) -> u16 {
        self.id
    }

    pub fn levels(&self) -> &[Reduction] {
        &self.levels
    }

    /// Restriction to the last (most severe) level only.
    pub fn last_only(&self, id: u16) -> ReductionList {
        ReductionList::new(id, vec![self.levels.last().unwrap().clone()])
    }
}

fn disjunct_key(list: u16, level: usize, disjunct: usize) -> Sym {
    (list as u32) << 16 | (level as u32) << 8 | disjunct as u32
}

fn split_disjunct_key(key: Sym) -> (u16, usize, usize) {
    ((key >> 16) as u16, ((key >> 8) & 0xff) as usize, (key & 0xff) as usize)
}

/// Smoothing constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingConfig {
    pub base_add_num: f64,
    pub base_add_den: f64,
    pub backoff_weight: f64,
    /// When set, a level whose condition count reaches this value returns its
    /// raw relative frequency without consulting the rest of the list.
    pub skip_threshold: Option<u64>,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            base_add_num: 0.005,
            base_add_den: 0.5,
            backoff_weight: 3.0,
            skip_threshold: None,
        }
    }
}

impl SmoothingConfig {
    /// The default constants with the count-threshold shortcut at 8.
    pub fn with_skip() -> SmoothingConfig {
        SmoothingConfig {
            skip_threshold: Some(8),
            ..SmoothingConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [self.base_add_num, self.base_add_den, self.backoff_weight];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(ModelError::Invalid("smoothing constants must be positive".into()));
        }
        if self.skip_threshold == Some(0) {
            return Err(ModelError::Invalid("skip threshold must be at least 1".into()));
        }
        Ok(())
    }

    fn header(&self) -> String {
        let skip = self.skip_threshold.map_or("off".to_string(), |t| t.to_string());
        format!(
            "base_add_num={} base_add_den={} backoff_weight={} skip_threshold={skip}",
            self.base_add_num, self.base_add_den, self.backoff_weight
        )
    }

    fn parse_header(line: &str) -> Result<SmoothingConfig, String> {
        let mut cfg = SmoothingConfig::default();
        for field in line.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| format!("bad field {field:?}"))?;
            let num = || v.parse::<f64>().map_err(|_| format!("bad value for {k}"));
            match k {
                "base_add_num" => cfg.base_add_num = num()?,
                "base_add_den" => cfg.base_add_den = num()?,
                "backoff_weight" => cfg.backoff_weight = num()?,
                "skip_threshold" => {
                    cfg.skip_threshold = match v {
                        "off" => None,
                        t => Some(t.parse().map_err(|_| "bad skip threshold".to_string())?),
                    }
                }
                _ => return Err(format!("unknown smoothing key {k}")),
            }
        }
        Ok(cfg)
    }
}

struct KeyBuf {
    buf: [Sym; MAX_KEY],
    len: usize,
}

impl KeyBuf {
    fn new(prefix: Sym) -> KeyBuf {
        let mut buf = [0; MAX_KEY];
        buf[0] = prefix;
        KeyBuf { buf, len: 1 }
    }

    fn push(&mut self, s: Sym) {
        self.buf[self.len] = s;
        self.len += 1;
    }

    fn as_slice(&self) -> &[Sym] {
        &self.buf[..self.len]
    }
}

/// Event counts and condition counts for every reduction of every list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    events: HashMap<Box<[Sym]>, u64>,
    conditions: HashMap<Box<[Sym]>, u64>,
}

impl CountTable {
    pub fn new() -> CountTable {
        CountTable::default()
    }

    fn keys(
        list: &ReductionList,
        level: usize,
        d: usize,
        proj: &Projection,
        cond: &[Sym],
        outcome: &[Sym],
    ) -> (KeyBuf, KeyBuf) {
        let mut c = KeyBuf::new(disjunct_key(list.id, level, d));
        for &slot in &proj.0 {
            c.push(cond[slot]);
        }
        let mut e = KeyBuf { buf: c.buf, len: c.len };
        for &o in outcome {
            e.push(o);
        }
        (c, e)
    }

    /// Records one observation of `outcome` under `condition` at every
    /// reduction level and every disjunct.
    pub fn observe(&mut self, condition: &[Sym], outcome: &[Sym], list: &ReductionList) {
        for (level, red) in list.levels.iter().enumerate() {
            for (d, proj) in red.disjuncts().iter().enumerate() {
                let (c, e) = Self::keys(list, level, d, proj, condition, outcome);
                *self.conditions.entry(c.as_slice().into()).or_insert(0) += 1;
                *self.events.entry(e.as_slice().into()).or_insert(0) += 1;
            }
        }
    }

    /// `(count(outcome & R(cond)), count(R(cond)))` at one level, summed over disjuncts.
    pub fn level_counts(&self, condition: &[Sym], outcome: &[Sym], list: &ReductionList, level: usize) -> (u64, u64) {
        let mut num = 0;
        let mut den = 0;
        for (d, proj) in list.levels[level].disjuncts().iter().enumerate() {
            let (c, e) = Self::keys(list, level, d, proj, condition, outcome);
            den += self.conditions.get(c.as_slice()).copied().unwrap_or(0);
            num += self.events.get(e.as_slice()).copied().unwrap_or(0);
        }
        (num, den)
    }

    /// Backed-off estimate of `Pr(outcome | condition)`.
    pub fn estimate(&self, condition: &[Sym], outcome: &[Sym], list: &ReductionList, cfg: &SmoothingConfig) -> f64 {
        self.estimate_from(0, condition, outcome, list, cfg)
    }

    fn estimate_from(
        &self,
        level: usize,
        condition: &[Sym],
        outcome: &[Sym],
        list: &ReductionList,
        cfg: &SmoothingConfig,
    ) -> f64 {
        let (num, den) = self.level_counts(condition, outcome, list, level);
        let (num, den_f) = (num as f64, den as f64);
        if level + 1 == list.levels.len() {
            return (num + cfg.base_add_num) / (den_f + cfg.base_add_den);
        }
        if cfg.skip_threshold.is_some_and(|t| den >= t) {
            return num / den_f;
        }
        let p = self.estimate_from(level + 1, condition, outcome, list, cfg);
        (num + cfg.backoff_weight * p) / (den_f + cfg.backoff_weight)
    }

    pub fn event_entries(&self) -> usize {
        self.events.len()
    }

    pub fn condition_entries(&self) -> usize {
        self.conditions.len()
    }

    /// Total number of observations recorded for a list (at its first level).
    pub fn observations(&self, list_id: u16) -> u64 {
        self.conditions
            .iter()
            .filter(|(k, _)| {
                let (l, level, d) = split_disjunct_key(k[0]);
                l == list_id && level == 0 && d == 0
            })
            .map(|(_, &v)| v)
            .sum()
    }

    /// Writes the table as text, one line per entry, sorted.
    pub fn dump<W: Write>(&self, symbols: &Symbols, cfg: &SmoothingConfig, mut out: W) -> io::Result<()> {
        writeln!(out, "#counts v1")?;
        writeln!(out, "#smoothing {}", cfg.header())?;
        for (tag, map) in [("C", &self.conditions), ("E", &self.events)] {
            let mut lines: Vec<String> = map
                .iter()
                .map(|(key, count)| {
                    let (l, level, d) = split_disjunct_key(key[0]);
                    let mut line = format!("{tag}\t{l}.{level}.{d}");
                    for &s in &key[1..] {
                        let _ = write!(line, "\t{}", symbols.name(s));
                    }
                    let _ = write!(line, "\t{count}");
                    line
                })
                .collect();
            lines.sort();
            for line in lines {
                writeln!(out, "{line}")?;
            }
        }
        writeln!(out, "#end-counts")
    }

    /// Reads a table written by [`CountTable::dump`] from enumerated lines.
    pub fn load<I>(lines: &mut I, symbols: &mut Symbols) -> Result<(CountTable, SmoothingConfig), ModelError>
    where
        I: Iterator<Item = (usize, io::Result<String>)>,
    {
        let mut next = |what: &str| -> Result<(usize, String), ModelError> {
            match lines.next() {
                Some((k, line)) => Ok((k + 1, line?)),
                None => Err(ModelError::Format {
                    line: 0,
                    msg: format!("unexpected end of file, expected {what}"),
                }),
            }
        };
        let (no, header) = next("#counts")?;
        if header != "#counts v1" {
            return Err(ModelError::Format {
                line: no,
                msg: format!("expected #counts v1, found {header:?}"),
            });
        }
        let (no, smoothing) = next("#smoothing")?;
        let cfg = smoothing
            .strip_prefix("#smoothing ")
            .ok_or_else(|| "missing #smoothing".to_string())
            .and_then(SmoothingConfig::parse_header)
            .map_err(|msg| ModelError::Format { line: no, msg })?;
        let mut table = CountTable::new();
        loop {
            let (no, line) = next("#end-counts")?;
            if line == "#end-counts" {
                break;
            }
            let bad = |msg: &str| ModelError::Format {
                line: no,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 3 {
                return Err(bad("too few fields"));
            }
            let ids: Vec<&str> = fields[1].split('.').collect();
            let [l, level, d] = ids[..] else {
                return Err(bad("bad reduction id"));
            };
            let parse = |s: &str| s.parse::<u32>().map_err(|_| bad("bad reduction id"));
            let mut key = vec![(parse(l)? << 16) | (parse(level)? << 8) | parse(d)?];
            key.extend(fields[2..fields.len() - 1].iter().map(|f| symbols.intern(f)));
            let count: u64 = fields[fields.len() - 1].parse().map_err(|_| bad("bad count"))?;
            let map = match fields[0] {
                "C" => &mut table.conditions,
                "E" => &mut table.events,
                _ => return Err(bad("expected C or E line")),
            };
            map.insert(key.into_boxed_slice(), count);
        }
        Ok((table, cfg))
    }
}
