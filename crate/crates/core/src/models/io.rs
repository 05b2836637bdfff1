//! Text serialization of trained models: a header with the model id, flags,
//! tag set, dictionaries and baseline statistics, followed by the count table.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write};

use crate::corpus::{TagSet, TinyClass};
use crate::error::ModelError;
use crate::estimation::CountTable;
use crate::symbols::Symbols;

use super::baseline::BaselineStats;
use super::features::TagFeatures;
use super::{ModelKind, ModelSpec, TrainedModel};

const MAGIC: &str = "#bbdep-model v1";
const END_HEADER: &str = "#end-header";

impl TrainedModel {
    pub fn save<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "model\t{}", self.spec.kind.name())?;
        writeln!(out, "distance\t{}", self.spec.use_distance)?;
        for (tag, short, tiny) in self.tagset.entries() {
            writeln!(out, "tag\t{tag}\t{short}\t{}", tiny.as_str())?;
        }
        for (form, tags) in &self.tag_dictionary {
            writeln!(out, "dict\t{form}\t{}", tags.join("\t"))?;
        }
        for form in &self.lexicon {
            writeln!(out, "lex\t{form}")?;
        }
        let b = &self.baseline;
        for (k, t) in &b.tag_by_key {
            writeln!(out, "btag\t{k}\t{t}")?;
        }
        for (t, o) in &b.offset_by_tag {
            writeln!(out, "boff\t{t}\t{o}")?;
        }
        if let Some(t) = &b.unknown_tag {
            writeln!(out, "bunk\t{t}")?;
        }
        writeln!(out, "bdef\t{}\t{}", b.default_tag, b.default_offset)?;
        writeln!(out, "{END_HEADER}")?;
        self.counts.dump(&self.symbols, &self.smoothing, &mut out)?;
        out.flush()
    }

    pub fn load<R: BufRead>(reader: R) -> Result<TrainedModel, ModelError> {
        let mut lines = reader.lines().enumerate();
        let mut kind = None;
        let mut use_distance = false;
        let mut tags = Vec::new();
        let mut dict: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut lexicon = BTreeSet::new();
        let mut baseline = BaselineStats::default();
        let mut seen_default = false;
        let mut first = true;
        loop {
            let Some((k, line)) = lines.next() else {
                return Err(ModelError::Format {
                    line: 0,
                    msg: "missing end of header".into(),
                });
            };
            let no = k + 1;
            let line = line?;
            let bad = |msg: String| ModelError::Format { line: no, msg };
            if first {
                if line != MAGIC {
                    return Err(bad(format!("expected {MAGIC:?}")));
                }
                first = false;
                continue;
            }
            if line == END_HEADER {
                break;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let arity = |n: usize| {
                if f.len() == n {
                    Ok(())
                } else {
                    Err(bad(format!("expected {n} fields")))
                }
            };
            match f[0] {
                "model" => {
                    arity(2)?;
                    kind = Some(f[1].parse::<ModelKind>().map_err(bad)?);
                }
                "distance" => {
                    arity(2)?;
                    use_distance = f[1].parse().map_err(|_| bad("bad distance flag".into()))?;
                }
                "tag" => {
                    arity(4)?;
                    let tiny = TinyClass::parse(f[3]).ok_or_else(|| bad(format!("unknown tiny class {}", f[3])))?;
                    tags.push((f[1].to_string(), f[2].to_string(), tiny));
                }
                "dict" => {
                    if f.len() < 3 {
                        return Err(bad("dictionary entry without tags".into()));
                    }
                    dict.insert(f[1].to_string(), f[2..].iter().map(|t| t.to_string()).collect());
                }
                "lex" => {
                    arity(2)?;
                    lexicon.insert(f[1].to_string());
                }
                "btag" => {
                    arity(3)?;
                    baseline.tag_by_key.insert(f[1].to_string(), f[2].to_string());
                }
                "boff" => {
                    arity(3)?;
                    let o = f[2].parse().map_err(|_| bad("bad offset".into()))?;
                    baseline.offset_by_tag.insert(f[1].to_string(), o);
                }
                "bunk" => {
                    arity(2)?;
                    baseline.unknown_tag = Some(f[1].to_string());
                }
                "bdef" => {
                    arity(3)?;
                    baseline.default_tag = f[1].to_string();
                    baseline.default_offset = f[2].parse().map_err(|_| bad("bad offset".into()))?;
                    seen_default = true;
                }
                other => return Err(bad(format!("unknown header record {other:?}"))),
            }
        }
        let kind = kind.ok_or(ModelError::Format {
            line: 0,
            msg: "missing model id".into(),
        })?;
        let spec = ModelSpec { kind, use_distance };
        spec.validate()?;
        if !seen_default {
            return Err(ModelError::Format {
                line: 0,
                msg: "missing baseline defaults".into(),
            });
        }
        let tagset = TagSet::new(tags).map_err(|e| ModelError::Format {
            line: 0,
            msg: e.to_string(),
        })?;
        for t in dict.values().flatten() {
            if !tagset.contains(t) {
                return Err(ModelError::UnknownTag(t.clone()));
            }
        }
        let mut symbols = Symbols::new();
        let features = TagFeatures::new(&tagset, &mut symbols);
        for form in dict.keys() {
            symbols.intern(form);
        }
        let (counts, smoothing) = CountTable::load(&mut lines, &mut symbols)?;
        Ok(TrainedModel {
            spec,
            smoothing,
            tagset,
            symbols,
            features,
            counts,
            tag_dictionary: dict,
            lexicon,
            baseline,
        })
    }
}
