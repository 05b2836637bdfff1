//! Composite factor events and their expansion into estimator lookups.
//!
//! Both training and scoring go through [`Walker`], so the events a model is
//! trained on are exactly the events it later reads.

use crate::corpus::{dist, kids, Dir, DistBucket};
use crate::symbols::{self, dir_sym, dist_sym, Sym, Symbols};

use super::features::{lists, TagFeatures, Tw};
use super::{ModelKind, ModelSpec};

/// One composite factor of a model's score. Siblings are stored as the
/// canonical class tag the factor can distinguish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorEvent {
    Trigram {
        prev2: Tw,
        prev: Tw,
        next: Tw,
    },
    Child {
        parent: Tw,
        sibling: Sym,
        child: Tw,
        dir: Dir,
        nolex: bool,
    },
    Distance {
        parent: Tw,
        child: Tw,
        bucket: DistBucket,
    },
    Parent {
        child: Tw,
        parent: Tw,
        dir: Option<Dir>,
    },
    Link {
        candidate: Tw,
        head: Tw,
        prev_child: Sym,
        yes: bool,
        dist: Option<DistBucket>,
    },
}

impl FactorEvent {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FactorEvent::Trigram { .. } => "trigram",
            FactorEvent::Child { .. } => "child",
            FactorEvent::Distance { .. } => "distance",
            FactorEvent::Parent { .. } => "parent",
            FactorEvent::Link { .. } => "link",
        }
    }

    /// Calls `f(list, condition, outcome)` for each estimated sub-factor.
    /// Outcomes fixed by a special tag (the word and cap of EOS or EOKIDS)
    /// are not estimated.
    pub fn for_each_lookup(
        &self,
        feat: &TagFeatures,
        mut f: impl FnMut(&crate::estimation::ReductionList, &[Sym], &[Sym]),
    ) {
        let l = lists();
        match *self {
            FactorEvent::Trigram { prev2, prev, next } => {
                f(&l.tri_tag, &[prev.tag, prev2.tag, feat.short(prev.tag)], &[next.tag]);
                if !next.is_special() {
                    f(&l.tri_word, &[next.tag], &[next.word]);
                    f(&l.tri_cap, &[next.word, next.tag], &[next.cap]);
                }
            }
            FactorEvent::Child {
                parent,
                sibling,
                child,
                dir,
                nolex,
            } => {
                let d = dir_sym(dir);
                f(
                    &l.child_tag,
                    &[parent.word, parent.tag, feat.short(sibling), d, feat.short(parent.tag)],
                    &[child.tag],
                );
                if !child.is_special() {
                    let words = if nolex { &l.child_word_nolex } else { &l.child_word };
                    f(words, &[child.tag, parent.word, parent.tag, d], &[child.word]);
                    f(&l.child_cap, &[child.word, child.tag], &[child.cap]);
                }
            }
            FactorEvent::Distance { parent, child, bucket } => {
                f(&l.dist, &[child.word, child.tag, parent.tag], &[dist_sym(bucket)]);
            }
            FactorEvent::Parent { child, parent, dir } => {
                f(
                    &l.parent_tag,
                    &[child.tag, child.word, feat.short(child.tag)],
                    &[parent.tag],
                );
                if !parent.is_special() {
                    f(&l.parent_word, &[parent.tag], &[parent.word]);
                    f(&l.parent_cap, &[parent.word, parent.tag], &[parent.cap]);
                }
                if let Some(dir) = dir {
                    f(
                        &l.parent_dir,
                        &[child.tag, parent.tag, feat.short(child.tag), feat.tiny(parent.tag)],
                        &[dir_sym(dir)],
                    );
                }
            }
            FactorEvent::Link {
                candidate,
                head,
                prev_child,
                yes,
                dist,
            } => {
                let out = [if yes { symbols::YES } else { symbols::NO }];
                let (s, t) = (feat.short(prev_child), feat.tiny(prev_child));
                match dist {
                    None => f(
                        &l.link,
                        &[candidate.word, candidate.tag, head.word, head.tag, s, t],
                        &out,
                    ),
                    Some(b) => f(
                        &l.link_dist,
                        &[dist_sym(b), candidate.word, candidate.tag, head.word, head.tag, s, t],
                        &out,
                    ),
                }
            }
        }
    }

    /// Human-readable condition and outcome.
    pub fn describe(&self, sy: &Symbols) -> (String, String) {
        let tw = |t: &Tw| {
            if t.is_special() {
                sy.name(t.tag).to_string()
            } else {
                format!("{}/{}/{}", sy.name(t.word), sy.name(t.tag), sy.name(t.cap))
            }
        };
        match self {
            FactorEvent::Trigram { prev2, prev, next } => (format!("prev2={} prev={}", tw(prev2), tw(prev)), tw(next)),
            FactorEvent::Child {
                parent,
                sibling,
                child,
                dir,
                ..
            } => (
                format!(
                    "parent={} sibling={} dir={}",
                    tw(parent),
                    sy.name(*sibling),
                    dir.as_str()
                ),
                tw(child),
            ),
            FactorEvent::Distance { parent, child, bucket } => (
                format!("parent={} child={}", tw(parent), tw(child)),
                bucket.as_str().to_string(),
            ),
            FactorEvent::Parent { child, parent, dir } => {
                let d = dir.map(|d| format!(" dir={}", d.as_str())).unwrap_or_default();
                (format!("child={}", tw(child)), format!("{}{d}", tw(parent)))
            }
            FactorEvent::Link {
                candidate,
                head,
                prev_child,
                yes,
                dist,
            } => {
                let d = dist.map(|d| format!(" dist={}", d.as_str())).unwrap_or_default();
                (
                    format!(
                        "candidate={} head={} prev={}{d}",
                        tw(candidate),
                        tw(head),
                        sy.name(*prev_child)
                    ),
                    if *yes { "yes" } else { "no" }.to_string(),
                )
            }
        }
    }
}

/// Traces a model's generative process over one tagged structure.
pub struct Walker<'a> {
    pub spec: ModelSpec,
    pub feat: &'a TagFeatures,
}

impl<'a> Walker<'a> {
    pub fn sibling(&self, tw: Tw) -> Sym {
        self.feat.sibling_class(tw.tag, self.spec.kind.sibling_uses_tiny())
    }

    pub fn trigram(&self, words: &[Tw], j: usize) -> FactorEvent {
        let at = |p: isize| -> Tw {
            if p < 1 {
                Tw::bos()
            } else if p as usize > words.len() {
                Tw::eos()
            } else {
                words[p as usize - 1]
            }
        };
        let j = j as isize;
        FactorEvent::Trigram {
            prev2: at(j - 2),
            prev: at(j - 1),
            next: at(j),
        }
    }

    /// Events fired when `child` (at `c`) becomes the next child of `head`
    /// (at `k`), after the previous child whose class is `sib`.
    pub fn link(&self, head: Tw, k: usize, sib: Sym, child: Tw, c: usize, mut f: impl FnMut(FactorEvent)) {
        let dir = Dir::of(c, k);
        match self.spec.kind {
            ModelKind::D => f(FactorEvent::Link {
                candidate: child,
                head,
                prev_child: sib,
                yes: true,
                dist: self.spec.use_distance.then(|| dist(c, k)),
            }),
            ModelKind::A | ModelKind::X | ModelKind::Baseline => {}
            kind => {
                f(FactorEvent::Child {
                    parent: head,
                    sibling: sib,
                    child,
                    dir,
                    nolex: kind == ModelKind::CNoLex,
                });
                match kind {
                    ModelKind::CDist => f(FactorEvent::Distance {
                        parent: head,
                        child,
                        bucket: dist(c, k),
                    }),
                    ModelKind::B1 => f(FactorEvent::Parent {
                        child,
                        parent: head,
                        dir: None,
                    }),
                    ModelKind::B2 => f(FactorEvent::Parent {
                        child,
                        parent: head,
                        dir: Some(Dir::of(k, c)),
                    }),
                    _ => {}
                }
            }
        }
    }

    /// Event fired when `head`'s child sequence on side `dir` ends after `sib`.
    pub fn stop(&self, head: Tw, sib: Sym, dir: Dir) -> Option<FactorEvent> {
        match self.spec.kind {
            ModelKind::D => Some(FactorEvent::Link {
                candidate: Tw::eokids(),
                head,
                prev_child: sib,
                yes: true,
                dist: None,
            }),
            ModelKind::A | ModelKind::X | ModelKind::Baseline => None,
            kind => Some(FactorEvent::Child {
                parent: head,
                sibling: sib,
                child: Tw::eokids(),
                dir,
                nolex: kind == ModelKind::CNoLex,
            }),
        }
    }

    /// Every event `score_structure` reads, in generation order.
    pub fn walk(&self, words: &[Tw], parents: &[usize], mut f: impl FnMut(FactorEvent)) {
        let n = words.len();
        let kind = self.spec.kind;
        let tw = |p: usize| if p == n + 1 { Tw::eos() } else { words[p - 1] };
        if kind.has_trigram() {
            for j in 1..=n + 1 {
                f(self.trigram(words, j));
            }
        }
        if kind == ModelKind::A {
            for k in 1..=n + 1 {
                let head = tw(k);
                let scans: [Box<dyn Iterator<Item = usize>>; 2] = [Box::new((1..k).rev()), Box::new((k + 1)..=n)];
                for scan in scans {
                    let mut sib = symbols::BOKIDS;
                    for i in scan {
                        let yes = parents[i - 1] == k;
                        f(FactorEvent::Link {
                            candidate: tw(i),
                            head,
                            prev_child: sib,
                            yes,
                            dist: self.spec.use_distance.then(|| dist(i, k)),
                        });
                        if yes {
                            sib = self.sibling(tw(i));
                        }
                    }
                }
            }
            return;
        }
        if !kind.has_child_sequences() {
            return;
        }
        for k in 1..=n + 1 {
            let head = tw(k);
            for side in [Dir::Left, Dir::Right] {
                let mut sib = symbols::BOKIDS;
                for c in kids(parents, k, side) {
                    self.link(head, k, sib, tw(c), c, &mut f);
                    sib = self.sibling(tw(c));
                }
                if let Some(e) = self.stop(head, sib, side) {
                    f(e);
                }
            }
        }
    }

    /// Events recorded in training: those of [`Walker::walk`], plus for
    /// model D a rejected-candidate event for every available candidate not
    /// chosen at each step of a child sequence.
    pub fn training_events(&self, words: &[Tw], parents: &[usize], mut f: impl FnMut(FactorEvent)) {
        self.walk(words, parents, &mut f);
        if self.spec.kind != ModelKind::D {
            return;
        }
        let n = words.len();
        let tw = |p: usize| if p == n + 1 { Tw::eos() } else { words[p - 1] };
        for k in 1..=n + 1 {
            let head = tw(k);
            for side in [Dir::Left, Dir::Right] {
                let chosen = kids(parents, k, side);
                let mut sib = symbols::BOKIDS;
                let mut bound = k;
                for step in 0..=chosen.len() {
                    let pick = chosen.get(step).copied();
                    let available: Vec<usize> = match side {
                        Dir::Left => (1..bound).collect(),
                        Dir::Right => (bound + 1..=n).collect(),
                    };
                    for i in available {
                        if Some(i) != pick {
                            f(FactorEvent::Link {
                                candidate: tw(i),
                                head,
                                prev_child: sib,
                                yes: false,
                                dist: self.spec.use_distance.then(|| dist(i, k)),
                            });
                        }
                    }
                    if let Some(c) = pick {
                        f(FactorEvent::Link {
                            candidate: Tw::eokids(),
                            head,
                            prev_child: sib,
                            yes: false,
                            dist: None,
                        });
                        sib = self.sibling(tw(c));
                        bound = c;
                    }
                }
            }
        }
    }
}
