//! Span dynamic program over projective structures and taggings.
//!
//! Four item types cover a span `[s, t]`:
//! - `CR`: `s` heads the span; its right children so far lie inside, every
//!   other word is finished.
//! - `CL`: the mirror image, headed by `t`.
//! - `IR`: a link `s -> t` was just added; `t` has its left children sealed.
//! - `IL`: a link `t -> s`; `s` has its right children sealed.
//!
//! An item's signature holds the candidate tags at `s`, `s+1`, `t-1`, `t`
//! (for trigram factors at junctions) and the class of the outermost child
//! of the open head. A span accounts for trigram positions `s+2..=t`.

use std::collections::HashMap;

use crate::corpus::{Dir, Sentence};
use crate::error::DecodeError;
use crate::models::features::Tw;
use crate::models::{FactorEvent, ModelKind, TrainedModel, Walker};
use crate::symbols::{self, Sym};

use super::{ParseOutput, SearchSettings, TagLattice, SCORE_EPS};

/// Parents and tag indices of a finished structure, compared on exact ties.
type RootKey = (Vec<usize>, Vec<u16>);

const CL: usize = 0;
const CR: usize = 1;
const IL: usize = 2;
const IR: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Sig {
    a: u16,
    a1: u16,
    b1: u16,
    b: u16,
    sib: Sym,
}

#[derive(Clone, Copy, Debug)]
struct Ref {
    cell: u32,
    idx: u32,
}

#[derive(Clone, Copy, Debug)]
enum Back {
    Leaf,
    Pair(Ref, Ref),
}

#[derive(Clone, Copy, Debug)]
struct Item {
    sig: Sig,
    score: f64,
    back: Back,
}

/// Decodes with the span dynamic program. Model A is not decomposable over
/// spans and is rejected.
pub fn dp_parse(
    m: &TrainedModel,
    s: &Sentence,
    lattice: &TagLattice,
    settings: SearchSettings,
) -> Result<ParseOutput, DecodeError> {
    let kind = m.kind();
    if kind == ModelKind::A || !kind.is_probabilistic() {
        return Err(DecodeError::UnsupportedModel(kind.name()));
    }
    let n = s.len();
    if n == 0 {
        return Err(DecodeError::NoParse);
    }
    lattice.check(n)?;
    let mut chart = Chart {
        m,
        walker: m.walker(),
        n,
        tws: lattice.tagged(m, s),
        trigram: kind.has_trigram(),
        children: kind.has_child_sequences(),
        cells: vec![Vec::new(); (n + 1) * (n + 1) * 4],
        cache: HashMap::new(),
        beam: settings.beam,
        pruned: false,
        combinations: 0,
        key_a: (vec![0; n + 2], vec![0; n + 2]),
        key_b: (vec![0; n + 2], vec![0; n + 2]),
    };
    chart.fill_chart();
    let (score, parents, choice) = chart.root().ok_or(DecodeError::NoParse)?;
    let tags = choice
        .iter()
        .enumerate()
        .map(|(i, &c)| m.tagset().tags()[lattice.candidates(i)[c as usize]].clone())
        .collect();
    Ok(ParseOutput {
        tags,
        parents,
        log_score: score,
        pruned: chart.pruned,
        combinations: chart.combinations,
    })
}

struct Chart<'a> {
    m: &'a TrainedModel,
    walker: Walker<'a>,
    n: usize,
    tws: Vec<Vec<Tw>>,
    trigram: bool,
    children: bool,
    cells: Vec<Vec<Item>>,
    cache: HashMap<FactorEvent, f64>,
    beam: Option<usize>,
    pruned: bool,
    combinations: u64,
    key_a: (Vec<usize>, Vec<u16>),
    key_b: (Vec<usize>, Vec<u16>),
}

/// Candidate tag of position `p` inside an item over `[s, t]`.
fn span_tag(p: usize, s: usize, t: usize, sig: &Sig) -> u16 {
    if p == s {
        sig.a
    } else if p == t {
        sig.b
    } else if p == s + 1 {
        sig.a1
    } else {
        debug_assert_eq!(p + 1, t);
        sig.b1
    }
}

/// Positions of two adjacent items, left `[s, r]` and right `[rp, t]`.
#[derive(Clone, Copy)]
struct Join<'s> {
    s: usize,
    r: usize,
    rp: usize,
    t: usize,
    left: &'s Sig,
    right: &'s Sig,
}

impl Join<'_> {
    fn tag(&self, p: usize) -> u16 {
        if p <= self.r {
            span_tag(p, self.s, self.r, self.left)
        } else {
            span_tag(p, self.rp, self.t, self.right)
        }
    }
}

impl<'a> Chart<'a> {
    fn cell(&self, s: usize, t: usize, ty: usize) -> usize {
        (s * (self.n + 1) + t) * 4 + ty
    }

    fn cell_span(&self, cell: usize) -> (usize, usize, usize) {
        let ty = cell % 4;
        let st = cell / 4;
        (st / (self.n + 1), st % (self.n + 1), ty)
    }

    fn tw(&self, p: usize, c: u16) -> Tw {
        self.tws[p - 1][c as usize]
    }

    fn event(&mut self, e: FactorEvent) -> f64 {
        let m = self.m;
        *self.cache.entry(e).or_insert_with(|| m.event_log_score(&e))
    }

    fn events(&mut self, f: impl FnOnce(&Walker<'a>, &mut dyn FnMut(FactorEvent))) -> f64 {
        let mut evs: Vec<FactorEvent> = Vec::new();
        f(&self.walker, &mut |e| evs.push(e));
        evs.into_iter().map(|e| self.event(e)).sum()
    }

    fn stop(&mut self, head: Tw, sib: Sym, dir: Dir) -> f64 {
        match self.walker.stop(head, sib, dir) {
            Some(e) => self.event(e),
            None => 0.0,
        }
    }

    fn link(&mut self, head: Tw, k: usize, sib: Sym, child: Tw, c: usize) -> f64 {
        self.events(|w, f| w.link(head, k, sib, child, c, f))
    }

    fn sibling(&self, tw: Tw) -> Sym {
        if self.children {
            self.walker.sibling(tw)
        } else {
            0
        }
    }

    /// Trigram factor at position `j`, with tags of positions in `1..=n`
    /// given by `tag`.
    fn trigram_at(&mut self, j: usize, tag: impl Fn(usize) -> u16) -> f64 {
        let n = self.n;
        let at = |p: isize| -> Tw {
            if p < 1 {
                Tw::bos()
            } else if p as usize > n {
                Tw::eos()
            } else {
                self.tw(p as usize, tag(p as usize))
            }
        };
        let j = j as isize;
        let e = FactorEvent::Trigram {
            prev2: at(j - 2),
            prev: at(j - 1),
            next: at(j),
        };
        self.event(e)
    }

    /// Trigram positions newly covered when joining `[s, r]` and `[rp, t]`.
    fn junction(&mut self, j: &Join) -> f64 {
        if !self.trigram {
            return 0.0;
        }
        let lo = (j.s + 2).max(j.r + 1);
        let hi = j.t.min(j.rp + 1);
        let mut total = 0.0;
        for p in lo..=hi {
            total += self.trigram_at(p, |q| j.tag(q));
        }
        total
    }

    fn fill_chart(&mut self) {
        let n = self.n;
        for p in 1..=n {
            for c in 0..self.tws[p - 1].len() as u16 {
                let sib = if self.children { symbols::BOKIDS } else { 0 };
                let sig = Sig {
                    a: c,
                    a1: c,
                    b1: c,
                    b: c,
                    sib,
                };
                for ty in [CL, CR] {
                    let cell = self.cell(p, p, ty);
                    self.cells[cell].push(Item {
                        sig,
                        score: 0.0,
                        back: Back::Leaf,
                    });
                }
            }
        }
        for width in 1..n {
            for s in 1..=n - width {
                let t = s + width;
                for ty in [IL, IR] {
                    let mut acc = Acc::default();
                    for r in s..t {
                        self.combine(s, r, r + 1, t, CR, CL, ty, &mut acc);
                    }
                    self.finish(s, t, ty, acc);
                }
                let mut acc = Acc::default();
                for r in s..t {
                    self.combine(s, r, r, t, CL, IL, CL, &mut acc);
                }
                self.finish(s, t, CL, acc);
                let mut acc = Acc::default();
                for r in s + 1..=t {
                    self.combine(s, r, r, t, IR, CR, CR, &mut acc);
                }
                self.finish(s, t, CR, acc);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn combine(&mut self, s: usize, r: usize, rp: usize, t: usize, lty: usize, rty: usize, out: usize, acc: &mut Acc) {
        let lcell = self.cell(s, r, lty);
        let rcell = self.cell(rp, t, rty);
        let shared = r == rp;
        for li in 0..self.cells[lcell].len() {
            let left = self.cells[lcell][li];
            for ri in 0..self.cells[rcell].len() {
                let right = self.cells[rcell][ri];
                if shared && left.sig.b != right.sig.a {
                    continue;
                }
                self.combinations += 1;
                let (ls, rs) = (left.sig, right.sig);
                let j = Join {
                    s,
                    r,
                    rp,
                    t,
                    left: &ls,
                    right: &rs,
                };
                let mut score = left.score + right.score + self.junction(&j);
                let sib = match out {
                    IR => {
                        let (head, child) = (self.tw(s, ls.a), self.tw(t, rs.b));
                        score += self.stop(child, rs.sib, Dir::Left);
                        score += self.link(head, s, ls.sib, child, t);
                        self.sibling(child)
                    }
                    IL => {
                        let (head, child) = (self.tw(t, rs.b), self.tw(s, ls.a));
                        score += self.stop(child, ls.sib, Dir::Right);
                        score += self.link(head, t, rs.sib, child, s);
                        self.sibling(child)
                    }
                    CR => {
                        score += self.stop(self.tw(r, rs.a), rs.sib, Dir::Right);
                        ls.sib
                    }
                    _ => {
                        score += self.stop(self.tw(r, ls.b), ls.sib, Dir::Left);
                        rs.sib
                    }
                };
                let (a1, b1) = if self.trigram {
                    (j.tag(s + 1), j.tag(t - 1))
                } else {
                    (0, 0)
                };
                let sig = Sig {
                    a: ls.a,
                    a1,
                    b1,
                    b: rs.b,
                    sib,
                };
                let back = Back::Pair(
                    Ref {
                        cell: lcell as u32,
                        idx: li as u32,
                    },
                    Ref {
                        cell: rcell as u32,
                        idx: ri as u32,
                    },
                );
                self.offer(acc, Item { sig, score, back }, out, s, t);
            }
        }
    }

    fn offer(&mut self, acc: &mut Acc, item: Item, ty: usize, s: usize, t: usize) {
        match acc.index.get(&item.sig) {
            None => {
                acc.index.insert(item.sig, acc.items.len());
                acc.items.push(item);
            }
            Some(&i) => {
                let old = acc.items[i];
                if self.prefer(&item, &old, ty, s, t) {
                    acc.items[i] = item;
                }
            }
        }
    }

    /// Higher score wins; near-ties go to the smaller parents, then tags,
    /// over the span.
    fn prefer(&mut self, new: &Item, old: &Item, ty: usize, s: usize, t: usize) -> bool {
        if new.score > old.score + SCORE_EPS {
            return true;
        }
        if new.score < old.score - SCORE_EPS {
            return false;
        }
        let mut ka = std::mem::take(&mut self.key_a);
        let mut kb = std::mem::take(&mut self.key_b);
        self.key(new.back, ty, s, t, &mut ka);
        self.key(old.back, ty, s, t, &mut kb);
        let less = (&ka.0[s..=t], &ka.1[s..=t]) < (&kb.0[s..=t], &kb.1[s..=t]);
        self.key_a = ka;
        self.key_b = kb;
        less
    }

    fn key(&self, back: Back, ty: usize, s: usize, t: usize, key: &mut (Vec<usize>, Vec<u16>)) {
        key.0[s..=t].fill(0);
        key.1[s..=t].fill(0);
        if let Back::Pair(l, r) = back {
            self.trace(l, key);
            self.trace(r, key);
        }
        link_parent(ty, s, t, &mut key.0);
    }

    fn trace(&self, r: Ref, key: &mut (Vec<usize>, Vec<u16>)) {
        let item = self.cells[r.cell as usize][r.idx as usize];
        let (s, t, ty) = self.cell_span(r.cell as usize);
        match item.back {
            Back::Leaf => key.1[s] = item.sig.a,
            Back::Pair(a, b) => {
                self.trace(a, key);
                self.trace(b, key);
                link_parent(ty, s, t, &mut key.0);
            }
        }
    }

    fn finish(&mut self, s: usize, t: usize, ty: usize, acc: Acc) {
        let mut items = acc.items;
        if let Some(w) = self.beam {
            if items.len() > w {
                items.sort_by(|x, y| y.score.total_cmp(&x.score));
                items.truncate(w);
                self.pruned = true;
            }
        }
        let cell = self.cell(s, t, ty);
        self.cells[cell] = items;
    }

    /// Best complete structure: a head `r` whose finished span covers the
    /// sentence, attached to EOS.
    fn root(&mut self) -> Option<(f64, Vec<usize>, Vec<u16>)> {
        let n = self.n;
        let mut best: Option<(f64, RootKey)> = None;
        for r in 1..=n {
            let (lcell, rcell) = (self.cell(1, r, CL), self.cell(r, n, CR));
            for li in 0..self.cells[lcell].len() {
                let left = self.cells[lcell][li];
                for ri in 0..self.cells[rcell].len() {
                    let right = self.cells[rcell][ri];
                    if left.sig.b != right.sig.a {
                        continue;
                    }
                    self.combinations += 1;
                    let (ls, rs) = (left.sig, right.sig);
                    let j = Join {
                        s: 1,
                        r,
                        rp: r,
                        t: n,
                        left: &ls,
                        right: &rs,
                    };
                    let head = self.tw(r, ls.b);
                    let mut score = left.score + right.score + self.junction(&j);
                    if self.trigram {
                        let mut edges = vec![1, n + 1];
                        if n >= 2 {
                            edges.push(2);
                        }
                        for p in edges {
                            score += self.trigram_at(p, |q| j.tag(q));
                        }
                    }
                    score += self.stop(head, ls.sib, Dir::Left);
                    score += self.stop(head, rs.sib, Dir::Right);
                    score += self.link(Tw::eos(), n + 1, symbols::BOKIDS, head, r);
                    let sib = self.sibling(head);
                    score += self.stop(Tw::eos(), sib, Dir::Left);
                    score += self.stop(Tw::eos(), symbols::BOKIDS, Dir::Right);
                    let within = best
                        .as_ref()
                        .map(|(b, _)| score >= *b - SCORE_EPS && score <= *b + SCORE_EPS);
                    let better = match &best {
                        None => true,
                        Some((b, _)) if score > *b + SCORE_EPS => true,
                        _ => false,
                    };
                    if better || within == Some(true) {
                        let mut key = (vec![0; n + 2], vec![0; n + 2]);
                        self.trace(
                            Ref {
                                cell: lcell as u32,
                                idx: li as u32,
                            },
                            &mut key,
                        );
                        self.trace(
                            Ref {
                                cell: rcell as u32,
                                idx: ri as u32,
                            },
                            &mut key,
                        );
                        key.0[r] = n + 1;
                        let take = better
                            || best
                                .as_ref()
                                .is_some_and(|(_, k)| (&key.0[1..=n], &key.1[1..=n]) < (&k.0[1..=n], &k.1[1..=n]));
                        if take {
                            best = Some((score, key));
                        }
                    }
                }
            }
        }
        best.map(|(score, (parents, tags))| (score, parents[1..=n].to_vec(), tags[1..=n].to_vec()))
    }
}

fn link_parent(ty: usize, s: usize, t: usize, parents: &mut [usize]) {
    match ty {
        IR => parents[t] = s,
        IL => parents[s] = t,
        _ => {}
    }
}

#[derive(Default)]
struct Acc {
    items: Vec<Item>,
    index: HashMap<Sig, usize>,
}
