//! Interned tagged words, tag coarsening, and the reduction lists of every
//! factor family.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::corpus::{TagSet, TaggedWord};
use crate::estimation::ReductionList;
use crate::symbols::{self, cap_sym, is_special, Sym, Symbols};

/// A tagged word with interned fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tw {
    pub word: Sym,
    pub tag: Sym,
    pub cap: Sym,
}

impl Tw {
    pub fn special(s: Sym) -> Tw {
        Tw {
            word: s,
            tag: s,
            cap: cap_sym(crate::corpus::CapClass::Down),
        }
    }

    pub fn bos() -> Tw {
        Tw::special(symbols::BOS)
    }

    pub fn eos() -> Tw {
        Tw::special(symbols::EOS)
    }

    pub fn bokids() -> Tw {
        Tw::special(symbols::BOKIDS)
    }

    pub fn eokids() -> Tw {
        Tw::special(symbols::EOKIDS)
    }

    /// Distinguished pairs carry no separate word or capitalization choice.
    pub fn is_special(&self) -> bool {
        is_special(self.tag) && self.word == self.tag
    }

    pub fn intern(tw: &TaggedWord, symbols: &Symbols) -> Tw {
        Tw {
            word: symbols.get(&tw.form),
            tag: symbols.get(&tw.tag),
            cap: cap_sym(tw.cap),
        }
    }
}

/// `short` and `tiny` over interned tags, plus sibling equivalence classes.
#[derive(Clone, Debug, Default)]
pub struct TagFeatures {
    short: HashMap<Sym, Sym>,
    tiny: HashMap<Sym, Sym>,
    short_class: HashMap<Sym, Sym>,
    short_tiny_class: HashMap<Sym, Sym>,
}

impl TagFeatures {
    pub fn new(tagset: &TagSet, symbols: &mut Symbols) -> TagFeatures {
        let mut f = TagFeatures::default();
        let mut by_short: HashMap<Sym, Sym> = HashMap::new();
        let mut by_both: HashMap<(Sym, Sym), Sym> = HashMap::new();
        for (tag, short, tiny) in tagset.entries() {
            let t = symbols.intern(tag);
            let s = symbols.intern(short);
            let y = symbols.intern(tiny.as_str());
            f.short.insert(t, s);
            f.tiny.insert(t, y);
            f.short_class.insert(t, *by_short.entry(s).or_insert(t));
            f.short_tiny_class.insert(t, *by_both.entry((s, y)).or_insert(t));
        }
        f
    }

    pub fn short(&self, tag: Sym) -> Sym {
        if is_special(tag) {
            return tag;
        }
        self.short.get(&tag).copied().unwrap_or(symbols::UNSEEN)
    }

    pub fn tiny(&self, tag: Sym) -> Sym {
        if is_special(tag) {
            return tag;
        }
        self.tiny.get(&tag).copied().unwrap_or(symbols::UNSEEN)
    }

    /// Canonical representative of the tags sharing `short` (and `tiny`,
    /// when `with_tiny`) with `tag`. Factors that see a sibling only through
    /// these coarsenings cannot tell class members apart.
    pub fn sibling_class(&self, tag: Sym, with_tiny: bool) -> Sym {
        if is_special(tag) {
            return tag;
        }
        let map = if with_tiny {
            &self.short_tiny_class
        } else {
            &self.short_class
        };
        map.get(&tag).copied().unwrap_or(tag)
    }

    pub fn is_tag(&self, tag: Sym) -> bool {
        self.short.contains_key(&tag)
    }
}

/// Identifiers of the reduction lists. They key the count tables.
pub mod family {
    pub const TRI_TAG: u16 = 1;
    pub const TRI_WORD: u16 = 2;
    pub const TRI_CAP: u16 = 3;
    pub const CHILD_TAG: u16 = 10;
    pub const CHILD_WORD: u16 = 11;
    pub const CHILD_WORD_NOLEX: u16 = 12;
    pub const CHILD_CAP: u16 = 13;
    pub const DIST: u16 = 14;
    pub const PARENT_TAG: u16 = 20;
    pub const PARENT_WORD: u16 = 21;
    pub const PARENT_CAP: u16 = 22;
    pub const PARENT_DIR: u16 = 23;
    pub const LINK: u16 = 30;
    pub const LINK_DIST: u16 = 31;

    pub fn name(id: u16) -> &'static str {
        match id {
            TRI_TAG => "trigram-tag",
            TRI_WORD => "trigram-word",
            TRI_CAP => "trigram-cap",
            CHILD_TAG => "child-tag",
            CHILD_WORD => "child-word",
            CHILD_WORD_NOLEX => "child-word-nolex",
            CHILD_CAP => "child-cap",
            DIST => "child-distance",
            PARENT_TAG => "parent-tag",
            PARENT_WORD => "parent-word",
            PARENT_CAP => "parent-cap",
            PARENT_DIR => "parent-direction",
            LINK => "link",
            LINK_DIST => "link-distance",
            _ => "unknown",
        }
    }
}

/// Every reduction list, with the condition slot layout documented per list.
pub struct Lists {
    /// cond: [tag(prev), tag(prev2), short(tag(prev))] -> tag(next)
    pub tri_tag: ReductionList,
    /// cond: [tag(next)] -> word(next)
    pub tri_word: ReductionList,
    /// cond: [word(next), tag(next)] -> cap(next)
    pub tri_cap: ReductionList,
    /// cond: [word(k), tag(k), short(tag(sib)), dir, short(tag(k))] -> tag(child)
    pub child_tag: ReductionList,
    /// cond: [tag(child), word(k), tag(k), dir] -> word(child)
    pub child_word: ReductionList,
    pub child_word_nolex: ReductionList,
    /// cond: [word(child), tag(child)] -> cap(child)
    pub child_cap: ReductionList,
    /// cond: [word(child), tag(child), tag(k)] -> dist(k, child)
    pub dist: ReductionList,
    /// cond: [tag(child), word(child), short(tag(child))] -> tag(parent)
    pub parent_tag: ReductionList,
    /// cond: [tag(parent)] -> word(parent)
    pub parent_word: ReductionList,
    /// cond: [word(parent), tag(parent)] -> cap(parent)
    pub parent_cap: ReductionList,
    /// cond: [tag(child), tag(parent), short(tag(child)), tiny(tag(parent))] -> direction
    pub parent_dir: ReductionList,
    /// cond: [word(i), tag(i), word(k), tag(k), short(tag(sib)), tiny(tag(sib))] -> yes/no
    pub link: ReductionList,
    /// cond: [dist(i,k), word(i), tag(i), word(k), tag(k), short(tag(sib)), tiny(tag(sib))] -> yes/no
    pub link_dist: ReductionList,
}

pub fn lists() -> &'static Lists {
    static LISTS: OnceLock<Lists> = OnceLock::new();
    LISTS.get_or_init(|| {
        use family::*;
        let child_word = ReductionList::from_slots(CHILD_WORD, &[&[&[0, 1, 2, 3]], &[&[0, 2, 3]], &[&[0]]]);
        Lists {
            tri_tag: ReductionList::from_slots(TRI_TAG, &[&[&[0, 1]], &[&[0]], &[&[2]]]),
            tri_word: ReductionList::from_slots(TRI_WORD, &[&[&[0]]]),
            tri_cap: ReductionList::from_slots(TRI_CAP, &[&[&[0, 1]], &[&[1]]]),
            child_tag: ReductionList::from_slots(CHILD_TAG, &[&[&[0, 1, 2, 3]], &[&[0, 1, 3], &[1, 2, 3]], &[&[4, 3]]]),
            child_word_nolex: child_word.last_only(CHILD_WORD_NOLEX),
            child_word,
            child_cap: ReductionList::from_slots(CHILD_CAP, &[&[&[0, 1]], &[&[1]]]),
            dist: ReductionList::from_slots(DIST, &[&[&[0, 1, 2]], &[&[1, 2]]]),
            parent_tag: ReductionList::from_slots(PARENT_TAG, &[&[&[0, 1]], &[&[0]], &[&[2]]]),
            parent_word: ReductionList::from_slots(PARENT_WORD, &[&[&[0]]]),
            parent_cap: ReductionList::from_slots(PARENT_CAP, &[&[&[0, 1]], &[&[1]]]),
            parent_dir: ReductionList::from_slots(PARENT_DIR, &[&[&[0, 1]], &[&[2, 3]]]),
            link: ReductionList::from_slots(
                LINK,
                &[
                    &[&[0, 1, 2, 3, 4]],
                    &[&[1, 2, 3, 4], &[0, 1, 3, 4], &[0, 1, 2, 3]],
                    &[&[1, 3, 4]],
                    &[&[1, 3, 5]],
                ],
            ),
            link_dist: ReductionList::from_slots(
                LINK_DIST,
                &[
                    &[&[0, 1, 2, 3, 4, 5]],
                    &[&[0, 2, 3, 4, 5], &[0, 1, 2, 4, 5], &[0, 1, 2, 3, 4]],
                    &[&[2, 3, 4], &[1, 2, 4]],
                    &[&[0, 2, 4, 5]],
                    &[&[0, 2, 4, 6]],
                ],
            ),
        }
    })
}

pub fn list_by_id(id: u16) -> &'static ReductionList {
    use family::*;
    let l = lists();
    match id {
        TRI_TAG => &l.tri_tag,
        TRI_WORD => &l.tri_word,
        TRI_CAP => &l.tri_cap,
        CHILD_TAG => &l.child_tag,
        CHILD_WORD => &l.child_word,
        CHILD_WORD_NOLEX => &l.child_word_nolex,
        CHILD_CAP => &l.child_cap,
        DIST => &l.dist,
        PARENT_TAG => &l.parent_tag,
        PARENT_WORD => &l.parent_word,
        PARENT_CAP => &l.parent_cap,
        PARENT_DIR => &l.parent_dir,
        LINK => &l.link,
        LINK_DIST => &l.link_dist,
        _ => panic!("unknown reduction list {id}"),
    }
}
