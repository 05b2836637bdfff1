//! String interning for feature values.

use std::collections::HashMap;

use crate::corpus::{CapClass, Dir, DistBucket};

pub type Sym = u32;

pub const UNSEEN: Sym = 0;
pub const BOS: Sym = 1;
pub const EOS: Sym = 2;
pub const BOKIDS: Sym = 3;
pub const EOKIDS: Sym = 4;
pub const NONE: Sym = 5;
pub const LEFT: Sym = 6;
pub const RIGHT: Sym = 7;
pub const YES: Sym = 8;
pub const NO: Sym = 9;
const CAP_BASE: Sym = 10;
const DIST_BASE: Sym = 14;

// UNSEEN holds a newline so it can never be a corpus token.
const PREDEFINED: [&str; 18] = [
    "\n<unseen>",
    "BOS",
    "EOS",
    "BOKIDS",
    "EOKIDS",
    "<none>",
    "L",
    "R",
    "yes",
    "no",
    "DOWN",
    "UP",
    "INIT",
    "CAP",
    "1",
    "2",
    "3-6",
    "7+",
];

/// Bidirectional map between strings and dense integer ids.
///
/// Lookups of strings never interned return [`UNSEEN`], which never occurs
/// in a count table.
#[derive(Clone, Debug)]
pub struct Symbols {
    names: Vec<String>,
    index: HashMap<String, Sym>,
}

impl Default for Symbols {
    fn default() -> Self {
        Symbols::new()
    }
}

impl Symbols {
    pub fn new() -> Symbols {
        let mut s = Symbols {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in PREDEFINED {
            s.intern(name);
        }
        s
    }

    pub fn intern(&mut self, name: &str) -> Sym {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as Sym;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Sym {
        self.index.get(name).copied().unwrap_or(UNSEEN)
    }

    pub fn name(&self, sym: Sym) -> &str {
        &self.names[sym as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

pub fn is_special(sym: Sym) -> bool {
    matches!(sym, BOS | EOS | BOKIDS | EOKIDS)
}

pub fn cap_sym(c: CapClass) -> Sym {
    CAP_BASE + CapClass::ALL.iter().position(|&x| x == c).unwrap() as Sym
}

pub fn dist_sym(d: DistBucket) -> Sym {
    DIST_BASE + DistBucket::ALL.iter().position(|&x| x == d).unwrap() as Sym
}

pub fn dir_sym(d: Dir) -> Sym {
    match d {
        Dir::Left => LEFT,
        Dir::Right => RIGHT,
    }
}

pub fn sym_cap(s: Sym) -> Option<CapClass> {
    s.checked_sub(CAP_BASE)
        .and_then(|i| CapClass::ALL.get(i as usize).copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predefined_ids_are_stable() {
        let s = Symbols::new();
        assert_eq!(s.get("EOS"), EOS);
        assert_eq!(s.get("yes"), YES);
        assert_eq!(s.name(cap_sym(CapClass::Init)), "INIT");
        assert_eq!(s.name(dist_sym(DistBucket::ThreeToSix)), "3-6");
        assert_eq!(s.get("never seen"), UNSEEN);
        assert_eq!(sym_cap(cap_sym(CapClass::Up)), Some(CapClass::Up));
    }
}
