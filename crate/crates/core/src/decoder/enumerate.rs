use crate::error::DecodeError;

/// Longest sentence whose structures may be enumerated.
pub const MAX_ENUMERATION_LEN: usize = 10;

/// Every well-formed parent vector over `n` words, in lexicographic order.
pub fn enumerate_projective(n: usize) -> Result<Vec<Vec<usize>>, DecodeError> {
    if n > MAX_ENUMERATION_LEN {
        return Err(DecodeError::TooLong {
            n,
            cap: MAX_ENUMERATION_LEN,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut out = trees(1, n, n + 1);
    out.sort_unstable();
    Ok(out)
}

/// Number of well-formed structures over `n` words.
pub fn projective_count(n: usize) -> u128 {
    // forest[k]: ways to split k words into adjacent subtrees each attached
    // to an outside head; tree[k]: single subtrees over k words.
    let mut forest = vec![0u128; n + 1];
    let mut tree = vec![0u128; n + 1];
    forest[0] = 1;
    for k in 1..=n {
        tree[k] = (1..=k).map(|h| forest[h - 1] * forest[k - h]).sum();
        forest[k] = (1..=k).map(|j| tree[j] * forest[k - j]).sum();
    }
    tree[n]
}

/// Parents of `lo..=hi` for every single subtree over that span whose root
/// attaches to `head`.
fn trees(lo: usize, hi: usize, head: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for r in lo..=hi {
        let right = forests(r + 1, hi, r);
        for left in forests(lo, r - 1, r) {
            for right in &right {
                let mut v = Vec::with_capacity(hi - lo + 1);
                v.extend_from_slice(&left);
                v.push(head);
                v.extend_from_slice(right);
                out.push(v);
            }
        }
    }
    out
}

/// Parents of `lo..=hi` for every sequence of adjacent subtrees covering the
/// span, each attached to `head`.
fn forests(lo: usize, hi: usize, head: usize) -> Vec<Vec<usize>> {
    if lo > hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for end in lo..=hi {
        let rest = forests(end + 1, hi, head);
        for first in trees(lo, end, head) {
            for rest in &rest {
                let mut v = first.clone();
                v.extend_from_slice(rest);
                out.push(v);
            }
        }
    }
    out
}
