//! Tuple calculus over a group: equivalence and subsumption modulo a
//! subgroup, products, concatenation, coset blocks and the shift search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::groups::{FiniteGroup, GroupError, Subgroup};

/// An ordered tuple of group elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GTuple {
    pub entries: Vec<usize>,
}

impl GTuple {
    pub fn new(g: &FiniteGroup, entries: Vec<usize>) -> Result<GTuple, GroupError> {
        if entries.is_empty() {
            return Err(GroupError::EmptyTuple);
        }
        for &x in &entries {
            g.check_element(x)?;
        }
        Ok(GTuple { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `d̄ = (e, …, e)` of length `d`.
    pub fn trivial(g: &FiniteGroup, d: usize) -> GTuple {
        GTuple { entries: vec![g.identity(); d] }
    }

    /// `(s̄×t̄)_{(i,j)} = s_i·t_j`, row-major.
    pub fn product(&self, t: &GTuple, g: &FiniteGroup) -> GTuple {
        GTuple { entries: self.entries.iter().flat_map(|&s| t.entries.iter().map(move |&x| g.mul(s, x))).collect() }
    }

    pub fn concat(&self, t: &GTuple) -> GTuple {
        GTuple { entries: self.entries.iter().chain(&t.entries).copied().collect() }
    }

    /// `g·s̄ = (g s_1, …, g s_r)`.
    pub fn shift(&self, x: usize, g: &FiniteGroup) -> GTuple {
        GTuple { entries: self.entries.iter().map(|&s| g.mul(x, s)).collect() }
    }

    pub fn select(&self, idx: &[usize]) -> GTuple {
        GTuple { entries: idx.iter().map(|&i| self.entries[i]).collect() }
    }
}

/// Multiplicities of right cosets `H·s_i`, keyed by their least element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetMultiset {
    pub counts: BTreeMap<usize, usize>,
}

impl CosetMultiset {
    pub fn of(s: &GTuple, h: &Subgroup) -> CosetMultiset {
        let mut counts = BTreeMap::new();
        for &x in &s.entries {
            *counts.entry(h.coset_key(x)).or_insert(0) += 1;
        }
        CosetMultiset { counts }
    }

    pub fn contains(&self, other: &CosetMultiset) -> bool {
        other.counts.iter().all(|(k, &c)| self.counts.get(k).copied().unwrap_or(0) >= c)
    }
}

fn check(s: &GTuple, h: &Subgroup) -> Result<(), GroupError> {
    let n = h.parent().order();
    match s.entries.iter().find(|&&x| x >= n) {
        Some(&x) => Err(GroupError::ElementOutOfRange(x, n)),
        None => Ok(()),
    }
}

/// `s̄ ∼_H t̄`.
pub fn equiv_mod(s: &GTuple, t: &GTuple, h: &Subgroup) -> Result<bool, GroupError> {
    check(s, h)?;
    check(t, h)?;
    Ok(CosetMultiset::of(s, h) == CosetMultiset::of(t, h))
}

/// `t̄ ≿_H pattern`: some sub-tuple of `t̄` is equivalent to `pattern`.
pub fn subsume_mod(t: &GTuple, pattern: &GTuple, h: &Subgroup) -> Result<bool, GroupError> {
    check(t, h)?;
    check(pattern, h)?;
    Ok(CosetMultiset::of(t, h).contains(&CosetMultiset::of(pattern, h)))
}

/// Indices of a sub-tuple of `t̄` matching `pattern` coset by coset:
/// `t̄[out[k]] ∈ H·pattern[k]`.
pub fn subsume_witness(t: &GTuple, pattern: &GTuple, h: &Subgroup) -> Option<Vec<usize>> {
    let mut used = vec![false; t.len()];
    let tk: Vec<usize> = t.entries.iter().map(|&x| h.coset_key(x)).collect();
    let mut out = Vec::with_capacity(pattern.len());
    for &p in &pattern.entries {
        let k = h.coset_key(p);
        let i = (0..t.len()).find(|&i| !used[i] && tk[i] == k)?;
        used[i] = true;
        out.push(i);
    }
    Some(out)
}

/// Split `s̄` into blocks lying in the right cosets `G'·u`. Blocks are ordered
/// by their canonical representative; indices refer to positions in `s̄`.
pub fn coset_decompose(s: &GTuple, gp: &Subgroup) -> Vec<(usize, Vec<usize>)> {
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &x) in s.entries.iter().enumerate() {
        blocks.entry(gp.coset_key(x)).or_default().push(i);
    }
    let e = gp.parent().identity();
    let e_key = gp.coset_key(e);
    let mut out: Vec<(usize, Vec<usize>)> =
        blocks.into_iter().map(|(k, v)| (if k == e_key { e } else { k }, v)).collect();
    out.sort_by_key(|(k, _)| if *k == e { (0, 0) } else { (1, *k) });
    out
}

/// Some `g` with `g·t̄ ≿_H pattern`, searching `p₁·t_j⁻¹` over entries `t_j`.
pub fn exists_shift(t: &GTuple, pattern: &GTuple, h: &Subgroup) -> Option<usize> {
    let g = h.parent();
    let p = *pattern.entries.first()?;
    let want = CosetMultiset::of(pattern, h);
    let mut tried = Vec::new();
    for &tj in &t.entries {
        let x = g.mul(p, g.inv(tj));
        let key = h.coset_key(x);
        if tried.contains(&key) {
            continue;
        }
        tried.push(key);
        if CosetMultiset::of(&t.shift(x, g), h).contains(&want) {
            return Some(x);
        }
    }
    None
}

/// Reference search over every element of the ambient group.
pub fn exists_shift_brute(t: &GTuple, pattern: &GTuple, h: &Subgroup) -> Option<usize> {
    let g = h.parent();
    let want = CosetMultiset::of(pattern, h);
    g.elements().find(|&x| CosetMultiset::of(&t.shift(x, g), h).contains(&want))
}
