//! Direct sums of graded simple presentations: minimal sets, component
//! matching, and embeddings `A ↪ B^N`.

use std::sync::Arc;

use thiserror::Error;

use crate::embed::{construct, decide, EmbedError};
use crate::galg::{same_group, GalgError, GradedHom, HomCertificate, Presentation, StructureAlgebra};
use crate::groups::Group;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemisimpleError {
    #[error("a semisimple presentation needs at least one component")]
    Empty,
    #[error("components are graded by different groups")]
    MismatchedGroup,
    #[error("component {0} of A embeds in no component of B")]
    NoMatch(usize),
    #[error("matching is not a permutation: {0}")]
    NotPermutation(String),
    #[error("block embedding failed certification: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Galg(#[from] GalgError),
}

/// `A = A₁ ⊕ ⋯ ⊕ Aₙ` with each `Aᵢ` graded simple.
#[derive(Clone, Debug)]
pub struct SemisimplePresentation {
    components: Vec<Presentation>,
    alg: Arc<StructureAlgebra>,
}

impl SemisimplePresentation {
    pub fn new(components: Vec<Presentation>) -> Result<Self, SemisimpleError> {
        let first = components.first().ok_or(SemisimpleError::Empty)?;
        if components.iter().any(|c| !same_group(c.group(), first.group())) {
            return Err(SemisimpleError::MismatchedGroup);
        }
        let parts: Vec<&StructureAlgebra> = components.iter().map(|c| &**c.algebra()).collect();
        let alg = Arc::new(StructureAlgebra::direct_sum(&parts)?);
        Ok(SemisimplePresentation { components, alg })
    }

    pub fn components(&self) -> &[Presentation] {
        &self.components
    }

    pub fn group(&self) -> &Group {
        self.components[0].group()
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn algebra(&self) -> &Arc<StructureAlgebra> {
        &self.alg
    }

    pub fn support(&self) -> std::collections::BTreeSet<usize> {
        self.alg.support()
    }

    /// Basis offset of component `i` inside the direct sum.
    pub fn offset(&self, i: usize) -> usize {
        self.components[..i].iter().map(|c| c.dim()).sum()
    }
}

/// `Id_G(Bⱼ) ⊆ Id_G(Aᵢ)`, which for graded simple algebras holds exactly
/// when `Aᵢ ↪ Bⱼ`.
pub fn pair_inclusion(ai: &Presentation, bj: &Presentation) -> Result<bool, SemisimpleError> {
    Ok(decide(ai, bj)?.verdict)
}

/// A component dropped by [`minimal_set`], with the retained component whose
/// identities are contained in its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Removal {
    pub removed: usize,
    pub absorbed_by: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalSet {
    /// Indices of the retained components, ascending.
    pub kept: Vec<usize>,
    pub log: Vec<Removal>,
}

/// Drops, from the last index down, every `Aⱼ` that embeds into another
/// retained `Aᵢ` (so `Id(Aᵢ) ⊆ Id(Aⱼ)` and `Aⱼ` does not change the intersection).
pub fn minimal_set(components: &[Presentation]) -> Result<MinimalSet, SemisimpleError> {
    let n = components.len();
    let mut alive = vec![true; n];
    let mut log = Vec::new();
    for j in (0..n).rev() {
        for i in 0..n {
            if i != j && alive[i] && pair_inclusion(&components[j], &components[i])? {
                alive[j] = false;
                log.push(Removal { removed: j, absorbed_by: i });
                break;
            }
        }
    }
    Ok(MinimalSet { kept: (0..n).filter(|&i| alive[i]).collect(), log })
}

/// `τ(i)` = the least `j` with `Id_G(B_j) ⊆ Id_G(A_i)`.
pub fn match_components(a: &SemisimplePresentation, b: &SemisimplePresentation) -> Result<Vec<usize>, SemisimpleError> {
    check_groups(a, b)?;
    let mut tau = Vec::with_capacity(a.components.len());
    for (i, ai) in a.components.iter().enumerate() {
        let mut found = None;
        for (j, bj) in b.components.iter().enumerate() {
            if pair_inclusion(ai, bj)? {
                found = Some(j);
                break;
            }
        }
        tau.push(found.ok_or(SemisimpleError::NoMatch(i))?);
    }
    Ok(tau)
}

/// For minimal `A`, `B` with `Id_G(A) = Id_G(B)`: the matching is a
/// permutation and each matched pair is isomorphic. Returns `τ` and the
/// certified isomorphisms `Aᵢ → B_{τ(i)}`.
pub fn certify_permutation(
    a: &SemisimplePresentation,
    b: &SemisimplePresentation,
) -> Result<(Vec<usize>, Vec<GradedHom>), SemisimpleError> {
    let tau = match_components(a, b)?;
    let back = match_components(b, a)?;
    if a.components.len() != b.components.len() {
        return Err(SemisimpleError::NotPermutation("different numbers of components".into()));
    }
    let mut seen = vec![false; b.components.len()];
    for &j in &tau {
        if std::mem::replace(&mut seen[j], true) {
            return Err(SemisimpleError::NotPermutation(format!("component {} of B is hit twice", j)));
        }
    }
    let mut isos = Vec::with_capacity(tau.len());
    for (i, &j) in tau.iter().enumerate() {
        if back[j] != i {
            return Err(SemisimpleError::NotPermutation(format!("component {} of B matches back to {}", j, back[j])));
        }
        let (ai, bj) = (&a.components[i], &b.components[j]);
        let dec = decide(ai, bj)?;
        let c = construct(ai, bj, &dec)?;
        if ai.dim() != bj.dim() {
            return Err(SemisimpleError::NotPermutation(format!("pair ({}, {}) has different dimensions", i, j)));
        }
        isos.push(c.hom);
    }
    Ok((tau, isos))
}

/// `A ↪ B^N` with `Aᵢ` placed in `slots[i] = (copy, component)`.
#[derive(Clone, Debug)]
pub struct PowerEmbedding {
    pub n: usize,
    pub slots: Vec<(usize, usize)>,
    /// `⌈dim A / dim B⌉`, below which no embedding into `B^N` exists.
    pub dimension_bound: usize,
    pub target: Arc<StructureAlgebra>,
    pub hom: GradedHom,
    pub certificate: HomCertificate,
}

/// Smallest `N` for which each `Aᵢ` can be given its own simple component of
/// `B^N` that it embeds into, with the block-diagonal embedding.
pub fn embed_into_power(a: &SemisimplePresentation, b: &SemisimplePresentation) -> Result<PowerEmbedding, SemisimpleError> {
    check_groups(a, b)?;
    let (na, nb) = (a.components.len(), b.components.len());
    let mut allowed = vec![Vec::new(); na];
    for (i, ai) in a.components.iter().enumerate() {
        for (j, bj) in b.components.iter().enumerate() {
            if pair_inclusion(ai, bj)? {
                allowed[i].push(j);
            }
        }
        if allowed[i].is_empty() {
            return Err(SemisimpleError::NoMatch(i));
        }
    }
    // at N = na every Aᵢ can take its own copy
    let (mut lo, mut hi) = (1, na);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if assign(&allowed, nb, mid).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let n = lo;
    let slots = assign(&allowed, nb, n).expect("feasible at the searched bound");

    let bdim = b.dim();
    let target = Arc::new(b.algebra().power(n));
    let mut images = Vec::with_capacity(a.dim());
    for (i, ai) in a.components.iter().enumerate() {
        let (copy, j) = slots[i];
        let bj = &b.components[j];
        let dec = decide(ai, bj)?;
        let piece = construct(ai, bj, &dec)?;
        let off = copy * bdim + b.offset(j);
        images.extend(piece.hom.images.iter().map(|x| x.map_index(|k| off + k)));
    }
    let hom = GradedHom::new(a.algebra().clone(), target.clone(), images);
    let certificate = hom.verify();
    if !certificate.is_embedding() {
        return Err(SemisimpleError::VerificationFailed(certificate.witnesses.join("; ")));
    }
    Ok(PowerEmbedding { n, slots, dimension_bound: a.dim().div_ceil(bdim), target, hom, certificate })
}

/// Assigns each `i` to a distinct `(copy, j)` with `j ∈ allowed[i]` and
/// `copy < copies`, by augmenting paths.
fn assign(allowed: &[Vec<usize>], nb: usize, copies: usize) -> Option<Vec<(usize, usize)>> {
    let right = nb * copies;
    let mut owner: Vec<Option<usize>> = vec![None; right];
    fn augment(i: usize, allowed: &[Vec<usize>], nb: usize, copies: usize, owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &j in &allowed[i] {
            for c in 0..copies {
                let slot = c * nb + j;
                if seen[slot] {
                    continue;
                }
                seen[slot] = true;
                if owner[slot].is_none() || augment(owner[slot].unwrap(), allowed, nb, copies, owner, seen) {
                    owner[slot] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..allowed.len() {
        let mut seen = vec![false; right];
        if !augment(i, allowed, nb, copies, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut out = vec![(0, 0); allowed.len()];
    for (slot, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            out[*i] = (slot / nb, slot % nb);
        }
    }
    Some(out)
}

fn check_groups(a: &SemisimplePresentation, b: &SemisimplePresentation) -> Result<(), SemisimpleError> {
    if same_group(a.group(), b.group()) {
        Ok(())
    } else {
        Err(SemisimpleError::MismatchedGroup)
    }
}

/// Products of images of different components vanish.
pub fn blocks_orthogonal(a: &SemisimplePresentation, p: &PowerEmbedding) -> bool {
    let ranges: Vec<std::ops::Range<usize>> =
        (0..a.components.len()).map(|i| a.offset(i)..a.offset(i) + a.components[i].dim()).collect();
    for (x, rx) in ranges.iter().enumerate() {
        for (y, ry) in ranges.iter().enumerate() {
            if x == y {
                continue;
            }
            for k in rx.clone() {
                for l in ry.clone() {
                    if !p.target.mul(&p.hom.images[k], &p.hom.images[l]).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests;
