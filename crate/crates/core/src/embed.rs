//! Deciding and constructing graded embeddings `K^αN₁ ⊗ M_s̄ ↪ K^βN₂ ⊗ M_t̄`.
//!
//! For an abelian grading group the criterion is
//! `∃g: g·t̄ ≿_{N₂} d̄ × T × s̄` with `H = N₁∩N₂`, `d` the smallest
//! representation degree of `K^{α|_H/β|_H}H` and `T` a transversal of `N₂`
//! in `N₁N₂`. For a non-abelian group only elementary targets (`N₂ = {e}`)
//! are handled, where the criterion reads `∃g: g·t̄ ≿ N̄₁ × s̄`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocycles::{Cocycle, CocycleError};
use crate::envelope::{alpha_envelope, lift_hom, round_trip, EnvelopeError};
use crate::galg::{same_group, Elem, GalgError, GradedHom, HomCertificate, Presentation, SymmetryOp};
use crate::groups::{GroupError, Subgroup};
use crate::identities::{witness_separate, Budget, IdentityError, SeparatorCase, SeparatorReport};
use crate::tuples::{exists_shift, exists_shift_brute, subsume_mod, subsume_witness, GTuple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("presentations are graded by different groups")]
    MismatchedGroup,
    #[error("non-abelian grading group with a non-elementary target")]
    NonAbelianUnsupported,
    #[error("fast path does not apply: {0}")]
    NotApplicable(String),
    #[error("no embedding exists")]
    DecisionFalse,
    #[error("decision does not belong to these presentations")]
    DecisionMismatch,
    #[error("constructed map failed certification: {0}")]
    VerificationFailed(String),
    #[error("element {0} is outside the subgroup")]
    ElementOutsideGroup(usize),
    #[error("not a transversal containing the identity")]
    NotTransversal,
    #[error(transparent)]
    Galg(#[from] GalgError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedCase {
    /// `N₂` is the whole group: the criterion is `r₂ ≥ d·r₁`.
    FullSupport,
    /// Abelian group, general `N₁, N₂`.
    Abelian,
    /// Non-abelian group, `N₂ = {e}`.
    ElementaryNonabelian,
}

/// Everything needed to re-evaluate the criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionTrace {
    /// `H = N₁ ∩ N₂`.
    pub h: Vec<usize>,
    pub d: usize,
    /// `G' = N₁N₂`.
    pub g_prime: Vec<usize>,
    /// Representatives of `H` in `N₁`, which also represent `N₂` in `G'`.
    pub transversal: Vec<usize>,
    /// `N₂`, the subgroup the tuples are compared modulo.
    pub modulo: Vec<usize>,
    pub pattern: GTuple,
    pub shift: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedDecision {
    pub verdict: bool,
    pub case: EmbedCase,
    pub trace: CriterionTrace,
}

impl EmbedDecision {
    /// Re-derives the pattern from `a`, `b` and checks the recorded shift
    /// (or, for a negative verdict, that no element of the group works).
    pub fn recheck(&self, a: &Presentation, b: &Presentation) -> bool {
        let Ok(fresh) = decide(a, b) else { return false };
        if fresh.trace.pattern != self.trace.pattern || fresh.trace.modulo != self.trace.modulo {
            return false;
        }
        let g = b.group();
        let Ok(n2) = Subgroup::new(g, &self.trace.modulo) else { return false };
        match self.trace.shift {
            Some(x) => {
                self.verdict && x < g.order() && subsume_mod(&b.s().shift(x, g), &self.trace.pattern, &n2).unwrap_or(false)
            }
            None => !self.verdict && exists_shift_brute(b.s(), &self.trace.pattern, &n2).is_none(),
        }
    }
}

struct Setup {
    n2: Subgroup,
    h: Subgroup,
    transversal: Vec<usize>,
    d: usize,
    pattern: GTuple,
    case: EmbedCase,
}

fn setup(a: &Presentation, b: &Presentation) -> Result<Setup, EmbedError> {
    let g = a.group();
    if !same_group(g, b.group()) {
        return Err(EmbedError::MismatchedGroup);
    }
    let (n1, n2) = (a.h(), b.h().clone());
    let case = if !g.is_abelian() {
        if n2.order() != 1 {
            return Err(EmbedError::NonAbelianUnsupported);
        }
        EmbedCase::ElementaryNonabelian
    } else if n2.order() == g.order() {
        EmbedCase::FullSupport
    } else {
        EmbedCase::Abelian
    };
    let h = n1.intersection(&n2)?;
    let gamma = a.alpha().restrict(&h)?.ratio(&b.alpha().restrict(&h)?)?;
    let d = gamma.smallest_irrep()?.dim;
    let transversal = h.transversal_in(n1)?;
    let pattern = GTuple::trivial(g, d).product(&GTuple { entries: transversal.clone() }, g).product(a.s(), g);
    Ok(Setup { n2, h, transversal, d, pattern, case })
}

/// Decides whether `A ↪ B`, recording the criterion.
pub fn decide(a: &Presentation, b: &Presentation) -> Result<EmbedDecision, EmbedError> {
    let st = setup(a, b)?;
    let shift = exists_shift(b.s(), &st.pattern, &st.n2);
    let g_prime = a.h().product_subgroup(&st.n2)?;
    Ok(EmbedDecision {
        verdict: shift.is_some(),
        case: st.case,
        trace: CriterionTrace {
            h: st.h.elements().to_vec(),
            d: st.d,
            g_prime: g_prime.elements().to_vec(),
            transversal: st.transversal,
            modulo: st.n2.elements().to_vec(),
            pattern: st.pattern,
            shift,
        },
    })
}

/// `r₂ ≥ d·r₁`, for `B = K^βG ⊗ M_{r₂}` over an abelian group.
pub fn decide_full_support(a: &Presentation, b: &Presentation) -> Result<bool, EmbedError> {
    let st = setup(a, b)?;
    if st.case != EmbedCase::FullSupport {
        return Err(EmbedError::NotApplicable("B's subgroup is not the whole group".into()));
    }
    Ok(b.r() >= st.d * a.r())
}

/// `t̄ ≿_{N₂} d̄ × s̄ × T` without a shift, for `s̄ ⊆ N₂`, `t̄ ⊆ N₁` over an
/// abelian group.
pub fn decide_fast(a: &Presentation, b: &Presentation) -> Result<bool, EmbedError> {
    let st = setup(a, b)?;
    if st.case == EmbedCase::ElementaryNonabelian {
        return Err(EmbedError::NotApplicable("grading group is not abelian".into()));
    }
    if !a.s().entries.iter().all(|&x| b.h().contains(x)) || !b.s().entries.iter().all(|&x| a.h().contains(x)) {
        return Err(EmbedError::NotApplicable("tuples are not inside the opposite subgroups".into()));
    }
    let g = a.group();
    let pattern = GTuple::trivial(g, st.d).product(a.s(), g).product(&GTuple { entries: st.transversal }, g);
    Ok(subsume_mod(b.s(), &pattern, &st.n2)?)
}

/// `(h_{w,g}, w^g)` for each `w ∈ T`, defined by `w·g = h_{w,g}·w^g` with
/// `h_{w,g} ∈ H` and `w^g ∈ T`.
pub fn transversal_action(n1: &Subgroup, h: &Subgroup, t: &[usize], g: usize) -> Result<Vec<(usize, usize)>, EmbedError> {
    check_transversal(n1, h, t)?;
    if !n1.contains(g) {
        return Err(EmbedError::ElementOutsideGroup(g));
    }
    let grp = n1.parent();
    let keys: Vec<usize> = t.iter().map(|&w| h.coset_key(w)).collect();
    Ok(t.iter()
        .map(|&w| {
            let wg = grp.mul(w, g);
            let k = h.coset_key(wg);
            let w2 = t[keys.iter().position(|&x| x == k).expect("transversal covers N₁")];
            (grp.mul(wg, grp.inv(w2)), w2)
        })
        .collect())
}

/// `h_{w,g₁}·h_{w^{g₁},g₂} = h_{w,g₁g₂}` and `w^{g₁g₂} = (w^{g₁})^{g₂}` for all
/// `w ∈ T` and `g₁, g₂ ∈ N₁`.
pub fn transversal_composition_holds(n1: &Subgroup, h: &Subgroup, t: &[usize]) -> Result<bool, EmbedError> {
    let grp = n1.parent();
    let table: Vec<Vec<(usize, usize)>> =
        n1.elements().iter().map(|&x| transversal_action(n1, h, t, x)).collect::<Result<_, _>>()?;
    let at = |x: usize| &table[n1.index_of(x).unwrap()];
    let pos = |w: usize| t.iter().position(|&v| v == w).unwrap();
    for &g1 in n1.elements() {
        for &g2 in n1.elements() {
            let g12 = grp.mul(g1, g2);
            for (i, _) in t.iter().enumerate() {
                let (h1, w1) = at(g1)[i];
                let (h2, w2) = at(g2)[pos(w1)];
                let (h12, w12) = at(g12)[i];
                if grp.mul(h1, h2) != h12 || w2 != w12 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn check_transversal(n1: &Subgroup, h: &Subgroup, t: &[usize]) -> Result<(), EmbedError> {
    if !h.is_subgroup_of(n1) {
        return Err(GroupError::NotSubgroup.into());
    }
    let e = n1.parent().identity();
    let mut keys: Vec<usize> = t.iter().map(|&w| h.coset_key(w)).collect();
    keys.sort_unstable();
    keys.dedup();
    if !t.contains(&e) || t.iter().any(|&w| !n1.contains(w)) || keys.len() != t.len() || t.len() * h.order() != n1.order() {
        return Err(EmbedError::NotTransversal);
    }
    Ok(())
}

/// Separator case matching the decision's route: the twisted standard
/// polynomial when `N₂` is the whole group, the product of `f_{i,h}` blocks
/// when `B` is elementary, and the bounded scan otherwise.
pub fn separator_case(decision: &EmbedDecision) -> SeparatorCase {
    if decision.case == EmbedCase::FullSupport {
        SeparatorCase::FullSupport
    } else if decision.trace.modulo.len() == 1 {
        SeparatorCase::ElementaryNonabelian
    } else {
        SeparatorCase::BoundedFallback
    }
}

/// A verified `f ∈ Id_G(B) ∖ Id_G(A)` for a negative decision.
pub fn separate(
    a: &Presentation,
    b: &Presentation,
    decision: &EmbedDecision,
    budget: &Budget,
) -> Result<SeparatorReport, IdentityError> {
    if decision.verdict {
        return Err(IdentityError::DecisionWasTrue);
    }
    witness_separate(a, b, separator_case(decision), budget)
}

/// A certified graded embedding.
#[derive(Clone, Debug)]
pub struct Construction {
    pub hom: GradedHom,
    pub certificate: HomCertificate,
    /// Built on the `β⁻¹`-envelopes and transported back.
    pub via_envelope: bool,
}

/// Builds the embedding promised by a positive decision and certifies it.
pub fn construct(a: &Presentation, b: &Presentation, decision: &EmbedDecision) -> Result<Construction, EmbedError> {
    if !decision.verdict {
        return Err(EmbedError::DecisionFalse);
    }
    if !decision.recheck(a, b) {
        return Err(EmbedError::DecisionMismatch);
    }
    let shift = decision.trace.shift.expect("positive verdict has a shift");
    let g = a.group();
    // B^{β⁻¹} needs β on the whole group
    let ambient_beta = if b.alpha().is_trivial() {
        Some(Cocycle::trivial(&g.whole()))
    } else if b.h().order() == g.order() {
        Some(b.alpha().clone())
    } else {
        None
    };
    let (hom, via_envelope) = match ambient_beta {
        Some(beta) => (through_envelope(a, b, &beta, shift)?, true),
        None => (core_map(a, b, shift)?, false),
    };
    let certificate = hom.verify();
    if !certificate.is_embedding() {
        return Err(EmbedError::VerificationFailed(certificate.witnesses.join("; ")));
    }
    Ok(Construction { hom, certificate, via_envelope })
}

/// `A ≅ (A^{β⁻¹})^β → (B^{β⁻¹})^β ≅ B`, where the middle map is the lift of
/// the embedding between the reduced presentations (trivial cocycle on `B`'s side).
fn through_envelope(a: &Presentation, b: &Presentation, beta: &Cocycle, shift: usize) -> Result<GradedHom, EmbedError> {
    let binv = beta.inverse();
    let ea = alpha_envelope(a, &binv)?;
    let eb = alpha_envelope(b, &binv)?;
    let reduced = core_map(&ea.presentation, &eb.presentation, shift)?;
    let chi = ea.psi.then(&reduced).then(&invert_monomial(&eb.psi)?);
    let lifted = lift_hom(&chi, beta)?;
    let (back_a, _) = round_trip(a.algebra(), &binv)?;
    let (back_b, _) = round_trip(b.algebra(), &binv)?;
    Ok(invert_monomial(&back_a)?.then(&lifted).then(&back_b))
}

/// Inverse of a bijective map sending basis vectors to root multiples of basis vectors.
fn invert_monomial(phi: &GradedHom) -> Result<GradedHom, EmbedError> {
    let n = phi.target.dim();
    if phi.source.dim() != n {
        return Err(EmbedError::VerificationFailed("map is not square".into()));
    }
    let mut images = vec![Elem::zero(); n];
    for (i, x) in phi.images.iter().enumerate() {
        let (k, r) = x.as_monomial().ok_or_else(|| EmbedError::VerificationFailed("map is not monomial".into()))?;
        if !images[k].is_zero() {
            return Err(EmbedError::VerificationFailed("map is not injective".into()));
        }
        images[k] = Elem::root_term(i, r.inv());
    }
    Ok(GradedHom::new(phi.target.clone(), phi.source.clone(), images))
}

/// `V_x ⊗ E_{i,j} ↦ ν(x)⁻¹ Σ_{w∈T} α̃(w,x) U_h ⊗ ρ(Ṽ_h) ⊗ E_{w,w^x} ⊗ E_{i,j}` with
/// `w·x = h·w^x`, into `B` with its tuple realigned to `d̄ × T × s̄` (followed by
/// the unused entries). Here `α̃ = α·δν` satisfies `α̃(h, w) = 1` on `H × T`,
/// `Ṽ_x = ν(x)V_x`, and `ρ` is a smallest representation of `K^{α̃|_H/β|_H}H`.
fn core_map(a: &Presentation, b: &Presentation, shift: usize) -> Result<GradedHom, EmbedError> {
    let g = a.group();
    let st = setup(a, b)?;
    let (h, t) = (&st.h, &st.transversal);
    let (norm, nu) = a.alpha().transversal_normalize(h, t)?;
    let irrep = norm.restrict(h)?.ratio(&b.alpha().restrict(h)?)?.smallest_irrep()?;
    let d = irrep.dim;
    if d != st.d {
        return Err(EmbedError::VerificationFailed("normalized cocycle changed the representation degree".into()));
    }
    let (r1, nt) = (a.r(), t.len());
    let used = d * nt * r1;

    let shifted = b.s().shift(shift, g);
    let pos = subsume_witness(&shifted, &st.pattern, &st.n2)
        .ok_or_else(|| EmbedError::VerificationFailed("shifted tuple does not contain the pattern".into()))?;
    let mut taken = vec![false; shifted.len()];
    for &p in &pos {
        taken[p] = true;
    }
    let rest: Vec<usize> = (0..shifted.len()).filter(|&i| !taken[i]).collect();
    let aligned = st.pattern.concat(&shifted.select(&rest));
    let bh = Presentation::new(b.alpha(), &aligned)?;

    let keys: Vec<usize> = t.iter().map(|&w| h.coset_key(w)).collect();
    let slot = |p: usize, w: usize, i: usize| (p * nt + w) * r1 + i;
    let images = (0..a.dim())
        .map(|k| {
            let (x, i, j) = a.triple(k);
            let c0 = nu[a.h().index_of(x).unwrap()].inv();
            let mut img = Elem::zero();
            for (wi, &w) in t.iter().enumerate() {
                let wx = g.mul(w, x);
                let wj = keys.iter().position(|&q| q == h.coset_key(wx)).expect("transversal covers N₁");
                let hh = g.mul(wx, g.inv(t[wj]));
                let c = c0.mul(norm.get(w, x));
                let rho = irrep.rho_of(hh);
                for q in 0..d {
                    let p = rho.row_of[q];
                    img.add_term(bh.index(hh, slot(p, wi, i), slot(q, wj, j)), c.mul(rho.vals[q]).to_cyclo());
                }
            }
            img
        })
        .collect();
    let phi = GradedHom::new(a.algebra().clone(), bh.algebra().clone(), images);

    // realign: replace pattern entries by the matched entries of g·t̄, then permute
    let mut cur = bh;
    let mut align = GradedHom::identity(cur.algebra());
    for (k, &p) in pos.iter().enumerate() {
        if cur.s().entries[k] != shifted.entries[p] {
            let (next, m) = cur.tuple_symmetry(&SymmetryOp::Replace { index: k, with: shifted.entries[p] })?;
            align = align.then(&m);
            cur = next;
        }
    }
    let mut sigma = vec![0; shifted.len()];
    for (k, &p) in pos.iter().enumerate() {
        sigma[p] = k;
    }
    for (m, &p) in rest.iter().enumerate() {
        sigma[p] = used + m;
    }
    let (last, m) = cur.tuple_symmetry(&SymmetryOp::Permute(sigma))?;
    align = align.then(&m);
    // M_{g·t̄} and M_{t̄} carry the same grading
    if last.algebra().grading() != b.algebra().grading() {
        return Err(EmbedError::VerificationFailed("realigned tuple changed the grading".into()));
    }
    let composed = phi.then(&align);
    Ok(GradedHom::new(composed.source.clone(), Arc::clone(b.algebra()), composed.images))
}

#[cfg(test)]
mod tests;
