//! Identity spaces of a fixed multidegree and bounded inclusion `Id_G(B) ⊆ Id_G(A)`.

use std::collections::{BTreeSet, HashSet};

use super::eval::{assignment_count, comps_for, for_each_assignment, word_value_generic, Engine, WordEval};
use super::poly::{permutations, MultilinearPoly, Word};
use super::{Budget, IdentityError};
use crate::galg::StructureAlgebra;
use crate::linalg::Echelon;
use crate::scalars::Cyclo;

/// `{f : f ∈ Id_G(A)}` among multilinear polynomials of multidegree `ḡ` and
/// target degree `g`.
#[derive(Clone, Debug)]
pub struct IdentitySpace {
    pub degrees: Vec<usize>,
    pub target: usize,
    /// The words of `S_n^{ḡ,g}`, in the column order of the evaluation map.
    pub perms: Vec<Word>,
    pub basis: Vec<MultilinearPoly>,
    /// Rank of the evaluation map.
    pub rank: usize,
    pub assignments: u64,
}

impl IdentitySpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub(crate) struct Functionals {
    pub perms: Vec<Word>,
    pub rows: Echelon,
    pub assignments: u64,
}

fn word_degree(alg: &StructureAlgebra, degrees: &[usize], w: &[u16]) -> usize {
    let g = alg.group();
    w.iter().fold(g.identity(), |acc, &i| g.mul(acc, degrees[i as usize]))
}

/// Row space of the map `λ ↦ (Σ_σ λ_σ a_{σ(1)}⋯a_{σ(n)})_a` over all basis
/// assignments `a`.
pub(crate) fn functionals(
    alg: &StructureAlgebra,
    degrees: &[usize],
    target: usize,
    budget: &Budget,
) -> Result<Functionals, IdentityError> {
    let order = alg.group().order();
    if let Some(&d) = degrees.iter().chain(std::iter::once(&target)).find(|&&d| d >= order) {
        return Err(IdentityError::DegreeOutsideGroup(d));
    }
    let perms: Vec<Word> =
        permutations(degrees.len()).into_iter().filter(|w| word_degree(alg, degrees, w) == target).collect();
    let np = perms.len();
    let comps = comps_for(degrees, alg);
    let needed = assignment_count(&comps) * np as u128;
    if needed > budget.max_evals as u128 {
        return Err(IdentityError::BudgetExceeded { needed, limit: budget.max_evals });
    }
    let mut rows = Echelon::new(np);
    let mut assignments = 0u64;
    if np == 0 {
        return Ok(Functionals { perms, rows, assignments });
    }
    let eng = Engine::new(alg);
    match WordEval::new(&eng) {
        Some(we) => {
            let m = we.modulus();
            let mut seen: HashSet<Vec<(u32, u32)>> = HashSet::new();
            let mut vals: Vec<(usize, u32, u32)> = Vec::with_capacity(np);
            for_each_assignment(&comps, |asg| {
                assignments += 1;
                vals.clear();
                for (p, w) in perms.iter().enumerate() {
                    if let Some((k, e)) = we.word(asg, w) {
                        vals.push((k, p as u32, e));
                    }
                }
                vals.sort_unstable();
                for grp in vals.chunk_by(|a, b| a.0 == b.0) {
                    // a row and its multiples by roots give the same constraint
                    let e0 = grp[0].2;
                    let key: Vec<(u32, u32)> = grp.iter().map(|&(_, p, e)| (p, (e + m - e0) % m)).collect();
                    if seen.insert(key.clone()) {
                        let mut row = vec![Cyclo::zero(); np];
                        for (p, e) in key {
                            row[p as usize] = Cyclo::zeta_pow(m, e as i64);
                        }
                        rows.insert(row);
                        if rows.is_full() {
                            return false;
                        }
                    }
                }
                true
            });
        }
        None => {
            for_each_assignment(&comps, |asg| {
                assignments += 1;
                let mut by_out: std::collections::BTreeMap<usize, Vec<Cyclo>> = Default::default();
                for (p, w) in perms.iter().enumerate() {
                    for (&k, c) in &word_value_generic(alg, asg, w).terms {
                        by_out.entry(k).or_insert_with(|| vec![Cyclo::zero(); np])[p] = c.clone();
                    }
                }
                for row in by_out.into_values() {
                    rows.insert(row);
                    if rows.is_full() {
                        return false;
                    }
                }
                true
            });
        }
    }
    Ok(Functionals { perms, rows, assignments })
}

/// Exact basis of the multilinear identities of multidegree `degrees` and
/// target `target`.
pub fn identity_space(
    alg: &StructureAlgebra,
    degrees: &[usize],
    target: usize,
    budget: &Budget,
) -> Result<IdentitySpace, IdentityError> {
    let fun = functionals(alg, degrees, target, budget)?;
    let g = alg.group();
    let basis = fun
        .rows
        .kernel()
        .into_iter()
        .map(|v| MultilinearPoly::new(g, degrees.to_vec(), target, fun.perms.iter().cloned().zip(v)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IdentitySpace {
        degrees: degrees.to_vec(),
        target,
        perms: fun.perms,
        basis,
        rank: fun.rows.rank(),
        assignments: fun.assignments,
    })
}

/// First multidegree where `Id_G(B) ⊄ Id_G(A)`, with a polynomial of
/// `Id_G(B) ∖ Id_G(A)`.
#[derive(Clone, Debug)]
pub struct Violation {
    pub degrees: Vec<usize>,
    pub target: usize,
    pub separator: MultilinearPoly,
}

#[derive(Clone, Debug)]
pub struct InclusionReport {
    /// `Id_G(B) ⊆ Id_G(A)` in every multidegree of length at most `max_len`.
    pub holds: bool,
    pub max_len: usize,
    pub multidegrees_checked: usize,
    pub violation: Option<Violation>,
}

fn multisets(support: &[usize], len: usize) -> Vec<Vec<usize>> {
    fn rec(support: &[usize], from: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in from..support.len() {
            cur.push(support[i]);
            rec(support, i, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(support, 0, len, &mut Vec::new(), &mut out);
    out
}

fn dot(row: &[Cyclo], v: &[Cyclo]) -> Cyclo {
    let mut acc = Cyclo::zero();
    for (a, b) in row.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * b);
        }
    }
    acc
}

/// Compares the multilinear identities of `B` and `A` for every multidegree
/// of length `1..=max_len` over `Supp(A) ∪ Supp(B)` (as sorted multisets; a
/// multilinear identity space is determined by its multiset of degrees up to
/// renaming variables).
pub fn inclusion_bounded(
    b: &StructureAlgebra,
    a: &StructureAlgebra,
    max_len: usize,
    budget: &Budget,
) -> Result<InclusionReport, IdentityError> {
    if !crate::galg::same_group(a.group(), b.group()) {
        return Err(IdentityError::MismatchedGroup);
    }
    let g = a.group();
    let support: Vec<usize> = a.support().union(&b.support()).copied().collect();
    let mut checked = 0;
    for len in 1..=max_len {
        for degrees in multisets(&support, len) {
            let targets: BTreeSet<usize> = permutations(len).iter().map(|w| word_degree(a, &degrees, w)).collect();
            for target in targets {
                checked += 1;
                let fa = functionals(a, &degrees, target, budget)?;
                if fa.rows.rank() == 0 {
                    continue;
                }
                let fb = functionals(b, &degrees, target, budget)?;
                for v in fb.rows.kernel() {
                    if fa.rows.rows().iter().any(|r| !dot(r, &v).is_zero()) {
                        let separator = MultilinearPoly::new(g, degrees.clone(), target, fb.perms.iter().cloned().zip(v))?;
                        return Ok(InclusionReport {
                            holds: false,
                            max_len,
                            multidegrees_checked: checked,
                            violation: Some(Violation { degrees, target, separator }),
                        });
                    }
                }
            }
        }
    }
    Ok(InclusionReport { holds: true, max_len, multidegrees_checked: checked, violation: None })
}
