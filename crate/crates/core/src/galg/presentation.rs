//! Presentations `K^αH ⊗ M_s̄(K)` with basis `U_h ⊗ E_{i,j}` of degree `s_i⁻¹ h s_j`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::hom::GradedHom;
use super::structure::{Elem, Prod, StructureAlgebra};
use super::GalgError;
use crate::cocycles::{bicharacter_cocycle, Cocycle, CocycleDoc};
use crate::groups::{Group, GroupSpec, Subgroup, SubgroupDoc};
use crate::scalars::{Cyclo, Root};
use crate::tuples::{coset_decompose, GTuple};

/// The graded simple algebra `K^αH ⊗ M_s̄(K)`.
#[derive(Clone)]
pub struct Presentation {
    h: Subgroup,
    alpha: Cocycle,
    s: GTuple,
    alg: Arc<StructureAlgebra>,
}

impl std::fmt::Debug for Presentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Presentation(H={:?}, s={:?}, alpha_trivial={})", self.h.elements(), self.s.entries, self.alpha.is_trivial())
    }
}

impl Presentation {
    pub fn new(alpha: &Cocycle, s: &GTuple) -> Result<Presentation, GalgError> {
        let h = alpha.domain().clone();
        let g = h.parent().clone();
        let s = GTuple::new(&g, s.entries.clone())?;
        let alg = Arc::new(Self::build(&h, alpha, &s));
        Ok(Presentation { h, alpha: alpha.clone(), s, alg })
    }

    /// `M_s̄(K)` with the elementary grading.
    pub fn elementary(g: &Group, s: &GTuple) -> Result<Presentation, GalgError> {
        Self::new(&Cocycle::trivial(&g.trivial()), s)
    }

    /// `K^αH` with the canonical grading.
    pub fn twisted(alpha: &Cocycle) -> Presentation {
        let g = alpha.group().clone();
        Self::new(alpha, &GTuple::trivial(&g, 1)).expect("identity tuple is valid")
    }

    fn build(h: &Subgroup, alpha: &Cocycle, s: &GTuple) -> StructureAlgebra {
        let g = h.parent();
        let r = s.len();
        let hs = h.elements();
        let nh = hs.len();
        let n = nh * r * r;
        let idx = |hl: usize, i: usize, j: usize| (hl * r + i) * r + j;
        let mut grading = vec![0; n];
        for (hl, &x) in hs.iter().enumerate() {
            for i in 0..r {
                for j in 0..r {
                    grading[idx(hl, i, j)] = g.mul(g.mul(g.inv(s.entries[i]), x), s.entries[j]);
                }
            }
        }
        let mut table = vec![Prod::Zero; n * n];
        for (al, &a) in hs.iter().enumerate() {
            for (bl, &b) in hs.iter().enumerate() {
                let cl = h.index_of(g.mul(a, b)).unwrap();
                let c = alpha.get(a, b);
                for i in 0..r {
                    for j in 0..r {
                        for l in 0..r {
                            table[idx(al, i, j) * n + idx(bl, j, l)] = Prod::Mono(idx(cl, i, l), c);
                        }
                    }
                }
            }
        }
        let el = h.index_of(g.identity()).unwrap();
        let mut unit = Elem::zero();
        for i in 0..r {
            unit.add_term(idx(el, i, i), Cyclo::one());
        }
        StructureAlgebra::new_unchecked(g.clone(), grading, table, Some(unit)).expect("shapes agree")
    }

    pub fn group(&self) -> &Group {
        self.h.parent()
    }

    pub fn h(&self) -> &Subgroup {
        &self.h
    }

    pub fn alpha(&self) -> &Cocycle {
        &self.alpha
    }

    pub fn s(&self) -> &GTuple {
        &self.s
    }

    pub fn r(&self) -> usize {
        self.s.len()
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn algebra(&self) -> &Arc<StructureAlgebra> {
        &self.alg
    }

    pub fn to_structure_algebra(&self) -> StructureAlgebra {
        (*self.alg).clone()
    }

    /// Basis index of `U_h ⊗ E_{i,j}` (0-based `i, j`).
    pub fn index(&self, h: usize, i: usize, j: usize) -> usize {
        let r = self.r();
        (self.h.index_of(h).expect("h in H") * r + i) * r + j
    }

    /// `(h, i, j)` of a basis index.
    pub fn triple(&self, k: usize) -> (usize, usize, usize) {
        let r = self.r();
        (self.h.elements()[k / (r * r)], (k / r) % r, k % r)
    }

    pub fn degree(&self, h: usize, i: usize, j: usize) -> usize {
        self.alg.degree(self.index(h, i, j))
    }

    /// `{s_i⁻¹ h s_j}`.
    pub fn support(&self) -> BTreeSet<usize> {
        self.alg.support()
    }

    pub fn element(&self, terms: &[((usize, usize, usize), Cyclo)]) -> Elem {
        let mut e = Elem::zero();
        for ((h, i, j), c) in terms {
            e.add_term(self.index(*h, *i, *j), c.clone());
        }
        e
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.alg.mul(a, b)
    }

    /// Apply one of the three tuple symmetries; returns the new presentation
    /// and the graded isomorphism onto it.
    pub fn tuple_symmetry(&self, op: &SymmetryOp) -> Result<(Presentation, GradedHom), GalgError> {
        let g = self.group().clone();
        let r = self.r();
        match op {
            SymmetryOp::Permute(sigma) => {
                let mut seen = vec![false; r];
                if sigma.len() != r || sigma.iter().any(|&x| x >= r || std::mem::replace(&mut seen[x], true)) {
                    return Err(GalgError::Shape);
                }
                let s2 = GTuple { entries: sigma.iter().map(|&k| self.s.entries[k]).collect() };
                let b = Presentation::new(&self.alpha, &s2)?;
                let mut sinv = vec![0; r];
                for (i, &k) in sigma.iter().enumerate() {
                    sinv[k] = i;
                }
                let images = (0..self.dim())
                    .map(|k| {
                        let (h, i, j) = self.triple(k);
                        Elem::basis(b.index(h, sinv[i], sinv[j]))
                    })
                    .collect();
                let phi = GradedHom::new(self.alg.clone(), b.alg.clone(), images);
                Ok((b, phi))
            }
            SymmetryOp::Replace { index, with } => {
                let i0 = *index;
                if i0 >= r {
                    return Err(GalgError::Shape);
                }
                g.check_element(*with)?;
                let ht = g.mul(self.s.entries[i0], g.inv(*with));
                if !self.h.contains(ht) {
                    return Err(GalgError::NotSameCoset);
                }
                let mut s2 = self.s.clone();
                s2.entries[i0] = *with;
                let b = Presentation::new(&self.alpha, &s2)?;
                let a = &self.alpha;
                let hti = g.inv(ht);
                let inv_scale = a.get(ht, hti).inv();
                // conjugation by X = Σ_{j≠i} E_jj + U_h̃ E_ii
                let images = (0..self.dim())
                    .map(|k| {
                        let (h, j, l) = self.triple(k);
                        let (mut x, mut c) = (h, Root::one());
                        if j == i0 {
                            c = c.mul(inv_scale).mul(a.get(hti, x));
                            x = g.mul(hti, x);
                        }
                        if l == i0 {
                            c = c.mul(a.get(x, ht));
                            x = g.mul(x, ht);
                        }
                        Elem::root_term(b.index(x, j, l), c)
                    })
                    .collect();
                let phi = GradedHom::new(self.alg.clone(), b.alg.clone(), images);
                Ok((b, phi))
            }
            SymmetryOp::Conjugate(x) => {
                g.check_element(*x)?;
                let alpha2 = self.alpha.conjugate(*x)?;
                let s2 = self.s.shift(*x, &g);
                let b = Presentation::new(&alpha2, &s2)?;
                let images = (0..self.dim())
                    .map(|k| {
                        let (h, i, j) = self.triple(k);
                        Elem::basis(b.index(g.conj(*x, h), i, j))
                    })
                    .collect();
                let phi = GradedHom::new(self.alg.clone(), b.alg.clone(), images);
                Ok((b, phi))
            }
        }
    }

    /// Split along the right cosets of `G' ⊇ H` met by `s̄`.
    pub fn block_decompose(&self, gp: &Subgroup) -> Result<BlockDecomposition, GalgError> {
        if !self.h.is_subgroup_of(gp) {
            return Err(GalgError::NotSubgroup);
        }
        let parts = coset_decompose(&self.s, gp);
        let mut block_of = vec![0; self.r()];
        let mut blocks = Vec::with_capacity(parts.len());
        for (b, (rep, idx)) in parts.into_iter().enumerate() {
            for &i in &idx {
                block_of[i] = b;
            }
            let presentation = Presentation::new(&self.alpha, &self.s.select(&idx))?;
            blocks.push(Block { rep, indices: idx, presentation });
        }
        let diagonal_is_g_prime = (0..self.dim()).all(|k| {
            let (_, i, j) = self.triple(k);
            gp.contains(self.alg.degree(k)) == (block_of[i] == block_of[j])
        });
        Ok(BlockDecomposition { blocks, diagonal_is_g_prime })
    }

    pub fn to_doc(&self) -> PresentationDoc {
        PresentationDoc {
            ambient: None,
            h: self.h.to_doc(),
            alpha: Some(AlphaDoc::Table(self.alpha.to_doc())),
            s: self.s.clone(),
        }
    }

    pub fn from_doc(g: &Group, doc: &PresentationDoc) -> Result<Presentation, GalgError> {
        let h = Subgroup::new(g, &doc.h.elements)?;
        let alpha = match &doc.alpha {
            None => Cocycle::trivial(&h),
            Some(AlphaDoc::Table(c)) => {
                let a = Cocycle::from_doc(g, c)?;
                if a.domain() != &h {
                    return Err(GalgError::MismatchedParent);
                }
                a
            }
            Some(AlphaDoc::Bicharacter { bicharacter }) => bicharacter_cocycle(g, bicharacter)?.restrict(&h)?,
        };
        Presentation::new(&alpha, &doc.s)
    }
}

/// The three isomorphism-preserving tuple moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryOp {
    /// `s'_i = s_{σ(i)}`.
    Permute(Vec<usize>),
    /// Replace `s_index` by `with`, which must lie in `H·s_index`.
    Replace { index: usize, with: usize },
    /// `(H, α, s̄) ↦ (gHg⁻¹, α_g, g·s̄)`.
    Conjugate(usize),
}

pub struct Block {
    pub rep: usize,
    pub indices: Vec<usize>,
    pub presentation: Presentation,
}

pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    /// The degree-`G'` part of the algebra is exactly the sum of the diagonal blocks.
    pub diagonal_is_g_prime: bool,
}

/// JSON form of a presentation. The cocycle is either a full table on `H`
/// or a bicharacter exponent list on a product of cyclic groups, restricted to `H`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<GroupSpec>,
    #[serde(rename = "H")]
    pub h: SubgroupDoc,
    #[serde(default)]
    pub alpha: Option<AlphaDoc>,
    pub s: GTuple,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaDoc {
    Bicharacter { bicharacter: Vec<u32> },
    Table(CocycleDoc),
}
