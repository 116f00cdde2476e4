//! Graded homomorphisms given by basis images, and their certificates.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::structure::{Elem, Prod, StructureAlgebra};
use crate::linalg::Echelon;
use crate::scalars::Cyclo;

/// A linear map fixed by the images of the source basis.
#[derive(Clone, Debug)]
pub struct GradedHom {
    pub source: Arc<StructureAlgebra>,
    pub target: Arc<StructureAlgebra>,
    pub images: Vec<Elem>,
}

/// Outcome of [`GradedHom::verify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomCertificate {
    pub graded: bool,
    pub multiplicative: bool,
    /// `φ(1) = 1`, when both algebras record a unit.
    pub unital: Option<bool>,
    pub injective: bool,
    /// First failure found for each property.
    pub witnesses: Vec<String>,
}

impl HomCertificate {
    /// Graded, multiplicative and injective: a graded embedding.
    pub fn is_embedding(&self) -> bool {
        self.graded && self.multiplicative && self.injective
    }
}

impl GradedHom {
    pub fn new(source: Arc<StructureAlgebra>, target: Arc<StructureAlgebra>, images: Vec<Elem>) -> GradedHom {
        assert_eq!(images.len(), source.dim(), "one image per source basis element");
        GradedHom { source, target, images }
    }

    pub fn identity(a: &Arc<StructureAlgebra>) -> GradedHom {
        GradedHom::new(a.clone(), a.clone(), (0..a.dim()).map(Elem::basis).collect())
    }

    pub fn zero(a: &Arc<StructureAlgebra>, b: &Arc<StructureAlgebra>) -> GradedHom {
        GradedHom::new(a.clone(), b.clone(), vec![Elem::zero(); a.dim()])
    }

    pub fn apply(&self, x: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (&i, c) in &x.terms {
            for (&k, y) in &self.images[i].terms {
                out.add_term(k, c * y);
            }
        }
        out
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GradedHom) -> GradedHom {
        GradedHom::new(self.source.clone(), next.target.clone(), self.images.iter().map(|x| next.apply(x)).collect())
    }

    pub fn verify(&self) -> HomCertificate {
        let src = &self.source;
        let tgt = &self.target;
        let n = src.dim();
        let mut witnesses = Vec::new();

        let graded = match (0..n).find(|&i| {
            self.images[i].terms.keys().any(|&k| tgt.degree(k) != src.degree(i))
        }) {
            None => true,
            Some(i) => {
                witnesses.push(format!("image of basis {} leaves degree {}", i, src.degree(i)));
                false
            }
        };

        let mono: Option<Vec<_>> = self.images.iter().map(|e| e.as_monomial()).collect();
        let mut multiplicative = true;
        'pairs: for i in 0..n {
            for j in 0..n {
                let ok = match (&mono, src.prod(i, j)) {
                    (Some(m), p) if !matches!(p, Prod::Sparse(_)) && tgt.is_monomial() => {
                        let (ki, ri) = m[i];
                        let (kj, rj) = m[j];
                        let rhs = match tgt.prod(ki, kj) {
                            Prod::Mono(k, r) => Some((*k, r.mul(ri).mul(rj))),
                            _ => None,
                        };
                        let lhs = match p {
                            Prod::Mono(k, r) => Some((m[*k].0, m[*k].1.mul(*r))),
                            _ => None,
                        };
                        lhs == rhs
                    }
                    _ => {
                        let lhs = self.apply(&src.basis_product(i, j));
                        let rhs = tgt.mul(&self.images[i], &self.images[j]);
                        lhs == rhs
                    }
                };
                if !ok {
                    witnesses.push(format!("phi(b{} b{}) != phi(b{}) phi(b{})", i, j, i, j));
                    multiplicative = false;
                    break 'pairs;
                }
            }
        }

        let unital = match (src.unit(), tgt.unit()) {
            (Some(u), Some(v)) => Some(self.apply(u) == *v),
            _ => None,
        };

        let injective = match &mono {
            Some(m) => {
                let mut seen = vec![false; tgt.dim()];
                m.iter().all(|&(k, _)| !std::mem::replace(&mut seen[k], true))
            }
            None => {
                let mut e = Echelon::new(tgt.dim());
                self.images.iter().all(|x| e.insert(x.to_dense(tgt.dim())))
            }
        };
        if !injective {
            witnesses.push("images are linearly dependent".into());
        }
        HomCertificate { graded, multiplicative, unital, injective, witnesses }
    }

    pub fn to_doc(&self) -> HomDoc {
        HomDoc {
            source_dim: self.source.dim(),
            target_dim: self.target.dim(),
            images: self.images.iter().map(|e| e.terms.iter().map(|(&k, c)| (k, c.clone())).collect()).collect(),
        }
    }
}

/// JSON form: one list of `(target index, scalar)` terms per source basis element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomDoc {
    pub source_dim: usize,
    pub target_dim: usize,
    pub images: Vec<Vec<(usize, Cyclo)>>,
}

impl HomDoc {
    pub fn into_hom(self, source: Arc<StructureAlgebra>, target: Arc<StructureAlgebra>) -> Option<GradedHom> {
        if self.source_dim != source.dim() || self.target_dim != target.dim() || self.images.len() != source.dim() {
            return None;
        }
        let mut images = Vec::with_capacity(self.images.len());
        for terms in self.images {
            let mut e = Elem::zero();
            for (k, c) in terms {
                if k >= target.dim() {
                    return None;
                }
                e.add_term(k, c);
            }
            images.push(e);
        }
        Some(GradedHom::new(source, target, images))
    }
}
