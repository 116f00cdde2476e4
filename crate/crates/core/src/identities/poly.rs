//! Multilinear graded polynomials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IdentityError;
use crate::groups::FiniteGroup;
use crate::scalars::Cyclo;

/// A word `x_{σ(1)} x_{σ(2)} ⋯ x_{σ(n)}` stored as the sequence `σ(1), …, σ(n)`.
pub type Word = Vec<u16>;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Flat(BTreeMap<Word, Cyclo>),
    /// Product of polynomials in consecutive, disjoint blocks of variables.
    Product(Vec<MultilinearPoly>),
}

/// `Σ_σ λ_σ x_{σ(1)}⋯x_{σ(n)}` in variables `x_i` of degree `g_i`, homogeneous
/// of a fixed target degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPoly {
    degrees: Vec<usize>,
    target: usize,
    repr: Repr,
}

fn word_degree(g: &FiniteGroup, degrees: &[usize], w: &[u16]) -> usize {
    w.iter().fold(g.identity(), |acc, &i| g.mul(acc, degrees[i as usize]))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur: Word = (0..n as u16).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Sign of a permutation.
pub fn sign(w: &[u16]) -> i64 {
    let mut inv = 0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[i] > w[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

impl MultilinearPoly {
    /// Validates that every word is a permutation of the variables and
    /// multiplies out to `target`.
    pub fn new(
        g: &FiniteGroup,
        degrees: Vec<usize>,
        target: usize,
        terms: impl IntoIterator<Item = (Word, Cyclo)>,
    ) -> Result<MultilinearPoly, IdentityError> {
        let n = degrees.len();
        for &d in degrees.iter().chain(std::iter::once(&target)) {
            if d >= g.order() {
                return Err(IdentityError::DegreeOutsideGroup(d));
            }
        }
        let mut map: BTreeMap<Word, Cyclo> = BTreeMap::new();
        for (w, c) in terms {
            let mut seen = vec![false; n];
            if w.len() != n || w.iter().any(|&i| (i as usize) >= n || std::mem::replace(&mut seen[i as usize], true)) {
                return Err(IdentityError::NotMultilinear);
            }
            if word_degree(g, &degrees, &w) != target {
                return Err(IdentityError::DegreeMismatch);
            }
            let e = map.entry(w).or_insert_with(Cyclo::zero);
            *e = &*e + &c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(MultilinearPoly { degrees, target, repr: Repr::Flat(map) })
    }

    pub fn zero(g: &FiniteGroup, degrees: Vec<usize>, target: usize) -> MultilinearPoly {
        let _ = g;
        MultilinearPoly { degrees, target, repr: Repr::Flat(BTreeMap::new()) }
    }

    /// The single variable `x_1` of degree `deg`.
    pub fn variable(deg: usize) -> MultilinearPoly {
        let mut map = BTreeMap::new();
        map.insert(vec![0], Cyclo::one());
        MultilinearPoly { degrees: vec![deg], target: deg, repr: Repr::Flat(map) }
    }

    /// `St_r = Σ_σ sgn(σ) x_{σ(1)}⋯x_{σ(r)}` restricted to the words of
    /// degree `g_1⋯g_r`.
    pub fn standard(g: &FiniteGroup, degrees: &[usize]) -> MultilinearPoly {
        let target = word_degree(g, degrees, &(0..degrees.len() as u16).collect::<Word>());
        let terms = permutations(degrees.len())
            .into_iter()
            .filter(|w| word_degree(g, degrees, w) == target)
            .map(|w| {
                let s = sign(&w);
                (w, Cyclo::from_int(s))
            });
        MultilinearPoly::new(g, degrees.to_vec(), target, terms).expect("standard polynomial is well formed")
    }

    /// `f_1 · f_2 ⋯ f_k` in disjoint variables, numbered block by block.
    pub fn product(g: &FiniteGroup, factors: Vec<MultilinearPoly>) -> MultilinearPoly {
        let mut degrees = Vec::new();
        let mut target = g.identity();
        let mut flat = Vec::new();
        for f in factors {
            degrees.extend_from_slice(&f.degrees);
            target = g.mul(target, f.target);
            match f.repr {
                Repr::Product(inner) => flat.extend(inner),
                Repr::Flat(_) => flat.push(f),
            }
        }
        MultilinearPoly { degrees, target, repr: Repr::Product(flat) }
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn n_vars(&self) -> usize {
        self.degrees.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn factors(&self) -> Option<&[MultilinearPoly]> {
        match &self.repr {
            Repr::Product(v) => Some(v),
            Repr::Flat(_) => None,
        }
    }

    /// Number of words with a nonzero coefficient after expansion.
    pub fn term_count(&self) -> u128 {
        match &self.repr {
            Repr::Flat(m) => m.len() as u128,
            Repr::Product(v) => v.iter().map(|f| f.term_count()).product(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.term_count() == 0
    }

    /// Coefficients with products expanded.
    pub fn terms(&self) -> BTreeMap<Word, Cyclo> {
        match &self.repr {
            Repr::Flat(m) => m.clone(),
            Repr::Product(v) => {
                let mut acc: BTreeMap<Word, Cyclo> = BTreeMap::new();
                acc.insert(Vec::new(), Cyclo::one());
                let mut off = 0u16;
                for f in v {
                    let ft = f.terms();
                    let mut next = BTreeMap::new();
                    for (w, c) in &acc {
                        for (w2, c2) in &ft {
                            let mut w3 = w.clone();
                            w3.extend(w2.iter().map(|&i| i + off));
                            next.insert(w3, c * c2);
                        }
                    }
                    acc = next;
                    off += f.n_vars() as u16;
                }
                acc.retain(|_, c| !c.is_zero());
                acc
            }
        }
    }

    pub fn coeff(&self, w: &[u16]) -> Cyclo {
        match &self.repr {
            Repr::Flat(m) => m.get(w).cloned().unwrap_or_else(Cyclo::zero),
            Repr::Product(_) => self.terms().get(w).cloned().unwrap_or_else(Cyclo::zero),
        }
    }

    /// Flat form of this polynomial.
    pub fn expanded(&self) -> MultilinearPoly {
        MultilinearPoly { degrees: self.degrees.clone(), target: self.target, repr: Repr::Flat(self.terms()) }
    }

    /// Rescale every coefficient: `λ_σ ↦ λ_σ · f(σ)`.
    pub fn map_coeffs(&self, f: impl Fn(&[u16]) -> Cyclo) -> MultilinearPoly {
        let terms = self
            .terms()
            .into_iter()
            .map(|(w, c)| {
                let s = f(&w);
                (w, &c * &s)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        MultilinearPoly { degrees: self.degrees.clone(), target: self.target, repr: Repr::Flat(terms) }
    }

    /// Multiply the whole polynomial by a scalar.
    pub fn scale(&self, c: &Cyclo) -> MultilinearPoly {
        match &self.repr {
            Repr::Flat(_) => self.map_coeffs(|_| c.clone()),
            Repr::Product(v) => {
                let mut v = v.clone();
                if let Some(first) = v.first_mut() {
                    *first = first.scale(c);
                }
                MultilinearPoly { degrees: self.degrees.clone(), target: self.target, repr: Repr::Product(v) }
            }
        }
    }

    pub(crate) fn with_factors(&self, factors: Vec<MultilinearPoly>) -> MultilinearPoly {
        MultilinearPoly { degrees: self.degrees.clone(), target: self.target, repr: Repr::Product(factors) }
    }

    pub fn to_doc(&self) -> PolyDoc {
        match &self.repr {
            Repr::Flat(m) => PolyDoc {
                multidegree: self.degrees.clone(),
                target: self.target,
                terms: m.iter().map(|(w, c)| TermDoc { perm: w.clone(), coeff: c.clone() }).collect(),
                factors: Vec::new(),
            },
            Repr::Product(v) => PolyDoc {
                multidegree: self.degrees.clone(),
                target: self.target,
                terms: Vec::new(),
                factors: v.iter().map(|f| f.to_doc()).collect(),
            },
        }
    }

    pub fn from_doc(g: &FiniteGroup, doc: &PolyDoc) -> Result<MultilinearPoly, IdentityError> {
        if doc.factors.is_empty() {
            return MultilinearPoly::new(
                g,
                doc.multidegree.clone(),
                doc.target,
                doc.terms.iter().map(|t| (t.perm.clone(), t.coeff.clone())),
            );
        }
        let factors = doc.factors.iter().map(|d| MultilinearPoly::from_doc(g, d)).collect::<Result<Vec<_>, _>>()?;
        let p = MultilinearPoly::product(g, factors);
        if p.degrees != doc.multidegree || p.target != doc.target {
            return Err(IdentityError::DegreeMismatch);
        }
        Ok(p)
    }
}

/// JSON form. A product of polynomials in disjoint variables lists its
/// `factors` instead of expanded `terms`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyDoc {
    pub multidegree: Vec<usize>,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<PolyDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDoc {
    pub perm: Word,
    pub coeff: Cyclo,
}
