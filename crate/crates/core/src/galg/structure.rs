//! Graded algebras given by structure constants, and their elements.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GalgError;
use crate::groups::Group;
use crate::scalars::{Cyclo, Root};

/// A sparse vector over a basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Elem {
    pub terms: BTreeMap<usize, Cyclo>,
}

impl Elem {
    pub fn zero() -> Elem {
        Elem::default()
    }

    pub fn basis(i: usize) -> Elem {
        Elem::term(i, Cyclo::one())
    }

    pub fn term(i: usize, c: Cyclo) -> Elem {
        let mut e = Elem::zero();
        e.add_term(i, c);
        e
    }

    pub fn root_term(i: usize, r: Root) -> Elem {
        Elem::term(i, r.to_cyclo())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, i: usize, c: Cyclo) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&i) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_zero() {
                    self.terms.remove(&i);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(i, c);
            }
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        let mut out = self.clone();
        for (&i, c) in &o.terms {
            out.add_term(i, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.scale(&Cyclo::from_int(-1)))
    }

    pub fn scale(&self, c: &Cyclo) -> Elem {
        if c.is_zero() {
            return Elem::zero();
        }
        Elem { terms: self.terms.iter().map(|(&i, x)| (i, x * c)).collect() }
    }

    /// Reindex through `f`, summing collisions.
    pub fn map_index(&self, f: impl Fn(usize) -> usize) -> Elem {
        let mut out = Elem::zero();
        for (&i, c) in &self.terms {
            out.add_term(f(i), c.clone());
        }
        out
    }

    /// The single `(index, root)` term when the element is a root multiple of a basis vector.
    pub fn as_monomial(&self) -> Option<(usize, Root)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&i, c) = self.terms.iter().next().unwrap();
        c.to_root().map(|r| (i, r))
    }

    pub fn to_dense(&self, n: usize) -> Vec<Cyclo> {
        let mut v = vec![Cyclo::zero(); n];
        for (&i, c) in &self.terms {
            v[i] = c.clone();
        }
        v
    }
}

/// Product of two basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prod {
    Zero,
    /// `root · b_k`
    Mono(usize, Root),
    Sparse(Vec<(usize, Cyclo)>),
}

impl Prod {
    fn terms(&self) -> Vec<(usize, Cyclo)> {
        match self {
            Prod::Zero => Vec::new(),
            Prod::Mono(k, r) => vec![(*k, r.to_cyclo())],
            Prod::Sparse(v) => v.clone(),
        }
    }
}

/// A finite-dimensional `G`-graded algebra with a homogeneous basis.
#[derive(Clone, Debug)]
pub struct StructureAlgebra {
    group: Group,
    grading: Vec<usize>,
    table: Vec<Prod>,
    unit: Option<Elem>,
}

const EXHAUSTIVE_ASSOC_DIM: usize = 32;
const SAMPLED_ASSOC_TRIPLES: usize = 20_000;

impl StructureAlgebra {
    /// Validates gradedness on every basis pair and associativity on all
    /// triples (sampled beyond dimension 32).
    pub fn new(group: Group, grading: Vec<usize>, table: Vec<Prod>, unit: Option<Elem>) -> Result<Self, GalgError> {
        let a = Self::new_unchecked(group, grading, table, unit)?;
        a.check_grading()?;
        a.check_associativity()?;
        Ok(a)
    }

    /// Shape checks only; used for algebras whose axioms hold by construction.
    pub fn new_unchecked(group: Group, grading: Vec<usize>, table: Vec<Prod>, unit: Option<Elem>) -> Result<Self, GalgError> {
        let n = grading.len();
        if table.len() != n * n || grading.iter().any(|&g| g >= group.order()) {
            return Err(GalgError::Shape);
        }
        Ok(StructureAlgebra { group, grading, table, unit })
    }

    pub fn check_grading(&self) -> Result<(), GalgError> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let want = self.group.mul(self.grading[i], self.grading[j]);
                for (k, _) in self.table[i * n + j].terms() {
                    if k >= n {
                        return Err(GalgError::Shape);
                    }
                    if self.grading[k] != want {
                        return Err(GalgError::GradingViolated(i, j));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_associativity(&self) -> Result<(), GalgError> {
        let n = self.dim();
        let check = |i: usize, j: usize, k: usize| {
            let l = self.mul(&self.basis_product(i, j), &Elem::basis(k));
            let r = self.mul(&Elem::basis(i), &self.basis_product(j, k));
            if l == r {
                Ok(())
            } else {
                Err(GalgError::NotAssociative(i, j, k))
            }
        };
        if n <= EXHAUSTIVE_ASSOC_DIM {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..SAMPLED_ASSOC_TRIPLES {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.grading[i]
    }

    pub fn grading(&self) -> &[usize] {
        &self.grading
    }

    pub fn unit(&self) -> Option<&Elem> {
        self.unit.as_ref()
    }

    #[inline]
    pub fn prod(&self, i: usize, j: usize) -> &Prod {
        &self.table[i * self.dim() + j]
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Elem {
        let mut e = Elem::zero();
        for (k, c) in self.prod(i, j).terms() {
            e.add_term(k, c);
        }
        e
    }

    pub fn is_monomial(&self) -> bool {
        self.table.iter().all(|p| !matches!(p, Prod::Sparse(_)))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut acc: BTreeMap<usize, Cyclo> = BTreeMap::new();
        for (&i, x) in &a.terms {
            for (&j, y) in &b.terms {
                match self.prod(i, j) {
                    Prod::Zero => {}
                    Prod::Mono(k, r) => {
                        let c = &(x * y) * &r.to_cyclo();
                        push(&mut acc, *k, c);
                    }
                    Prod::Sparse(v) => {
                        let xy = x * y;
                        for (k, c) in v {
                            push(&mut acc, *k, &xy * c);
                        }
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Elem { terms: acc }
    }

    /// Basis indices of degree `g`.
    pub fn component(&self, g: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.grading[i] == g).collect()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.grading.iter().copied().collect()
    }

    /// Degree of a homogeneous element; `None` for zero or mixed elements.
    pub fn homogeneous_degree(&self, e: &Elem) -> Option<usize> {
        let mut it = e.terms.keys().map(|&i| self.grading[i]);
        let first = it.next()?;
        it.all(|g| g == first).then_some(first)
    }

    /// Block-diagonal direct sum; basis of part `p` is offset by the sum of earlier dimensions.
    pub fn direct_sum(parts: &[&StructureAlgebra]) -> Result<StructureAlgebra, GalgError> {
        let group = parts.first().ok_or(GalgError::Shape)?.group.clone();
        if parts.iter().any(|p| !same_group(&p.group, &group)) {
            return Err(GalgError::MismatchedParent);
        }
        let n: usize = parts.iter().map(|p| p.dim()).sum();
        let mut grading = Vec::with_capacity(n);
        let mut table = vec![Prod::Zero; n * n];
        let mut unit = Some(Elem::zero());
        let mut off = 0;
        for p in parts {
            let m = p.dim();
            grading.extend_from_slice(&p.grading);
            for i in 0..m {
                for j in 0..m {
                    table[(off + i) * n + off + j] = match p.prod(i, j) {
                        Prod::Zero => Prod::Zero,
                        Prod::Mono(k, r) => Prod::Mono(off + k, *r),
                        Prod::Sparse(v) => Prod::Sparse(v.iter().map(|(k, c)| (off + k, c.clone())).collect()),
                    };
                }
            }
            unit = match (unit, &p.unit) {
                (Some(u), Some(pu)) => Some(u.add(&pu.map_index(|i| off + i))),
                _ => None,
            };
            off += m;
        }
        Ok(StructureAlgebra { group, grading, table, unit })
    }

    pub fn power(&self, copies: usize) -> StructureAlgebra {
        let parts: Vec<&StructureAlgebra> = std::iter::repeat(self).take(copies).collect();
        StructureAlgebra::direct_sum(&parts).expect("copies share a group")
    }

    pub fn to_doc(&self) -> StructureDoc {
        let n = self.dim();
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let terms = self.prod(i, j).terms();
                if !terms.is_empty() {
                    products.push(ProductDoc { left: i, right: j, terms });
                }
            }
        }
        StructureDoc {
            grading: self.grading.clone(),
            products,
            unit: self.unit.as_ref().map(|u| u.terms.iter().map(|(&i, c)| (i, c.clone())).collect()),
        }
    }

    pub fn from_doc(group: &Group, doc: &StructureDoc) -> Result<StructureAlgebra, GalgError> {
        let n = doc.grading.len();
        let mut table = vec![Prod::Zero; n * n];
        for p in &doc.products {
            if p.left >= n || p.right >= n {
                return Err(GalgError::Shape);
            }
            let mut e = Elem::zero();
            for (k, c) in &p.terms {
                e.add_term(*k, c.clone());
            }
            table[p.left * n + p.right] = match e.as_monomial() {
                Some((k, r)) => Prod::Mono(k, r),
                None if e.is_zero() => Prod::Zero,
                None => Prod::Sparse(e.terms.into_iter().collect()),
            };
        }
        let unit = doc.unit.as_ref().map(|u| {
            let mut e = Elem::zero();
            for (k, c) in u {
                e.add_term(*k, c.clone());
            }
            e
        });
        StructureAlgebra::new(group.clone(), doc.grading.clone(), table, unit)
    }
}

fn push(acc: &mut BTreeMap<usize, Cyclo>, k: usize, c: Cyclo) {
    match acc.get_mut(&k) {
        Some(x) => *x = &*x + &c,
        None => {
            acc.insert(k, c);
        }
    }
}

pub(crate) fn same_group(a: &Group, b: &Group) -> bool {
    std::sync::Arc::ptr_eq(a, b) || **a == **b
}

/// JSON form of a structure-constant algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureDoc {
    pub grading: Vec<usize>,
    pub products: Vec<ProductDoc>,
    #[serde(default)]
    pub unit: Option<Vec<(usize, Cyclo)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductDoc {
    pub left: usize,
    pub right: usize,
    pub terms: Vec<(usize, Cyclo)>,
}
