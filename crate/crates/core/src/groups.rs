//! Finite groups as validated Cayley tables, with the subgroup, coset and
//! transversal services the embedding criteria need.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("operation table is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("operation table is not a Latin square")]
    NotLatinSquare,
    #[error("operation table has no identity")]
    NoIdentity,
    #[error("operands live in different groups")]
    MismatchedParent,
    #[error("element set is not a subgroup")]
    NotSubgroup,
    #[error("element {0} out of range for group of order {1}")]
    ElementOutOfRange(usize, usize),
    #[error("tuple must be nonempty")]
    EmptyTuple,
    #[error("invalid group description: {0}")]
    Invalid(String),
}

/// JSON description of a group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic { n: usize },
    Product { factors: Vec<GroupSpec> },
    Table { table: Vec<Vec<usize>> },
}

/// A finite group on the dense index set `0..order`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    abelian: bool,
    /// Cyclic factor orders when the group was built as a product of cyclic groups;
    /// element index is the mixed-radix number with the first factor most significant.
    cyclic_factors: Option<Vec<usize>>,
}

pub type Group = Arc<FiniteGroup>;

const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;
const SAMPLED_ASSOC_TRIPLES: usize = 200_000;

impl FiniteGroup {
    pub fn build(spec: &GroupSpec) -> Result<Group, GroupError> {
        Ok(Arc::new(Self::build_raw(spec)?))
    }

    fn build_raw(spec: &GroupSpec) -> Result<FiniteGroup, GroupError> {
        match spec {
            GroupSpec::Cyclic { n } => {
                if *n == 0 {
                    return Err(GroupError::Invalid("cyclic order must be positive".into()));
                }
                Ok(Self::cyclic_raw(*n))
            }
            GroupSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(GroupError::Invalid("product needs at least one factor".into()));
                }
                let parts = factors.iter().map(Self::build_raw).collect::<Result<Vec<_>, _>>()?;
                Ok(Self::product_raw(&parts))
            }
            GroupSpec::Table { table } => Self::from_table_raw(table.clone()),
        }
    }

    pub fn cyclic(n: usize) -> Group {
        Arc::new(Self::cyclic_raw(n))
    }

    fn cyclic_raw(n: usize) -> FiniteGroup {
        let table = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inverses = (0..n).map(|a| (n - a) % n).collect();
        FiniteGroup { order: n, table, identity: 0, inverses, abelian: true, cyclic_factors: Some(vec![n]) }
    }

    /// Direct product of finitely many cyclic groups.
    pub fn abelian(orders: &[usize]) -> Group {
        let parts: Vec<_> = orders.iter().map(|&n| Self::cyclic_raw(n)).collect();
        Arc::new(Self::product_raw(&parts))
    }

    pub fn product(factors: &[Group]) -> Group {
        let parts: Vec<FiniteGroup> = factors.iter().map(|g| (**g).clone()).collect();
        Arc::new(Self::product_raw(&parts))
    }

    fn product_raw(parts: &[FiniteGroup]) -> FiniteGroup {
        let orders: Vec<usize> = parts.iter().map(|p| p.order).collect();
        let n: usize = orders.iter().product();
        let decode = |mut x: usize| {
            let mut c = vec![0; parts.len()];
            for i in (0..parts.len()).rev() {
                c[i] = x % orders[i];
                x /= orders[i];
            }
            c
        };
        let encode = |c: &[usize]| c.iter().zip(&orders).fold(0, |acc, (&ci, &oi)| acc * oi + ci);
        let coords: Vec<Vec<usize>> = (0..n).map(decode).collect();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let c: Vec<usize> = parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.mul(coords[a][i], coords[b][i]))
                    .collect();
                table[a * n + b] = encode(&c);
            }
        }
        let identity = encode(&parts.iter().map(|p| p.identity).collect::<Vec<_>>());
        let inverses = (0..n)
            .map(|a| encode(&parts.iter().enumerate().map(|(i, p)| p.inv(coords[a][i])).collect::<Vec<_>>()))
            .collect();
        let cyclic_factors = parts
            .iter()
            .map(|p| p.cyclic_factors.clone())
            .collect::<Option<Vec<_>>>()
            .map(|v| v.concat());
        FiniteGroup {
            order: n,
            table,
            identity,
            inverses,
            abelian: parts.iter().all(|p| p.abelian),
            cyclic_factors,
        }
    }

    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Group, GroupError> {
        Ok(Arc::new(Self::from_table_raw(table)?))
    }

    fn from_table_raw(rows: Vec<Vec<usize>>) -> Result<FiniteGroup, GroupError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(GroupError::NotLatinSquare);
        }
        let mut table = vec![0; n * n];
        for (a, row) in rows.iter().enumerate() {
            let mut seen = vec![false; n];
            for (b, &c) in row.iter().enumerate() {
                if c >= n || seen[c] {
                    return Err(GroupError::NotLatinSquare);
                }
                seen[c] = true;
                table[a * n + b] = c;
            }
        }
        for b in 0..n {
            let mut seen = vec![false; n];
            for a in 0..n {
                let c = table[a * n + b];
                if seen[c] {
                    return Err(GroupError::NotLatinSquare);
                }
                seen[c] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] == x && table[x * n + e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let check = |a: usize, b: usize, c: usize| {
            let l = table[table[a * n + b] * n + c];
            let r = table[a * n + table[b * n + c]];
            if l == r {
                Ok(())
            } else {
                Err(GroupError::NotAssociative(a, b, c))
            }
        };
        if n <= EXHAUSTIVE_ASSOC_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..SAMPLED_ASSOC_TRIPLES {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        // Latin square plus identity means each row hits e exactly once.
        let inverses = (0..n)
            .map(|a| (0..n).find(|&b| table[a * n + b] == identity).unwrap())
            .collect::<Vec<_>>();
        let abelian = (0..n).all(|a| (0..n).all(|b| table[a * n + b] == table[b * n + a]));
        Ok(FiniteGroup { order: n, table, identity, inverses, abelian, cyclic_factors: None })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn cyclic_factors(&self) -> Option<&[usize]> {
        self.cyclic_factors.as_deref()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// `g·h·g⁻¹`.
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn mul_all(&self, xs: &[usize]) -> usize {
        xs.iter().fold(self.identity, |acc, &x| self.mul(acc, x))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Coordinates of an element of a product of cyclic groups.
    pub fn coords(&self, mut a: usize) -> Option<Vec<usize>> {
        let f = self.cyclic_factors.as_ref()?;
        let mut c = vec![0; f.len()];
        for i in (0..f.len()).rev() {
            c[i] = a % f[i];
            a /= f[i];
        }
        Some(c)
    }

    pub fn from_coords(&self, c: &[usize]) -> Option<usize> {
        let f = self.cyclic_factors.as_ref()?;
        if c.len() != f.len() {
            return None;
        }
        Some(c.iter().zip(f).fold(0, |acc, (&ci, &oi)| acc * oi + ci % oi))
    }

    pub fn check_element(&self, a: usize) -> Result<usize, GroupError> {
        if a < self.order {
            Ok(a)
        } else {
            Err(GroupError::ElementOutOfRange(a, self.order))
        }
    }

    pub fn whole(self: &Arc<Self>) -> Subgroup {
        Subgroup { parent: self.clone(), elements: (0..self.order).collect() }
    }

    pub fn trivial(self: &Arc<Self>) -> Subgroup {
        Subgroup { parent: self.clone(), elements: vec![self.identity] }
    }

    /// The subgroup generated by `gens`.
    pub fn closure(self: &Arc<Self>, gens: &[usize]) -> Result<Subgroup, GroupError> {
        for &g in gens {
            self.check_element(g)?;
        }
        let mut inside = vec![false; self.order];
        inside[self.identity] = true;
        let mut members = vec![self.identity];
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        Ok(Subgroup { parent: self.clone(), elements: members })
    }

    /// Every subgroup, sorted by order and then by elements.
    pub fn subgroups(self: &Arc<Self>) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        found.insert(vec![self.identity]);
        let mut frontier = vec![vec![self.identity]];
        while let Some(cur) = frontier.pop() {
            for x in self.elements() {
                if cur.binary_search(&x).is_ok() {
                    continue;
                }
                let mut gens = cur.clone();
                gens.push(x);
                let next = self.closure(&gens).expect("elements in range").elements;
                if found.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        let mut out: Vec<Subgroup> = found.into_iter().map(|elements| Subgroup { parent: self.clone(), elements }).collect();
        out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
        out
    }

    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.cyclic_factors {
            Some(fs) => write!(f, "Abelian{:?}", fs),
            None => write!(f, "Group(order {})", self.order),
        }
    }
}

fn same_parent(a: &Group, b: &Group) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A subgroup, stored as a sorted list of element indices.
#[derive(Clone)]
pub struct Subgroup {
    parent: Group,
    elements: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && same_parent(&self.parent, &other.parent)
    }
}

impl Eq for Subgroup {}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.elements)
    }
}

/// JSON form of a subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupDoc {
    pub elements: Vec<usize>,
}

impl Subgroup {
    /// Validate an explicit element set.
    pub fn new(parent: &Group, elements: &[usize]) -> Result<Subgroup, GroupError> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        for &x in &set {
            parent.check_element(x)?;
        }
        if !set.contains(&parent.identity) {
            return Err(GroupError::NotSubgroup);
        }
        for &a in &set {
            if !set.contains(&parent.inv(a)) {
                return Err(GroupError::NotSubgroup);
            }
            for &b in &set {
                if !set.contains(&parent.mul(a, b)) {
                    return Err(GroupError::NotSubgroup);
                }
            }
        }
        Ok(Subgroup { parent: parent.clone(), elements: set.into_iter().collect() })
    }

    pub fn parent(&self) -> &Group {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn index_of(&self, x: usize) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        same_parent(&self.parent, &other.parent) && self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn to_doc(&self) -> SubgroupDoc {
        SubgroupDoc { elements: self.elements.clone() }
    }

    fn check_parent(&self, other: &Subgroup) -> Result<(), GroupError> {
        if same_parent(&self.parent, &other.parent) {
            Ok(())
        } else {
            Err(GroupError::MismatchedParent)
        }
    }

    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup, GroupError> {
        self.check_parent(other)?;
        let elements = self.elements.iter().copied().filter(|&x| other.contains(x)).collect();
        Ok(Subgroup { parent: self.parent.clone(), elements })
    }

    /// The subgroup generated by `self ∪ other`.
    pub fn product_subgroup(&self, other: &Subgroup) -> Result<Subgroup, GroupError> {
        self.check_parent(other)?;
        let gens: Vec<usize> = self.elements.iter().chain(&other.elements).copied().collect();
        self.parent.closure(&gens)
    }

    /// Canonical key of the right coset `H·x`: its least element.
    pub fn coset_key(&self, x: usize) -> usize {
        self.elements.iter().map(|&h| self.parent.mul(h, x)).min().unwrap()
    }

    /// `coset_key` for every element of the parent group.
    pub fn coset_keys(&self) -> Vec<usize> {
        (0..self.parent.order).map(|x| self.coset_key(x)).collect()
    }

    pub fn right_coset(&self, x: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.elements.iter().map(|&h| self.parent.mul(h, x)).collect();
        c.sort_unstable();
        c
    }

    pub fn right_cosets(&self) -> Vec<Vec<usize>> {
        self.transversal().iter().map(|&x| self.right_coset(x)).collect()
    }

    /// One representative per right coset `H·x` in the parent group.
    pub fn transversal(&self) -> Vec<usize> {
        self.transversal_in(&self.parent.whole()).unwrap()
    }

    /// One representative per right coset of `self` inside `ambient`: the
    /// identity for `H` itself, then the least element of each other coset,
    /// ascending.
    pub fn transversal_in(&self, ambient: &Subgroup) -> Result<Vec<usize>, GroupError> {
        self.check_parent(ambient)?;
        if !self.is_subgroup_of(ambient) {
            return Err(GroupError::NotSubgroup);
        }
        let e = self.parent.identity;
        let e_key = self.coset_key(e);
        let keys: BTreeSet<usize> = ambient.elements.iter().map(|&x| self.coset_key(x)).collect();
        let mut out = vec![e];
        out.extend(keys.into_iter().filter(|&k| k != e_key));
        Ok(out)
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        g.elements().all(|x| self.elements.iter().all(|&h| self.contains(g.conj(x, h))))
    }
}

/// Quotient transversal of `h` in `g_prime` (both subgroups of one group).
pub fn quotient_transversal(h: &Subgroup, g_prime: &Subgroup) -> Result<Vec<usize>, GroupError> {
    h.transversal_in(g_prime)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Group {
        // permutations of {0,1,2} in lexicographic order, composed as (p∘q)(i) = p(q(i))
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|p| perms.iter().map(|q| idx([p[q[0]], p[q[1]], p[q[2]]])).collect())
            .collect();
        FiniteGroup::from_table(table).unwrap()
    }

    #[test]
    fn cyclic_four() {
        let g = FiniteGroup::build(&GroupSpec::Cyclic { n: 4 }).unwrap();
        assert_eq!(g.inv(1), 3);
        assert!(g.is_abelian());
    }

    #[test]
    fn klein_is_abelian() {
        let g = FiniteGroup::build(&GroupSpec::Product {
            factors: vec![GroupSpec::Cyclic { n: 2 }, GroupSpec::Cyclic { n: 2 }],
        })
        .unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_abelian());
        assert!(g.elements().all(|x| g.mul(x, x) == 0));
    }

    #[test]
    fn s3_is_not_abelian() {
        let g = s3();
        assert!(!g.is_abelian());
        assert_ne!(g.mul(1, 2), g.mul(2, 1));
    }

    #[test]
    fn bad_tables_rejected() {
        assert_eq!(FiniteGroup::from_table(vec![vec![0, 1], vec![0, 1]]), Err(GroupError::NotLatinSquare));
        // identity need not be index 0
        let g = FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.identity(), 1);
        // quasigroup x∘y = -x-y mod 3: Latin, no identity
        let t = (0..3).map(|x| (0..3).map(|y| (6 - x - y) % 3).collect()).collect();
        assert_eq!(FiniteGroup::from_table(t), Err(GroupError::NoIdentity));
        // loop of order 5 with identity that is not associative
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(t), Err(GroupError::NotAssociative(..))));
    }

    #[test]
    fn coset_transversal_z4() {
        let g = FiniteGroup::cyclic(4);
        let h = Subgroup::new(&g, &[0, 2]).unwrap();
        assert_eq!(h.transversal(), vec![0, 1]);
        assert_eq!(h.right_cosets(), vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn product_and_intersection_z10() {
        let g = FiniteGroup::cyclic(10);
        let a = Subgroup::new(&g, &[0, 2, 4, 6, 8]).unwrap();
        let b = Subgroup::new(&g, &[0, 5]).unwrap();
        assert_eq!(a.product_subgroup(&b).unwrap().elements(), (0..10).collect::<Vec<_>>().as_slice());
        assert_eq!(a.intersection(&b).unwrap().elements(), &[0]);
        let c = Subgroup::new(&g, &[0, 2, 4, 6, 8]).unwrap();
        let d = Subgroup::new(&g, &[0, 5]).unwrap();
        assert_eq!(c.product_subgroup(&d).unwrap().order(), 10);
    }

    #[test]
    fn mismatched_parent() {
        let a = FiniteGroup::cyclic(4).whole();
        let b = FiniteGroup::cyclic(6).whole();
        assert_eq!(a.intersection(&b), Err(GroupError::MismatchedParent));
    }

    #[test]
    fn quotient_transversal_counts() {
        let g = FiniteGroup::abelian(&[2, 4]);
        let h = g.closure(&[g.from_coords(&[0, 2]).unwrap()]).unwrap();
        let gp = g.closure(&[g.from_coords(&[1, 0]).unwrap(), g.from_coords(&[0, 2]).unwrap()]).unwrap();
        let t = quotient_transversal(&h, &gp).unwrap();
        assert_eq!(t.len() * h.order(), gp.order());
        assert_eq!(t[0], g.identity());
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(FiniteGroup::cyclic(6).subgroups().len(), 4);
        assert_eq!(FiniteGroup::abelian(&[2, 2]).subgroups().len(), 5);
        assert_eq!(s3().subgroups().len(), 6);
    }

    #[test]
    fn s3_right_cosets() {
        let g = s3();
        let h = g.closure(&[1]).unwrap();
        let t = h.transversal();
        assert_eq!(t.len(), 3);
        let mut all: Vec<usize> = t.iter().flat_map(|&x| h.right_coset(x)).collect();
        all.sort_unstable();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
        assert!(!h.is_normal());
    }
}
