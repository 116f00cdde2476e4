//! Normalized 2-cocycles with root-of-unity values, their alternating
//! bicharacters, splittings on isotropic subgroups and the minimal
//! irreducible representation of an abelian twisted group algebra.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{Group, GroupError, Subgroup, SubgroupDoc};
use crate::linalg::{rank, MonoMat};
use crate::scalars::{Cyclo, Root};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CocycleError {
    #[error("cocycle identity fails at ({0}, {1}, {2})")]
    CocycleIdentityViolated(usize, usize, usize),
    #[error("cocycle value is not a root of unity")]
    NotRootOfUnity,
    #[error("cocycles live on different subgroups")]
    MismatchedGroup,
    #[error("target is not a subgroup of the cocycle's domain")]
    NotSubgroup,
    #[error("operation needs an abelian group")]
    NonAbelianGroup,
    #[error("cocycle is not symmetric on the requested subgroup")]
    NotSymmetric,
    #[error("no splitting found")]
    NoSolution,
    #[error("element {0} is outside the cocycle's domain")]
    ElementOutsideGroup(usize),
    #[error("not a transversal containing the identity")]
    NotTransversal,
    #[error("value table has the wrong shape")]
    Shape,
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

const NONE: usize = usize::MAX;

/// A normalized 2-cocycle `H × H → μ_∞` on a subgroup `H` of the ambient group.
#[derive(Clone)]
pub struct Cocycle {
    dom: Subgroup,
    local: Arc<Vec<usize>>,
    vals: Vec<Root>,
}

impl std::fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cocycle on {:?}: [", self.dom)?;
        for (i, v) in self.vals.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, "]")
    }
}

impl PartialEq for Cocycle {
    fn eq(&self, other: &Self) -> bool {
        self.dom == other.dom && self.vals == other.vals
    }
}

impl Eq for Cocycle {}

fn local_index(dom: &Subgroup) -> Arc<Vec<usize>> {
    let mut local = vec![NONE; dom.parent().order()];
    for (i, &x) in dom.elements().iter().enumerate() {
        local[x] = i;
    }
    Arc::new(local)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp<'a> {
    Ratio(&'a Cocycle),
    Product(&'a Cocycle),
    Restrict(&'a Subgroup),
    Conjugate(usize),
}

impl Cocycle {
    pub fn trivial(dom: &Subgroup) -> Cocycle {
        let n = dom.order();
        Cocycle { dom: dom.clone(), local: local_index(dom), vals: vec![Root::one(); n * n] }
    }

    /// Build from a function of ambient element pairs; checks the cocycle
    /// identity and rescales so that `α(e, ·) = α(·, e) = 1`.
    pub fn from_fn(dom: &Subgroup, f: impl Fn(usize, usize) -> Root) -> Result<Cocycle, CocycleError> {
        let els = dom.elements();
        let vals = els.iter().flat_map(|&a| els.iter().map(move |&b| (a, b))).map(|(a, b)| f(a, b)).collect();
        Self::from_roots(dom, vals)
    }

    /// `vals` is row-major over the sorted elements of `dom`.
    pub fn from_roots(dom: &Subgroup, vals: Vec<Root>) -> Result<Cocycle, CocycleError> {
        let n = dom.order();
        if vals.len() != n * n {
            return Err(CocycleError::Shape);
        }
        let mut c = Cocycle { dom: dom.clone(), local: local_index(dom), vals };
        c.check_identity()?;
        let e = dom.parent().identity();
        let ee = c.get(e, e);
        if !ee.is_one() {
            let s = ee.inv();
            for v in c.vals.iter_mut() {
                *v = v.mul(s);
            }
        }
        Ok(c)
    }

    pub fn verify_and_normalize(dom: &Subgroup, raw: &[Vec<Cyclo>]) -> Result<Cocycle, CocycleError> {
        let n = dom.order();
        if raw.len() != n || raw.iter().any(|r| r.len() != n) {
            return Err(CocycleError::Shape);
        }
        let mut vals = Vec::with_capacity(n * n);
        for row in raw {
            for x in row {
                vals.push(x.to_root().ok_or(CocycleError::NotRootOfUnity)?);
            }
        }
        Self::from_roots(dom, vals)
    }

    fn check_identity(&self) -> Result<(), CocycleError> {
        let g = self.dom.parent();
        let els = self.dom.elements();
        for &u in els {
            for &v in els {
                let uv = g.mul(u, v);
                for &w in els {
                    let lhs = self.get(u, v).mul(self.get(uv, w));
                    let rhs = self.get(u, g.mul(v, w)).mul(self.get(v, w));
                    if lhs != rhs {
                        return Err(CocycleError::CocycleIdentityViolated(u, v, w));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &Subgroup {
        &self.dom
    }

    pub fn group(&self) -> &Group {
        self.dom.parent()
    }

    /// `α(a, b)` for ambient indices `a, b` in the domain.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> Root {
        let (i, j) = (self.local[a], self.local[b]);
        debug_assert!(i != NONE && j != NONE, "element outside cocycle domain");
        self.vals[i * self.dom.order() + j]
    }

    pub fn try_get(&self, a: usize, b: usize) -> Result<Root, CocycleError> {
        for x in [a, b] {
            if x >= self.local.len() || self.local[x] == NONE {
                return Err(CocycleError::ElementOutsideGroup(x));
            }
        }
        Ok(self.get(a, b))
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.local.len() && self.local[x] != NONE
    }

    pub fn is_trivial(&self) -> bool {
        self.vals.iter().all(|v| v.is_one())
    }

    /// Least common multiple of the orders of all values.
    pub fn value_order(&self) -> u32 {
        self.vals.iter().fold(1, |acc, v| crate::scalars::lcm(acc, v.order()))
    }

    pub fn combine(&self, op: CombineOp<'_>) -> Result<Cocycle, CocycleError> {
        match op {
            CombineOp::Ratio(o) => self.ratio(o),
            CombineOp::Product(o) => self.product(o),
            CombineOp::Restrict(h) => self.restrict(h),
            CombineOp::Conjugate(g) => self.conjugate(g),
        }
    }

    pub fn ratio(&self, o: &Cocycle) -> Result<Cocycle, CocycleError> {
        if self.dom != o.dom {
            return Err(CocycleError::MismatchedGroup);
        }
        let vals = self.vals.iter().zip(&o.vals).map(|(a, b)| a.div(*b)).collect();
        Self::from_roots(&self.dom, vals)
    }

    pub fn product(&self, o: &Cocycle) -> Result<Cocycle, CocycleError> {
        if self.dom != o.dom {
            return Err(CocycleError::MismatchedGroup);
        }
        let vals = self.vals.iter().zip(&o.vals).map(|(a, b)| a.mul(*b)).collect();
        Self::from_roots(&self.dom, vals)
    }

    pub fn inverse(&self) -> Cocycle {
        Cocycle { dom: self.dom.clone(), local: self.local.clone(), vals: self.vals.iter().map(|v| v.inv()).collect() }
    }

    pub fn restrict(&self, h: &Subgroup) -> Result<Cocycle, CocycleError> {
        if !h.is_subgroup_of(&self.dom) {
            return Err(CocycleError::NotSubgroup);
        }
        Self::from_fn(h, |a, b| self.get(a, b))
    }

    /// `α_g(g h₁ g⁻¹, g h₂ g⁻¹) = α(h₁, h₂)` on the conjugate subgroup `gHg⁻¹`.
    pub fn conjugate(&self, g: usize) -> Result<Cocycle, CocycleError> {
        let grp = self.dom.parent().clone();
        grp.check_element(g)?;
        let conj: Vec<usize> = self.dom.elements().iter().map(|&h| grp.conj(g, h)).collect();
        let dom = Subgroup::new(&grp, &conj)?;
        let gi = grp.inv(g);
        Self::from_fn(&dom, |a, b| self.get(grp.conj(gi, a), grp.conj(gi, b)))
    }

    /// `α · δν` where `δν(a,b) = ν(a)ν(b)/ν(ab)`.
    pub fn times_coboundary(&self, nu: impl Fn(usize) -> Root) -> Cocycle {
        let g = self.dom.parent();
        Self::from_fn(&self.dom, |a, b| self.get(a, b).mul(nu(a)).mul(nu(b)).div(nu(g.mul(a, b))))
            .expect("a coboundary twist of a cocycle is a cocycle")
    }

    /// Scalar of the left-to-right product `U_{g₁}⋯U_{gₙ} = α(ḡ) U_{g₁⋯gₙ}`.
    pub fn iterated_alpha(&self, gs: &[usize]) -> Result<Root, CocycleError> {
        for &x in gs {
            if !self.contains(x) {
                return Err(CocycleError::ElementOutsideGroup(x));
            }
        }
        Ok(self.iterated_alpha_unchecked(gs))
    }

    pub fn iterated_alpha_unchecked(&self, gs: &[usize]) -> Root {
        let g = self.dom.parent();
        let mut acc = Root::one();
        let Some((&first, rest)) = gs.split_first() else {
            return acc;
        };
        let mut prod = first;
        for &x in rest {
            acc = acc.mul(self.get(prod, x));
            prod = g.mul(prod, x);
        }
        acc
    }

    fn require_abelian(&self) -> Result<(), CocycleError> {
        let g = self.dom.parent();
        let els = self.dom.elements();
        if els.iter().all(|&a| els.iter().all(|&b| g.mul(a, b) == g.mul(b, a))) {
            Ok(())
        } else {
            Err(CocycleError::NonAbelianGroup)
        }
    }

    /// `β(g,h) = α(g,h)/α(h,g)`.
    pub fn beta(&self, a: usize, b: usize) -> Root {
        self.get(a, b).div(self.get(b, a))
    }

    pub fn bicharacter(&self) -> Result<Bicharacter, CocycleError> {
        self.require_abelian()?;
        let els = self.dom.elements();
        let vals: Vec<Root> = els.iter().flat_map(|&a| els.iter().map(move |&b| (a, b))).map(|(a, b)| self.beta(a, b)).collect();
        let rad: Vec<usize> = els.iter().copied().filter(|&a| els.iter().all(|&b| self.beta(a, b).is_one())).collect();
        let radical = Subgroup::new(self.dom.parent(), &rad)?;
        Ok(Bicharacter { dom: self.dom.clone(), vals, radical })
    }

    /// A map `μ` on the domain with `α(a,b) = μ(a)μ(b)/μ(ab)`, aligned with
    /// the sorted domain elements.
    ///
    /// The domain is filtered by a chain of cyclic extensions
    /// `L₀ = {e} ⊂ L₁ ⊂ …`; at each step a unit `V_x = c·U_x` with
    /// `V_x^k = V_{x^k}` is adjoined, which extends the homomorphism
    /// `a ↦ V_a` because the twisted group algebra is commutative.
    pub fn coboundary_solve(&self) -> Result<Vec<Root>, CocycleError> {
        self.require_abelian()?;
        let g = self.dom.parent().clone();
        let els = self.dom.elements();
        if els.iter().any(|&a| els.iter().any(|&b| !self.beta(a, b).is_one())) {
            return Err(CocycleError::NotSymmetric);
        }
        let n = g.order();
        // inv_mu[x] = μ(x)⁻¹ for x in the current chain member
        let mut inv_mu: Vec<Option<Root>> = vec![None; n];
        inv_mu[g.identity()] = Some(Root::one());
        let mut members = vec![g.identity()];
        for &x in els {
            if inv_mu[x].is_some() {
                continue;
            }
            let mut k = 1;
            let mut xk = x;
            while inv_mu[xk].is_none() {
                xk = g.mul(xk, x);
                k += 1;
            }
            // U_x^k = λ U_{x^k}; need c^k λ = μ(x^k)⁻¹
            let lambda = self.iterated_alpha_unchecked(&vec![x; k]);
            let target = inv_mu[xk].unwrap().div(lambda);
            let c = Root::new(target.order() * k as u32, target.exp() as i64);
            let mut added = Vec::new();
            let mut xj = g.identity();
            let mut cj = Root::one();
            let mut lam_j = Root::one();
            for j in 0..k {
                if j > 0 {
                    lam_j = lam_j.mul(self.get(xj, x));
                    xj = g.mul(xj, x);
                    cj = cj.mul(c);
                }
                for &a in &members {
                    let y = g.mul(a, xj);
                    let v = inv_mu[a].unwrap().mul(cj).mul(lam_j).mul(self.get(a, xj));
                    if j == 0 {
                        continue;
                    }
                    debug_assert!(inv_mu[y].is_none());
                    inv_mu[y] = Some(v);
                    added.push(y);
                }
            }
            members.extend(added);
        }
        let mu: Vec<Root> = els.iter().map(|&a| inv_mu[a].map(|r| r.inv()).ok_or(CocycleError::NoSolution)).collect::<Result<_, _>>()?;
        let at = |x: usize| mu[self.dom.index_of(x).unwrap()];
        for &a in els {
            for &b in els {
                if self.get(a, b).mul(at(g.mul(a, b))) != at(a).mul(at(b)) {
                    return Err(CocycleError::NoSolution);
                }
            }
        }
        Ok(mu)
    }

    /// Rescale the basis along a transversal `T` of `H` in the domain so that
    /// the new cocycle satisfies `α̃(h, w) = 1` for `h ∈ H`, `w ∈ T`.
    /// Returns `α̃` and `ν` (aligned with the sorted domain) with `α̃ = α·δν`.
    pub fn transversal_normalize(&self, h: &Subgroup, t: &[usize]) -> Result<(Cocycle, Vec<Root>), CocycleError> {
        if !h.is_subgroup_of(&self.dom) {
            return Err(CocycleError::NotSubgroup);
        }
        let g = self.dom.parent();
        let e = g.identity();
        if !t.contains(&e) || t.len() * h.order() != self.dom.order() || t.iter().any(|&w| !self.contains(w)) {
            return Err(CocycleError::NotTransversal);
        }
        // ν(xw) = α(x,w)·ν₀(x)·ν₀(w), with ν₀ = α(e,e)⁻¹ at e and 1 elsewhere
        let c_inv = self.get(e, e).inv();
        let nu0 = |x: usize| if x == e { c_inv } else { Root::one() };
        let mut nu: Vec<Option<Root>> = vec![None; self.dom.order()];
        for &w in t {
            for &x in h.elements() {
                let i = self.dom.index_of(g.mul(x, w)).unwrap();
                if nu[i].is_some() {
                    return Err(CocycleError::NotTransversal);
                }
                nu[i] = Some(self.get(x, w).mul(nu0(x)).mul(nu0(w)));
            }
        }
        let nu: Vec<Root> = nu.into_iter().map(|v| v.unwrap()).collect();
        let at = |x: usize| nu[self.dom.index_of(x).unwrap()];
        let out = self.times_coboundary(at);
        for &x in h.elements() {
            for &w in t {
                if !out.get(x, w).is_one() {
                    return Err(CocycleError::Internal("transversal normalization".into()));
                }
            }
        }
        Ok((out, nu))
    }

    /// Minimal irreducible representation of `K^γH` for abelian `H`,
    /// induced from a splitting on a maximal isotropic subgroup.
    pub fn smallest_irrep(&self) -> Result<IrrepData, CocycleError> {
        let bc = self.bicharacter()?;
        let g = self.dom.parent().clone();
        let mut l = bc.radical.clone();
        for &x in self.dom.elements() {
            if l.contains(x) {
                continue;
            }
            if l.elements().iter().all(|&y| self.beta(x, y).is_one()) {
                let mut gens = l.elements().to_vec();
                gens.push(x);
                l = g.closure(&gens)?;
            }
        }
        let gamma_l = self.restrict(&l)?;
        let mu = gamma_l.coboundary_solve()?;
        let mu_at = |x: usize| mu[l.index_of(x).unwrap()];
        let t = l.transversal_in(&self.dom)?;
        let d = t.len();
        let keys: Vec<usize> = t.iter().map(|&w| l.coset_key(w)).collect();
        let slot = |x: usize| keys.iter().position(|&k| k == l.coset_key(x)).unwrap();
        // U_h v_w = γ(h,w) U_{hw} ⊗ 1 with hw = w'·l, and U_{w'l} = γ(w',l)⁻¹ U_{w'} U_l
        let rho: Vec<MonoMat> = self
            .dom
            .elements()
            .iter()
            .map(|&h| {
                let mut row_of = vec![0; d];
                let mut vals = vec![Root::one(); d];
                for (j, &w) in t.iter().enumerate() {
                    let hw = g.mul(h, w);
                    let i = slot(hw);
                    let w2 = t[i];
                    let lx = g.mul(g.inv(w2), hw);
                    row_of[j] = i;
                    vals[j] = self.get(h, w).div(self.get(w2, lx)).mul(mu_at(lx));
                }
                MonoMat { row_of, vals }
            })
            .collect();
        let data = IrrepData { dim: d, dom: self.dom.clone(), rho, isotropic: l, splitting: mu, radical: bc.radical };
        data.verify(self)?;
        Ok(data)
    }

    /// Ratio of the largest to the smallest Wedderburn component degree of `K^αH`.
    /// For abelian `H` every simple component has the same degree, so this is 1.
    pub fn phi_ratio(&self) -> Result<(u64, u64), CocycleError> {
        self.require_abelian()?;
        Ok((1, 1))
    }

    pub fn to_doc(&self) -> CocycleDoc {
        let n = self.dom.order();
        CocycleDoc {
            group: self.dom.to_doc(),
            values: (0..n).map(|i| (0..n).map(|j| self.vals[i * n + j].to_cyclo()).collect()).collect(),
        }
    }

    pub fn from_doc(g: &Group, doc: &CocycleDoc) -> Result<Cocycle, CocycleError> {
        let dom = Subgroup::new(g, &doc.group.elements)?;
        if doc.group.elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CocycleError::Shape);
        }
        Self::verify_and_normalize(&dom, &doc.values)
    }
}

/// JSON form: `{"group": {"elements": [...]}, "values": [[scalar, ...], ...]}`
/// with rows and columns in ascending element order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleDoc {
    pub group: SubgroupDoc,
    pub values: Vec<Vec<Cyclo>>,
}

/// The alternating bicharacter `β(g,h) = α(g,h)/α(h,g)` with its radical.
#[derive(Debug, Clone)]
pub struct Bicharacter {
    dom: Subgroup,
    vals: Vec<Root>,
    pub radical: Subgroup,
}

impl Bicharacter {
    pub fn get(&self, a: usize, b: usize) -> Root {
        let i = self.dom.index_of(a).expect("element in domain");
        let j = self.dom.index_of(b).expect("element in domain");
        self.vals[i * self.dom.order() + j]
    }

    pub fn domain(&self) -> &Subgroup {
        &self.dom
    }
}

/// A minimal irreducible representation `ρ: K^γH → M_d(K)`.
#[derive(Debug, Clone)]
pub struct IrrepData {
    pub dim: usize,
    dom: Subgroup,
    /// `ρ(U_h)` for `h` in ascending order of the domain.
    pub rho: Vec<MonoMat>,
    pub isotropic: Subgroup,
    /// `μ` on the isotropic subgroup, aligned with its sorted elements.
    pub splitting: Vec<Root>,
    pub radical: Subgroup,
}

impl IrrepData {
    pub fn rho_of(&self, h: usize) -> &MonoMat {
        &self.rho[self.dom.index_of(h).expect("element in domain")]
    }

    pub fn domain(&self) -> &Subgroup {
        &self.dom
    }

    /// Dimension of `span{ρ(U_h)}`.
    pub fn span_dim(&self) -> usize {
        rank(self.rho.iter().map(|m| m.to_dense()), self.dim * self.dim)
    }

    pub fn verify(&self, gamma: &Cocycle) -> Result<(), CocycleError> {
        let g = self.dom.parent();
        let fail = |m: &str| Err(CocycleError::Internal(m.to_string()));
        if *self.rho_of(g.identity()) != MonoMat::identity(self.dim) {
            return fail("rho(U_e) is not the identity");
        }
        for &a in self.dom.elements() {
            for &b in self.dom.elements() {
                let lhs = self.rho_of(a).mul(self.rho_of(b));
                let rhs = self.rho_of(g.mul(a, b)).scale(gamma.get(a, b));
                if lhs != rhs {
                    return fail("rho is not multiplicative");
                }
            }
        }
        let d2 = self.dim * self.dim;
        if d2 * self.radical.order() != self.dom.order() {
            return fail("d^2 differs from the radical index");
        }
        if self.span_dim() != d2 {
            return fail("rho does not span a full matrix algebra");
        }
        Ok(())
    }

    pub fn to_doc(&self) -> IrrepDoc {
        let d = self.dim;
        IrrepDoc {
            dim: d,
            isotropic: self.isotropic.to_doc(),
            radical: self.radical.to_doc(),
            rho: self
                .dom
                .elements()
                .iter()
                .zip(&self.rho)
                .map(|(&h, m)| {
                    let dense = m.to_dense();
                    IrrepEntry { element: h, matrix: dense.chunks(d).map(|r| r.to_vec()).collect() }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrrepEntry {
    pub element: usize,
    pub matrix: Vec<Vec<Cyclo>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrrepDoc {
    pub dim: usize,
    pub isotropic: SubgroupDoc,
    pub radical: SubgroupDoc,
    pub rho: Vec<IrrepEntry>,
}

/// The bicharacter cocycle `α(x,y) = Π_{i<j} ζ_{g_ij}^{c_ij·x_j·y_i}` on a product
/// of cyclic groups, where `g_ij = gcd(n_i, n_j)` and `exps` lists `c_ij` for
/// the pairs `i < j` in lexicographic order.
pub fn bicharacter_cocycle(g: &Group, exps: &[u32]) -> Result<Cocycle, CocycleError> {
    let f = g.cyclic_factors().ok_or(CocycleError::NonAbelianGroup)?.to_vec();
    let pairs: Vec<(usize, usize)> = (0..f.len()).flat_map(|i| (i + 1..f.len()).map(move |j| (i, j))).collect();
    if exps.len() != pairs.len() {
        return Err(CocycleError::Shape);
    }
    Cocycle::from_fn(&g.whole(), |x, y| {
        let (cx, cy) = (g.coords(x).unwrap(), g.coords(y).unwrap());
        pairs.iter().zip(exps).fold(Root::one(), |acc, (&(i, j), &c)| {
            let gij = num_integer::gcd(f[i], f[j]) as u32;
            acc.mul(Root::new(gij, c as i64 * cx[j] as i64 * cy[i] as i64))
        })
    })
}

/// One bicharacter cocycle for every choice of exponents `c_ij ∈ Z/g_ij`; on a
/// product of cyclic groups these represent every cohomology class.
pub fn enumerate_bicharacter_cocycles(g: &Group) -> Result<Vec<Cocycle>, CocycleError> {
    let f = g.cyclic_factors().ok_or(CocycleError::NonAbelianGroup)?.to_vec();
    let mods: Vec<u32> = (0..f.len())
        .flat_map(|i| (i + 1..f.len()).map(move |j| (i, j)))
        .map(|(i, j)| num_integer::gcd(f[i], f[j]) as u32)
        .collect();
    let total: u32 = mods.iter().product();
    (0..total)
        .map(|mut k| {
            let exps: Vec<u32> = mods
                .iter()
                .map(|&m| {
                    let e = k % m;
                    k /= m;
                    e
                })
                .collect();
            bicharacter_cocycle(g, &exps)
        })
        .collect()
}
