//! Evaluation on graded basis assignments.
//!
//! Monomial algebras (every basis product is a root of unity times a basis
//! vector) are evaluated with integer root exponents: a coefficient is stored
//! as integer counts over `ζ_L^k`, and the field is only touched when an
//! accumulated output is nonzero as a count vector. Words share prefixes
//! through a trie, and a zero prefix prunes its subtree.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::poly::MultilinearPoly;
use super::IdentityError;
use crate::galg::{Elem, Prod, StructureAlgebra};
use crate::linalg::Echelon;
use crate::scalars::{lcm, Cyclo};

const NONE: u32 = u32::MAX;

/// Precomputed product table with root exponents.
pub(crate) struct Engine<'a> {
    pub alg: &'a StructureAlgebra,
    n: usize,
    /// `ζ_m` generates every structure constant; 0 for non-monomial algebras.
    m: u32,
    table: Vec<u32>,
    exps: Vec<u32>,
}

impl<'a> Engine<'a> {
    pub fn new(alg: &'a StructureAlgebra) -> Self {
        let n = alg.dim();
        if !alg.is_monomial() {
            return Engine { alg, n, m: 0, table: Vec::new(), exps: Vec::new() };
        }
        let mut m = 1;
        for i in 0..n {
            for j in 0..n {
                if let Prod::Mono(_, r) = alg.prod(i, j) {
                    m = lcm(m, r.order());
                }
            }
        }
        let mut table = vec![NONE; n * n];
        let mut exps = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                if let Prod::Mono(k, r) = alg.prod(i, j) {
                    table[i * n + j] = *k as u32;
                    exps[i * n + j] = r.exp_in(m);
                }
            }
        }
        Engine { alg, n, m, table, exps }
    }

    fn monomial(&self) -> bool {
        self.m > 0
    }

    #[inline]
    fn step(&self, i: usize, j: usize) -> Option<(usize, u32)> {
        let t = i * self.n + j;
        let k = self.table[t];
        (k != NONE).then(|| (k as usize, self.exps[t]))
    }
}

struct Node {
    children: Vec<(u16, u32)>,
    coeff: Option<u32>,
}

/// A flat polynomial prepared for repeated evaluation on a monomial algebra.
struct Compiled {
    /// Exponent modulus of the accumulators; a multiple of the engine's `m`.
    l: u32,
    trie: Vec<Node>,
    coeffs: Vec<Vec<(u32, i64)>>,
    /// All coefficients were multiplied by this to make them integral.
    den: BigInt,
}

impl Compiled {
    fn new(f: &MultilinearPoly, eng: &Engine) -> Option<Compiled> {
        let terms = f.terms();
        let mut l = eng.m;
        let mut den = BigInt::one();
        for c in terms.values() {
            l = lcm(l, c.conductor());
            for q in c.coeffs() {
                den = den.lcm(q.denom());
            }
        }
        let mut trie = vec![Node { children: Vec::new(), coeff: None }];
        let mut coeffs = Vec::with_capacity(terms.len());
        for (w, c) in &terms {
            let step = l / c.conductor();
            let mut counts = Vec::new();
            for (i, q) in c.coeffs().iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let v = (q * &den).to_integer().to_i64()?;
                counts.push((i as u32 * step, v));
            }
            let mut node = 0usize;
            for &v in w {
                node = match trie[node].children.iter().find(|(x, _)| *x == v) {
                    Some(&(_, c)) => c as usize,
                    None => {
                        trie.push(Node { children: Vec::new(), coeff: None });
                        let id = trie.len() - 1;
                        trie[node].children.push((v, id as u32));
                        id
                    }
                };
            }
            trie[node].coeff = Some(coeffs.len() as u32);
            coeffs.push(counts);
        }
        Some(Compiled { l, trie, coeffs, den })
    }
}

/// Per-output accumulators over `ζ_L^k`, reused across assignments.
struct Acc {
    l: usize,
    vals: Vec<i64>,
    touched: Vec<usize>,
    flag: Vec<bool>,
}

impl Acc {
    fn new(dim: usize, l: u32) -> Acc {
        Acc { l: l as usize, vals: vec![0; dim * l as usize], touched: Vec::new(), flag: vec![false; dim] }
    }

    fn clear(&mut self) {
        for &i in &self.touched {
            self.vals[i * self.l..(i + 1) * self.l].iter_mut().for_each(|x| *x = 0);
            self.flag[i] = false;
        }
        self.touched.clear();
    }
}

struct MonoEval<'e, 'a> {
    eng: &'e Engine<'a>,
    comp: Compiled,
    scale: u32,
    acc: Acc,
}

impl<'e, 'a> MonoEval<'e, 'a> {
    fn new(eng: &'e Engine<'a>, f: &MultilinearPoly) -> Option<Self> {
        let comp = Compiled::new(f, eng)?;
        let scale = comp.l / eng.m;
        let acc = Acc::new(eng.n, comp.l);
        Some(MonoEval { eng, comp, scale, acc })
    }

    fn dfs(&mut self, asg: &[usize], node: usize, state: Option<(usize, u32)>) {
        let l = self.comp.l;
        if let (Some(ci), Some((idx, e))) = (self.comp.trie[node].coeff, state) {
            if !self.acc.flag[idx] {
                self.acc.flag[idx] = true;
                self.acc.touched.push(idx);
            }
            let base = idx * self.acc.l;
            let rot = e * self.scale;
            for &(k, v) in &self.comp.coeffs[ci as usize] {
                self.acc.vals[base + ((k + rot) % l) as usize] += v;
            }
        }
        for c in 0..self.comp.trie[node].children.len() {
            let (v, child) = self.comp.trie[node].children[c];
            let b = asg[v as usize];
            let next = match state {
                None => Some((b, 0)),
                Some((i, e)) => self.eng.step(i, b).map(|(k, e2)| (k, (e + e2) % self.eng.m)),
            };
            if next.is_some() {
                self.dfs(asg, child as usize, next);
            }
        }
    }

    /// Whether `f(asg) ≠ 0`.
    fn nonzero(&mut self, asg: &[usize]) -> bool {
        self.acc.clear();
        self.dfs(asg, 0, None);
        let l = self.acc.l;
        self.acc.touched.iter().any(|&i| {
            let s = &self.acc.vals[i * l..(i + 1) * l];
            s.iter().any(|&x| x != 0) && !Cyclo::from_root_counts(l as u32, s).is_zero()
        })
    }

    /// The value after the last call to [`Self::nonzero`].
    fn value(&self) -> Elem {
        let l = self.acc.l;
        let inv = Cyclo::from_rational(&num_rational::BigRational::new(BigInt::one(), self.comp.den.clone()));
        let mut e = Elem::zero();
        for &i in &self.acc.touched {
            let c = Cyclo::from_root_counts(l as u32, &self.acc.vals[i * l..(i + 1) * l]);
            if !c.is_zero() {
                e.add_term(i, &c * &inv);
            }
        }
        e
    }
}

/// Value of a flat polynomial at basis vectors, without the exponent tables.
fn eval_generic(f: &MultilinearPoly, alg: &StructureAlgebra, asg: &[usize]) -> Elem {
    let mut out = Elem::zero();
    for (w, c) in f.terms() {
        out = out.add(&word_value_generic(alg, asg, &w).scale(&c));
    }
    out
}

fn components(f: &MultilinearPoly, alg: &StructureAlgebra) -> Vec<Vec<usize>> {
    comps_for(f.degrees(), alg)
}

/// Number of graded basis assignments of `f` in `alg`.
pub(crate) fn assignment_count(comps: &[Vec<usize>]) -> u128 {
    comps.iter().map(|c| c.len() as u128).product()
}

/// Calls `visit(assignment)` on every graded basis assignment, in odometer
/// order, until it returns false.
pub(crate) fn for_each_assignment(comps: &[Vec<usize>], mut visit: impl FnMut(&[usize]) -> bool) {
    if comps.iter().any(|c| c.is_empty()) {
        return;
    }
    let n = comps.len();
    let mut pos = vec![0; n];
    let mut asg: Vec<usize> = comps.iter().map(|c| c[0]).collect();
    loop {
        if !visit(&asg) {
            return;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            pos[i] += 1;
            if pos[i] < comps[i].len() {
                asg[i] = comps[i][pos[i]];
                break;
            }
            pos[i] = 0;
            asg[i] = comps[i][0];
        }
    }
}

/// Visits the nonzero values of a flat polynomial over all basis assignments
/// until `visit` returns false. Returns the number of assignments tried.
fn for_each_value(f: &MultilinearPoly, eng: &Engine, mut visit: impl FnMut(&[usize], Elem) -> bool) -> u64 {
    let comps = components(f, eng.alg);
    let mut count = 0u64;
    if f.is_zero() {
        return 0;
    }
    let mono = if eng.monomial() { MonoEval::new(eng, f) } else { None };
    match mono {
        Some(mut me) => for_each_assignment(&comps, |asg| {
            count += 1;
            if me.nonzero(asg) {
                visit(asg, me.value())
            } else {
                true
            }
        }),
        None => for_each_assignment(&comps, |asg| {
            count += 1;
            let v = eval_generic(f, eng.alg, asg);
            if v.is_zero() {
                true
            } else {
                visit(asg, v)
            }
        }),
    }
    count
}

/// Outcome of [`is_identity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// Basis indices, one per variable, with a nonzero value.
    pub witness: Option<Vec<usize>>,
    pub value: Option<Elem>,
    /// Basis assignments evaluated.
    pub assignments: u64,
}

impl IdentityCheck {
    fn holds(assignments: u64) -> Self {
        IdentityCheck { holds: true, witness: None, value: None, assignments }
    }
}

/// `Σ λ_σ a_{σ(1)}⋯a_{σ(n)}` for homogeneous `a_i` of degree `g_i`.
pub fn evaluate(f: &MultilinearPoly, alg: &StructureAlgebra, assignment: &[Elem]) -> Result<Elem, IdentityError> {
    if assignment.len() != f.n_vars() {
        return Err(IdentityError::LengthMismatch { expected: f.n_vars(), got: assignment.len() });
    }
    for (a, &g) in assignment.iter().zip(f.degrees()) {
        if a.terms.keys().any(|&k| k >= alg.dim() || alg.degree(k) != g) {
            return Err(IdentityError::DegreeMismatch);
        }
    }
    if let Some(fs) = f.factors() {
        let mut off = 0;
        let mut out: Option<Elem> = None;
        for p in fs {
            let v = evaluate(p, alg, &assignment[off..off + p.n_vars()])?;
            off += p.n_vars();
            out = Some(match out {
                None => v,
                Some(o) => alg.mul(&o, &v),
            });
        }
        return Ok(out.unwrap_or_else(Elem::zero));
    }
    let mut out = Elem::zero();
    for (w, c) in f.terms() {
        let mut cur = assignment[w[0] as usize].clone();
        for &v in &w[1..] {
            cur = alg.mul(&cur, &assignment[v as usize]);
        }
        out = out.add(&cur.scale(&c));
    }
    Ok(out)
}

/// Whether `f` vanishes on every graded basis assignment of `alg`, which by
/// multilinearity means `f ∈ Id_G(alg)`. Products of polynomials in disjoint
/// variables are decided by propagating spans of partial values.
pub fn is_identity(f: &MultilinearPoly, alg: &StructureAlgebra) -> IdentityCheck {
    let eng = Engine::new(alg);
    match f.factors() {
        Some(fs) => check_product(fs, &eng),
        None => {
            let mut found = None;
            let n = for_each_value(f, &eng, |asg, v| {
                found = Some((asg.to_vec(), v));
                false
            });
            match found {
                None => IdentityCheck::holds(n),
                Some((a, v)) => IdentityCheck { holds: false, witness: Some(a), value: Some(v), assignments: n },
            }
        }
    }
}

/// Values spanning `{f(a)}`, each with the assignment producing it.
fn value_span(f: &MultilinearPoly, eng: &Engine) -> (Vec<(Vec<usize>, Elem)>, u64) {
    let dim = eng.alg.dim();
    let cap = if f.target() < eng.alg.group().order() { eng.alg.component(f.target()).len() } else { 0 };
    let mut ech = Echelon::new(dim);
    let mut out = Vec::new();
    let n = for_each_value(f, eng, |asg, v| {
        if ech.insert(v.to_dense(dim)) {
            out.push((asg.to_vec(), v));
        }
        ech.rank() < cap
    });
    (out, n)
}

fn check_product(fs: &[MultilinearPoly], eng: &Engine) -> IdentityCheck {
    let alg = eng.alg;
    let dim = alg.dim();
    let g = alg.group();
    let mut spans: Vec<(&MultilinearPoly, Vec<(Vec<usize>, Elem)>)> = Vec::new();
    let mut total = 0u64;
    let mut cur: Vec<(Vec<usize>, Elem)> = Vec::new();
    let mut deg = g.identity();
    for (j, f) in fs.iter().enumerate() {
        let sp = match spans.iter().find(|(p, _)| *p == f) {
            Some((_, s)) => s.clone(),
            None => {
                let (s, n) = value_span(f, eng);
                total += n;
                spans.push((f, s.clone()));
                s
            }
        };
        if sp.is_empty() {
            return IdentityCheck::holds(total);
        }
        deg = g.mul(deg, f.target());
        if j == 0 {
            cur = sp;
            continue;
        }
        let cap = alg.component(deg).len();
        let mut ech = Echelon::new(dim);
        let mut next = Vec::new();
        'outer: for (a, w) in &cur {
            for (b, v) in &sp {
                let p = alg.mul(w, v);
                if !p.is_zero() && ech.insert(p.to_dense(dim)) {
                    let mut asg = a.clone();
                    asg.extend_from_slice(b);
                    next.push((asg, p));
                    if ech.rank() == cap {
                        break 'outer;
                    }
                }
            }
        }
        if next.is_empty() {
            return IdentityCheck::holds(total);
        }
        cur = next;
    }
    match cur.into_iter().next() {
        None => IdentityCheck::holds(total),
        Some((a, v)) => IdentityCheck { holds: false, witness: Some(a), value: Some(v), assignments: total },
    }
}

/// `f₁ · y · f₂ ∉ Id_G(A)` together with the assignment showing it.
#[derive(Clone, Debug)]
pub struct NonvanishWitness {
    /// The product polynomial `f₁ · y · f₂`, variables of `f₁` first.
    pub poly: MultilinearPoly,
    /// Degree of the bridging variable `y`.
    pub bridge_degree: usize,
    pub assignment: Vec<usize>,
    pub value: Elem,
}

/// Finds a homogeneous basis element `x` with `f₁(a)·x·f₂(b) ≠ 0`; one exists
/// whenever `A` is graded simple and neither `f_i` is an identity.
pub fn nonvanish_product(
    alg: &StructureAlgebra,
    f1: &MultilinearPoly,
    f2: &MultilinearPoly,
) -> Result<NonvanishWitness, IdentityError> {
    let c1 = is_identity(f1, alg);
    let c2 = is_identity(f2, alg);
    let (Some(a), Some(u)) = (c1.witness, c1.value) else {
        return Err(IdentityError::InputIsIdentity);
    };
    let (Some(b), Some(v)) = (c2.witness, c2.value) else {
        return Err(IdentityError::InputIsIdentity);
    };
    for x in 0..alg.dim() {
        let p = alg.mul(&alg.mul(&u, &Elem::basis(x)), &v);
        if !p.is_zero() {
            let deg = alg.degree(x);
            let poly = MultilinearPoly::product(alg.group(), vec![f1.clone(), MultilinearPoly::variable(deg), f2.clone()]);
            let mut assignment = a;
            assignment.push(x);
            assignment.extend(b);
            return Ok(NonvanishWitness { poly, bridge_degree: deg, assignment, value: p });
        }
    }
    Err(IdentityError::NotApplicable("no bridging element: the algebra is not graded simple".into()))
}

/// Flat evaluation functionals used by identity spaces: the value of each
/// word at a basis assignment, as `(output index, ζ_L exponent)` for monomial
/// algebras.
pub(crate) struct WordEval<'e, 'a> {
    eng: &'e Engine<'a>,
}

impl<'e, 'a> WordEval<'e, 'a> {
    pub fn new(eng: &'e Engine<'a>) -> Option<Self> {
        eng.monomial().then_some(WordEval { eng })
    }

    pub fn modulus(&self) -> u32 {
        self.eng.m
    }

    pub fn word(&self, asg: &[usize], w: &[u16]) -> Option<(usize, u32)> {
        let mut st = (asg[w[0] as usize], 0u32);
        for &v in &w[1..] {
            let (k, e) = self.eng.step(st.0, asg[v as usize])?;
            st = (k, (st.1 + e) % self.eng.m);
        }
        Some(st)
    }
}

pub(crate) fn word_value_generic(alg: &StructureAlgebra, asg: &[usize], w: &[u16]) -> Elem {
    let mut cur = Elem::basis(asg[w[0] as usize]);
    for &v in &w[1..] {
        cur = alg.mul(&cur, &Elem::basis(asg[v as usize]));
        if cur.is_zero() {
            break;
        }
    }
    cur
}

/// Graded basis vectors available for each variable.
pub(crate) fn comps_for(degrees: &[usize], alg: &StructureAlgebra) -> Vec<Vec<usize>> {
    degrees.iter().map(|&g| if g < alg.group().order() { alg.component(g) } else { Vec::new() }).collect()
}
