//! Seeded random instances `(A, B)` of graded simple presentations over small
//! abelian groups, and the per-instance soundness run shared by the command
//! line and the acceptance suite.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cocycles::{bicharacter_cocycle, Cocycle, CocycleError};
use crate::embed::{construct, decide, decide_fast, separate, separator_case, EmbedDecision, EmbedError};
use crate::galg::{GalgError, HomCertificate, Presentation};
use crate::groups::{FiniteGroup, Group, GroupSpec, Subgroup};
use crate::identities::{inclusion_bounded, Budget, IdentityError, PolyDoc, SeparatorCase};
use crate::scalars::Root;
use crate::tuples::GTuple;

/// Invariant factor lists `n₁ | n₂ | ⋯` of every abelian group of order
/// `2..=bound`, ordered by group order.
pub fn abelian_groups(bound: usize) -> Vec<Vec<usize>> {
    fn chains(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            out.push(cur.clone());
            return;
        }
        let prev = cur.last().copied().unwrap_or(1);
        for d in (prev.max(2)..=n).filter(|d| n % d == 0 && d % prev == 0) {
            cur.push(d);
            chains(n / d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for n in 2..=bound {
        let mut v = Vec::new();
        chains(n, &mut Vec::new(), &mut v);
        v.sort();
        out.extend(v);
    }
    out
}

/// Exponent vectors accepted by [`bicharacter_cocycle`] for these factors,
/// in the same order as [`crate::cocycles::enumerate_bicharacter_cocycles`].
pub fn bicharacter_exponents(factors: &[usize]) -> Vec<Vec<u32>> {
    let mods: Vec<u32> = (0..factors.len())
        .flat_map(|i| (i + 1..factors.len()).map(move |j| (i, j)))
        .map(|(i, j)| num_integer::gcd(factors[i], factors[j]) as u32)
        .collect();
    let total: u32 = mods.iter().product();
    (0..total)
        .map(|mut k| {
            mods.iter()
                .map(|&m| {
                    let e = k % m;
                    k /= m;
                    e
                })
                .collect()
        })
        .collect()
}

/// One presentation of an instance: `N`, an ambient bicharacter restricted
/// to `N`, an optional coboundary `δν` with `ν(x) = i^{nu[x]}` on the
/// elements of `N` in order, and the tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationSpec {
    pub subgroup: Vec<usize>,
    pub bicharacter: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nu: Vec<u32>,
    pub s: Vec<usize>,
}

impl PresentationSpec {
    pub fn cocycle(&self, g: &Group) -> Result<Cocycle, InstanceError> {
        let n = Subgroup::new(g, &self.subgroup).map_err(GalgError::from)?;
        let base = bicharacter_cocycle(g, &self.bicharacter)?.restrict(&n)?;
        if self.nu.is_empty() {
            return Ok(base);
        }
        if self.nu.len() != n.order() {
            return Err(InstanceError::Shape("nu must list one exponent per subgroup element".into()));
        }
        Ok(base.times_coboundary(|x| Root::new(4, self.nu[n.index_of(x).unwrap_or(0)] as i64)))
    }

    pub fn build(&self, g: &Group) -> Result<Presentation, InstanceError> {
        let alpha = self.cocycle(g)?;
        let s = GTuple::new(g, self.s.clone()).map_err(GalgError::from)?;
        Ok(Presentation::new(&alpha, &s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub id: usize,
    /// Cyclic factor orders of the ambient group.
    pub factors: Vec<usize>,
    pub a: PresentationSpec,
    pub b: PresentationSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("malformed instance: {0}")]
    Shape(String),
    #[error(transparent)]
    Galg(#[from] GalgError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
}

impl Instance {
    pub fn group(&self) -> Group {
        FiniteGroup::abelian(&self.factors)
    }

    pub fn group_spec(&self) -> GroupSpec {
        GroupSpec::Product { factors: self.factors.iter().map(|&n| GroupSpec::Cyclic { n }).collect() }
    }

    pub fn build(&self) -> Result<(Presentation, Presentation), InstanceError> {
        let g = self.group();
        Ok((self.a.build(&g)?, self.b.build(&g)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub seed: u64,
    pub order_bound: usize,
    pub count: usize,
    pub max_tuple_len: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { seed: 1, order_bound: 6, count: 240, max_tuple_len: 3 }
    }
}

/// Distinct restrictions of the ambient bicharacter classes to `n`, each with
/// the first exponent vector that produces it.
fn classes_on(g: &Group, exps: &[Vec<u32>], n: &Subgroup) -> Vec<Vec<u32>> {
    let mut seen: Vec<Cocycle> = Vec::new();
    let mut out = Vec::new();
    for e in exps {
        let c = bicharacter_cocycle(g, e).and_then(|c| c.restrict(n)).expect("bicharacter on a product of cyclic groups");
        if !seen.contains(&c) {
            seen.push(c);
            out.push(e.clone());
        }
    }
    out
}

/// Instances drawn uniformly over groups, subgroups, restricted classes and
/// tuples. A quarter of them put `N₂ = G`, and another quarter draw `s̄` from
/// `N₂` and `t̄` from `N₁`, so both special shapes are well represented.
pub fn generate(cfg: &CorpusConfig) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let groups: Vec<(Vec<usize>, Group, Vec<Subgroup>, Vec<Vec<u32>>)> = abelian_groups(cfg.order_bound)
        .into_iter()
        .map(|f| {
            let g = FiniteGroup::abelian(&f);
            let subs = g.subgroups();
            let exps = bicharacter_exponents(&f);
            (f, g, subs, exps)
        })
        .collect();
    let max_len = cfg.max_tuple_len.max(1);
    let mut out = Vec::with_capacity(cfg.count);
    for id in 0..cfg.count {
        let (factors, g, subs, exps) = &groups[rng.gen_range(0..groups.len())];
        let mode = rng.gen_range(0..4);
        let n1 = subs[rng.gen_range(0..subs.len())].clone();
        let n2 = if mode == 0 { g.whole() } else { subs[rng.gen_range(0..subs.len())].clone() };
        let pres = |n: &Subgroup, from: &[usize], rng: &mut ChaCha8Rng| {
            let classes = classes_on(g, exps, n);
            let bicharacter = classes[rng.gen_range(0..classes.len())].clone();
            let nu = if n.order() > 1 && rng.gen_bool(1.0 / 3.0) {
                n.elements().iter().map(|&x| if x == g.identity() { 0 } else { rng.gen_range(0..4) }).collect()
            } else {
                Vec::new()
            };
            let len = rng.gen_range(1..=max_len);
            let s = (0..len).map(|_| from[rng.gen_range(0..from.len())]).collect();
            PresentationSpec { subgroup: n.elements().to_vec(), bicharacter, nu, s }
        };
        let all: Vec<usize> = g.elements().collect();
        let (from_a, from_b) = if mode == 1 { (n2.elements().to_vec(), n1.elements().to_vec()) } else { (all.clone(), all) };
        let a = pres(&n1, &from_a, &mut rng);
        let b = pres(&n2, &from_b, &mut rng);
        out.push(Instance { id, factors: factors.clone(), a, b });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationStatus {
    Verified,
    /// The bounded scan found no separator within its budget.
    InconclusiveWitness,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionOutcome {
    pub via_envelope: bool,
    pub source_dim: usize,
    pub target_dim: usize,
    pub certificate: HomCertificate,
    /// `Id_G(B) ⊆ Id_G(A)` at every multidegree of length `≤ inclusion_len`.
    pub inclusion_holds: bool,
    pub inclusion_len: usize,
    pub multidegrees_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<PolyDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparationOutcome {
    pub case: SeparatorCase,
    pub status: SeparationStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<PolyDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub instance: Instance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<EmbedDecision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationOutcome>,
    /// Agreement of the no-shift criterion with the general route, when
    /// `s̄ ⊆ N₂` and `t̄ ⊆ N₁`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fast_path_agrees: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl InstanceOutcome {
    /// A true decision whose construction or bounded inclusion failed.
    pub fn unsound(&self) -> bool {
        match (&self.decision, &self.construction) {
            (Some(d), Some(c)) => d.verdict && !(c.certificate.is_embedding() && c.inclusion_holds),
            (Some(d), None) => d.verdict,
            _ => false,
        }
    }
}

/// Decides, then either constructs and checks `inclusion_bounded(B, A, len)`
/// or builds a separating identity.
pub fn run_instance(inst: &Instance, inclusion_len: usize, budget: &Budget) -> InstanceOutcome {
    let mut out =
        InstanceOutcome { instance: inst.clone(), decision: None, construction: None, separation: None, fast_path_agrees: None, error: None };
    let (a, b) = match inst.build() {
        Ok(p) => p,
        Err(e) => {
            out.error = Some(format!("instance: {e}"));
            return out;
        }
    };
    let dec = match decide(&a, &b) {
        Ok(d) => d,
        Err(e) => {
            out.error = Some(format!("embed: {e}"));
            return out;
        }
    };
    out.fast_path_agrees = match decide_fast(&a, &b) {
        Ok(v) => Some(v == dec.verdict),
        Err(EmbedError::NotApplicable(_)) => None,
        Err(e) => {
            out.error = Some(format!("embed: {e}"));
            return out;
        }
    };
    if dec.verdict {
        match construct(&a, &b, &dec) {
            Ok(c) => {
                let (holds, checked, violation) = match inclusion_bounded(b.algebra(), a.algebra(), inclusion_len, budget) {
                    Ok(r) => (r.holds, r.multidegrees_checked, r.violation.map(|v| v.separator.to_doc())),
                    Err(e) => {
                        out.error = Some(format!("identities: {e}"));
                        (false, 0, None)
                    }
                };
                out.construction = Some(ConstructionOutcome {
                    via_envelope: c.via_envelope,
                    source_dim: a.dim(),
                    target_dim: b.dim(),
                    certificate: c.certificate,
                    inclusion_holds: holds,
                    inclusion_len,
                    multidegrees_checked: checked,
                    violation,
                });
            }
            Err(e) => out.error = Some(format!("embed: {e}")),
        }
    } else {
        let case = separator_case(&dec);
        match separate(&a, &b, &dec, budget) {
            Ok(rep) => {
                out.separation =
                    Some(SeparationOutcome { case, status: SeparationStatus::Verified, polynomial: Some(rep.poly.to_doc()) })
            }
            Err(IdentityError::NotFoundWithinBudget) if case == SeparatorCase::BoundedFallback => {
                out.separation = Some(SeparationOutcome { case, status: SeparationStatus::InconclusiveWitness, polynomial: None })
            }
            Err(e) => out.error = Some(format!("identities: {e}")),
        }
    }
    out.decision = Some(dec);
    out
}

/// `f` over `items` on `workers` threads, results in input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|sc| {
        for _ in 0..workers.max(1).min(items.len().max(1)) {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                results.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every item processed")).collect()
}

/// Number of worker threads to use by default.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub instances: usize,
    pub decided_true: usize,
    pub decided_false: usize,
    pub constructed: usize,
    pub separated: usize,
    pub inconclusive: usize,
    pub fast_path_checked: usize,
    pub fast_path_disagreements: usize,
    pub unsound: usize,
    pub errors: usize,
}

pub fn summarize(outcomes: &[InstanceOutcome]) -> CorpusSummary {
    let mut s = CorpusSummary { instances: outcomes.len(), ..Default::default() };
    for o in outcomes {
        match &o.decision {
            Some(d) if d.verdict => s.decided_true += 1,
            Some(_) => s.decided_false += 1,
            None => {}
        }
        if o.construction.as_ref().is_some_and(|c| c.certificate.is_embedding() && c.inclusion_holds) {
            s.constructed += 1;
        }
        match o.separation.as_ref().map(|x| x.status) {
            Some(SeparationStatus::Verified) => s.separated += 1,
            Some(SeparationStatus::InconclusiveWitness) => s.inconclusive += 1,
            None => {}
        }
        if let Some(ok) = o.fast_path_agrees {
            s.fast_path_checked += 1;
            if !ok {
                s.fast_path_disagreements += 1;
            }
        }
        if o.unsound() {
            s.unsound += 1;
        }
        if o.error.is_some() {
            s.errors += 1;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_group_lists() {
        assert_eq!(abelian_groups(8), vec![
            vec![2],
            vec![3],
            vec![2, 2],
            vec![4],
            vec![5],
            vec![6],
            vec![7],
            vec![2, 2, 2],
            vec![2, 4],
            vec![8],
        ]);
        assert_eq!(abelian_groups(12).iter().filter(|f| f.iter().product::<usize>() == 12).count(), 2);
    }

    #[test]
    fn exponents_match_enumeration() {
        let f = [2, 4];
        let g = FiniteGroup::abelian(&f);
        let all = crate::cocycles::enumerate_bicharacter_cocycles(&g).unwrap();
        let exps = bicharacter_exponents(&f);
        assert_eq!(exps.len(), all.len());
        for (e, c) in exps.iter().zip(&all) {
            assert_eq!(&bicharacter_cocycle(&g, e).unwrap(), c);
        }
    }

    #[test]
    fn generation_is_deterministic_and_valid() {
        let cfg = CorpusConfig { count: 40, ..Default::default() };
        let x = generate(&cfg);
        assert_eq!(x, generate(&cfg));
        assert_ne!(x, generate(&CorpusConfig { seed: 2, ..cfg }));
        for inst in &x {
            assert!(inst.factors.iter().product::<usize>() <= 6);
            assert!((1..=3).contains(&inst.a.s.len()) && (1..=3).contains(&inst.b.s.len()));
            inst.build().unwrap();
        }
    }

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<usize> = (0..100).collect();
        assert_eq!(par_map(&v, 7, |x| x * x), v.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!(par_map(&Vec::<usize>::new(), 3, |x| *x).is_empty());
    }

    #[test]
    fn small_corpus_is_sound() {
        let cfg = CorpusConfig { count: 30, seed: 7, ..Default::default() };
        let inst = generate(&cfg);
        let out = par_map(&inst, 4, |i| run_instance(i, 2, &Budget::default()));
        let s = summarize(&out);
        assert_eq!(s.errors, 0, "{:?}", out.iter().find(|o| o.error.is_some()));
        assert_eq!(s.unsound, 0);
        assert_eq!(s.fast_path_disagreements, 0);
        assert_eq!(s.decided_true + s.decided_false, 30);
    }
}
