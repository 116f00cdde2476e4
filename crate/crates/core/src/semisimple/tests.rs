use super::*;
use crate::cocycles::{bicharacter_cocycle, Cocycle};
use crate::groups::FiniteGroup;
use crate::identities::{inclusion_bounded, Budget};
use crate::tuples::GTuple;

fn elem(g: &Group, s: &[usize]) -> Presentation {
    Presentation::elementary(g, &GTuple { entries: s.to_vec() }).unwrap()
}

fn z10_power() -> (Group, Presentation, Presentation, Presentation) {
    let g = FiniteGroup::cyclic(10);
    let a1 = elem(&g, &[0, 1, 1, 1]);
    let a2 = elem(&g, &[1, 1, 1, 3]);
    let b = elem(&g, &[0, 1, 1, 1, 3]);
    (g, a1, a2, b)
}

#[test]
fn pair_inclusion_examples() {
    let (g, a1, a2, b) = z10_power();
    assert!(pair_inclusion(&b, &b).unwrap());
    assert!(pair_inclusion(&a1, &b).unwrap());
    assert!(pair_inclusion(&a2, &b).unwrap());
    assert!(pair_inclusion(&elem(&g, &[1, 3]), &b).unwrap());
    assert!(!pair_inclusion(&b, &a1).unwrap());
}

#[test]
fn minimal_set_examples() {
    let (g, a1, a2, _) = z10_power();
    let twice = minimal_set(&[a1.clone(), a1.clone()]).unwrap();
    assert_eq!(twice.kept, vec![0]);
    assert_eq!(twice.log, vec![Removal { removed: 1, absorbed_by: 0 }]);
    let m = minimal_set(&[elem(&g, &[0]), elem(&g, &[0, 0])]).unwrap();
    assert_eq!(m.kept, vec![1]);
    let both = minimal_set(&[a1.clone(), a2.clone()]).unwrap();
    assert_eq!(both.kept, vec![0, 1]);
    assert_eq!(a1.support().into_iter().collect::<Vec<_>>(), vec![0, 1, 9]);
    assert_eq!(a2.support().into_iter().collect::<Vec<_>>(), vec![0, 2, 8]);
}

#[test]
fn minimal_set_idempotent_and_keeps_identities() {
    let g = FiniteGroup::cyclic(4);
    let comps = vec![elem(&g, &[0, 1]), elem(&g, &[0]), elem(&g, &[1, 2]), elem(&g, &[0, 1, 2]), elem(&g, &[2])];
    let m = minimal_set(&comps).unwrap();
    let kept: Vec<Presentation> = m.kept.iter().map(|&i| comps[i].clone()).collect();
    assert_eq!(minimal_set(&kept).unwrap().kept, (0..kept.len()).collect::<Vec<_>>());
    let full = SemisimplePresentation::new(comps.clone()).unwrap();
    let small = SemisimplePresentation::new(kept).unwrap();
    let budget = Budget::default();
    assert!(inclusion_bounded(full.algebra(), small.algebra(), 3, &budget).unwrap().holds);
    assert!(inclusion_bounded(small.algebra(), full.algebra(), 3, &budget).unwrap().holds);
}

#[test]
fn match_examples() {
    let (_, a1, a2, b) = z10_power();
    let a = SemisimplePresentation::new(vec![a2.clone()]).unwrap();
    let bb = SemisimplePresentation::new(vec![a1.clone(), a2.clone()]).unwrap();
    assert_eq!(match_components(&a, &bb).unwrap(), vec![1]);
    let same = SemisimplePresentation::new(vec![a1.clone(), a2.clone()]).unwrap();
    assert_eq!(match_components(&same, &same).unwrap(), vec![0, 1]);
    let big = SemisimplePresentation::new(vec![b]).unwrap();
    assert_eq!(match_components(&big, &same).unwrap_err(), SemisimpleError::NoMatch(0));
}

#[test]
fn permutation_of_shuffled_components() {
    let g = FiniteGroup::abelian(&[2, 2]);
    let alpha = bicharacter_cocycle(&g, &[1]).unwrap();
    let half = Subgroup::new(&g, &[0, 2]).unwrap();
    let pool = vec![
        Presentation::twisted(&alpha),
        elem(&g, &[0, 1]),
        elem(&g, &[0, 0, 3]),
        Presentation::new(&Cocycle::trivial(&half), &GTuple { entries: vec![0, 1] }).unwrap(),
        Presentation::new(&alpha, &GTuple { entries: vec![0, 0] }).unwrap(),
    ];
    let kept: Vec<Presentation> = minimal_set(&pool).unwrap().kept.into_iter().map(|i| pool[i].clone()).collect();
    assert!(kept.len() >= 2);
    let shuffled: Vec<Presentation> = kept.iter().rev().cloned().collect();
    let a = SemisimplePresentation::new(kept.clone()).unwrap();
    let b = SemisimplePresentation::new(shuffled).unwrap();
    let (tau, isos) = certify_permutation(&a, &b).unwrap();
    assert_eq!(tau, (0..kept.len()).rev().collect::<Vec<_>>());
    for iso in &isos {
        assert!(iso.verify().is_embedding());
        assert_eq!(iso.source.dim(), iso.target.dim());
    }
}

use crate::groups::Subgroup;

#[test]
fn z10_power_needs_two_copies() {
    let (_, a1, a2, b) = z10_power();
    let a = SemisimplePresentation::new(vec![a1, a2]).unwrap();
    let b = SemisimplePresentation::new(vec![b]).unwrap();
    assert_eq!((a.dim(), b.dim()), (32, 25));
    let p = embed_into_power(&a, &b).unwrap();
    assert_eq!(p.n, 2);
    assert_eq!(p.dimension_bound, 2);
    assert!(p.certificate.is_embedding());
    assert!(blocks_orthogonal(&a, &p));
}

#[test]
fn simple_source_needs_one_copy() {
    let (_, a1, _, b) = z10_power();
    let p = embed_into_power(&SemisimplePresentation::new(vec![a1]).unwrap(), &SemisimplePresentation::new(vec![b.clone()]).unwrap()).unwrap();
    assert_eq!(p.n, 1);
    let doubled = SemisimplePresentation::new(vec![b.clone(), b.clone()]).unwrap();
    let p = embed_into_power(&doubled, &SemisimplePresentation::new(vec![b]).unwrap()).unwrap();
    assert_eq!(p.n, 2);
    assert_ne!(p.slots[0], p.slots[1]);
}

#[test]
fn empty_rejected() {
    assert_eq!(SemisimplePresentation::new(vec![]).unwrap_err(), SemisimpleError::Empty);
}
