use super::*;
use crate::cocycles::{bicharacter_cocycle, enumerate_bicharacter_cocycles};
use crate::groups::{FiniteGroup, Group};

fn tup(v: &[usize]) -> GTuple {
    GTuple { entries: v.to_vec() }
}

fn pres(alpha: &Cocycle, s: &[usize]) -> Presentation {
    Presentation::new(alpha, &tup(s)).unwrap()
}

fn sub(g: &Group, els: &[usize]) -> Subgroup {
    Subgroup::new(g, els).unwrap()
}

/// Dihedral group of order 8: `(k, f) ↦ 2k + f`, `(k₁,f₁)(k₂,f₂) = (k₁ ± k₂, f₁ ⊕ f₂)`.
fn d4() -> Group {
    let idx = |k: usize, f: usize| 2 * (k % 4) + f;
    let table = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (k1, f1, k2, f2) = (x / 2, x % 2, y / 2, y % 2);
                    let k = if f1 == 0 { k1 + k2 } else { k1 + 4 - k2 };
                    idx(k, f1 ^ f2)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(table).unwrap()
}

/// `{e, r², f, r²f}` in `D₄` with a cocycle carried over from `Z/2 × Z/2`.
fn klein_in_d4(exp: u32) -> (Group, Cocycle) {
    let g = d4();
    let k = FiniteGroup::abelian(&[2, 2]);
    let a = bicharacter_cocycle(&k, &[exp]).unwrap();
    let back = |x: usize| 2 * (x / 4) + x % 2;
    let alpha = Cocycle::from_fn(&sub(&g, &[0, 1, 4, 5]), |x, y| a.get(back(x), back(y))).unwrap();
    (g, alpha)
}

fn assert_certified(a: &Presentation, b: &Presentation) -> Construction {
    let dec = decide(a, b).unwrap();
    assert!(dec.verdict, "{:?} into {:?}", a, b);
    assert!(dec.recheck(a, b));
    let c = construct(a, b, &dec).unwrap();
    assert!(c.certificate.is_embedding());
    c
}

#[test]
fn equal_presentations() {
    let g = FiniteGroup::abelian(&[2, 2]);
    for alpha in enumerate_bicharacter_cocycles(&g).unwrap() {
        let a = pres(&alpha, &[0, 3]);
        let dec = decide(&a, &a).unwrap();
        assert_eq!(dec.trace.shift, Some(g.identity()));
        assert_eq!(dec.case, EmbedCase::FullSupport);
        let c = assert_certified(&a, &a);
        assert_eq!(c.hom.source.dim(), c.hom.target.dim());
    }
}

#[test]
fn klein_full_support_needs_two_rows() {
    let g = FiniteGroup::abelian(&[2, 2]);
    let alpha = bicharacter_cocycle(&g, &[1]).unwrap();
    let a = Presentation::twisted(&alpha);
    let triv = Cocycle::trivial(&g.whole());
    for r in 1..=3 {
        let b = Presentation::new(&triv, &GTuple::trivial(&g, r)).unwrap();
        let dec = decide(&a, &b).unwrap();
        assert_eq!(dec.trace.d, 2);
        assert_eq!(dec.verdict, r >= 2);
        assert_eq!(decide_full_support(&a, &b).unwrap(), r >= 2);
    }
    let b = Presentation::new(&triv, &GTuple::trivial(&g, 2)).unwrap();
    let c = assert_certified(&a, &b);
    assert_eq!(c.hom.source.dim(), 4);
    assert_eq!(c.hom.target.dim(), 16);
}

#[test]
fn full_support_with_twisted_target() {
    let g = FiniteGroup::abelian(&[2, 2]);
    let beta = bicharacter_cocycle(&g, &[1]).unwrap();
    let a = pres(&Cocycle::trivial(&g.whole()), &[0]);
    let b = pres(&beta, &[0, 2]);
    let c = assert_certified(&a, &b);
    assert!(c.via_envelope);
    assert!(!decide(&a, &pres(&beta, &[1])).unwrap().verdict);
}

#[test]
fn fast_path_cyclic_four() {
    let g = FiniteGroup::cyclic(4);
    let n2 = sub(&g, &[0, 2]);
    let a = pres(&Cocycle::trivial(&g.whole()), &[0]);
    for (t, want) in [(vec![0, 1], true), (vec![0, 2], false), (vec![3, 2, 2], true), (vec![1, 3], false)] {
        let b = pres(&Cocycle::trivial(&n2), &t);
        let dec = decide(&a, &b).unwrap();
        assert_eq!(dec.verdict, want, "t = {:?}", t);
        assert_eq!(dec.case, EmbedCase::Abelian);
        assert_eq!(decide_fast(&a, &b).unwrap(), want);
        assert!(dec.recheck(&a, &b));
        if want {
            assert_certified(&a, &b);
        }
    }
}

#[test]
fn part3_shift_needed() {
    // s̄ outside N₂ forces a nontrivial shift of t̄
    let g = FiniteGroup::cyclic(6);
    let n1 = sub(&g, &[0, 3]);
    let n2 = sub(&g, &[0, 2, 4]);
    let a = pres(&Cocycle::trivial(&n1), &[1]);
    let b = pres(&Cocycle::trivial(&n2), &[5, 2]);
    let dec = decide(&a, &b).unwrap();
    assert!(dec.verdict);
    assert!(decide_fast(&a, &b).is_err());
    assert_certified(&a, &b);
    let b = pres(&Cocycle::trivial(&n2), &[5, 1]);
    assert!(!decide(&a, &b).unwrap().verdict);
}

#[test]
fn cocycle_without_ambient_extension() {
    // the Klein class on {0,2}×Z/2 does not extend to Z/4×Z/2
    let g = FiniteGroup::abelian(&[4, 2]);
    let k = FiniteGroup::abelian(&[2, 2]);
    let kb = bicharacter_cocycle(&k, &[1]).unwrap();
    let n2 = sub(&g, &[0, 1, 4, 5]);
    let to_k = |x: usize| 2 * (x / 4) + x % 2;
    let beta = Cocycle::from_fn(&n2, |x, y| kb.get(to_k(x), to_k(y))).unwrap();
    let a = pres(&Cocycle::trivial(&g.whole()), &[0]);
    let b = pres(&beta, &[0, 2, 0, 2]);
    let dec = decide(&a, &b).unwrap();
    assert_eq!(dec.trace.d, 2);
    assert_eq!(dec.trace.transversal, vec![0, 2]);
    let c = assert_certified(&a, &b);
    assert!(!c.via_envelope);
    assert!(!decide(&a, &pres(&beta, &[0, 2, 2])).unwrap().verdict);
}

#[test]
fn klein_in_dihedral_regular_tuple() {
    for exp in 0..2 {
        let (g, alpha) = klein_in_d4(exp);
        let a = pres(&alpha, &[0]);
        let b = Presentation::elementary(&g, &tup(&[0, 1, 4, 5])).unwrap();
        let dec = decide(&a, &b).unwrap();
        assert_eq!(dec.case, EmbedCase::ElementaryNonabelian);
        assert_certified(&a, &b);
        let short = Presentation::elementary(&g, &tup(&[0, 1, 4])).unwrap();
        assert!(!decide(&a, &short).unwrap().verdict);
        // a left translate of the regular tuple also works
        let moved = Presentation::elementary(&g, &tup(&[2, 3, 6, 7, 0])).unwrap();
        assert_certified(&a, &moved);
    }
}

#[test]
fn nonabelian_target_rejected() {
    let (g, alpha) = klein_in_d4(1);
    let a = pres(&alpha, &[0]);
    let b = pres(&alpha, &[0, 2]);
    assert_eq!(decide(&a, &b).unwrap_err(), EmbedError::NonAbelianUnsupported);
    let _ = g;
}

#[test]
fn construct_refuses_false_and_foreign_decisions() {
    let g = FiniteGroup::cyclic(4);
    let n2 = sub(&g, &[0, 2]);
    let a = pres(&Cocycle::trivial(&g.whole()), &[0]);
    let no = pres(&Cocycle::trivial(&n2), &[0, 2]);
    let yes = pres(&Cocycle::trivial(&n2), &[0, 1]);
    let dec_no = decide(&a, &no).unwrap();
    assert_eq!(construct(&a, &no, &dec_no).unwrap_err(), EmbedError::DecisionFalse);
    let dec_yes = decide(&a, &yes).unwrap();
    let other = pres(&Cocycle::trivial(&n2), &[2, 0]);
    assert_eq!(construct(&a, &other, &dec_yes).unwrap_err(), EmbedError::DecisionMismatch);
}

#[test]
fn transversal_action_examples() {
    let g = FiniteGroup::cyclic(4);
    let n1 = g.whole();
    let h = sub(&g, &[0, 2]);
    let t = [0, 1];
    assert_eq!(transversal_action(&n1, &h, &t, 1).unwrap(), vec![(0, 1), (2, 0)]);
    assert_eq!(transversal_action(&n1, &h, &t, 0).unwrap(), vec![(0, 0), (0, 1)]);
    assert_eq!(transversal_action(&n1, &h, &t, 2).unwrap(), vec![(2, 0), (2, 1)]);
    assert!(transversal_composition_holds(&n1, &h, &t).unwrap());
    assert_eq!(transversal_action(&h, &g.trivial(), &[0, 2], 1).unwrap_err(), EmbedError::ElementOutsideGroup(1));
    assert_eq!(transversal_action(&n1, &h, &[0, 2], 1).unwrap_err(), EmbedError::NotTransversal);
}

#[test]
fn transversal_action_nonabelian() {
    let g = d4();
    let n1 = g.whole();
    let h = sub(&g, &[0, 1]);
    let t = h.transversal_in(&n1).unwrap();
    assert!(transversal_composition_holds(&n1, &h, &t).unwrap());
}

#[test]
fn small_sweep_is_sound() {
    // every positive decision on Z/2×Z/2 and Z/6 with short tuples is constructible
    for g in [FiniteGroup::abelian(&[2, 2]), FiniteGroup::cyclic(6)] {
        let classes = enumerate_bicharacter_cocycles(&g).unwrap();
        let subs = g.subgroups();
        let mut positives = 0;
        for n1 in &subs {
            for n2 in &subs {
                for c1 in &classes {
                    for c2 in &classes {
                        let (al, be) = (c1.restrict(n1).unwrap(), c2.restrict(n2).unwrap());
                        for s in [vec![0], vec![0, 1]] {
                            for t in [vec![0], vec![0, 1], vec![1, 2, 3]] {
                                let a = pres(&al, &s);
                                let b = pres(&be, &t);
                                let dec = decide(&a, &b).unwrap();
                                assert!(dec.recheck(&a, &b));
                                if dec.verdict {
                                    positives += 1;
                                    construct(&a, &b, &dec).unwrap();
                                }
                                if let Ok(v) = decide_fast(&a, &b) {
                                    assert_eq!(v, dec.verdict);
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(positives > 0);
    }
}
