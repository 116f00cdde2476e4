use std::sync::Arc;

use super::*;
use crate::cocycles::{bicharacter_cocycle, Cocycle};
use crate::groups::{FiniteGroup, Subgroup};
use crate::scalars::{Cyclo, Root};
use crate::tuples::GTuple;

fn tup(v: &[usize]) -> GTuple {
    GTuple { entries: v.to_vec() }
}

fn klein_alpha() -> Cocycle {
    bicharacter_cocycle(&FiniteGroup::abelian(&[2, 2]), &[1]).unwrap()
}

#[test]
fn matrix_unit_products() {
    let g = FiniteGroup::cyclic(3);
    let a = Presentation::elementary(&g, &tup(&[0, 1])).unwrap();
    let e11 = a.element(&[((0, 0, 0), Cyclo::one())]);
    let e12 = a.element(&[((0, 0, 1), Cyclo::one())]);
    assert_eq!(a.mul(&e11, &e11), e11);
    assert!(a.mul(&e12, &e12).is_zero());
}

#[test]
fn klein_commutator() {
    let alpha = klein_alpha();
    let a = Presentation::twisted(&alpha);
    let (x, y) = (2, 1);
    let ux = a.element(&[((x, 0, 0), Cyclo::one())]);
    let uy = a.element(&[((y, 0, 0), Cyclo::one())]);
    let xy = a.mul(&ux, &uy);
    let yx = a.mul(&uy, &ux);
    assert_eq!(xy, yx.scale(&alpha.beta(x, y).to_cyclo()));
    assert_eq!(alpha.beta(x, y), Root::minus_one());
}

#[test]
fn supports() {
    let g = FiniteGroup::cyclic(10);
    let a1 = Presentation::elementary(&g, &tup(&[0, 1, 1, 1])).unwrap();
    assert_eq!(a1.support().into_iter().collect::<Vec<_>>(), vec![0, 1, 9]);
    let a2 = Presentation::elementary(&g, &tup(&[1, 1, 1, 3])).unwrap();
    assert_eq!(a2.support().into_iter().collect::<Vec<_>>(), vec![0, 2, 8]);
    let full = Presentation::new(&Cocycle::trivial(&g.whole()), &tup(&[3, 7])).unwrap();
    assert_eq!(full.support().len(), 10);
}

#[test]
fn dimensions_and_components() {
    let g = FiniteGroup::abelian(&[2, 4]);
    let h = g.closure(&[g.from_coords(&[0, 2]).unwrap()]).unwrap();
    let a = Presentation::new(&Cocycle::trivial(&h), &tup(&[0, 1, 5])).unwrap();
    assert_eq!(a.dim(), h.order() * 9);
    let total: usize = g.elements().map(|x| a.algebra().component(x).len()).sum();
    assert_eq!(total, a.dim());
}

#[test]
fn symmetries_are_isomorphisms() {
    let alpha = klein_alpha();
    let g = alpha.group().clone();
    let a = Presentation::new(&alpha, &tup(&[0, 3, 1])).unwrap();
    for op in [
        SymmetryOp::Permute(vec![0, 1, 2]),
        SymmetryOp::Permute(vec![2, 0, 1]),
        SymmetryOp::Replace { index: 1, with: 3 },
        SymmetryOp::Replace { index: 1, with: 0 },
        SymmetryOp::Replace { index: 2, with: 2 },
        SymmetryOp::Conjugate(2),
    ] {
        let (b, phi) = a.tuple_symmetry(&op).unwrap();
        let cert = phi.verify();
        assert!(cert.is_embedding(), "{:?}: {:?}", op, cert);
        assert_eq!(cert.unital, Some(true));
        assert_eq!(b.dim(), a.dim());
    }
    let (_, id) = a.tuple_symmetry(&SymmetryOp::Permute(vec![0, 1, 2])).unwrap();
    assert!(id.images.iter().enumerate().all(|(k, e)| *e == Elem::basis(k)));
    assert_eq!(g.order(), 4);
}

#[test]
fn replace_representative_z4() {
    let g = FiniteGroup::cyclic(4);
    let h = Subgroup::new(&g, &[0, 2]).unwrap();
    let a = Presentation::new(&Cocycle::trivial(&h), &tup(&[0, 2])).unwrap();
    let (b, phi) = a.tuple_symmetry(&SymmetryOp::Replace { index: 1, with: 0 }).unwrap();
    assert_eq!(b.s().entries, vec![0, 0]);
    assert!(phi.verify().is_embedding());
    assert_eq!(
        a.tuple_symmetry(&SymmetryOp::Replace { index: 1, with: 1 }).unwrap_err(),
        GalgError::NotSameCoset
    );
}

#[test]
fn replace_with_nontrivial_cocycle_on_z4() {
    let g = FiniteGroup::cyclic(4);
    let alpha = Cocycle::trivial(&g.whole()).times_coboundary(|x| Root::new(8, (3 * x * x) as i64));
    let a = Presentation::new(&alpha, &tup(&[1, 2, 0])).unwrap();
    let (_, phi) = a.tuple_symmetry(&SymmetryOp::Replace { index: 0, with: 3 }).unwrap();
    assert!(phi.verify().is_embedding());
}

#[test]
fn identity_and_zero_maps() {
    let a = Arc::new(Presentation::twisted(&klein_alpha()).to_structure_algebra());
    let c = GradedHom::identity(&a).verify();
    assert!(c.is_embedding());
    let z = GradedHom::zero(&a, &a).verify();
    assert!(z.graded && z.multiplicative && !z.injective);
}

#[test]
fn block_decomposition() {
    let g = FiniteGroup::cyclic(10);
    let a = Presentation::elementary(&g, &tup(&[0, 1])).unwrap();
    let whole = a.block_decompose(&g.whole()).unwrap();
    assert_eq!(whole.blocks.len(), 1);
    assert!(whole.diagonal_is_g_prime);
    let gp = Subgroup::new(&g, &[0, 5]).unwrap();
    let split = a.block_decompose(&gp).unwrap();
    assert_eq!(split.blocks.len(), 2);
    assert!(split.blocks.iter().all(|b| b.presentation.r() == 1));
    assert!(split.diagonal_is_g_prime);
    let h = Subgroup::new(&g, &[0, 2, 4, 6, 8]).unwrap();
    let b = Presentation::new(&Cocycle::trivial(&h), &tup(&[0])).unwrap();
    assert_eq!(b.block_decompose(&gp).err(), Some(GalgError::NotSubgroup));
}

#[test]
fn structure_algebra_conversions() {
    let g = FiniteGroup::cyclic(1);
    let k = Presentation::elementary(&g, &tup(&[0])).unwrap().to_structure_algebra();
    assert_eq!(k.dim(), 1);
    assert_eq!(k.prod(0, 0), &Prod::Mono(0, Root::one()));
    let kk = StructureAlgebra::direct_sum(&[&k, &k]).unwrap();
    assert_eq!(kk.dim(), 2);
    assert_eq!(kk.prod(0, 1), &Prod::Zero);
    assert_eq!(kk.prod(1, 1), &Prod::Mono(1, Root::one()));
    let tw = Presentation::twisted(&klein_alpha()).to_structure_algebra();
    assert_eq!(tw.dim(), 4);
    tw.check_associativity().unwrap();
    tw.check_grading().unwrap();
}

#[test]
fn structure_doc_roundtrip() {
    let a = Presentation::twisted(&klein_alpha());
    let doc = a.to_structure_algebra().to_doc();
    let js = serde_json::to_string(&doc).unwrap();
    let back: StructureDoc = serde_json::from_str(&js).unwrap();
    let b = StructureAlgebra::from_doc(a.group(), &back).unwrap();
    assert_eq!(b.grading(), a.algebra().grading());
    assert!(b.is_monomial());
}

#[test]
fn non_associative_table_rejected() {
    let g = FiniteGroup::cyclic(1);
    // b0·b0 = b1, b1·b0 = b0, everything else zero
    let mut table = vec![Prod::Zero; 4];
    table[0] = Prod::Mono(1, Root::one());
    table[2] = Prod::Mono(0, Root::one());
    let err = StructureAlgebra::new(g, vec![0, 0], table, None).unwrap_err();
    assert!(matches!(err, GalgError::NotAssociative(..)));
}

#[test]
fn homogeneous_elements_invertible_in_twisted_algebra() {
    let alpha = klein_alpha();
    let a = Presentation::twisted(&alpha);
    let g = alpha.group().clone();
    let one = a.algebra().unit().unwrap().clone();
    for h in g.elements() {
        let u = a.element(&[((h, 0, 0), Cyclo::one())]);
        let c = alpha.get(h, g.inv(h)).inv().to_cyclo();
        let v = a.element(&[((g.inv(h), 0, 0), c)]);
        assert_eq!(a.mul(&u, &v), one);
        assert_eq!(a.mul(&v, &u), one);
    }
}

#[test]
fn presentation_doc_forms() {
    let g = FiniteGroup::abelian(&[2, 2]);
    let js = r#"{"H":{"elements":[0,1,2,3]},"alpha":{"bicharacter":[1]},"s":[0]}"#;
    let doc: PresentationDoc = serde_json::from_str(js).unwrap();
    let a = Presentation::from_doc(&g, &doc).unwrap();
    assert_eq!(a.alpha(), &klein_alpha());
    let round: PresentationDoc = serde_json::from_str(&serde_json::to_string(&a.to_doc()).unwrap()).unwrap();
    assert_eq!(Presentation::from_doc(&g, &round).unwrap().alpha(), a.alpha());
}
