//! The `G`-envelope `A ⊗̂ B`, the α-envelope `B^α = K^αG ⊗̂ B`, the
//! polynomial twist `f ↦ f^α`, and the explicit isomorphisms between them.

use std::sync::Arc;

use thiserror::Error;

use crate::cocycles::{Cocycle, CocycleError};
use crate::galg::{same_group, Elem, GalgError, GradedHom, HomCertificate, Presentation, Prod, StructureAlgebra};
use crate::identities::{IdentityError, MultilinearPoly};
use crate::scalars::{Cyclo, Root};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("operands are graded by different groups")]
    MismatchedGroup,
    #[error("cocycle must be defined on the whole grading group")]
    NotAmbient,
    #[error("isomorphism failed verification: {0}")]
    NotCertified(String),
    #[error(transparent)]
    Galg(#[from] GalgError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
}

const NONE: usize = usize::MAX;

/// `A ⊗̂ B` with `(A ⊗̂ B)_g = A_g ⊗ B_g`.
#[derive(Clone, Debug)]
pub struct EnvelopeResult {
    pub carrier: Arc<StructureAlgebra>,
    /// `(a, b)` for each carrier basis vector `a ⊗ b`; ordered by `b`, then `a`.
    pub pairs: Vec<(usize, usize)>,
    left_dim: usize,
    index: Vec<usize>,
}

impl EnvelopeResult {
    /// Carrier index of `a ⊗ b`, if the degrees agree.
    pub fn index(&self, a: usize, b: usize) -> Option<usize> {
        let k = self.index[b * self.left_dim + a];
        (k != NONE).then_some(k)
    }
}

pub fn genvelope(a: &StructureAlgebra, b: &StructureAlgebra) -> Result<EnvelopeResult, EnvelopeError> {
    if !same_group(a.group(), b.group()) {
        return Err(EnvelopeError::MismatchedGroup);
    }
    let (na, nb) = (a.dim(), b.dim());
    let mut pairs = Vec::new();
    let mut index = vec![NONE; na * nb];
    for j in 0..nb {
        for i in a.component(b.degree(j)) {
            index[j * na + i] = pairs.len();
            pairs.push((i, j));
        }
    }
    let n = pairs.len();
    let grading: Vec<usize> = pairs.iter().map(|&(_, j)| b.degree(j)).collect();
    let mut table = Vec::with_capacity(n * n);
    for &(i, j) in &pairs {
        for &(k, l) in &pairs {
            let p = match (a.prod(i, k), b.prod(j, l)) {
                (Prod::Zero, _) | (_, Prod::Zero) => Prod::Zero,
                (Prod::Mono(x, r), Prod::Mono(y, s)) => Prod::Mono(index[y * na + x], r.mul(*s)),
                _ => {
                    let (ta, tb) = (a.basis_product(i, k), b.basis_product(j, l));
                    let mut v = Vec::new();
                    for (&x, c) in &ta.terms {
                        for (&y, d) in &tb.terms {
                            v.push((index[y * na + x], c * d));
                        }
                    }
                    if v.is_empty() {
                        Prod::Zero
                    } else {
                        Prod::Sparse(v)
                    }
                }
            };
            table.push(p);
        }
    }
    let unit = match (a.unit(), b.unit()) {
        (Some(u), Some(v)) => {
            let mut e = Elem::zero();
            for (&x, c) in &u.terms {
                for (&y, d) in &v.terms {
                    let k = index[y * na + x];
                    if k != NONE {
                        e.add_term(k, c * d);
                    }
                }
            }
            Some(e)
        }
        _ => None,
    };
    let carrier = StructureAlgebra::new_unchecked(a.group().clone(), grading, table, unit)?;
    Ok(EnvelopeResult { carrier: Arc::new(carrier), pairs, left_dim: na, index })
}

fn check_ambient(alpha: &Cocycle, b: &StructureAlgebra) -> Result<(), EnvelopeError> {
    if !same_group(alpha.group(), b.group()) {
        return Err(EnvelopeError::MismatchedGroup);
    }
    if alpha.domain().order() != alpha.group().order() {
        return Err(EnvelopeError::NotAmbient);
    }
    Ok(())
}

/// `B^α = K^αG ⊗̂ B`, whose basis is indexed like `B`.
pub fn twist(b: &StructureAlgebra, alpha: &Cocycle) -> Result<EnvelopeResult, EnvelopeError> {
    check_ambient(alpha, b)?;
    let k = Presentation::twisted(alpha);
    genvelope(k.algebra(), b)
}

/// `B^α` for `B = K^βH ⊗ M_s̄(K)`, identified with `K^{β·α}H ⊗ M_s̄(K)`.
#[derive(Clone, Debug)]
pub struct AlphaEnvelope {
    pub presentation: Presentation,
    pub carrier: Arc<StructureAlgebra>,
    /// The isomorphism from the carrier onto the presentation.
    pub psi: GradedHom,
    pub certificate: HomCertificate,
    /// Sign corrections `ε_i` applied on top of the square roots, if any were needed.
    pub signs: Option<Vec<i8>>,
}

/// Builds `B^α` and the isomorphism
/// `U_{s_i⁻¹hs_j} ⊗ V_h ⊗ E_{i,j} ↦ σ_iσ_j / α(s_i⁻¹, h, s_j) · W_h ⊗ E_{i,j}`
/// with `σ_i² = α(s_i⁻¹, s_i)`. The result is released only once `ψ` is
/// certified graded, multiplicative and bijective.
pub fn alpha_envelope(b: &Presentation, alpha: &Cocycle) -> Result<AlphaEnvelope, EnvelopeError> {
    check_ambient(alpha, b.algebra())?;
    let g = b.group().clone();
    let env = twist(b.algebra(), alpha)?;
    let gamma = b.alpha().product(&alpha.restrict(b.h())?)?;
    let c = Presentation::new(&gamma, b.s())?;
    let s = &b.s().entries;
    let r = s.len();
    let sigma: Vec<Root> = s.iter().map(|&x| alpha.get(g.inv(x), x).sqrt()).collect();

    let build = |eps: &[i8]| -> GradedHom {
        let images = env
            .pairs
            .iter()
            .map(|&(_, k)| {
                let (h, i, j) = b.triple(k);
                let mut sc = sigma[i].mul(sigma[j]).div(alpha.iterated_alpha_unchecked(&[g.inv(s[i]), h, s[j]]));
                if eps[i] * eps[j] < 0 {
                    sc = sc.mul(Root::minus_one());
                }
                Elem::root_term(c.index(h, i, j), sc)
            })
            .collect();
        GradedHom::new(env.carrier.clone(), c.algebra().clone(), images)
    };
    let ones = vec![1i8; r];
    let psi = build(&ones);
    let cert = psi.verify();
    if cert.is_embedding() && psi.source.dim() == psi.target.dim() {
        return Ok(AlphaEnvelope { presentation: c, carrier: env.carrier, psi, certificate: cert, signs: None });
    }
    // search ε_i ∈ {±1}, ε_0 = 1
    if r <= 16 {
        for mask in 1u32..(1 << (r - 1)) {
            let eps: Vec<i8> = (0..r).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1 } else { 1 }).collect();
            let psi = build(&eps);
            let cert = psi.verify();
            if cert.is_embedding() {
                return Ok(AlphaEnvelope { presentation: c, carrier: env.carrier, psi, certificate: cert, signs: Some(eps) });
            }
        }
    }
    Err(EnvelopeError::NotCertified(cert.witnesses.join("; ")))
}

/// `(B^α)^{α⁻¹} → B`, `V_g ⊗ U_g ⊗ b ↦ b`, with its certificate.
pub fn round_trip(b: &Arc<StructureAlgebra>, alpha: &Cocycle) -> Result<(GradedHom, HomCertificate), EnvelopeError> {
    let inner = twist(b, alpha)?;
    let outer = twist(&inner.carrier, &alpha.inverse())?;
    let images = outer.pairs.iter().map(|&(_, k)| Elem::basis(inner.pairs[k].1)).collect();
    let psi = GradedHom::new(outer.carrier.clone(), b.clone(), images);
    let cert = psi.verify();
    Ok((psi, cert))
}

/// `φ^α : B₁^α → B₂^α`, `U_g ⊗ b ↦ U_g ⊗ φ(b)`.
pub fn lift_hom(phi: &GradedHom, alpha: &Cocycle) -> Result<GradedHom, EnvelopeError> {
    let e1 = twist(&phi.source, alpha)?;
    let e2 = twist(&phi.target, alpha)?;
    let mut images = Vec::with_capacity(e1.pairs.len());
    for &(u, b) in &e1.pairs {
        let mut img = Elem::zero();
        for (&k, c) in &phi.images[b].terms {
            // a non-graded φ has no lift; report it through verification
            match e2.index(u, k) {
                Some(t) => img.add_term(t, c.clone()),
                None => return Err(EnvelopeError::NotCertified(format!("image of basis {} leaves its degree", b))),
            }
        }
        images.push(img);
    }
    Ok(GradedHom::new(e1.carrier.clone(), e2.carrier.clone(), images))
}

/// `f^α = Σ_σ λ_σ α(ḡ^σ) x_{σ(1)}⋯x_{σ(n)}`.
pub fn falpha(f: &MultilinearPoly, alpha: &Cocycle) -> Result<MultilinearPoly, IdentityError> {
    if let Some(&d) = f.degrees().iter().find(|&&d| !alpha.contains(d)) {
        return Err(IdentityError::DegreeOutsideGroup(d));
    }
    match f.factors() {
        None => {
            let degs = f.degrees();
            Ok(f.map_coeffs(|w| {
                let gs: Vec<usize> = w.iter().map(|&i| degs[i as usize]).collect();
                alpha.iterated_alpha_unchecked(&gs).to_cyclo()
            }))
        }
        Some(fs) => {
            let mut out = fs.iter().map(|p| falpha(p, alpha)).collect::<Result<Vec<_>, _>>()?;
            let targets: Vec<usize> = fs.iter().map(|p| p.target()).collect();
            let c: Cyclo = alpha.iterated_alpha_unchecked(&targets).to_cyclo();
            out[0] = out[0].scale(&c);
            Ok(f.with_factors(out))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycles::bicharacter_cocycle;
    use crate::groups::FiniteGroup;
    use crate::identities::{is_identity, permutations, sign};
    use crate::tuples::GTuple;

    fn klein() -> (crate::groups::Group, Cocycle) {
        let g = FiniteGroup::abelian(&[2, 2]);
        let a = bicharacter_cocycle(&g, &[1]).unwrap();
        (g, a)
    }

    #[test]
    fn trivial_component_envelope() {
        let (g, alpha) = klein();
        let a = Presentation::new(&alpha, &GTuple { entries: vec![0, 1] }).unwrap();
        let k = Presentation::elementary(&g, &GTuple { entries: vec![0] }).unwrap();
        let env = genvelope(a.algebra(), k.algebra()).unwrap();
        assert_eq!(env.carrier.dim(), a.algebra().component(0).len());
    }

    #[test]
    fn twisted_times_inverse_is_commutative() {
        let (g, alpha) = klein();
        let a = Presentation::twisted(&alpha);
        let b = Presentation::twisted(&alpha.inverse());
        let env = genvelope(a.algebra(), b.algebra()).unwrap();
        let c = &env.carrier;
        assert_eq!(c.dim(), g.order());
        for i in 0..c.dim() {
            for j in 0..c.dim() {
                assert_eq!(c.basis_product(i, j), c.basis_product(j, i));
            }
        }
    }

    #[test]
    fn envelope_dimension_is_sum_of_products() {
        let (g, alpha) = klein();
        let a = Presentation::new(&alpha, &GTuple { entries: vec![0, 3] }).unwrap();
        let b = Presentation::elementary(&g, &GTuple { entries: vec![0, 1, 2] }).unwrap();
        let env = genvelope(a.algebra(), b.algebra()).unwrap();
        let expect: usize = g.elements().map(|x| a.algebra().component(x).len() * b.algebra().component(x).len()).sum();
        assert_eq!(env.carrier.dim(), expect);
        env.carrier.check_associativity().unwrap();
    }

    #[test]
    fn alpha_envelope_trivial_and_twisted() {
        let (g, alpha) = klein();
        let b = Presentation::elementary(&g, &GTuple { entries: vec![0, 1, 3] }).unwrap();
        let triv = alpha_envelope(&b, &Cocycle::trivial(&g.whole())).unwrap();
        assert!(triv.psi.images.iter().all(|e| e.as_monomial().unwrap().1 == Root::one()));
        let k = Presentation::new(&Cocycle::trivial(&g.whole()), &GTuple { entries: vec![0] }).unwrap();
        let env = alpha_envelope(&k, &alpha).unwrap();
        assert_eq!(env.presentation.alpha(), &alpha);
        assert!(env.certificate.is_embedding());
    }

    #[test]
    fn alpha_envelope_with_nontrivial_square_roots() {
        // α(s⁻¹, s) = -1 for s = a in this cocycle, so σ is a fourth root of unity
        let g = FiniteGroup::cyclic(4);
        let alpha = Cocycle::trivial(&g.whole()).times_coboundary(|x| Root::new(8, (x * x) as i64));
        let b = Presentation::new(&Cocycle::trivial(&g.whole()), &GTuple { entries: vec![0, 1, 2, 2] }).unwrap();
        let env = alpha_envelope(&b, &alpha).unwrap();
        assert!(env.certificate.is_embedding());
        assert_eq!(env.signs, None);
    }

    #[test]
    fn round_trip_and_lift() {
        let (g, alpha) = klein();
        let b = Presentation::new(&alpha, &GTuple { entries: vec![0, 1] }).unwrap();
        let (_, cert) = round_trip(b.algebra(), &alpha).unwrap();
        assert!(cert.is_embedding());
        let (_, phi) = b.tuple_symmetry(&crate::galg::SymmetryOp::Conjugate(3)).unwrap();
        let lifted = lift_hom(&phi, &alpha).unwrap();
        assert!(lifted.verify().is_embedding());
        assert_eq!(g.order(), 4);
    }

    #[test]
    fn falpha_examples() {
        let (g, alpha) = klein();
        let (a, b) = (2, 1);
        let comm = MultilinearPoly::new(&g, vec![a, b], 3, [(vec![0, 1], Cyclo::one()), (vec![1, 0], Cyclo::from_int(-1))]).unwrap();
        let tw = falpha(&comm, &alpha).unwrap();
        let ratio = alpha.get(b, a).div(alpha.get(a, b));
        assert_eq!(ratio, Root::minus_one());
        assert_eq!(tw.coeff(&[1, 0]), tw.coeff(&[0, 1]));
        assert_eq!(falpha(&tw, &alpha.inverse()).unwrap(), comm);
        assert_eq!(falpha(&comm, &Cocycle::trivial(&g.whole())).unwrap(), comm);
        let x = MultilinearPoly::variable(a);
        assert_eq!(falpha(&x, &alpha).unwrap(), x);
    }

    #[test]
    fn identity_transfer_on_klein() {
        let (g, alpha) = klein();
        let b = Presentation::elementary(&g, &GTuple { entries: vec![0, 1] }).unwrap();
        let env = alpha_envelope(&b, &alpha).unwrap();
        let ba = env.presentation.algebra();
        for degs in [vec![2, 1], vec![3, 3], vec![1, 2, 3], vec![0, 1, 1]] {
            for w0 in permutations(degs.len()) {
                let target = degs.iter().fold(0, |acc, &d| g.mul(acc, d));
                let f = MultilinearPoly::new(&g, degs.clone(), target, [(w0.clone(), Cyclo::one()), (permutations(degs.len())[0].clone(), Cyclo::from_int(sign(&w0)))]).unwrap();
                let lhs = is_identity(&f, ba).holds;
                let rhs = is_identity(&falpha(&f, &alpha).unwrap(), b.algebra()).holds;
                assert_eq!(lhs, rhs, "{:?} {:?}", degs, w0);
            }
        }
    }
}
