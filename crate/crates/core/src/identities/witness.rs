//! Polynomials in `Id_G(B) ∖ Id_G(A)` when `A` does not embed in `B`.

use serde::{Deserialize, Serialize};

use super::eval::{is_identity, IdentityCheck};
use super::poly::MultilinearPoly;
use super::space::inclusion_bounded;
use super::{Budget, IdentityError};
use crate::envelope::falpha;
use crate::galg::{Elem, Presentation};
use crate::linalg::solve;
use crate::scalars::{lcm, Cyclo};
use crate::tuples::{coset_decompose, exists_shift, GTuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparatorCase {
    /// `B = K^βG ⊗ M_{r₂}` with `r₂ < d·r₁`: a twisted standard polynomial.
    FullSupport,
    /// `B = M_t̄`, any group: the product of the `f_{i,h}` blocks.
    ElementaryNonabelian,
    /// Bounded scan of the identity spaces.
    BoundedFallback,
}

/// A separating polynomial with both membership checks.
#[derive(Clone, Debug)]
pub struct SeparatorReport {
    pub case: SeparatorCase,
    pub poly: MultilinearPoly,
    /// `poly ∈ Id_G(B)`.
    pub in_b: IdentityCheck,
    /// `poly ∉ Id_G(A)`, with the witness assignment.
    pub in_a: IdentityCheck,
}

/// Builds and verifies `f ∈ Id_G(B) ∖ Id_G(A)`.
pub fn witness_separate(
    a: &Presentation,
    b: &Presentation,
    case: SeparatorCase,
    budget: &Budget,
) -> Result<SeparatorReport, IdentityError> {
    if !crate::galg::same_group(a.group(), b.group()) {
        return Err(IdentityError::MismatchedGroup);
    }
    let poly = match case {
        SeparatorCase::FullSupport => full_support(a, b)?,
        SeparatorCase::ElementaryNonabelian => elementary(a, b)?,
        SeparatorCase::BoundedFallback => fallback(a, b, budget)?,
    };
    let in_b = is_identity(&poly, b.algebra());
    let in_a = is_identity(&poly, a.algebra());
    if !in_b.holds {
        return Err(IdentityError::Verification("polynomial is not an identity of B".into()));
    }
    if in_a.holds {
        return Err(IdentityError::Verification("polynomial is an identity of A".into()));
    }
    Ok(SeparatorReport { case, poly, in_b, in_a })
}

/// Square matrices over `Z[ζ_m]`, entries stored as counts of each power of `ζ_m`.
struct CountMat {
    n: usize,
    m: usize,
    v: Vec<i64>,
}

impl CountMat {
    fn zero(n: usize, m: usize) -> Self {
        CountMat { n, m, v: vec![0; n * n * m] }
    }

    fn add_entry(&mut self, i: usize, j: usize, e: usize, c: i64) {
        let m = self.m;
        self.v[(i * self.n + j) * m + e % m] += c;
    }

    /// `self += sign · x · y`.
    fn add_product(&mut self, x: &CountMat, y: &CountMat, sign: i64) {
        let (n, m) = (self.n, self.m);
        for i in 0..n {
            for k in 0..n {
                let xe = &x.v[(i * n + k) * m..(i * n + k + 1) * m];
                if xe.iter().all(|&c| c == 0) {
                    continue;
                }
                for j in 0..n {
                    let ye = &y.v[(k * n + j) * m..(k * n + j + 1) * m];
                    for (a, &ca) in xe.iter().enumerate() {
                        if ca == 0 {
                            continue;
                        }
                        for (b, &cb) in ye.iter().enumerate() {
                            if cb != 0 {
                                self.v[(i * n + j) * m + (a + b) % m] += sign * ca * cb;
                            }
                        }
                    }
                }
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.v.chunks(self.m).all(|e| e.iter().all(|&c| c == 0) || Cyclo::from_root_counts(self.m as u32, e).is_zero())
    }
}

/// `St_m(x_1, …, x_m) ≠ 0`, by dynamic programming over the used subsets:
/// appending `x_i` after the set `S` contributes `(-1)^{#{j ∈ S : j > i}}`.
fn standard_nonzero(xs: &[CountMat]) -> bool {
    let m = xs.len();
    let (n, q) = (xs[0].n, xs[0].m);
    let full = (1usize << m) - 1;
    let mut dp: Vec<Option<CountMat>> = (0..=full).map(|_| None).collect();
    let mut id = CountMat::zero(n, q);
    for i in 0..n {
        id.add_entry(i, i, 0, 1);
    }
    dp[0] = Some(id);
    for set in 0..full {
        let Some(cur) = dp[set].take() else { continue };
        for i in 0..m {
            if set >> i & 1 == 1 {
                continue;
            }
            let above = (set >> (i + 1)).count_ones();
            let sign = if above % 2 == 0 { 1 } else { -1 };
            let next = dp[set | 1 << i].get_or_insert_with(|| CountMat::zero(n, q));
            next.add_product(&cur, &xs[i], sign);
        }
    }
    !dp[full].as_ref().expect("full set reached").is_zero()
}

/// `St_{2r₂}` at a staircase of matrix units of `M_{d·r₁}`, pulled back along
/// `ρ ⊗ id : K^γH ⊗ M_{r₁} → M_d ⊗ M_{r₁}` and reduced one slot at a time to
/// a single homogeneous basis element, keeping the value nonzero. The result
/// is twisted by `β⁻¹` to move from `A^{β⁻¹}` back to `A`.
fn full_support(a: &Presentation, b: &Presentation) -> Result<MultilinearPoly, IdentityError> {
    let g = a.group();
    if !g.is_abelian() {
        return Err(IdentityError::NotApplicable("grading group is not abelian".into()));
    }
    if b.h().order() != g.order() {
        return Err(IdentityError::NotApplicable("B is not of the form K^βG ⊗ M_r".into()));
    }
    let beta = b.alpha();
    let gamma = a.alpha().ratio(&beta.restrict(a.h())?)?;
    let irrep = gamma.smallest_irrep()?;
    let (d, r1, r2) = (irrep.dim, a.r(), b.r());
    if r2 >= d * r1 {
        return Err(IdentityError::DecisionWasTrue);
    }
    let a2 = Presentation::new(&gamma, a.s())?;
    let hs = a.h().elements().to_vec();
    let n = d * r1;
    let len = 2 * r2;
    let stairs: Vec<(usize, usize)> = (0..len).map(|k| (k / 2, (k + 1) / 2)).collect();

    let mut q = 1;
    for &h in &hs {
        for v in &irrep.rho_of(h).vals {
            q = lcm(q, v.order());
        }
    }
    let rows: Vec<Vec<Cyclo>> = (0..d * d)
        .map(|uv| hs.iter().map(|&h| irrep.rho_of(h).entry(uv / d, uv % d).map_or_else(Cyclo::zero, |r| r.to_cyclo())).collect())
        .collect();

    // image of U_h ⊗ E_{i,j}
    let lift = |h: usize, i: usize, j: usize| -> CountMat {
        let rho = irrep.rho_of(h);
        let mut x = CountMat::zero(n, q as usize);
        for col in 0..d {
            x.add_entry(rho.row_of[col] * r1 + i, col * r1 + j, rho.vals[col].exp_in(q) as usize, 1);
        }
        x
    };
    let unit = |u: usize, v: usize| -> CountMat {
        let mut x = CountMat::zero(n, q as usize);
        x.add_entry(u, v, 0, 1);
        x
    };

    let mut cur: Vec<CountMat> = stairs.iter().map(|&(u, v)| unit(u, v)).collect();
    if !standard_nonzero(&cur) {
        return Err(IdentityError::Verification("staircase value vanished".into()));
    }
    let mut picks = Vec::with_capacity(len);
    for (k, &(u, v)) in stairs.iter().enumerate() {
        let (p, i) = (u / r1, u % r1);
        let (pq, j) = (v / r1, v % r1);
        let mut rhs = vec![Cyclo::zero(); d * d];
        rhs[p * d + pq] = Cyclo::one();
        let c = solve(&rows, &rhs, hs.len())
            .ok_or_else(|| IdentityError::Verification("representation is not surjective".into()))?;
        let mut found = None;
        for (hl, ch) in c.iter().enumerate() {
            if ch.is_zero() {
                continue;
            }
            let saved = std::mem::replace(&mut cur[k], lift(hs[hl], i, j));
            if standard_nonzero(&cur) {
                found = Some(hs[hl]);
                break;
            }
            cur[k] = saved;
        }
        let h = found.ok_or_else(|| IdentityError::Verification("no homogeneous component keeps the value".into()))?;
        picks.push(a2.index(h, i, j));
    }
    let degrees: Vec<usize> = picks.iter().map(|&k| a2.algebra().degree(k)).collect();
    let f = MultilinearPoly::standard(g, &degrees);
    let val = super::evaluate(&f, a2.algebra(), &picks.iter().map(|&k| Elem::basis(k)).collect::<Vec<_>>())?;
    if val.is_zero() {
        return Err(IdentityError::Verification("standard polynomial vanished on the chosen basis".into()));
    }
    falpha(&f, &beta.inverse())
}

/// `f = Π_i Π_{h∈H} f_{i,h}·x_{e,(i,h)}` with
/// `f_{i,h} = x_{s₁⁻¹hs_i} · St_{2r_i−1}(z_e, …) · y_{(s₁⁻¹hs_i)⁻¹}`.
fn elementary(a: &Presentation, b: &Presentation) -> Result<MultilinearPoly, IdentityError> {
    let g = a.group();
    if b.h().order() != 1 {
        return Err(IdentityError::NotApplicable("B is not an elementary grading".into()));
    }
    let hs = a.h().elements();
    let pattern = GTuple {
        entries: hs.iter().flat_map(|&h| a.s().entries.iter().map(move |&s| g.mul(h, s))).collect(),
    };
    if exists_shift(b.s(), &pattern, &g.trivial()).is_some() {
        return Err(IdentityError::DecisionWasTrue);
    }
    let blocks: Vec<(usize, usize)> =
        coset_decompose(a.s(), a.h()).into_iter().map(|(_, idx)| (a.s().entries[idx[0]], idx.len())).collect();
    let s1 = blocks[0].0;
    let e = g.identity();
    let mut factors = Vec::new();
    for &(si, ri) in &blocks {
        for &h in hs {
            let x = g.mul(g.mul(g.inv(s1), h), si);
            factors.push(MultilinearPoly::variable(x));
            factors.push(MultilinearPoly::standard(g, &vec![e; 2 * ri - 1]));
            factors.push(MultilinearPoly::variable(g.inv(x)));
            factors.push(MultilinearPoly::variable(e));
        }
    }
    Ok(MultilinearPoly::product(g, factors))
}

fn fallback(a: &Presentation, b: &Presentation, budget: &Budget) -> Result<MultilinearPoly, IdentityError> {
    match inclusion_bounded(b.algebra(), a.algebra(), budget.max_len, budget) {
        Ok(rep) => match rep.violation {
            Some(v) => Ok(v.separator),
            None => Err(IdentityError::NotFoundWithinBudget),
        },
        Err(IdentityError::BudgetExceeded { .. }) => Err(IdentityError::NotFoundWithinBudget),
        Err(e) => Err(e),
    }
}
