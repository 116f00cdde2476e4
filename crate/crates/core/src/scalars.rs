//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.
//!
//! A [`Cyclo`] stores its coordinates in the power basis `1, ζ_m, …, ζ_m^{φ(m)-1}`
//! as integer numerators over one shared positive denominator. Roots of unity
//! also get a lightweight exact type, [`Root`], which is what cocycles and
//! monomial structure constants use in their inner loops.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor {target} is not a multiple of {from}")]
    ConductorNotMultiple { from: u32, target: u32 },
    #[error("scalar is not a root of unity")]
    NotRootOfUnity,
    #[error("malformed scalar: {0}")]
    Malformed(String),
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

pub fn euler_phi(m: u32) -> usize {
    let mut n = m;
    let mut out = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out as usize
}

/// Coefficients of the m-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_poly(m: u32) -> Vec<BigInt> {
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            num = div_monic(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    let mut q = vec![BigInt::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    q
}

struct Field {
    phi: usize,
    poly: Vec<BigInt>,
    powers: Vec<Vec<BigInt>>,
}

fn field(m: u32) -> Arc<Field> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Field>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&m) {
        return f.clone();
    }
    let poly = cyclotomic_poly(m);
    let phi = poly.len() - 1;
    let mut powers = Vec::with_capacity(m as usize);
    let mut cur = vec![BigInt::zero(); phi];
    cur[0] = BigInt::one();
    for _ in 0..m {
        powers.push(cur.clone());
        // multiply by x and reduce the overflow coefficient
        let mut next = vec![BigInt::zero(); phi + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] = c.clone();
        }
        let top = next[phi].clone();
        if !top.is_zero() {
            for i in 0..=phi {
                next[i] -= &top * &poly[i];
            }
        }
        next.truncate(phi);
        cur = next;
    }
    let f = Arc::new(Field { phi, poly, powers });
    cache.lock().unwrap().insert(m, f.clone());
    f
}

fn reduce(mut p: Vec<BigInt>, f: &Field) -> Vec<BigInt> {
    let phi = f.phi;
    if p.len() > phi {
        for deg in (phi..p.len()).rev() {
            let c = std::mem::take(&mut p[deg]);
            if c.is_zero() {
                continue;
            }
            for i in 0..phi {
                p[deg - phi + i] -= &c * &f.poly[i];
            }
        }
    }
    p.resize(phi, BigInt::zero());
    p
}

/// An exact element of `Q(ζ_m)`.
#[derive(Clone)]
pub struct Cyclo {
    m: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclo {
    fn from_parts(m: u32, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut c = Cyclo { m, num, den };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        if self.num.iter().all(|x| x.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.clone();
        for x in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(x);
        }
        if self.den.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for x in self.num.iter_mut() {
                *x = &*x / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn zero() -> Self {
        Cyclo { m: 1, num: vec![BigInt::zero()], den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Cyclo { m: 1, num: vec![BigInt::from(v)], den: BigInt::one() }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Cyclo::from_parts(1, vec![q.numer().clone()], q.denom().clone())
    }

    /// `ζ_n^k` in the field of conductor `n`.
    pub fn zeta_pow(n: u32, k: i64) -> Self {
        let f = field(n);
        let k = k.rem_euclid(n as i64) as usize;
        Cyclo { m: n, num: f.powers[k].clone(), den: BigInt::one() }
    }

    /// `Σ_k counts[k]·ζ_n^k`, a fast path for sums of roots with integer weights.
    pub fn from_root_counts(n: u32, counts: &[i64]) -> Self {
        let f = field(n);
        let mut num = vec![BigInt::zero(); f.phi];
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, p) in num.iter_mut().zip(&f.powers[k % n as usize]) {
                if !p.is_zero() {
                    *slot += p * c;
                }
            }
        }
        Cyclo::from_parts(n, num, BigInt::one())
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    /// Coordinates as reduced rationals.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|x| BigRational::new(x.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|x| x.is_zero())
    }

    /// The rational value, if the element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|x| x.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn rebase(&self, target: u32) -> Result<Self, ScalarError> {
        if target % self.m != 0 {
            return Err(ScalarError::ConductorNotMultiple { from: self.m, target });
        }
        if target == self.m {
            return Ok(self.clone());
        }
        let f = field(target);
        let step = (target / self.m) as usize;
        let mut num = vec![BigInt::zero(); f.phi];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = &f.powers[(i * step) % target as usize];
            for (slot, pj) in num.iter_mut().zip(p) {
                if !pj.is_zero() {
                    *slot += c * pj;
                }
            }
        }
        Ok(Cyclo::from_parts(target, num, self.den.clone()))
    }

    fn common(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        let l = lcm(a.m, b.m);
        (a.rebase(l).unwrap(), b.rebase(l).unwrap())
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let f = field(self.m);
        let phi = f.phi;
        if phi == 1 {
            return Ok(Cyclo::from_parts(self.m, vec![self.den.clone()], self.num[0].clone()));
        }
        // Solve (multiplication by self)·x = 1 over Q.
        let mut mat: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); phi + 1]; phi];
        for j in 0..phi {
            let mut shifted = vec![BigInt::zero(); phi + j];
            for (i, c) in self.num.iter().enumerate() {
                shifted[i + j] = c.clone();
            }
            let col = reduce(shifted, &f);
            for i in 0..phi {
                mat[i][j] = BigRational::new(col[i].clone(), self.den.clone());
            }
        }
        mat[0][phi] = BigRational::one();
        for c in 0..phi {
            let p = (c..phi).find(|&r| !mat[r][c].is_zero()).expect("nonzero field element");
            mat.swap(c, p);
            let pv = mat[c][c].clone();
            for k in c..=phi {
                mat[c][k] = &mat[c][k] / &pv;
            }
            for r in 0..phi {
                if r != c && !mat[r][c].is_zero() {
                    let fct = mat[r][c].clone();
                    for k in c..=phi {
                        let t = &fct * &mat[c][k];
                        mat[r][k] -= t;
                    }
                }
            }
        }
        let den = mat.iter().fold(BigInt::one(), |acc, row| acc.lcm(row[phi].denom()));
        let num = mat
            .iter()
            .map(|row| row[phi].numer() * (&den / row[phi].denom()))
            .collect();
        Ok(Cyclo::from_parts(self.m, num, den))
    }

    pub fn checked_div(&self, other: &Cyclo) -> Result<Self, ScalarError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclo::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Express the element as `ζ_n^k` when it is a root of unity.
    pub fn to_root(&self) -> Option<Root> {
        if !self.den.is_one() {
            return None;
        }
        let m = if self.m % 2 == 1 { 2 * self.m } else { self.m };
        let a = self.rebase(m).ok()?;
        let f = field(m);
        f.powers
            .iter()
            .position(|p| *p == a.num)
            .map(|k| Root::new(m, k as i64))
    }

    /// The canonical square root `ζ_{2m}^k` of `ζ_m^k`.
    pub fn sqrt_root_of_unity(&self) -> Result<Self, ScalarError> {
        self.to_root().map(|r| r.sqrt().to_cyclo()).ok_or(ScalarError::NotRootOfUnity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(a: &Cyclo, b: &Cyclo, op: ArithOp) -> Result<Cyclo, ScalarError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        if self.m == other.m {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = Cyclo::common(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyclo {}

impl<'a> Add<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let (a, b) = if self.m == rhs.m { (self.clone(), rhs.clone()) } else { Cyclo::common(self, rhs) };
        let num = if a.den == b.den {
            a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect()
        } else {
            a.num.iter().zip(&b.num).map(|(x, y)| x * &b.den + y * &a.den).collect()
        };
        let den = if a.den == b.den { a.den.clone() } else { &a.den * &b.den };
        Cyclo::from_parts(a.m, num, den)
    }
}

impl<'a> Sub<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        self + &(-rhs)
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo { m: self.m, num: self.num.iter().map(|x| -x).collect(), den: self.den.clone() }
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

impl<'a> Mul<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        if self.is_zero() || rhs.is_zero() {
            return Cyclo::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        let (a, b) = if self.m == rhs.m { (self.clone(), rhs.clone()) } else { Cyclo::common(self, rhs) };
        let f = field(a.m);
        let mut prod = vec![BigInt::zero(); 2 * f.phi - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Cyclo::from_parts(a.m, reduce(prod, &f), &a.den * &b.den)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Cyclo> for Cyclo {
            type Output = Cyclo;
            fn $f(self, rhs: Cyclo) -> Cyclo {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Cyclo> for Cyclo {
            type Output = Cyclo;
            fn $f(self, rhs: &Cyclo) -> Cyclo {
                (&self).$f(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_root() {
            if r.is_one() {
                return write!(f, "1");
            }
            if r == Root::minus_one() {
                return write!(f, "-1");
            }
            return write!(f, "z{}^{}", r.order(), r.exp());
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i == 0 {
                terms.push(format!("{}", c));
            } else {
                terms.push(format!("({})*z{}^{}", c, self.m, i));
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CycloDoc {
    conductor: u32,
    coeffs: Vec<[String; 2]>,
}

impl Serialize for Cyclo {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycloDoc {
            conductor: self.m,
            coeffs: self
                .coeffs()
                .iter()
                .map(|q| [q.numer().to_string(), q.denom().to_string()])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclo {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = CycloDoc::deserialize(d)?;
        Cyclo::from_doc(doc).map_err(serde::de::Error::custom)
    }
}

impl Cyclo {
    fn from_doc(doc: CycloDoc) -> Result<Self, ScalarError> {
        if doc.conductor == 0 {
            return Err(ScalarError::Malformed("conductor must be positive".into()));
        }
        let phi = euler_phi(doc.conductor);
        if doc.coeffs.len() != phi {
            return Err(ScalarError::Malformed(format!(
                "expected {} coefficients, got {}",
                phi,
                doc.coeffs.len()
            )));
        }
        let mut qs = Vec::with_capacity(phi);
        for [n, d] in &doc.coeffs {
            let n: BigInt = n.parse().map_err(|_| ScalarError::Malformed(n.clone()))?;
            let d: BigInt = d.parse().map_err(|_| ScalarError::Malformed(d.clone()))?;
            if d.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            qs.push(BigRational::new(n, d));
        }
        let den = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = qs.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        Ok(Cyclo::from_parts(doc.conductor, num, den))
    }
}

/// The root of unity `exp(2πi·k/n)`, kept with `k/n` in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Root {
    n: u32,
    k: u32,
}

impl Root {
    pub fn new(n: u32, k: i64) -> Self {
        assert!(n > 0, "root order must be positive");
        let k = k.rem_euclid(n as i64) as u64;
        let g = gcd(k, n as u64).max(1);
        if k == 0 {
            return Root { n: 1, k: 0 };
        }
        Root { n: (n as u64 / g) as u32, k: (k / g) as u32 }
    }

    pub fn one() -> Self {
        Root { n: 1, k: 0 }
    }

    pub fn minus_one() -> Self {
        Root { n: 2, k: 1 }
    }

    pub fn is_one(&self) -> bool {
        self.k == 0
    }

    /// Multiplicative order.
    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn exp(&self) -> u32 {
        self.k
    }

    /// Exponent of this root relative to `ζ_m`; `m` must be a multiple of the order.
    pub fn exp_in(&self, m: u32) -> u32 {
        debug_assert!(m % self.n == 0);
        self.k * (m / self.n)
    }

    pub fn mul(self, o: Root) -> Root {
        let l = lcm(self.n, o.n);
        Root::new(l, self.exp_in(l) as i64 + o.exp_in(l) as i64)
    }

    pub fn div(self, o: Root) -> Root {
        self.mul(o.inv())
    }

    pub fn inv(self) -> Root {
        Root::new(self.n, -(self.k as i64))
    }

    pub fn pow(self, e: i64) -> Root {
        Root::new(self.n, (self.k as i64) * e.rem_euclid(self.n as i64))
    }

    /// Canonical square root: `ζ_n^k ↦ ζ_{2n}^k`.
    pub fn sqrt(self) -> Root {
        Root::new(2 * self.n, self.k as i64)
    }

    pub fn to_cyclo(self) -> Cyclo {
        Cyclo::zeta_pow(self.n, self.k as i64)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z{}^{}", self.n, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32, k: i64) -> Cyclo {
        Cyclo::zeta_pow(n, k)
    }

    #[test]
    fn cyclotomic_polys_match_known() {
        let as_i = |v: Vec<BigInt>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(as_i(cyclotomic_poly(1)), "-1,1");
        assert_eq!(as_i(cyclotomic_poly(4)), "1,0,1");
        assert_eq!(as_i(cyclotomic_poly(6)), "1,-1,1");
        assert_eq!(as_i(cyclotomic_poly(12)), "1,0,-1,0,1");
        for m in 1..40 {
            assert_eq!(cyclotomic_poly(m).len() - 1, euler_phi(m));
        }
    }

    #[test]
    fn i_squared() {
        assert_eq!(&z(4, 1) * &z(4, 1), Cyclo::from_int(-1));
    }

    #[test]
    fn additive_identity() {
        let x = &z(5, 2) + &Cyclo::from_int(3);
        assert_eq!(&x + &Cyclo::zero(), x);
    }

    #[test]
    fn one_plus_zeta3_norm() {
        // (1+ζ)(1+ζ²) = 1 + ζ + ζ² + ζ³ = 0 + 1
        let a = &Cyclo::one() + &z(3, 1);
        let b = &Cyclo::one() + &z(3, 2);
        assert_eq!(&a * &b, Cyclo::one());
    }

    #[test]
    fn rebase_examples() {
        let m1 = Cyclo::from_int(-1).rebase(2).unwrap();
        assert_eq!(m1.rebase(4).unwrap(), z(4, 2));
        let a = z(7, 3);
        assert_eq!(a.rebase(7).unwrap(), a);
        let r = z(3, 1).rebase(6).unwrap();
        assert_eq!(r, z(6, 2));
        assert_eq!(r.conductor(), 6);
        assert!(r.pow(3).is_one());
        assert!(!r.is_one());
        assert_eq!(z(3, 1).rebase(4), Err(ScalarError::ConductorNotMultiple { from: 3, target: 4 }));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(Cyclo::one().sqrt_root_of_unity().unwrap(), Cyclo::one());
        assert_eq!(Cyclo::from_int(-1).sqrt_root_of_unity().unwrap(), z(4, 1));
        let s = z(3, 1).sqrt_root_of_unity().unwrap();
        assert_eq!(&s * &s, z(3, 1));
        assert_eq!(s, z(6, 1));
        assert_eq!(Cyclo::from_int(2).sqrt_root_of_unity(), Err(ScalarError::NotRootOfUnity));
        let two_z = &z(5, 1) + &z(5, 1);
        assert_eq!(two_z.sqrt_root_of_unity(), Err(ScalarError::NotRootOfUnity));
    }

    #[test]
    fn division() {
        let a = &z(12, 5) + &Cyclo::from_int(7);
        let b = &z(8, 3) - &z(3, 1);
        let q = a.checked_div(&b).unwrap();
        assert_eq!(&q * &b, a);
        assert_eq!(a.checked_div(&Cyclo::zero()), Err(ScalarError::DivisionByZero));
        assert_eq!(arith(&a, &b, ArithOp::Div).unwrap(), q);
    }

    #[test]
    fn root_arithmetic_matches_cyclo() {
        for n in [1u32, 2, 3, 4, 6, 8, 12] {
            for k in 0..n as i64 {
                let r = Root::new(n, k);
                let c = r.to_cyclo();
                assert_eq!(c.to_root(), Some(r));
                assert_eq!(r.inv().to_cyclo(), c.inv().unwrap());
                let s = r.sqrt();
                assert_eq!(s.mul(s), r);
                assert_eq!(c.sqrt_root_of_unity().unwrap(), s.to_cyclo());
            }
        }
    }

    #[test]
    fn serde_roundtrip() {
        let a = &z(12, 5) + &Cyclo::from_rational(&BigRational::new(3.into(), 7.into()));
        let js = serde_json::to_string(&a).unwrap();
        assert!(js.contains("\"conductor\":12"));
        let b: Cyclo = serde_json::from_str(&js).unwrap();
        assert_eq!(a, b);
        let bad = r#"{"conductor":4,"coeffs":[["1","1"]]}"#;
        assert!(serde_json::from_str::<Cyclo>(bad).is_err());
    }
}
