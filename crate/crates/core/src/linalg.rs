//! Exact linear algebra over cyclotomic fields, plus monomial matrices with
//! root-of-unity entries.

use crate::scalars::{Cyclo, Root};

/// Incrementally maintained reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Vec<Cyclo>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// The reduced rows, one per pivot.
    pub fn rows(&self) -> &[Vec<Cyclo>] {
        &self.rows
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Reduce `row` against the current basis; returns the residue.
    pub fn reduce(&self, mut row: Vec<Cyclo>) -> Vec<Cyclo> {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(r) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        row
    }

    /// Adds `row` to the span; returns true if the rank went up.
    pub fn insert(&mut self, row: Vec<Cyclo>) -> bool {
        assert_eq!(row.len(), self.ncols);
        let mut row = self.reduce(row);
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[p].inv().expect("nonzero pivot");
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for r in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (x, y) in r.iter_mut().zip(&row) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, row);
        true
    }

    /// Basis of the null space `{x : row·x = 0 for all rows}`.
    pub fn kernel(&self) -> Vec<Vec<Cyclo>> {
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Cyclo::zero(); self.ncols];
                v[f] = Cyclo::one();
                for (r, &p) in self.rows.iter().zip(&self.pivots) {
                    if !r[f].is_zero() {
                        v[p] = -&r[f];
                    }
                }
                v
            })
            .collect()
    }
}

/// One solution `x` of `Σ_j rows[i][j]·x_j = rhs[i]`, free variables set to zero.
pub fn solve(rows: &[Vec<Cyclo>], rhs: &[Cyclo], ncols: usize) -> Option<Vec<Cyclo>> {
    let mut e = Echelon::new(ncols + 1);
    for (r, b) in rows.iter().zip(rhs) {
        let mut row = r.clone();
        row.push(-b);
        e.insert(row);
    }
    let mut x = vec![Cyclo::zero(); ncols];
    for (r, &p) in e.rows.iter().zip(&e.pivots) {
        if p == ncols {
            return None;
        }
        x[p] = -&r[ncols];
    }
    Some(x)
}

pub fn rank(rows: impl IntoIterator<Item = Vec<Cyclo>>, ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
        if e.is_full() {
            break;
        }
    }
    e.rank()
}

/// A square matrix with exactly one nonzero entry, a root of unity, in each column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonoMat {
    /// Row index of the nonzero entry in column `j`.
    pub row_of: Vec<usize>,
    pub vals: Vec<Root>,
}

impl MonoMat {
    pub fn identity(d: usize) -> Self {
        MonoMat { row_of: (0..d).collect(), vals: vec![Root::one(); d] }
    }

    pub fn dim(&self) -> usize {
        self.row_of.len()
    }

    pub fn mul(&self, rhs: &MonoMat) -> MonoMat {
        let d = self.dim();
        let mut row_of = vec![0; d];
        let mut vals = vec![Root::one(); d];
        for j in 0..d {
            let r = rhs.row_of[j];
            row_of[j] = self.row_of[r];
            vals[j] = self.vals[r].mul(rhs.vals[j]);
        }
        MonoMat { row_of, vals }
    }

    pub fn scale(&self, c: Root) -> MonoMat {
        MonoMat { row_of: self.row_of.clone(), vals: self.vals.iter().map(|v| v.mul(c)).collect() }
    }

    /// Entry `(i, j)` if nonzero.
    pub fn entry(&self, i: usize, j: usize) -> Option<Root> {
        (self.row_of[j] == i).then_some(self.vals[j])
    }

    /// Row-major dense entries.
    pub fn to_dense(&self) -> Vec<Cyclo> {
        let d = self.dim();
        let mut out = vec![Cyclo::zero(); d * d];
        for j in 0..d {
            out[self.row_of[j] * d + j] = self.vals[j].to_cyclo();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> Cyclo {
        Cyclo::from_int(v)
    }

    #[test]
    fn rank_and_kernel() {
        let mut e = Echelon::new(3);
        assert!(e.insert(vec![c(1), c(2), c(3)]));
        assert!(e.insert(vec![c(2), c(4), c(7)]));
        assert!(!e.insert(vec![c(3), c(6), c(10)]));
        assert_eq!(e.rank(), 2);
        let k = e.kernel();
        assert_eq!(k.len(), 1);
        // kernel vector is orthogonal to every inserted row
        for row in [[1, 2, 3], [2, 4, 7]] {
            let dot = row.iter().zip(&k[0]).fold(Cyclo::zero(), |acc, (&a, x)| &acc + &(&c(a) * x));
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn cyclotomic_rank() {
        let i = Cyclo::zeta_pow(4, 1);
        // rows (1, i) and (i, -1) are proportional
        assert_eq!(rank(vec![vec![c(1), i.clone()], vec![i.clone(), c(-1)]], 2), 1);
        assert_eq!(rank(vec![vec![c(1), i.clone()], vec![i, c(1)]], 2), 2);
    }

    #[test]
    fn monomial_product_matches_dense() {
        let a = MonoMat { row_of: vec![1, 0], vals: vec![Root::new(4, 1), Root::one()] };
        let b = MonoMat { row_of: vec![0, 1], vals: vec![Root::minus_one(), Root::new(4, 1)] };
        let ab = a.mul(&b).to_dense();
        let (da, db) = (a.to_dense(), b.to_dense());
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Cyclo::zero();
                for k in 0..2 {
                    s = &s + &(&da[i * 2 + k] * &db[k * 2 + j]);
                }
                assert_eq!(s, ab[i * 2 + j]);
            }
        }
    }
}
