use super::complex::{ChainMap, WindowedComplex};
use crate::linalg::SparseMatrix;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A complex with a Σ_n-action given by the adjacent transpositions.
#[derive(Clone, Debug)]
pub struct SymmetricComplex {
    pub n: usize,
    pub complex: Arc<WindowedComplex>,
    /// `swaps[i]` acts by the transposition of `i, i+1` (0-based), degreewise.
    pub swaps: Vec<BTreeMap<i64, SparseMatrix>>,
}

impl SymmetricComplex {
    pub fn new(n: usize, complex: Arc<WindowedComplex>, swaps: Vec<BTreeMap<i64, SparseMatrix>>) -> Result<Self> {
        if swaps.len() != n.saturating_sub(1) {
            return Err(Error::Invalid(format!("Σ_{n} needs {} transpositions", n.saturating_sub(1))));
        }
        let s = SymmetricComplex { n, complex, swaps };
        let bad = s.check();
        if !bad.is_empty() {
            return Err(Error::Invalid(bad.join("; ")));
        }
        Ok(s)
    }

    /// Trivial action.
    pub fn trivial(n: usize, complex: Arc<WindowedComplex>) -> Self {
        let f = complex.field;
        let id: BTreeMap<i64, SparseMatrix> =
            complex.degrees().map(|d| (d, SparseMatrix::identity(f, complex.dim(d)))).collect();
        SymmetricComplex { n, complex, swaps: vec![id; n.saturating_sub(1)] }
    }

    pub fn swap(&self, i: usize, deg: i64) -> SparseMatrix {
        let f = self.complex.field;
        let k = self.complex.dim(deg);
        self.swaps[i].get(&deg).cloned().unwrap_or_else(|| SparseMatrix::identity(f, k))
    }

    pub fn swap_map(&self, i: usize) -> ChainMap {
        ChainMap::new_unchecked(self.complex.clone(), self.complex.clone(), self.swaps[i].clone())
    }

    /// Coxeter relations and commutation with d.
    pub fn check(&self) -> Vec<String> {
        let c = &self.complex;
        let f = c.field;
        let mut out = vec![];
        for deg in c.degrees() {
            let id = SparseMatrix::identity(f, c.dim(deg));
            for i in 0..self.swaps.len() {
                let s = self.swap(i, deg);
                if s.rows != c.dim(deg) || s.cols != c.dim(deg) {
                    out.push(format!("σ{} has the wrong shape in degree {deg}", i + 1));
                    continue;
                }
                if s.mul(&s) != id {
                    out.push(format!("Coxeter violation: σ{}² ≠ id in degree {deg}", i + 1));
                }
                if i + 1 < self.swaps.len() {
                    let t = self.swap(i + 1, deg);
                    if s.mul(&t).mul(&s) != t.mul(&s).mul(&t) {
                        out.push(format!("Coxeter violation: braid σ{}σ{} in degree {deg}", i + 1, i + 2));
                    }
                }
                for j in i + 2..self.swaps.len() {
                    let t = self.swap(j, deg);
                    if s.mul(&t) != t.mul(&s) {
                        out.push(format!("Coxeter violation: σ{}, σ{} in degree {deg}", i + 1, j + 1));
                    }
                }
                if deg > c.lo() && c.known(deg - 1) {
                    let d = c.d(deg);
                    if d.mul(&s) != self.swap(i, deg - 1).mul(&d) {
                        out.push(format!("σ{} does not commute with d in degree {deg}", i + 1));
                    }
                }
            }
        }
        out
    }

    /// Matrix of an arbitrary permutation in one degree.
    pub fn perm_matrix(&self, perm: &[usize], deg: i64) -> SparseMatrix {
        let f = self.complex.field;
        let mut m = SparseMatrix::identity(f, self.complex.dim(deg));
        for i in crate::operad::perm::adjacent_word(perm) {
            m = self.swap(i, deg).mul(&m);
        }
        m
    }
}
