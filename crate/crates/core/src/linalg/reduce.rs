use super::matrix::{axpy, scale, SVec, SparseMatrix};
use super::scalar::{Field, Scalar};
use crate::Error;
use std::collections::HashMap;

/// Incremental column echelon form; each stored vector has a distinct leading row
/// normalized to 1.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub field: Field,
    pub dim: usize,
    vecs: Vec<SVec>,
    pivot: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new(field: Field, dim: usize) -> Self {
        Echelon { field, dim, vecs: vec![], pivot: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    pub fn stored(&self, i: usize) -> &SVec {
        &self.vecs[i]
    }

    pub fn pivot_rows(&self) -> Vec<usize> {
        self.vecs.iter().map(|v| v[0].0).collect()
    }

    /// Eliminates leading entries; returns the residual and the coefficients used.
    pub fn reduce(&self, v: &SVec) -> (SVec, Vec<(usize, Scalar)>) {
        let mut r = v.clone();
        let mut used = vec![];
        while let Some((row, c)) = r.first().cloned() {
            match self.pivot.get(&row) {
                Some(&s) => {
                    axpy(&mut r, &c.neg(), &self.vecs[s]);
                    used.push((s, c));
                }
                None => break,
            }
        }
        (r, used)
    }

    /// Eliminates every entry on a pivot row.
    pub fn reduce_full(&self, v: &SVec) -> (SVec, Vec<(usize, Scalar)>) {
        let mut r = v.clone();
        let mut used = vec![];
        let mut k = 0;
        while k < r.len() {
            let (row, c) = r[k].clone();
            match self.pivot.get(&row) {
                Some(&s) => {
                    axpy(&mut r, &c.neg(), &self.vecs[s]);
                    used.push((s, c));
                }
                None => k += 1,
            }
        }
        (r, used)
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts `v`; returns the new slot when `v` was independent.
    pub fn insert(&mut self, v: &SVec) -> Option<usize> {
        let (r, _) = self.reduce(v);
        self.push_residual(r)
    }

    fn push_residual(&mut self, r: SVec) -> Option<usize> {
        if r.is_empty() {
            return None;
        }
        let inv = r[0].1.inv();
        let r = scale(&r, &inv);
        let k = self.vecs.len();
        self.pivot.insert(r[0].0, k);
        self.vecs.push(r);
        Some(k)
    }

    /// Coordinates of `v` on the stored vectors, if `v` lies in their span.
    pub fn coords(&self, v: &SVec) -> Option<Vec<(usize, Scalar)>> {
        let (r, used) = self.reduce(v);
        if !r.is_empty() {
            return None;
        }
        let mut out: HashMap<usize, Scalar> = HashMap::new();
        for (s, c) in used {
            let e = out.entry(s).or_insert_with(|| self.field.zero());
            *e = e.add(&c);
        }
        let mut o: Vec<_> = out.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        o.sort_by_key(|e| e.0);
        Some(o)
    }
}

/// Result of column reduction.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub rank: usize,
    pub kernel: SparseMatrix,
    pub image: SparseMatrix,
    pub pivots: Vec<(usize, usize)>,
    ech: Echelon,
    combos: Vec<SVec>,
}

fn check_field(m: &SparseMatrix) -> Result<(), Error> {
    let p = m.field.characteristic();
    for c in m.cols_iter() {
        if c.iter().any(|(_, x)| x.characteristic() != p) {
            return Err(Error::Linalg("characteristic mismatch between entries".into()));
        }
    }
    Ok(())
}

/// Gaussian elimination scanning columns left to right; pivot is the smallest row.
pub fn reduce(m: &SparseMatrix) -> Result<Reduction, Error> {
    check_field(m)?;
    let f = m.field;
    let mut ech = Echelon::new(f, m.rows);
    let mut combos: Vec<SVec> = vec![];
    let mut kernel = SparseMatrix::zero(f, m.cols, 0);
    let mut image = SparseMatrix::zero(f, m.rows, 0);
    let mut pivots = vec![];
    for j in 0..m.cols {
        let (r, used) = ech.reduce(m.col(j));
        let mut combo: SVec = vec![(j, f.one())];
        for (s, c) in &used {
            axpy(&mut combo, &c.neg(), &combos[*s]);
        }
        if r.is_empty() {
            kernel.push_col(combo);
        } else {
            let inv = r[0].1.inv();
            pivots.push((r[0].0, j));
            image.push_col(m.col(j).clone());
            combos.push(scale(&combo, &inv));
            ech.push_residual(r);
        }
    }
    Ok(Reduction { rank: pivots.len(), kernel, image, pivots, ech, combos })
}

pub fn rank(m: &SparseMatrix) -> usize {
    let mut e = Echelon::new(m.field, m.rows);
    let mut r = 0;
    for c in m.cols_iter() {
        if e.insert(c).is_some() {
            r += 1;
        }
    }
    r
}

impl Reduction {
    /// Particular solution of `M x = b` with non-pivot variables zero.
    pub fn solve_sparse(&self, b: &SVec) -> Option<SVec> {
        let c = self.ech.coords(b)?;
        let mut x = vec![];
        for (s, k) in c {
            axpy(&mut x, &k, &self.combos[s]);
        }
        Some(x)
    }
}

pub fn solve(m: &SparseMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, Error> {
    if b.len() != m.rows {
        return Err(Error::Linalg(format!("rhs length {} but {} rows", b.len(), m.rows)));
    }
    let red = reduce(m)?;
    let bs = super::matrix::from_dense(b);
    Ok(red
        .solve_sparse(&bs)
        .map(|x| super::matrix::to_dense(&x, m.cols, m.field)))
}

/// Projection (as a matrix) of the ambient space onto coordinates of a complement of
/// `span(sub)`; the complement is spanned by the non-pivot standard vectors.
pub fn quotient_basis(sub: &SparseMatrix, ambient: usize) -> Result<SparseMatrix, Error> {
    if sub.rows > ambient || sub.cols_iter().any(|c| c.iter().any(|(r, _)| *r >= ambient)) {
        return Err(Error::Linalg("column outside ambient dimension".into()));
    }
    let mut ech = Echelon::new(sub.field, ambient);
    for c in sub.cols_iter() {
        ech.insert(c);
    }
    let piv: std::collections::HashSet<usize> = ech.pivot_rows().into_iter().collect();
    let free: Vec<usize> = (0..ambient).filter(|i| !piv.contains(i)).collect();
    let pos: HashMap<usize, usize> = free.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut p = SparseMatrix::zero(sub.field, free.len(), 0);
    for k in 0..ambient {
        let (r, _) = ech.reduce_full(&vec![(k, sub.field.one())]);
        let mut col: SVec = r.into_iter().map(|(i, c)| (pos[&i], c)).collect();
        col.sort_by_key(|e| e.0);
        p.push_col(col);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[Vec<i64>]) -> SparseMatrix {
        SparseMatrix::from_dense(Field::Q, rows)
    }

    #[test]
    fn empty_and_identity() {
        let r = reduce(&SparseMatrix::zero(Field::Q, 0, 0)).unwrap();
        assert_eq!((r.rank, r.kernel.cols, r.image.cols), (0, 0, 0));
        let r = reduce(&SparseMatrix::identity(Field::Q, 3)).unwrap();
        assert_eq!((r.rank, r.kernel.cols), (3, 0));
    }

    #[test]
    fn rank_one_kernel() {
        let m = q(&[vec![1, 2], vec![2, 4]]);
        let r = reduce(&m).unwrap();
        assert_eq!(r.rank, 1);
        let f = Field::Q;
        assert_eq!(r.kernel.col(0), &vec![(0, f.int(-2)), (1, f.int(1))]);
        assert_eq!(r.pivots, vec![(0, 0)]);
    }

    #[test]
    fn solve_examples() {
        let f = Field::Q;
        let m = q(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(solve(&m, &[f.int(1), f.int(2)]).unwrap(), Some(vec![f.int(1), f.int(0)]));
        assert_eq!(solve(&m, &[f.int(1), f.int(0)]).unwrap(), None);
        let id = SparseMatrix::identity(f, 3);
        let b = vec![f.int(4), f.frac(1, 3).unwrap(), f.int(-1)];
        assert_eq!(solve(&id, &b).unwrap(), Some(b.clone()));
        assert!(solve(&id, &b[..2]).is_err());
    }

    #[test]
    fn quotient_examples() {
        let f = Field::Q;
        let p = quotient_basis(&SparseMatrix::zero(f, 2, 0), 2).unwrap();
        assert_eq!(p, SparseMatrix::identity(f, 2));
        let p = quotient_basis(&q(&[vec![1], vec![0]]), 2).unwrap();
        assert_eq!(p.rows, 1);
        assert_eq!(p.mul_dense(&[f.int(0), f.int(1)]), vec![f.int(1)]);
        let p = quotient_basis(&q(&[vec![1], vec![1]]), 2).unwrap();
        assert_eq!(p.rows, 1);
        let a = p.mul_dense(&[f.int(1), f.int(0)]);
        let b = p.mul_dense(&[f.int(0), f.int(1)]);
        assert!(!a[0].is_zero());
        assert_eq!(a[0], b[0].neg());
        assert!(quotient_basis(&q(&[vec![1], vec![1], vec![1]]), 2).is_err());
    }

    #[test]
    fn mixed_characteristic_rejected() {
        let f = Field::Q;
        let g = Field::fp(3).unwrap();
        let m = SparseMatrix::from_cols(f, 1, vec![vec![(0, g.one())]]);
        assert!(reduce(&m).is_err());
    }
}
