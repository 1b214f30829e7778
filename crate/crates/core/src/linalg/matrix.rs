use super::scalar::{Field, Scalar};
use crate::Error;

/// Sparse vector: strictly increasing indices, no zero entries.
pub type SVec = Vec<(usize, Scalar)>;

/// `v += c * w`.
pub fn axpy(v: &mut SVec, c: &Scalar, w: &SVec) {
    if c.is_zero() || w.is_empty() {
        return;
    }
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        if j == w.len() || (i < v.len() && v[i].0 < w[j].0) {
            out.push(v[i].clone());
            i += 1;
        } else if i == v.len() || w[j].0 < v[i].0 {
            out.push((w[j].0, c.mul(&w[j].1)));
            j += 1;
        } else {
            let s = v[i].1.add(&c.mul(&w[j].1));
            if !s.is_zero() {
                out.push((v[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    *v = out;
}

pub fn scale(v: &SVec, c: &Scalar) -> SVec {
    if c.is_zero() {
        return vec![];
    }
    v.iter().map(|(i, x)| (*i, x.mul(c))).collect()
}

pub fn get(v: &SVec, i: usize) -> Option<&Scalar> {
    v.binary_search_by_key(&i, |e| e.0).ok().map(|k| &v[k].1)
}

/// Collects unsorted terms, summing duplicates and dropping zeros.
pub fn collect(mut terms: Vec<(usize, Scalar)>) -> SVec {
    terms.sort_by_key(|t| t.0);
    let mut out: SVec = Vec::with_capacity(terms.len());
    for (i, c) in terms {
        match out.last_mut() {
            Some((j, d)) if *j == i => *d = d.add(&c),
            _ => out.push((i, c)),
        }
        if out.last().is_some_and(|e| e.1.is_zero()) {
            out.pop();
        }
    }
    out
}

pub fn to_dense(v: &SVec, n: usize, f: Field) -> Vec<Scalar> {
    let mut d = vec![f.zero(); n];
    for (i, c) in v {
        d[*i] = c.clone();
    }
    d
}

pub fn from_dense(d: &[Scalar]) -> SVec {
    d.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

/// Column-major sparse matrix over a fixed field.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    data: Vec<SVec>,
}

impl SparseMatrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Self {
        SparseMatrix { field, rows, cols, data: vec![vec![]; cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.data[i].push((i, field.one()));
        }
        m
    }

    /// Builds from triplets; a repeated position is an error, zeros are dropped.
    pub fn from_triplets(
        field: Field,
        rows: usize,
        cols: usize,
        mut t: Vec<(usize, usize, Scalar)>,
    ) -> Result<Self, Error> {
        t.sort_by_key(|a| (a.1, a.0));
        let mut m = Self::zero(field, rows, cols);
        for k in 0..t.len() {
            let (r, c, ref x) = t[k];
            if r >= rows || c >= cols {
                return Err(Error::Linalg(format!("entry ({r},{c}) outside {rows}x{cols}")));
            }
            if x.characteristic() != field.characteristic() {
                return Err(Error::Linalg("characteristic mismatch".into()));
            }
            if k > 0 && t[k - 1].0 == r && t[k - 1].1 == c {
                return Err(Error::Linalg(format!("duplicate entry at ({r},{c})")));
            }
            if !x.is_zero() {
                m.data[c].push((r, x.clone()));
            }
        }
        Ok(m)
    }

    /// Builds from columns; each column must already be a valid sparse vector.
    pub fn from_cols(field: Field, rows: usize, data: Vec<SVec>) -> Self {
        debug_assert!(data.iter().all(|c| c.iter().all(|(r, x)| *r < rows && !x.is_zero())));
        SparseMatrix { field, rows, cols: data.len(), data }
    }

    pub fn from_dense(field: Field, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let s = field.int(x);
                if !s.is_zero() {
                    m.data[j].push((i, s));
                }
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> &SVec {
        &self.data[j]
    }

    pub fn cols_iter(&self) -> impl Iterator<Item = &SVec> {
        self.data.iter()
    }

    pub fn into_cols(self) -> Vec<SVec> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        get(&self.data[c], r).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    /// Entries as (row, col, value), sorted by (col, row).
    pub fn triplets(&self) -> Vec<(usize, usize, Scalar)> {
        let mut t = vec![];
        for (j, c) in self.data.iter().enumerate() {
            for (i, x) in c {
                t.push((*i, j, x.clone()));
            }
        }
        t
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<SVec> = vec![vec![]; self.rows];
        for (j, c) in self.data.iter().enumerate() {
            for (i, x) in c {
                rows[*i].push((j, x.clone()));
            }
        }
        SparseMatrix { field: self.field, rows: self.cols, cols: self.rows, data: rows }
    }

    pub fn mul_vec(&self, v: &SVec) -> SVec {
        let mut out = vec![];
        for (j, c) in v {
            axpy(&mut out, c, &self.data[*j]);
        }
        out
    }

    pub fn mul_dense(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        to_dense(&self.mul_vec(&from_dense(v)), self.rows, self.field)
    }

    /// `self * o`.
    pub fn mul(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let data = o.data.iter().map(|c| self.mul_vec(c)).collect();
        SparseMatrix { field: self.field, rows: self.rows, cols: o.cols, data }
    }

    pub fn add(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let one = self.field.one();
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| {
                let mut v = a.clone();
                axpy(&mut v, &one, b);
                v
            })
            .collect();
        SparseMatrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, c: &Scalar) -> SparseMatrix {
        let data = self.data.iter().map(|v| scale(v, c)).collect();
        SparseMatrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn push_col(&mut self, v: SVec) {
        debug_assert!(v.iter().all(|(r, _)| *r < self.rows));
        self.data.push(v);
        self.cols += 1;
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, o: &SparseMatrix) -> SparseMatrix {
        let mut m = SparseMatrix::zero(self.field, self.rows + o.rows, 0);
        for c in &self.data {
            m.push_col(c.clone());
        }
        for c in &o.data {
            m.push_col(c.iter().map(|(i, x)| (i + self.rows, x.clone())).collect());
        }
        m
    }

    /// Kronecker product with columns/rows indexed lexicographically.
    pub fn kron(&self, o: &SparseMatrix) -> SparseMatrix {
        let mut m = SparseMatrix::zero(self.field, self.rows * o.rows, 0);
        for a in &self.data {
            for b in &o.data {
                let mut col = vec![];
                for (i, x) in a {
                    for (k, y) in b {
                        col.push((i * o.rows + k, x.mul(y)));
                    }
                }
                m.push_col(col);
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (j, c) in self.data.iter().enumerate() {
            for (i, x) in c {
                d[*i][j] = x.clone();
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_rejected() {
        let f = Field::Q;
        let r = SparseMatrix::from_triplets(f, 2, 2, vec![(0, 0, f.one()), (0, 0, f.one())]);
        assert!(r.is_err());
    }

    #[test]
    fn zeros_not_stored() {
        let f = Field::Q;
        let m = SparseMatrix::from_triplets(f, 2, 2, vec![(0, 0, f.zero()), (1, 1, f.int(3))]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.transpose().get(1, 1), f.int(3));
    }

    #[test]
    fn kron_shape() {
        let f = Field::Q;
        let a = SparseMatrix::from_dense(f, &[vec![1, 2]]);
        let b = SparseMatrix::identity(f, 2);
        let k = a.kron(&b);
        assert_eq!((k.rows, k.cols), (2, 4));
        assert_eq!(k.get(1, 3), f.int(2));
    }
}
