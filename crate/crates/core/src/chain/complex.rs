use crate::linalg::matrix::{collect, SVec};
use crate::linalg::{Field, Scalar, SparseMatrix};
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::Arc;

/// Closed degree interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeWindow {
    pub lo: i64,
    pub hi: i64,
}

impl DegreeWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Window(format!("empty window {lo}..{hi}")));
        }
        Ok(DegreeWindow { lo, hi })
    }

    pub fn contains(&self, d: i64) -> bool {
        self.lo <= d && d <= self.hi
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn shift(&self, k: i64) -> Self {
        DegreeWindow { lo: self.lo + k, hi: self.hi + k }
    }
}

impl std::fmt::Display for DegreeWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Chain complex, zero below `lo`, with exact groups in degrees `lo..=hi`.
///
/// When `bounded` is false the complex may continue above `hi`, so homology in degree
/// `hi` is not trustworthy.
#[derive(Clone, Debug)]
pub struct WindowedComplex {
    pub field: Field,
    lo: i64,
    hi: i64,
    bounded: bool,
    labels: Vec<Vec<String>>,
    d: Vec<SparseMatrix>,
}

impl PartialEq for WindowedComplex {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field
            && self.lo == o.lo
            && self.hi == o.hi
            && self.bounded == o.bounded
            && self.labels == o.labels
            && self.d == o.d
    }
}

/// Combines exactness ranges of summands: `(top, bounded)` per part, already shifted.
pub(crate) fn combine_hi(parts: &[(i64, bool)], lo: i64) -> (i64, bool) {
    let open: Vec<i64> = parts.iter().filter(|p| !p.1).map(|p| p.0).collect();
    if let Some(m) = open.iter().min() {
        (*m, false)
    } else {
        (parts.iter().map(|p| p.0).max().unwrap_or(lo - 1), true)
    }
}

impl WindowedComplex {
    pub fn zero(field: Field) -> Self {
        WindowedComplex { field, lo: 0, hi: -1, bounded: true, labels: vec![], d: vec![] }
    }

    /// Builds from labels and differentials `d[k]: deg lo+k -> lo+k-1`; checks shapes and d∘d = 0.
    pub fn new(
        field: Field,
        lo: i64,
        labels: Vec<Vec<String>>,
        d: Vec<SparseMatrix>,
        bounded: bool,
    ) -> Result<Self> {
        if labels.len() != d.len() {
            return Err(Error::Invalid("one differential per degree required".into()));
        }
        let hi = lo + labels.len() as i64 - 1;
        let c = WindowedComplex { field, lo, hi, bounded, labels, d };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        for k in 0..self.labels.len() {
            let m = &self.d[k];
            let rows = if k == 0 { 0 } else { self.labels[k - 1].len() };
            if m.cols != self.labels[k].len() || m.rows != rows {
                return Err(Error::Invalid(format!(
                    "differential at degree {} has shape {}x{}, expected {}x{}",
                    self.lo + k as i64,
                    m.rows,
                    m.cols,
                    rows,
                    self.labels[k].len()
                )));
            }
            if m.field != self.field {
                return Err(Error::FieldMismatch(m.field.to_string(), self.field.to_string()));
            }
            if k > 0 && !self.d[k - 1].mul(m).is_zero() {
                return Err(Error::Invalid(format!("d∘d ≠ 0 at degree {}", self.lo + k as i64)));
            }
        }
        Ok(())
    }

    /// Builds a complex from structured basis labels and a differential on them.
    pub fn from_basis<L, FL, FD>(
        field: Field,
        lo: i64,
        basis: Vec<Vec<L>>,
        bounded: bool,
        label: FL,
        mut diff: FD,
    ) -> Result<Self>
    where
        L: Clone + Eq + Hash + std::fmt::Debug,
        FL: Fn(&L) -> String,
        FD: FnMut(i64, &L) -> Vec<(L, Scalar)>,
    {
        let index: Vec<HashMap<&L, usize>> =
            basis.iter().map(|b| b.iter().enumerate().map(|(i, l)| (l, i)).collect()).collect();
        let mut ds = vec![];
        for (k, b) in basis.iter().enumerate() {
            let deg = lo + k as i64;
            let rows = if k == 0 { 0 } else { basis[k - 1].len() };
            let mut cols = Vec::with_capacity(b.len());
            for l in b {
                let terms = diff(deg, l);
                let mut v = vec![];
                for (t, c) in terms {
                    if c.is_zero() {
                        continue;
                    }
                    let i = (k > 0).then(|| index[k - 1].get(&t)).flatten().ok_or_else(|| {
                        Error::Invalid(format!("differential of {l:?} leaves the basis at {t:?}"))
                    })?;
                    v.push((*i, c));
                }
                cols.push(collect(v));
            }
            ds.push(SparseMatrix::from_cols(field, rows, cols));
        }
        let labels = basis.iter().map(|b| b.iter().map(&label).collect()).collect();
        Self::new(field, lo, labels, ds, bounded)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Top degree with exact groups.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn bounded(&self) -> bool {
        self.bounded
    }

    /// Top degree with trustworthy homology.
    pub fn valid_hi(&self) -> i64 {
        if self.bounded {
            self.hi
        } else {
            self.hi - 1
        }
    }

    pub fn window(&self) -> DegreeWindow {
        DegreeWindow { lo: self.lo, hi: self.valid_hi() }
    }

    pub fn dim(&self, deg: i64) -> usize {
        self.idx(deg).map_or(0, |k| self.labels[k].len())
    }

    fn idx(&self, deg: i64) -> Option<usize> {
        (deg >= self.lo && deg <= self.hi).then(|| (deg - self.lo) as usize)
    }

    pub fn labels(&self, deg: i64) -> &[String] {
        self.idx(deg).map_or(&[], |k| &self.labels[k])
    }

    /// Differential leaving degree `deg`.
    pub fn d(&self, deg: i64) -> SparseMatrix {
        match self.idx(deg) {
            Some(k) => self.d[k].clone(),
            None => SparseMatrix::zero(self.field, self.dim(deg - 1), self.dim(deg)),
        }
    }

    pub fn d_ref(&self, deg: i64) -> Option<&SparseMatrix> {
        self.idx(deg).map(|k| &self.d[k])
    }

    pub fn apply_d(&self, deg: i64, v: &SVec) -> SVec {
        self.d_ref(deg).map_or(vec![], |m| m.mul_vec(v))
    }

    /// Whether the groups in `deg` are known.
    pub fn known(&self, deg: i64) -> bool {
        self.bounded || deg <= self.hi
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(|l| l.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.degrees().map(|d| (d, self.dim(d))).filter(|e| e.1 > 0).collect()
    }

    /// Keeps degrees `<= h`; the result is bounded only if nothing was cut.
    pub fn truncate_above(&self, h: i64) -> Self {
        if h >= self.hi {
            return self.clone();
        }
        let keep = (h - self.lo + 1).max(0) as usize;
        WindowedComplex {
            field: self.field,
            lo: self.lo,
            hi: self.lo + keep as i64 - 1,
            bounded: false,
            labels: self.labels[..keep].to_vec(),
            d: self.d[..keep].to_vec(),
        }
    }

    /// Marks the complex as possibly continuing above its top degree.
    pub fn unbounded(mut self) -> Self {
        self.bounded = false;
        self
    }

    pub fn with_labels(mut self, f: impl Fn(&str) -> String) -> Self {
        for l in self.labels.iter_mut() {
            for s in l.iter_mut() {
                *s = f(s);
            }
        }
        self
    }

    /// Raw parts; the inverse of `new`.
    pub fn parts(&self) -> (i64, &[Vec<String>], &[SparseMatrix]) {
        (self.lo, &self.labels, &self.d)
    }
}

/// Degree-0 chain map given by one matrix per degree.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<WindowedComplex>,
    pub target: Arc<WindowedComplex>,
    blocks: BTreeMap<i64, SparseMatrix>,
}

impl ChainMap {
    /// Builds a chain map; degrees missing from `blocks` are zero. Commutation with d is
    /// checked wherever both sides are known.
    pub fn new(
        source: Arc<WindowedComplex>,
        target: Arc<WindowedComplex>,
        blocks: BTreeMap<i64, SparseMatrix>,
    ) -> Result<Self> {
        if source.field != target.field {
            return Err(Error::FieldMismatch(source.field.to_string(), target.field.to_string()));
        }
        for (deg, m) in &blocks {
            if m.cols != source.dim(*deg) || m.rows != target.dim(*deg) {
                return Err(Error::Invalid(format!("map block at degree {deg} has wrong shape")));
            }
        }
        let f = ChainMap { source, target, blocks };
        f.check()?;
        Ok(f)
    }

    pub(crate) fn new_unchecked(
        source: Arc<WindowedComplex>,
        target: Arc<WindowedComplex>,
        blocks: BTreeMap<i64, SparseMatrix>,
    ) -> Self {
        ChainMap { source, target, blocks }
    }

    fn check(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        for deg in s.lo()..=s.hi() {
            if !t.known(deg) || !t.known(deg - 1) {
                continue;
            }
            let a = self.block(deg - 1).mul(&s.d(deg));
            let b = t.d(deg).mul(&self.block(deg));
            if a != b {
                return Err(Error::Invalid(format!("map does not commute with d at degree {deg}")));
            }
        }
        Ok(())
    }

    /// Builds from the image of every source basis element.
    pub fn from_fn(
        source: Arc<WindowedComplex>,
        target: Arc<WindowedComplex>,
        mut f: impl FnMut(i64, usize) -> SVec,
    ) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for deg in source.degrees() {
            if target.dim(deg) == 0 || source.dim(deg) == 0 {
                continue;
            }
            let cols = (0..source.dim(deg)).map(|i| f(deg, i)).collect();
            blocks.insert(deg, SparseMatrix::from_cols(source.field, target.dim(deg), cols));
        }
        Self::new(source, target, blocks)
    }

    pub fn identity(c: Arc<WindowedComplex>) -> Self {
        let blocks = c.degrees().map(|d| (d, SparseMatrix::identity(c.field, c.dim(d)))).collect();
        ChainMap { source: c.clone(), target: c, blocks }
    }

    pub fn zero(source: Arc<WindowedComplex>, target: Arc<WindowedComplex>) -> Self {
        ChainMap { source, target, blocks: BTreeMap::new() }
    }

    pub fn block(&self, deg: i64) -> SparseMatrix {
        self.blocks.get(&deg).cloned().unwrap_or_else(|| {
            SparseMatrix::zero(self.source.field, self.target.dim(deg), self.source.dim(deg))
        })
    }

    pub fn apply(&self, deg: i64, v: &SVec) -> SVec {
        self.blocks.get(&deg).map_or(vec![], |m| m.mul_vec(v))
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &ChainMap) -> ChainMap {
        let mut blocks = BTreeMap::new();
        for (deg, m) in &self.blocks {
            if let Some(n) = g.blocks.get(deg) {
                if n.cols == m.rows {
                    blocks.insert(*deg, n.mul(m));
                }
            }
        }
        ChainMap { source: self.source.clone(), target: g.target.clone(), blocks }
    }

    pub fn add(&self, g: &ChainMap) -> ChainMap {
        let mut blocks = self.blocks.clone();
        for (deg, m) in &g.blocks {
            let e = blocks.entry(*deg).or_insert_with(|| {
                SparseMatrix::zero(self.source.field, m.rows, m.cols)
            });
            *e = e.add(m);
        }
        ChainMap { source: self.source.clone(), target: self.target.clone(), blocks }
    }

    pub fn scaled(&self, c: &Scalar) -> ChainMap {
        let blocks = self.blocks.iter().map(|(d, m)| (*d, m.scaled(c))).collect();
        ChainMap { source: self.source.clone(), target: self.target.clone(), blocks }
    }

    pub fn blocks(&self) -> &BTreeMap<i64, SparseMatrix> {
        &self.blocks
    }

    /// Exact equality of the maps on degrees where both are known.
    pub fn same_as(&self, g: &ChainMap) -> bool {
        let degs: std::collections::BTreeSet<i64> =
            self.blocks.keys().chain(g.blocks.keys()).copied().collect();
        degs.into_iter().all(|d| {
            let a = self.block(d);
            let b = g.block(d);
            (a.rows, a.cols) == (b.rows, b.cols) && a == b
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_term(f: Field, c: i64) -> WindowedComplex {
        WindowedComplex::new(
            f,
            0,
            vec![vec!["a".into()], vec!["b".into()]],
            vec![SparseMatrix::zero(f, 0, 1), SparseMatrix::from_dense(f, &[vec![c]])],
            true,
        )
        .unwrap()
    }

    #[test]
    fn rejects_nonzero_square() {
        let f = Field::Q;
        let one = SparseMatrix::from_dense(f, &[vec![1]]);
        let r = WindowedComplex::new(
            f,
            0,
            vec![vec!["a".into()], vec!["b".into()], vec!["c".into()]],
            vec![SparseMatrix::zero(f, 0, 1), one.clone(), one],
            true,
        );
        assert!(r.is_err());
    }

    #[test]
    fn truncation_marks_unbounded() {
        let c = two_term(Field::Q, 2);
        let t = c.truncate_above(0);
        assert_eq!(t.hi(), 0);
        assert!(!t.bounded());
        assert_eq!(t.valid_hi(), -1);
    }

    #[test]
    fn chain_map_commutation_checked() {
        let f = Field::Q;
        let c = Arc::new(two_term(f, 1));
        let mut bl = BTreeMap::new();
        bl.insert(1, SparseMatrix::identity(f, 1));
        assert!(ChainMap::new(c.clone(), c.clone(), bl).is_err());
        assert!(ChainMap::new(c.clone(), c.clone(), ChainMap::identity(c).blocks().clone()).is_ok());
    }
}
