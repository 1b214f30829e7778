use super::complex::{ChainMap, WindowedComplex};
use crate::linalg::matrix::SVec;
use crate::linalg::{reduce, Echelon, Field, SparseMatrix};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Betti numbers and cycle representatives on a validity range.
#[derive(Clone, Debug)]
pub struct HomologyReport {
    pub field: Field,
    pub lo: i64,
    pub hi: i64,
    pub betti: BTreeMap<i64, usize>,
    pub reps: BTreeMap<i64, Vec<SVec>>,
    classes: BTreeMap<i64, (Echelon, usize)>,
}

impl HomologyReport {
    pub fn betti(&self, deg: i64) -> usize {
        self.betti.get(&deg).copied().unwrap_or(0)
    }

    /// Nonzero entries only.
    pub fn table(&self) -> BTreeMap<i64, usize> {
        self.betti.iter().filter(|e| *e.1 > 0).map(|(d, b)| (*d, *b)).collect()
    }

    pub fn in_range(&self, deg: i64) -> bool {
        self.lo <= deg && deg <= self.hi
    }

    /// Table restricted to `lo..=hi`.
    pub fn table_on(&self, lo: i64, hi: i64) -> BTreeMap<i64, usize> {
        self.table().into_iter().filter(|(d, _)| *d >= lo && *d <= hi).collect()
    }

    /// Coordinates of the class of a cycle on the representatives; `None` if `z` is not a cycle
    /// of this degree.
    pub fn class_of(&self, deg: i64, z: &SVec) -> Option<SVec> {
        let Some((e, nb)) = self.classes.get(&deg) else {
            return if z.is_empty() || !self.in_range(deg) { Some(vec![]) } else { None };
        };
        let c = e.coords(z)?;
        Some(c.into_iter().filter(|(s, _)| *s >= *nb).map(|(s, x)| (s - nb, x)).collect())
    }
}

/// Homology on the valid range of `c`.
pub fn homology(c: &WindowedComplex) -> HomologyReport {
    let f = c.field;
    let (lo, hi) = (c.lo(), c.valid_hi());
    let mut betti = BTreeMap::new();
    let mut reps = BTreeMap::new();
    let mut classes = BTreeMap::new();
    let mut next_kernel: Option<SparseMatrix> = None;
    for deg in lo..=hi {
        let n = c.dim(deg);
        let kernel = match next_kernel.take() {
            Some(k) => k,
            None => reduce(&c.d(deg)).expect("well-formed").kernel,
        };
        let up = c.d(deg + 1);
        let mut e = Echelon::new(f, n);
        let red_up = reduce(&up).expect("well-formed");
        for col in red_up.image.cols_iter() {
            e.insert(col);
        }
        let nb = e.len();
        let mut r = vec![];
        for z in kernel.cols_iter() {
            if let Some(s) = e.insert(z) {
                r.push(e.stored(s).clone());
            }
        }
        next_kernel = Some(red_up.kernel);
        betti.insert(deg, r.len());
        reps.insert(deg, r);
        classes.insert(deg, (e, nb));
    }
    HomologyReport { field: f, lo, hi, betti, reps, classes }
}

/// Map on homology, per degree, with a quasi-isomorphism verdict on the shared range.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub lo: i64,
    pub hi: i64,
    pub matrices: BTreeMap<i64, SparseMatrix>,
    pub quasi_iso: bool,
    pub failing: Vec<i64>,
}

pub fn induced_homology_map(f: &ChainMap) -> Result<InducedMap> {
    let (s, t) = (&f.source, &f.target);
    let lo = s.lo().min(t.lo());
    let hi = match (s.bounded(), t.bounded()) {
        (true, true) => s.hi().max(t.hi()),
        (true, false) => t.valid_hi(),
        (false, true) => s.valid_hi(),
        (false, false) => s.valid_hi().min(t.valid_hi()),
    };
    if hi < lo && !(s.bounded() && t.bounded()) {
        return Err(Error::Window("source and target validity windows do not overlap".into()));
    }
    let hs = homology(s);
    let ht = homology(t);
    let mut matrices = BTreeMap::new();
    let mut failing = vec![];
    for deg in lo..=hi {
        let (bs, bt) = (hs.betti(deg), ht.betti(deg));
        let mut cols = vec![];
        for z in hs.reps.get(&deg).map_or(&[][..], |v| &v[..]) {
            let img = f.apply(deg, z);
            let c = ht.class_of(deg, &img).ok_or_else(|| {
                Error::Invalid(format!("image of a cycle is not a cycle at degree {deg}"))
            })?;
            cols.push(c);
        }
        let m = SparseMatrix::from_cols(s.field, bt, cols);
        if bs != bt || crate::linalg::rank(&m) != bs {
            failing.push(deg);
        }
        matrices.insert(deg, m);
    }
    Ok(InducedMap { lo, hi, matrices, quasi_iso: failing.is_empty(), failing })
}

/// Betti tables agree on the intersection of validity ranges.
pub fn same_betti(a: &HomologyReport, b: &HomologyReport) -> bool {
    let lo = a.lo.min(b.lo);
    let hi = a.hi.min(b.hi);
    (lo..=hi).all(|d| a.betti(d) == b.betti(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn c2(f: Field, c: i64) -> WindowedComplex {
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
    fn zero_complex() {
        let h = homology(&WindowedComplex::zero(Field::Q));
        assert!(h.table().is_empty());
    }

    #[test]
    fn multiplication_by_two() {
        assert!(homology(&c2(Field::Q, 2)).table().is_empty());
        let h = homology(&c2(Field::fp(2).unwrap(), 2));
        assert_eq!(h.table(), BTreeMap::from([(0, 1), (1, 1)]));
    }

    #[test]
    fn projection_not_quasi_iso() {
        let f = Field::Q;
        let two = Arc::new(
            WindowedComplex::new(f, 0, vec![vec!["a".into(), "b".into()]], vec![SparseMatrix::zero(f, 0, 2)], true)
                .unwrap(),
        );
        let one = Arc::new(
            WindowedComplex::new(f, 0, vec![vec!["a".into()]], vec![SparseMatrix::zero(f, 0, 1)], true).unwrap(),
        );
        let p = ChainMap::from_fn(two, one, |_, i| if i == 0 { vec![(0, f.one())] } else { vec![] }).unwrap();
        let r = induced_homology_map(&p).unwrap();
        assert!(!r.quasi_iso);
        assert_eq!(r.failing, vec![0]);
    }

    #[test]
    fn identity_is_quasi_iso() {
        let c = Arc::new(c2(Field::fp(2).unwrap(), 2));
        let r = induced_homology_map(&ChainMap::identity(c)).unwrap();
        assert!(r.quasi_iso);
        assert_eq!(r.matrices[&0], SparseMatrix::identity(Field::fp(2).unwrap(), 1));
    }
}
