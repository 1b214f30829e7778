use super::complex::{combine_hi, ChainMap, WindowedComplex};
use crate::linalg::matrix::{axpy, SVec};
use crate::linalg::{Echelon, Field, SparseMatrix};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

fn same_field(a: &WindowedComplex, b: &WindowedComplex) -> Result<Field> {
    if a.field != b.field {
        return Err(Error::FieldMismatch(a.field.to_string(), b.field.to_string()));
    }
    Ok(a.field)
}

/// Offsets of degree `p` blocks inside `(C⊗D)_n`, for `p` ascending.
fn tensor_offsets(c: &WindowedComplex, d: &WindowedComplex, n: i64) -> Vec<(i64, usize)> {
    let mut out = vec![];
    let mut off = 0;
    for p in c.degrees() {
        let q = n - p;
        let (a, b) = (c.dim(p), d.dim(q));
        if a > 0 && b > 0 {
            out.push((p, off));
            off += a * b;
        }
    }
    out
}

fn tensor_range(c: &WindowedComplex, d: &WindowedComplex) -> (i64, i64, bool) {
    let lo = c.lo() + d.lo();
    let mut parts = vec![];
    parts.push(if c.bounded() { (c.hi() + d.hi(), true) } else { (c.hi() + d.lo(), false) });
    parts.push(if d.bounded() { (c.hi() + d.hi(), true) } else { (d.hi() + c.lo(), false) });
    let (hi, b) = combine_hi(&parts, lo);
    (lo, hi, b)
}

/// `C ⊗ D` with `d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy`; basis pairs in lexicographic order.
pub fn tensor(c: &WindowedComplex, d: &WindowedComplex) -> Result<WindowedComplex> {
    let f = same_field(c, d)?;
    if (c.is_zero() && c.bounded()) || (d.is_zero() && d.bounded()) {
        return Ok(WindowedComplex::zero(f));
    }
    let (lo, hi, bounded) = tensor_range(c, d);
    let mut labels = vec![];
    let mut ds = vec![];
    for n in lo..=hi {
        let offs = tensor_offsets(c, d, n);
        let mut lab = vec![];
        for &(p, _) in &offs {
            for x in c.labels(p) {
                for y in d.labels(n - p) {
                    lab.push(format!("{x}⊗{y}"));
                }
            }
        }
        let prev = tensor_offsets(c, d, n - 1);
        let find = |p: i64| prev.iter().find(|e| e.0 == p).map(|e| e.1);
        let mut cols = vec![];
        for &(p, _) in &offs {
            let q = n - p;
            let (dc, dd) = (c.d(p), d.d(q));
            let sign = f.sign(p.rem_euclid(2) == 1);
            for i in 0..c.dim(p) {
                for j in 0..d.dim(q) {
                    let mut v = vec![];
                    if let Some(o) = find(p - 1) {
                        let bq = d.dim(q);
                        for (r, x) in dc.col(i) {
                            v.push((o + r * bq + j, x.clone()));
                        }
                    }
                    if let Some(o) = find(p) {
                        let bq = d.dim(q - 1);
                        for (r, x) in dd.col(j) {
                            v.push((o + i * bq + r, x.mul(&sign)));
                        }
                    }
                    cols.push(crate::linalg::matrix::collect(v));
                }
            }
        }
        let rows = if n == lo { 0 } else { labels.last().map_or(0, |l: &Vec<String>| l.len()) };
        ds.push(SparseMatrix::from_cols(f, rows, cols));
        labels.push(lab);
    }
    WindowedComplex::new(f, lo, labels, ds, bounded)
}

/// `f ⊗ g`, with the Koszul sign absent since both maps have degree 0.
pub fn tensor_map(f: &ChainMap, g: &ChainMap, src: Arc<WindowedComplex>, tgt: Arc<WindowedComplex>) -> Result<ChainMap> {
    let (c, d) = (&f.source, &g.source);
    let (c2, d2) = (&f.target, &g.target);
    ChainMap::from_fn(src, tgt.clone(), |n, k| {
        let offs = tensor_offsets(c, d, n);
        let toffs = tensor_offsets(c2, d2, n);
        let (p, o) = *offs.iter().rev().find(|e| e.1 <= k).unwrap();
        let bq = d.dim(n - p);
        let (i, j) = ((k - o) / bq, (k - o) % bq);
        let Some(&(_, to)) = toffs.iter().find(|e| e.0 == p) else { return vec![] };
        let tq = d2.dim(n - p);
        let fi = f.apply(p, &vec![(i, c.field.one())]);
        let gj = g.apply(n - p, &vec![(j, c.field.one())]);
        let mut v = vec![];
        for (a, x) in &fi {
            for (b, y) in &gj {
                v.push((to + a * tq + b, x.mul(y)));
            }
        }
        crate::linalg::matrix::collect(v)
    })
}

/// The symmetry `C⊗D → D⊗C`, `x⊗y ↦ (-1)^{|x||y|} y⊗x`.
pub fn swap_map(c: &WindowedComplex, d: &WindowedComplex) -> Result<ChainMap> {
    let cd = Arc::new(tensor(c, d)?);
    let dc = Arc::new(tensor(d, c)?);
    let f = c.field;
    ChainMap::from_fn(cd, dc, |n, k| {
        let offs = tensor_offsets(c, d, n);
        let toffs = tensor_offsets(d, c, n);
        let (p, o) = *offs.iter().rev().find(|e| e.1 <= k).unwrap();
        let q = n - p;
        let (i, j) = ((k - o) / d.dim(q), (k - o) % d.dim(q));
        let to = toffs.iter().find(|e| e.0 == q).unwrap().1;
        vec![(to + j * c.dim(p) + i, f.sign((p * q).rem_euclid(2) == 1))]
    })
}

/// Degrees translated by `k`, differential multiplied by `(-1)^k`.
pub fn shift(c: &WindowedComplex, k: i64) -> WindowedComplex {
    if k == 0 {
        return c.clone();
    }
    let (lo, labels, ds) = c.parts();
    let s = c.field.sign(k.rem_euclid(2) == 1);
    let ds = ds.iter().map(|m| m.scaled(&s)).collect();
    WindowedComplex::new(c.field, lo + k, labels.to_vec(), ds, c.bounded()).expect("shift")
}

/// The map `s^k f`.
pub fn shift_map(f: &ChainMap, k: i64, src: Arc<WindowedComplex>, tgt: Arc<WindowedComplex>) -> ChainMap {
    let blocks = f.blocks().iter().map(|(d, m)| (d + k, m.clone())).collect();
    ChainMap::new_unchecked(src, tgt, blocks)
}

/// `red₀`: drops negative degrees and replaces degree 0 by the cycles; also returns the
/// inclusion into `C`.
pub fn truncate_nonneg(c: &WindowedComplex) -> Result<(WindowedComplex, Vec<SVec>)> {
    let f = c.field;
    if !c.bounded() && c.hi() < 0 {
        return Err(Error::Window("degree 0 lies outside the known range".into()));
    }
    if c.lo() > 0 {
        return Ok((c.clone(), vec![]));
    }
    let mut e = Echelon::new(f, c.dim(0));
    for z in crate::linalg::reduce(&c.d(0))?.kernel.cols_iter() {
        e.insert(z);
    }
    let z: Vec<SVec> = (0..e.len()).map(|i| e.stored(i).clone()).collect();
    let hi = c.hi().max(0);
    let mut labels = vec![];
    let mut ds = vec![];
    for deg in 0..=hi {
        if deg == 0 {
            labels.push((0..z.len()).map(|i| format!("z{i}")).collect());
            ds.push(SparseMatrix::zero(f, 0, z.len()));
        } else if deg == 1 {
            let d1 = c.d(1);
            let cols = d1
                .cols_iter()
                .map(|v| e.coords(v).expect("boundary lies in the cycles"))
                .collect();
            ds.push(SparseMatrix::from_cols(f, z.len(), cols));
            labels.push(c.labels(1).to_vec());
        } else {
            ds.push(c.d(deg));
            labels.push(c.labels(deg).to_vec());
        }
    }
    let bounded = c.bounded();
    let mut r = WindowedComplex::new(f, 0, labels, ds, true)?;
    if !bounded {
        r = r.unbounded();
    }
    Ok((r, z))
}

/// Inclusion `red₀C → C`.
pub fn red0_inclusion(c: Arc<WindowedComplex>) -> Result<(Arc<WindowedComplex>, ChainMap)> {
    let (r, z) = truncate_nonneg(&c)?;
    let r = Arc::new(r);
    let lo0 = c.lo() > 0;
    let m = ChainMap::from_fn(r.clone(), c.clone(), |deg, i| {
        if deg == 0 && !lo0 {
            z[i].clone()
        } else {
            vec![(i, c.field.one())]
        }
    })?;
    Ok((r, m))
}

/// `cone(f)_d = T_d ⊕ S_{d-1}`, `d(y, x) = (dy + f x, -dx)`.
pub fn cone(f: &ChainMap) -> Result<WindowedComplex> {
    let (s, t) = (&f.source, &f.target);
    let fl = same_field(s, t)?;
    let lo = t.lo().min(s.lo() + 1);
    let (hi, bounded) = combine_hi(&[(t.hi(), t.bounded()), (s.hi() + 1, s.bounded())], lo);
    let mut labels = vec![];
    let mut ds = vec![];
    let m1 = fl.int(-1);
    for deg in lo..=hi {
        let (nt, ns) = (t.dim(deg), s.dim(deg - 1));
        let nt1 = t.dim(deg - 1);
        let mut lab: Vec<String> = t.labels(deg).to_vec();
        lab.extend(s.labels(deg - 1).iter().map(|l| format!("s{l}")));
        let mut cols: Vec<SVec> = vec![];
        let dt = t.d(deg);
        for j in 0..nt {
            cols.push(dt.col(j).clone());
        }
        let ds_ = s.d(deg - 1);
        let fm = f.block(deg - 1);
        for j in 0..ns {
            let mut v: SVec = fm.col(j).clone();
            let w: SVec = ds_.col(j).iter().map(|(r, x)| (r + nt1, x.mul(&m1))).collect();
            axpy(&mut v, &fl.one(), &w);
            cols.push(v);
        }
        let rows = if deg == lo { 0 } else { nt1 + s.dim(deg - 2) };
        ds.push(SparseMatrix::from_cols(fl, rows, cols));
        labels.push(lab);
    }
    WindowedComplex::new(fl, lo, labels, ds, bounded)
}

pub fn hofib(f: &ChainMap) -> Result<WindowedComplex> {
    Ok(shift(&cone(f)?, -1))
}

pub fn hocofib(f: &ChainMap) -> Result<WindowedComplex> {
    cone(f)
}

/// Degreewise direct sum of several complexes.
pub fn direct_sum_all(cs: &[&WindowedComplex]) -> Result<WindowedComplex> {
    let Some(first) = cs.first() else { return Err(Error::Invalid("empty sum".into())) };
    let f = first.field;
    for c in cs {
        same_field(first, c)?;
    }
    let nonzero: Vec<&&WindowedComplex> = cs.iter().filter(|c| !(c.is_zero() && c.bounded())).collect();
    if nonzero.is_empty() {
        return Ok(WindowedComplex::zero(f));
    }
    let lo = nonzero.iter().map(|c| c.lo()).min().unwrap();
    let parts: Vec<(i64, bool)> = nonzero.iter().map(|c| (c.hi(), c.bounded())).collect();
    let (hi, bounded) = combine_hi(&parts, lo);
    let mut labels = vec![];
    let mut ds = vec![];
    for deg in lo..=hi {
        let mut lab = vec![];
        let mut cols = vec![];
        let mut off = 0;
        for c in &nonzero {
            lab.extend(c.labels(deg).iter().cloned());
            let d = c.d(deg);
            for col in d.cols_iter() {
                cols.push(col.iter().map(|(r, x)| (r + off, x.clone())).collect());
            }
            off += c.dim(deg - 1);
        }
        let rows = if deg == lo { 0 } else { off };
        ds.push(SparseMatrix::from_cols(f, rows, cols));
        labels.push(lab);
    }
    WindowedComplex::new(f, lo, labels, ds, bounded)
}

pub fn direct_sum(c: &WindowedComplex, d: &WindowedComplex) -> Result<WindowedComplex> {
    direct_sum_all(&[c, d])
}

/// Mapping telescope of a finite tower `C_0 → C_1 → … → C_m`.
pub fn telescope(stages: &[Arc<WindowedComplex>], maps: &[ChainMap]) -> Result<WindowedComplex> {
    if stages.is_empty() {
        return Err(Error::Invalid("empty tower".into()));
    }
    if maps.len() + 1 != stages.len() {
        return Err(Error::Invalid("a tower of m+1 stages needs m maps".into()));
    }
    let f = stages[0].field;
    let all: Vec<&WindowedComplex> = stages.iter().map(|c| c.as_ref()).collect();
    let init: Vec<&WindowedComplex> = all[..all.len() - 1].to_vec();
    let total = Arc::new(direct_sum_all(&all)?);
    let src = Arc::new(if init.is_empty() { WindowedComplex::zero(f) } else { direct_sum_all(&init)? });
    let m1 = f.int(-1);
    let phi = ChainMap::from_fn(src.clone(), total.clone(), |deg, k| {
        let mut off = 0;
        let mut i = 0;
        while k >= off + init[i].dim(deg) {
            off += init[i].dim(deg);
            i += 1;
        }
        let local = k - off;
        let base_i: usize = all[..i].iter().map(|c| c.dim(deg)).sum();
        let base_next = base_i + all[i].dim(deg);
        let mut v: SVec = vec![(base_i + local, f.one())];
        let img: SVec = maps[i].apply(deg, &vec![(local, f.one())]);
        let w: SVec = img.into_iter().map(|(r, x)| (base_next + r, x)).collect();
        axpy(&mut v, &m1, &w);
        v
    })?;
    cone(&phi)
}

/// Direct sum of chain maps between direct sums.
pub fn direct_sum_map(
    maps: &[&ChainMap],
    src: Arc<WindowedComplex>,
    tgt: Arc<WindowedComplex>,
) -> Result<ChainMap> {
    let f = src.field;
    let mut blocks = BTreeMap::new();
    for deg in src.degrees() {
        let mut cols = vec![];
        let mut roff = 0;
        for m in maps {
            let b = m.block(deg);
            for c in b.cols_iter() {
                cols.push(c.iter().map(|(r, x)| (r + roff, x.clone())).collect());
            }
            roff += m.target.dim(deg);
        }
        if !cols.is_empty() {
            blocks.insert(deg, SparseMatrix::from_cols(f, tgt.dim(deg), cols));
        }
    }
    ChainMap::new(src, tgt, blocks)
}

pub fn scalar_complex(f: Field, deg: i64, dim: usize) -> WindowedComplex {
    WindowedComplex::new(
        f,
        deg,
        vec![(0..dim).map(|i| format!("e{i}")).collect()],
        vec![SparseMatrix::zero(f, 0, dim)],
        true,
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::{homology, induced_homology_map};

    fn arrow(f: Field) -> WindowedComplex {
        WindowedComplex::new(
            f,
            0,
            vec![vec!["a".into()], vec!["b".into()]],
            vec![SparseMatrix::zero(f, 0, 1), SparseMatrix::from_dense(f, &[vec![1]])],
            true,
        )
        .unwrap()
    }

    #[test]
    fn tensor_unit_and_odd_swap() {
        let f = Field::Q;
        let a = arrow(f);
        let u = scalar_complex(f, 0, 1);
        let t = tensor(&a, &u).unwrap();
        assert_eq!(t.dims(), a.dims());
        let k1 = scalar_complex(f, 1, 1);
        let t = tensor(&k1, &k1).unwrap();
        assert_eq!(t.dims(), BTreeMap::from([(2, 1)]));
        let s = swap_map(&k1, &k1).unwrap();
        assert_eq!(s.block(2).get(0, 0), f.int(-1));
    }

    #[test]
    fn tensor_of_acyclics() {
        let f = Field::Q;
        let t = tensor(&arrow(f), &arrow(f)).unwrap();
        assert!(homology(&t).table().is_empty());
        assert_eq!(t.dims(), BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn shift_round_trip() {
        let f = Field::Q;
        let c = arrow(f);
        assert_eq!(shift(&c, 0), c);
        let k = shift(&scalar_complex(f, 0, 1), 1);
        assert_eq!(k.dims(), BTreeMap::from([(1, 1)]));
        let b = shift(&shift(&c, 3), -3);
        assert_eq!(homology(&b).table(), homology(&c).table());
    }

    #[test]
    fn red0_examples() {
        let f = Field::Q;
        let c = shift(&arrow(f), -1);
        let (r, _) = truncate_nonneg(&c).unwrap();
        assert!(r.is_zero());
        let k = scalar_complex(f, 0, 1);
        assert_eq!(truncate_nonneg(&k).unwrap().0.dims(), k.dims());
    }

    #[test]
    fn cone_identity_acyclic() {
        let c = Arc::new(arrow(Field::Q));
        let k = cone(&ChainMap::identity(c)).unwrap();
        assert!(homology(&k).table().is_empty());
        let f = Field::Q;
        let z = Arc::new(WindowedComplex::zero(f));
        let p = Arc::new(scalar_complex(f, 0, 1));
        let h = hofib(&ChainMap::zero(z, p)).unwrap();
        assert_eq!(homology(&h).table(), BTreeMap::from([(-1, 1)]));
    }

    #[test]
    fn telescope_of_inclusions() {
        let f = Field::Q;
        let a = Arc::new(scalar_complex(f, 0, 1));
        let b = Arc::new(scalar_complex(f, 0, 2));
        let i = ChainMap::from_fn(a.clone(), b.clone(), |_, k| vec![(k, f.one())]).unwrap();
        let id = ChainMap::identity(b.clone());
        let t = telescope(&[a, b.clone(), b], &[i, id]).unwrap();
        assert_eq!(homology(&t).table(), BTreeMap::from([(0, 2)]));
    }

    #[test]
    fn swap_is_quasi_iso() {
        let f = Field::Q;
        let a = scalar_complex(f, 1, 2);
        let b = arrow(f);
        let s = swap_map(&a, &b).unwrap();
        assert!(induced_homology_map(&s).unwrap().quasi_iso);
    }
}
