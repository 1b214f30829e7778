use super::complex::{combine_hi, ChainMap, WindowedComplex};
use crate::linalg::matrix::collect;
use crate::linalg::SparseMatrix;
use crate::{Error, Result};
use std::sync::Arc;

/// Functor from subsets of `{0..n-1}` (bitmasks) to complexes, with one arrow per edge.
#[derive(Clone, Debug)]
pub struct CubeDiagram {
    pub n: usize,
    pub objects: Vec<Arc<WindowedComplex>>,
    arrows: Vec<Vec<Option<ChainMap>>>,
}

impl CubeDiagram {
    /// `arrow(T, j)` is the map `K(T) → K(T ∪ {j})`; every square face must commute.
    pub fn new(
        n: usize,
        objects: Vec<Arc<WindowedComplex>>,
        mut arrow: impl FnMut(usize, usize) -> Result<ChainMap>,
    ) -> Result<Self> {
        if objects.len() != 1 << n {
            return Err(Error::Invalid(format!("an {n}-cube needs {} objects", 1 << n)));
        }
        let mut arrows = vec![vec![None; n]; 1 << n];
        for t in 0..(1usize << n) {
            for j in 0..n {
                if t & (1 << j) == 0 {
                    let a = arrow(t, j)?;
                    if a.source.field != objects[t].field {
                        return Err(Error::Invalid("arrow over a different field".into()));
                    }
                    arrows[t][j] = Some(a);
                }
            }
        }
        let c = CubeDiagram { n, objects, arrows };
        c.check_faces()?;
        Ok(c)
    }

    pub fn arrow(&self, t: usize, j: usize) -> &ChainMap {
        self.arrows[t][j].as_ref().expect("edge of the cube")
    }

    fn check_faces(&self) -> Result<()> {
        for t in 0..(1usize << self.n) {
            for i in 0..self.n {
                for j in (i + 1)..self.n {
                    if t & (1 << i) != 0 || t & (1 << j) != 0 {
                        continue;
                    }
                    let a = self.arrow(t, i).then(self.arrow(t | 1 << i, j));
                    let b = self.arrow(t, j).then(self.arrow(t | 1 << j, i));
                    if !a.same_as(&b) {
                        return Err(Error::Invalid(format!(
                            "face at {} in directions {i},{j} does not commute",
                            subset_name(t, self.n)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn subset_name(t: usize, n: usize) -> String {
    let v: Vec<String> = (0..n).filter(|i| t & (1 << i) != 0).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Places `(T, x)` in degree `|x| + shift(T)`; the differential on each summand is scaled by
/// `dsign(T)` and the edge `T → T∪j` by `esign(T, j)`.
fn totalize(
    k: &CubeDiagram,
    shift: impl Fn(usize) -> i64,
    dsign: impl Fn(usize) -> bool,
    esign: impl Fn(usize, usize) -> bool,
) -> Result<WindowedComplex> {
    let f = k.objects[0].field;
    let m = 1usize << k.n;
    let live: Vec<usize> = (0..m).filter(|&t| !(k.objects[t].is_zero() && k.objects[t].bounded())).collect();
    if live.is_empty() {
        return Ok(WindowedComplex::zero(f));
    }
    let lo = live.iter().map(|&t| k.objects[t].lo() + shift(t)).min().unwrap();
    let parts: Vec<(i64, bool)> =
        live.iter().map(|&t| (k.objects[t].hi() + shift(t), k.objects[t].bounded())).collect();
    let (hi, bounded) = combine_hi(&parts, lo);
    let offsets = |deg: i64| -> Vec<usize> {
        let mut o = Vec::with_capacity(m + 1);
        let mut acc = 0;
        for t in 0..m {
            o.push(acc);
            acc += k.objects[t].dim(deg - shift(t));
        }
        o.push(acc);
        o
    };
    let mut labels = vec![];
    let mut ds = vec![];
    for deg in lo..=hi {
        let prev = offsets(deg - 1);
        let mut lab = vec![];
        let mut cols = vec![];
        for t in 0..m {
            let c = &k.objects[t];
            let e = deg - shift(t);
            lab.extend(c.labels(e).iter().map(|l| format!("{}:{l}", subset_name(t, k.n))));
            let d = c.d(e);
            let ds_ = f.sign(dsign(t));
            for i in 0..c.dim(e) {
                let mut v = vec![];
                for (r, x) in d.col(i) {
                    v.push((prev[t] + r, x.mul(&ds_)));
                }
                for j in 0..k.n {
                    if t & (1 << j) != 0 {
                        continue;
                    }
                    let u = t | 1 << j;
                    // the target summand sits one degree lower in the fiber, higher in the cofiber
                    let eu = deg - 1 - shift(u);
                    debug_assert_eq!(eu, e);
                    let img = k.arrow(t, j).apply(e, &vec![(i, f.one())]);
                    let es = f.sign(esign(t, j));
                    for (r, x) in img {
                        v.push((prev[u] + r, x.mul(&es)));
                    }
                }
                cols.push(collect(v));
            }
        }
        let rows = if deg == lo { 0 } else { *prev.last().unwrap() };
        ds.push(SparseMatrix::from_cols(f, rows, cols));
        labels.push(lab);
    }
    WindowedComplex::new(f, lo, labels, ds, bounded)
}

fn below(t: usize, j: usize) -> u32 {
    (t & ((1 << j) - 1)).count_ones()
}

/// Total homotopy fiber: `(T, x)` in degree `|x| - |T|`.
pub fn cube_total_fiber(k: &CubeDiagram) -> Result<WindowedComplex> {
    totalize(
        k,
        |t| -(t.count_ones() as i64),
        |t| t.count_ones() % 2 == 1,
        |t, j| below(t, j) % 2 == 1,
    )
}

/// Total homotopy cofiber: `(T, x)` in degree `|x| + n - |T|`.
pub fn cube_total_cofiber(k: &CubeDiagram) -> Result<WindowedComplex> {
    let n = k.n as u32;
    let mask = (1usize << k.n) - 1;
    totalize(
        k,
        |t| (n - t.count_ones()) as i64,
        |t| (n - t.count_ones()) % 2 == 1,
        |t, j| below(!t & mask, j) % 2 == 1,
    )
}

/// Map of total fibers induced by vertex maps `K(T) → L(π(T))`, each with an extra sign;
/// `π` must be a bijection on subsets preserving cardinality.
pub fn total_fiber_map(
    k: &CubeDiagram,
    l: &CubeDiagram,
    src: Arc<WindowedComplex>,
    tgt: Arc<WindowedComplex>,
    vertex: &[(usize, ChainMap, bool)],
) -> Result<ChainMap> {
    let f = src.field;
    let m = 1usize << k.n;
    if vertex.len() != m || l.n != k.n {
        return Err(Error::Invalid("vertex maps do not match the cube".into()));
    }
    let offsets = |c: &CubeDiagram, deg: i64| -> Vec<usize> {
        let mut o = Vec::with_capacity(m);
        let mut acc = 0;
        for t in 0..m {
            o.push(acc);
            acc += c.objects[t].dim(deg + t.count_ones() as i64);
        }
        o
    };
    ChainMap::from_fn(src, tgt, |deg, i| {
        let so = offsets(k, deg);
        let to = offsets(l, deg);
        let t = (0..m).find(|&t| so[t] <= i && i < so[t] + k.objects[t].dim(deg + t.count_ones() as i64)).unwrap();
        let (u, map, neg) = &vertex[t];
        let e = deg + t.count_ones() as i64;
        let s = f.sign(*neg);
        map.apply(e, &vec![(i - so[t], f.one())]).into_iter().map(|(r, x)| (to[*u] + r, x.mul(&s))).collect()
    })
}

/// Iterated homotopy fiber taken one direction at a time in index order.
pub fn iterated_fiber(k: &CubeDiagram) -> Result<WindowedComplex> {
    use super::ops::hofib;
    // collapse the last direction repeatedly: K'(T) = hofib(K(T) → K(T ∪ {j}))
    let mut objs: Vec<Arc<WindowedComplex>> = k.objects.clone();
    let mut arrows: Vec<Vec<Option<ChainMap>>> = k.arrows.clone();
    let mut n = k.n;
    while n > 0 {
        let j = n - 1;
        let half = 1usize << j;
        let mut new_objs = vec![];
        for t in 0..half {
            new_objs.push(Arc::new(hofib(arrows[t][j].as_ref().unwrap())?));
        }
        let mut new_arrows = vec![vec![None; j]; half];
        for t in 0..half {
            for i in 0..j {
                if t & (1 << i) != 0 {
                    continue;
                }
                let u = t | 1 << i;
                let a = arrows[t][i].as_ref().unwrap();
                let b = arrows[t | half][i].as_ref().unwrap();
                new_arrows[t][i] = Some(fiber_map(a, b, new_objs[t].clone(), new_objs[u].clone())?);
            }
        }
        objs = new_objs;
        arrows = new_arrows;
        n = j;
    }
    Ok(Arc::try_unwrap(objs.pop().unwrap()).unwrap_or_else(|a| (*a).clone()))
}

/// Map of homotopy fibers induced by a commuting square `a: S→S'`, `b: T→T'`.
fn fiber_map(
    a: &ChainMap,
    b: &ChainMap,
    src: Arc<WindowedComplex>,
    tgt: Arc<WindowedComplex>,
) -> Result<ChainMap> {
    // hofib(f)_e = T_{e+1} ⊕ S_e (shifted cone)
    let t = &b.source;
    let t2 = &b.target;
    let f = t.field;
    ChainMap::from_fn(src, tgt, |e, i| {
        let nt = t.dim(e + 1);
        let nt2 = t2.dim(e + 1);
        if i < nt {
            b.apply(e + 1, &vec![(i, f.one())])
        } else {
            a.apply(e, &vec![(i - nt, f.one())]).into_iter().map(|(r, x)| (r + nt2, x)).collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::homology;
    use crate::chain::ops::{scalar_complex, tensor};
    use crate::linalg::Field;
    use std::collections::BTreeMap;

    #[test]
    fn one_cube_is_hofib() {
        let f = Field::Q;
        let a = Arc::new(scalar_complex(f, 0, 1));
        let z = Arc::new(WindowedComplex::zero(f));
        let k = CubeDiagram::new(1, vec![a.clone(), z.clone()], |_, _| Ok(ChainMap::zero(a.clone(), z.clone())))
            .unwrap();
        assert_eq!(homology(&cube_total_fiber(&k).unwrap()).table(), BTreeMap::from([(0, 1)]));
        assert_eq!(homology(&cube_total_cofiber(&k).unwrap()).table(), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn iso_cube_acyclic() {
        let f = Field::Q;
        let a = Arc::new(scalar_complex(f, 2, 3));
        let objs = vec![a.clone(); 4];
        let k = CubeDiagram::new(2, objs, |_, _| Ok(ChainMap::identity(a.clone()))).unwrap();
        assert!(homology(&cube_total_fiber(&k).unwrap()).table().is_empty());
        assert!(homology(&iterated_fiber(&k).unwrap()).table().is_empty());
    }

    #[test]
    fn noncommuting_face_rejected() {
        let f = Field::Q;
        let a = Arc::new(scalar_complex(f, 0, 1));
        let objs = vec![a.clone(); 4];
        let r = CubeDiagram::new(2, objs, |t, j| {
            let m = ChainMap::identity(a.clone());
            Ok(if t == 0 && j == 0 { m.scaled(&f.int(2)) } else { m })
        });
        assert!(r.is_err());
    }

    #[test]
    fn square_cofiber_of_tensor_square() {
        // T ↦ (⊕_{i∈T} W_i)^{⊗2} with W_1 = W_2 = k in degree 0
        let f = Field::Q;
        let sums: Vec<Arc<WindowedComplex>> = (0..4usize)
            .map(|t| {
                let w = scalar_complex(f, 0, t.count_ones() as usize);
                Arc::new(tensor(&w, &w).unwrap())
            })
            .collect();
        let cube = CubeDiagram::new(2, sums.clone(), |t, j| {
            // inclusion of coordinates: basis of ⊕_T is the elements of T in order
            let pos = |set: usize, i: usize| (set & ((1 << i) - 1)).count_ones() as usize;
            let u = t | 1 << j;
            let nt = t.count_ones() as usize;
            let nu = u.count_ones() as usize;
            let elems: Vec<usize> = (0..2).filter(|i| t & (1 << i) != 0).collect();
            ChainMap::from_fn(sums[t].clone(), sums[u].clone(), |_, k| {
                let (a, b) = (elems[k / nt], elems[k % nt]);
                vec![(pos(u, a) * nu + pos(u, b), f.one())]
            })
        })
        .unwrap();
        let c = cube_total_cofiber(&cube).unwrap();
        assert_eq!(homology(&c).table(), BTreeMap::from([(0, 2)]));
        let fib = cube_total_fiber(&cube).unwrap();
        assert_eq!(homology(&fib).table(), BTreeMap::from([(-2, 2)]));
    }
}
