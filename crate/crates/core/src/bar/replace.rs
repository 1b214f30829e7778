//! `X^c = B^c(B(O), B(O,X))`, cobar of primitive coalgebras, and `Σ^∞`.

use super::{bar_algebra, BarComplex, BarDiffOwned};
use crate::algebra::{elt_add, AlgMap, Algebra, Elt, QuasiFree};
use crate::chain::homology::{induced_homology_map, InducedMap};
use crate::chain::WindowedComplex;
use crate::operad::tree::Tree;
use crate::operad::Operad;
use crate::Result;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct CofibrantReplacement {
    pub bar: BarComplex,
    pub algebra: Arc<Algebra>,
    pub counit: AlgMap,
    pub induced: InducedMap,
}

impl CofibrantReplacement {
    pub fn verdict(&self) -> bool {
        self.induced.quasi_iso
    }
}

/// Generators are the bar trees of `B(O,X)` through `top`; `D = ∂ + d_w` where
/// `d_w(s p(t_1, ..., t_k)) = p(t_1, ..., t_k)`.
pub fn cofibrant_presentation(bar: &BarComplex) -> QuasiFree {
    let op = bar.op.clone();
    let mut labels = vec![];
    let mut degs = vec![];
    let mut id: HashMap<&Tree, usize> = HashMap::new();
    for (d, ts) in &bar.trees {
        for (i, t) in ts.iter().enumerate() {
            id.insert(t, labels.len());
            labels.push(format!("[{}]", bar.complex.labels(*d)[i]));
            degs.push(*d);
        }
    }
    let mut q = QuasiFree { op, labels, degs, dgen: vec![], gens_complete: bar.complex.bounded() };
    let owned: BarDiffOwned<'_> = bar.differ();
    let bd = owned.get();
    let f = q.field();
    let mut dgen = vec![];
    for ts in bar.trees.values() {
        for t in ts {
            let mut e = Elt::new();
            for (s, c) in bd.diff(t).expect("bar differential was computed at construction") {
                elt_add(&mut e, Tree::Leaf(id[&s] as u32), c);
            }
            if let Tree::Node(p, ch) = t {
                let gens: Vec<Tree> = ch.iter().map(|c| Tree::Leaf(id[c] as u32)).collect();
                let refs: Vec<&Tree> = gens.iter().collect();
                let w = q.product_basis(ch.len(), *p as usize, &refs);
                crate::algebra::elt_axpy(&mut e, &f.one(), &w);
            }
            dgen.push(e);
        }
    }
    q.dgen = dgen;
    q
}

/// Cofibrant replacement through degree `top`, with the counit `X^c → X` and its verdict.
pub fn cofibrant_replacement(x: Arc<Algebra>, top: i64) -> Result<CofibrantReplacement> {
    let bar = bar_algebra(x.clone(), top)?;
    let q = cofibrant_presentation(&bar);
    let f = x.field();
    let mut images = vec![];
    for (d, ts) in &bar.trees {
        for t in ts {
            let v = match t {
                Tree::Leaf(l) => {
                    let (xd, i) = bar.leaf_basis[*l as usize];
                    debug_assert_eq!(xd, *d);
                    vec![(i, f.one())]
                }
                _ => vec![],
            };
            images.push((*d, v));
        }
    }
    let xc = Arc::new(Algebra::free(format!("{}^c", x.name), q, top)?);
    let counit = AlgMap::from_generators(xc.clone(), x, &images)?;
    let induced = induced_homology_map(&counit.chain)?;
    Ok(CofibrantReplacement { bar, algebra: xc, counit, induced })
}

/// Cobar of a coalgebra with trivial decomposition: the free algebra on `Y` with `d_Y`.
pub fn cobar_primitive(op: Arc<Operad>, y: &WindowedComplex, top: i64) -> Result<Algebra> {
    let mut labels = vec![];
    let mut degs = vec![];
    let mut start = HashMap::new();
    for d in y.degrees() {
        if d < 0 && y.dim(d) > 0 {
            return Err(crate::Error::Invalid("coalgebra must be concentrated in degrees >= 0".into()));
        }
        start.insert(d, labels.len());
        for l in y.labels(d) {
            labels.push(l.clone());
            degs.push(d);
        }
    }
    let dgen = y
        .degrees()
        .flat_map(|d| (0..y.dim(d)).map(move |i| (d, i)))
        .map(|(d, i)| {
            let mut e = Elt::new();
            for (r, c) in y.apply_d(d, &vec![(i, y.field.one())]) {
                elt_add(&mut e, Tree::Leaf((start[&(d - 1)] + r) as u32), c);
            }
            e
        })
        .collect();
    let mut q = QuasiFree::new(op, labels, degs, dgen)?;
    q.gens_complete = y.bounded();
    Algebra::free("B^c(Y)", q, top)
}

/// `Σ^∞X`: the underlying complex of `B(O,X)` through `top`.
pub fn sigma_inf(x: Arc<Algebra>, top: i64) -> Result<Arc<WindowedComplex>> {
    Ok(bar_algebra(x, top)?.complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::homology;
    use crate::chain::ops::scalar_complex;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;
    use std::collections::BTreeMap;

    fn com(f: Field) -> Arc<Operad> {
        Arc::new(builtin_operad("Com", 3, f).unwrap())
    }

    #[test]
    fn replacement_of_free_algebra() {
        let q = QuasiFree::free(com(Field::Q), vec!["x".into()], vec![0]).unwrap();
        let x = Arc::new(Algebra::free("X", q, 4).unwrap());
        let r = cofibrant_replacement(x, 3).unwrap();
        assert!(r.verdict(), "{:?}", r.induced.failing);
        assert!(r.counit.check_multiplicative(50).is_empty());
    }

    #[test]
    fn replacement_of_trivial_line() {
        for f in [Field::Q, Field::fp(2).unwrap()] {
            let x = Arc::new(Algebra::trivial("k", com(f), &scalar_complex(f, 1, 1)).unwrap());
            let r = cofibrant_replacement(x, 4).unwrap();
            assert!(r.verdict(), "{f}: {:?}", r.induced.failing);
        }
    }

    #[test]
    fn replacement_of_zero() {
        let r = cofibrant_replacement(Arc::new(Algebra::zero(com(Field::Q))), 3).unwrap();
        assert!(r.algebra.complex.is_zero() && r.algebra.complex.bounded());
    }

    #[test]
    fn sigma_inf_of_free_is_generators() {
        let q = QuasiFree::free(com(Field::Q), vec!["x".into(), "y".into()], vec![0, 1]).unwrap();
        let x = Arc::new(Algebra::free("X", q, 4).unwrap());
        let s = sigma_inf(x.clone(), 4).unwrap();
        assert_eq!(homology(&s).table_on(0, 3), BTreeMap::from([(0, 1), (1, 1)]));
        let ab = x.abelianization().unwrap();
        assert_eq!(homology(&s).table_on(0, 3), homology(&ab).table_on(0, 3));
    }

    #[test]
    fn primitive_cobar_is_free() {
        let y = scalar_complex(Field::Q, 0, 1);
        let a = cobar_primitive(com(Field::Q), &y, 3).unwrap();
        assert_eq!(a.complex.dims(), BTreeMap::from([(0, 3)]));
    }
}
