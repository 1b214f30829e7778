//! `B^c B(O)(n)` and its counit to `O(n)`.

use super::{BarDeco, BarDiff};
use crate::chain::homology::{induced_homology_map, InducedMap};
use crate::chain::{ChainMap, WindowedComplex};
use crate::linalg::matrix::axpy;
use crate::linalg::{SVec, Scalar};
use crate::operad::free::{canon_terms, tree_complex, tree_d0, Terms};
use crate::operad::perm::koszul_odd;
use crate::operad::tree::{labeled_trees, Deco, Tree, TreeBasis};
use crate::operad::Operad;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

const NEW: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct CobarBar {
    /// Desuspended bar trees, the vertex decorations of cobar trees.
    pub level: TreeBasis,
    pub trees: BTreeMap<i64, Vec<Tree>>,
    pub complex: Arc<WindowedComplex>,
    pub counit: ChainMap,
    pub induced: InducedMap,
}

/// `B(O)` as a cooperad through arity `max_arity`: its infinitesimal decompositions by de-grafting.
#[derive(Clone, Debug)]
pub struct BarCooperad {
    pub op: Arc<Operad>,
    pub level: TreeBasis,
}

/// `T = T1 ∘_B T2` with `T2` grafted at the leaf of `T1` ranked as `min B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Degraft {
    pub negate: bool,
    pub t1: Tree,
    pub t2: Tree,
    /// Labels of `T` carried by `T2`, ascending.
    pub block: Vec<u32>,
}

pub fn cooperad_from_bar(op: Arc<Operad>, max_arity: usize) -> Result<BarCooperad> {
    if op.dim(1) != 1 {
        return Err(Error::Invalid("operad is not reduced".into()));
    }
    let level = TreeBasis::new(&BarDeco { op: &op }, max_arity.min(op.trunc).max(1), -1);
    Ok(BarCooperad { op, level })
}

impl BarCooperad {
    pub fn bar_deg(&self, t: &Tree) -> i64 {
        t.degree(&BarDeco { op: &self.op }, &|_| 0)
    }

    /// Reduced infinitesimal decomposition; the sign is the Koszul sign of moving the factors
    /// of `T2` past the later factors of `T1`.
    pub fn decompose(&self, t: &Tree) -> Vec<Degraft> {
        let k = t.leaves().len() as u32;
        let mut out = vec![];
        for (t1, t2, after) in self.cuts(t) {
            let mut b = t2.leaves();
            b.sort();
            let mut rest: Vec<u32> = (0..k).filter(|l| !b.contains(l)).collect();
            rest.push(b[0]);
            rest.sort();
            let rank = |l: u32| rest.iter().position(|&x| x == l).unwrap() as u32;
            let t1 = t1.map_leaves(&|l| if l == NEW { rank(b[0]) } else { rank(l) });
            let t2 = t2.map_leaves(&|l| b.iter().position(|&x| x == l).unwrap() as u32);
            let (n1, t1) = self.canon(&t1);
            let (n2, t2) = self.canon(&t2);
            let odd = n1 ^ n2 ^ (self.bar_deg(&t2) * after % 2 != 0);
            out.push(Degraft { negate: odd, t1, t2, block: b });
        }
        out
    }

    fn canon(&self, t: &Tree) -> (bool, Tree) {
        crate::operad::tree::canonicalize(t, &BarDeco { op: &self.op }, &|_| 0).expect("labelled trees never vanish")
    }

    /// Internal edges of `T`: `(T1 with a NEW leaf, T2, degree of T1's factors after T2)`.
    fn cuts(&self, t: &Tree) -> Vec<(Tree, Tree, i64)> {
        let deco = BarDeco { op: &self.op };
        let total = self.bar_deg(t);
        let mut out = vec![];
        type Wrap = Box<dyn Fn(Tree) -> Tree>;
        fn go(t: &Tree, before: i64, is_root: bool, deco: &BarDeco<'_>, total: i64, out: &mut Vec<(Wrap, Tree, i64)>) {
            let Tree::Node(d, ch) = t else { return };
            if !is_root {
                let w = t.degree(deco, &|_| 0);
                out.push((Box::new(|x| x), t.clone(), total - before - w));
            }
            let mut acc = before + deco.deg(ch.len(), *d);
            for j in 0..ch.len() {
                let mut sub = vec![];
                go(&ch[j], acc, false, deco, total, &mut sub);
                for (wrap, t2, after) in sub {
                    let (d, ch) = (*d, ch.clone());
                    out.push((
                        Box::new(move |x| {
                            let mut kids = ch.clone();
                            kids[j] = wrap(x);
                            Tree::Node(d, kids)
                        }),
                        t2,
                        after,
                    ));
                }
                acc += ch[j].degree(deco, &|_| 0);
            }
        }
        let mut raw = vec![];
        go(t, 0, true, &deco, total, &mut raw);
        for (wrap, t2, after) in raw {
            out.push((wrap(Tree::Leaf(NEW)), t2, after));
        }
        out
    }
}

struct Ctx<'a> {
    op: &'a Operad,
    co: &'a BarCooperad,
    tb: &'a TreeBasis,
}

impl Ctx<'_> {
    fn diff(&self, c: &Tree) -> Vec<(Tree, Scalar)> {
        let bd = BarDiff { op: self.op, coeff: None };
        let tb = self.tb;
        let mut terms = tree_d0(
            c,
            tb,
            &|_| 0,
            &|k, d| {
                bd.diff(&tb.trees[k][d as usize])
                    .expect("operad bar differential")
                    .into_iter()
                    .map(|(t, x)| (tb.index[k][&t], x.neg()))
                    .collect()
            },
            &|_| vec![],
        );
        terms.extend(self.split(c, 0));
        canon_terms(terms, tb, &|_| 0)
    }

    /// The decomposition part, applied at each vertex.
    fn split(&self, c: &Tree, before: i64) -> Terms {
        let Tree::Node(d, ch) = c else { return vec![] };
        let f = self.op.field();
        let tb = self.tb;
        let k = ch.len();
        let mut out = vec![];
        let t = &tb.trees[k][*d as usize];
        let cdeg: Vec<i64> = ch.iter().map(|x| x.degree(tb, &|_| 0)).collect();
        for dg in self.co.decompose(t) {
            let b = &dg.block;
            let mut rest: Vec<u32> = (0..k as u32).filter(|l| !b.contains(l)).collect();
            rest.push(b[0]);
            rest.sort();
            let star = rest.iter().position(|&x| x == b[0]).unwrap();
            let (i1, i2) = (tb.index[rest.len()][&dg.t1], tb.index[b.len()][&dg.t2]);
            let d1 = self.co.bar_deg(&dg.t1);
            let d2 = self.co.bar_deg(&dg.t2);
            // (−1)^{|s⁻¹T1|} and the position of the vertex; the overall sign is fixed by the counit
            let mut odd = !(dg.negate ^ ((d1 - 1) % 2 != 0) ^ (before % 2 != 0));
            // children reordered: flattened order of original child positions
            let mut order: Vec<usize> = vec![];
            let mut pre = 0i64;
            for (r, &l) in rest.iter().enumerate() {
                if r == star {
                    order.extend(b.iter().map(|&x| x as usize));
                } else {
                    order.push(l as usize);
                    if r < star {
                        pre += cdeg[l as usize];
                    }
                }
            }
            let mut pos = vec![0; k];
            for (p, &o) in order.iter().enumerate() {
                pos[o] = p;
            }
            odd ^= koszul_odd(&cdeg, &pos);
            odd ^= (d2 - 1) * pre % 2 != 0;
            let kids2: Vec<Tree> = b.iter().map(|&x| ch[x as usize].clone()).collect();
            let v2 = Tree::Node(i2, kids2);
            let kids1: Vec<Tree> = rest
                .iter()
                .enumerate()
                .map(|(r, &l)| if r == star { v2.clone() } else { ch[l as usize].clone() })
                .collect();
            out.push((f.sign(odd), Tree::Node(i1, kids1)));
        }
        let mut acc = before + tb.deg(k, *d);
        for j in 0..k {
            for (x, sub) in self.split(&ch[j], acc) {
                let mut kids = ch.clone();
                kids[j] = sub;
                out.push((x, Tree::Node(*d, kids)));
            }
            acc += cdeg[j];
        }
        out
    }

    /// Counit on a cobar tree: `(arity, value, leaf labels in input order)`.
    fn counit(&self, c: &Tree) -> Option<(usize, SVec, Vec<u32>)> {
        let f = self.op.field();
        match c {
            Tree::Leaf(l) => Some((1, vec![(0, f.one())], vec![*l])),
            Tree::Node(d, ch) => {
                let k = ch.len();
                let Tree::Node(p, leaves) = &self.tb.trees[k][*d as usize] else { unreachable!() };
                if !leaves.iter().all(|x| x.is_leaf()) {
                    return None;
                }
                let mut cur = vec![(*p as usize, f.one())];
                let mut ar = k;
                let mut pos = 1;
                let mut labels = vec![];
                for x in ch {
                    let (r, v, ls) = self.counit(x)?;
                    cur = self.op.compose_vec(ar, pos, &cur, r, &v);
                    ar += r - 1;
                    pos += r;
                    labels.extend(ls);
                }
                Some((ar, cur, labels))
            }
        }
    }
}

/// `B^c B(O)(n)` with the counit `ε: B^c B(O)(n) → O(n)` and its effect on homology.
pub fn cobar_bar_operad(op: Arc<Operad>, n: usize) -> Result<CobarBar> {
    if n == 0 || n > op.trunc {
        return Err(Error::Invalid(format!("arity {n} outside 1..={}", op.trunc)));
    }
    let f = op.field();
    let co = cooperad_from_bar(op.clone(), n)?;
    let level = co.level.clone();
    let ctx = Ctx { op: &op, co: &co, tb: &level };
    let labels: Vec<u32> = (0..n as u32).collect();
    let mut trees: BTreeMap<i64, Vec<Tree>> = BTreeMap::new();
    for t in labeled_trees(&level, &labels) {
        trees.entry(t.degree(&level, &|_| 0)).or_default().push(t);
    }
    let show = |t: &Tree| {
        t.show(
            &|k, d| {
                let inner = level.trees[k][d as usize].show(
                    &|a, e| format!("s{}", op.comp(a).labels[e as usize]),
                    &|l| format!("{}", l + 1),
                );
                format!("s⁻¹[{inner}]")
            },
            &|l| format!("{}", l + 1),
        )
    };
    let complex = Arc::new(tree_complex(f, &trees, true, &show, &mut |t| ctx.diff(t))?);
    let target = Arc::new(op.comp(n).complex(f)?);
    let comp = op.comp(n);
    let mut err = None;
    let counit = ChainMap::from_fn(complex.clone(), target.clone(), |deg, i| {
        let t = &trees[&deg][i];
        let Some((ar, v, ls)) = ctx.counit(t) else { return vec![] };
        if ar != n {
            err = Some(Error::Invalid("counit arity mismatch".into()));
            return vec![];
        }
        let perm: Vec<usize> = ls.iter().map(|&l| l as usize).collect();
        let v = op.act_vec(n, &perm, &v);
        let mut out = vec![];
        for (b, x) in v {
            let b = comp.local(b);
            axpy(&mut out, &f.one(), &vec![(b, x)]);
        }
        out
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let induced = induced_homology_map(&counit)?;
    Ok(CobarBar { level, trees, complex, counit, induced })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::homology;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;

    #[test]
    fn counit_is_a_quasi_isomorphism() {
        for f in [Field::Q, Field::fp(2).unwrap()] {
            for name in ["Com", "Assoc"] {
                let op = Arc::new(builtin_operad(name, 3, f).unwrap());
                for n in 1..=3 {
                    let c = cobar_bar_operad(op.clone(), n).unwrap();
                    assert!(c.induced.quasi_iso, "{name} arity {n} over {f}: {:?}", c.induced.failing);
                }
            }
        }
    }

    #[test]
    fn counit_in_arity_four() {
        for name in ["Com", "Assoc"] {
            let op = Arc::new(builtin_operad(name, 4, Field::Q).unwrap());
            let c = cobar_bar_operad(op, 4).unwrap();
            assert!(c.induced.quasi_iso, "{name}");
        }
    }

    #[test]
    fn degrafting() {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        let co = cooperad_from_bar(op, 3).unwrap();
        assert!(co.decompose(&co.level.trees[2][0]).is_empty());
        for t in &co.level.trees[3] {
            let ds = co.decompose(t);
            assert_eq!(ds.len(), t.vertices() - 1);
            for d in ds {
                assert_eq!((d.t1.vertices(), d.t2.vertices()), (1, 1));
                assert_eq!(d.block.len(), 2);
            }
        }
    }

    #[test]
    fn arity_two_and_one() {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        for n in [1, 2] {
            let c = cobar_bar_operad(op.clone(), n).unwrap();
            assert_eq!(homology(&c.complex).table(), BTreeMap::from([(0, 1)]));
        }
    }

    #[test]
    fn cobar_bar_com3_dims() {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        let c = cobar_bar_operad(op, 3).unwrap();
        assert_eq!(homology(&c.complex).table(), BTreeMap::from([(0, 1)]));
    }
}
