//! Two-sided bar constructions `B(R, O, L)` for `R ∈ {𝕀, O}` and `L ∈ {𝕀, X}`, the cobar
//! construction of `B(O)`, cofibrant replacement and `Σ^∞`.

pub mod cobar;
pub mod join;
pub mod replace;

pub use cobar::{cobar_bar_operad, cooperad_from_bar, BarCooperad, CobarBar, Degraft};
pub use join::{join, suspension, Join};
pub use replace::{cobar_primitive, cofibrant_presentation, cofibrant_replacement, sigma_inf, CofibrantReplacement};


use crate::algebra::Algebra;
use crate::chain::{SymmetricComplex, WindowedComplex};
use crate::linalg::{Field, Scalar, SparseMatrix};
use crate::operad::free::{canon_terms, tree_complex, tree_d0, Terms};
use crate::operad::perm::{set_partitions, transposition};
use crate::operad::tree::{act_on_labels, canonicalize, decorated_trees, labeled_trees, Deco, Tree};
use crate::operad::Operad;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

/// Decorations at or above this offset mark the unsuspended `R = O` root vertex.
pub const ROOT: u32 = 1 << 30;

/// Vertices in `sÕ` (arity `>= 2`), plus root vertices in `O` (arity `>= 1`) above `ROOT`.
pub struct BarDeco<'a> {
    pub op: &'a Operad,
}

impl Deco for BarDeco<'_> {
    fn field(&self) -> Field {
        self.op.field()
    }
    fn max_arity(&self) -> usize {
        self.op.trunc
    }
    fn dim(&self, arity: usize) -> usize {
        if arity < 2 {
            0
        } else {
            self.op.dim(arity)
        }
    }
    fn deg(&self, arity: usize, d: u32) -> i64 {
        if d >= ROOT {
            self.op.deg(arity, (d - ROOT) as usize)
        } else {
            self.op.deg(arity, d as usize) + 1
        }
    }
    fn act(&self, arity: usize, perm: &[usize], d: u32) -> (u32, bool) {
        if d >= ROOT {
            let (b, s) = self.op.act(arity, perm, (d - ROOT) as usize);
            (b as u32 + ROOT, s)
        } else {
            let (b, s) = self.op.act(arity, perm, d as usize);
            (b as u32, s)
        }
    }
}

#[derive(Clone, Debug)]
pub enum Leaves {
    /// `L = 𝕀` in arity `n`: leaves labelled `0..n`.
    Labeled(usize),
    /// `L = X̂`: leaves are basis elements of the algebra.
    Coeff(Arc<Algebra>),
}

#[derive(Clone, Debug)]
pub struct BarComplex {
    pub op: Arc<Operad>,
    pub root: bool,
    pub leaves: Leaves,
    pub trees: BTreeMap<i64, Vec<Tree>>,
    pub index: HashMap<Tree, (i64, usize)>,
    /// Leaf id to `(degree, index)` in the coefficient algebra.
    pub leaf_basis: Vec<(i64, usize)>,
    pub complex: Arc<WindowedComplex>,
}

/// Differential of bar trees; shared by the bar complexes and the cobar construction.
pub struct BarDiff<'a> {
    pub op: &'a Operad,
    pub coeff: Option<(&'a Algebra, &'a [(i64, usize)], &'a HashMap<(i64, usize), u32>)>,
}

impl BarDiff<'_> {
    pub fn deco(&self) -> BarDeco<'_> {
        BarDeco { op: self.op }
    }

    pub fn leaf_deg(&self, l: u32) -> i64 {
        match self.coeff {
            Some((_, lb, _)) => lb[l as usize].0,
            None => 0,
        }
    }

    pub fn tree_deg(&self, t: &Tree) -> i64 {
        t.degree(&self.deco(), &|l| self.leaf_deg(l))
    }

    fn leaf_vec(&self, deg: i64, v: crate::linalg::SVec) -> Vec<(u32, Scalar)> {
        let (_, _, ids) = self.coeff.unwrap();
        v.into_iter().map(|(i, c)| (ids[&(deg, i)], c)).collect()
    }

    /// `(∂₀ + ∂_R + ∂_O + ∂_L)(t)`, canonicalized.
    pub fn diff(&self, t: &Tree) -> Result<Vec<(Tree, Scalar)>> {
        let deco = self.deco();
        let ld = |l: u32| self.leaf_deg(l);
        let f = self.op.field();
        let mut terms = tree_d0(
            t,
            &deco,
            &ld,
            &|k, d| {
                let (base, neg) = if d >= ROOT { (d - ROOT, false) } else { (d, true) };
                self.op.comp(k).d[base as usize]
                    .iter()
                    .map(|(b, c)| (*b as u32 + (d - base), if neg { c.neg() } else { c.clone() }))
                    .collect()
            },
            &|l| match self.coeff {
                None => vec![],
                Some((x, lb, _)) => {
                    let (deg, i) = lb[l as usize];
                    let dv = x.complex.apply_d(deg, &vec![(i, f.one())]);
                    self.leaf_vec(deg - 1, dv)
                }
            },
        );
        terms.extend(self.contractions(t, 0)?);
        Ok(canon_terms(terms, &deco, &ld))
    }

    fn contractions(&self, t: &Tree, before: i64) -> Result<Terms> {
        let Tree::Node(d, ch) = t else { return Ok(vec![]) };
        let deco = self.deco();
        let f = self.op.field();
        let k = ch.len();
        let du = deco.deg(k, *d);
        let is_root = *d >= ROOT;
        let p = (if is_root { d - ROOT } else { *d }) as usize;
        let mut out = vec![];
        let mut s = 0i64;
        for j in 0..k {
            if let Tree::Node(e, gch) = &ch[j] {
                let m = gch.len();
                let q = *e as usize;
                let dq = self.op.deg(m, q);
                let sign = f.sign((before + du + (dq + 1) * s) % 2 != 0);
                for (r, c) in self.op.compose_basis(k, j + 1, p, m, q) {
                    let mut kids: Vec<Tree> = ch[..j].to_vec();
                    kids.extend(gch.iter().cloned());
                    kids.extend(ch[j + 1..].iter().cloned());
                    let dec = if is_root { r as u32 + ROOT } else { r as u32 };
                    out.push((c.mul(&sign), Tree::Node(dec, kids)));
                }
            }
            s += self.tree_deg(&ch[j]);
        }
        if let (false, Some((x, lb, _))) = (is_root, self.coeff) {
            if ch.iter().all(|c| c.is_leaf()) {
                let xs: Vec<(i64, usize)> = ch
                    .iter()
                    .map(|c| match c {
                        Tree::Leaf(l) => lb[*l as usize],
                        _ => unreachable!(),
                    })
                    .collect();
                let deg = xs.iter().map(|x| x.0).sum::<i64>() + self.op.deg(k, p);
                let v = x.act_basis(k, p, &xs)?;
                // opposite to the edge contractions, so that both routes to p(q(..),..) cancel
                let sign = f.sign(before % 2 == 0);
                for (l, c) in self.leaf_vec(deg, v) {
                    out.push((c.mul(&sign), Tree::Leaf(l)));
                }
            }
        }
        let mut acc = before + du;
        for j in 0..k {
            for (c, sub) in self.contractions(&ch[j], acc)? {
                let mut kids = ch.clone();
                kids[j] = sub;
                out.push((c, Tree::Node(*d, kids)));
            }
            acc += self.tree_deg(&ch[j]);
        }
        Ok(out)
    }
}

impl BarComplex {
    /// `B(R, O, L)`; coefficient bars are built through degree `top`.
    pub fn build(op: Arc<Operad>, root: bool, leaves: Leaves, top: i64) -> Result<BarComplex> {
        let f = op.field();
        let deco = BarDeco { op: &op };
        let mut leaf_basis = vec![];
        let mut leaf_ids = HashMap::new();
        let (by_deg, bounded): (BTreeMap<i64, Vec<Tree>>, bool) = match &leaves {
            Leaves::Labeled(n) => {
                let n = *n;
                if n == 0 {
                    return Err(Error::Invalid("arity 0 is not part of a reduced construction".into()));
                }
                let labels: Vec<u32> = (0..n as u32).collect();
                let trees = if root { rooted_labeled(&op, &labels) } else { labeled_trees(&deco, &labels) };
                let mut m: BTreeMap<i64, Vec<Tree>> = BTreeMap::new();
                for t in trees {
                    m.entry(t.degree(&deco, &|_| 0)).or_default().push(t);
                }
                (m, true)
            }
            Leaves::Coeff(x) => {
                if !x.op.same_structure(&op) {
                    return Err(Error::Invalid("coefficients over a different operad".into()));
                }
                let c = &x.complex;
                let top = if c.bounded() { top } else { top.min(c.hi()) };
                for d in c.degrees() {
                    for i in 0..c.dim(d) {
                        if d <= top {
                            leaf_ids.insert((d, i), leaf_basis.len() as u32);
                            leaf_basis.push((d, i));
                        }
                    }
                }
                let degs: Vec<i64> = leaf_basis.iter().map(|x| x.0).collect();
                let mut plain = decorated_trees(&deco, &degs, top);
                if root {
                    plain = rooted_coeff(&op, &deco, &plain, &degs, top);
                }
                let zero = c.is_zero() && c.bounded();
                let m = plain.into_iter().enumerate().map(|(d, v)| (d as i64, v)).collect();
                (m, zero)
            }
        };
        let mut index = HashMap::new();
        for (d, ts) in &by_deg {
            for (i, t) in ts.iter().enumerate() {
                index.insert(t.clone(), (*d, i));
            }
        }
        let coeff_alg = match &leaves {
            Leaves::Coeff(x) => Some(x.clone()),
            _ => None,
        };
        let complex = {
            let bd = BarDiff { op: &op, coeff: coeff_alg.as_deref().map(|x| (x, leaf_basis.as_slice(), &leaf_ids)) };
            let label = |t: &Tree| show_bar(&op, coeff_alg.as_deref(), &leaf_basis, t);
            let mut err = None;
            let c = tree_complex(f, &by_deg, bounded, &label, &mut |t| {
                bd.diff(t).unwrap_or_else(|e| {
                    err = Some(e);
                    vec![]
                })
            });
            if let Some(e) = err {
                return Err(e);
            }
            let c = c?;
            if bounded || c.is_zero() {
                c
            } else {
                c.unbounded()
            }
        };
        Ok(BarComplex { op, root, leaves, trees: by_deg, index, leaf_basis, complex: Arc::new(complex) })
    }

    pub fn tree(&self, deg: i64, i: usize) -> &Tree {
        &self.trees[&deg][i]
    }

    pub fn differ(&self) -> BarDiffOwned<'_> {
        BarDiffOwned { bar: self, ids: self.leaf_basis.iter().enumerate().map(|(i, x)| (*x, i as u32)).collect() }
    }
}

/// Owns the leaf index needed to evaluate the bar differential of a built complex.
pub struct BarDiffOwned<'a> {
    bar: &'a BarComplex,
    ids: HashMap<(i64, usize), u32>,
}

impl BarDiffOwned<'_> {
    pub fn get(&self) -> BarDiff<'_> {
        let coeff = match &self.bar.leaves {
            Leaves::Coeff(x) => Some((x.as_ref(), self.bar.leaf_basis.as_slice(), &self.ids)),
            _ => None,
        };
        BarDiff { op: &self.bar.op, coeff }
    }
}

fn show_bar(op: &Operad, x: Option<&Algebra>, lb: &[(i64, usize)], t: &Tree) -> String {
    let leaf = |l: u32| match x {
        Some(a) => {
            let (d, i) = lb[l as usize];
            a.complex.labels(d)[i].clone()
        }
        None => format!("{}", l + 1),
    };
    match t {
        Tree::Leaf(l) => leaf(*l),
        _ => t.show(
            &|k, d| {
                if d >= ROOT {
                    op.comp(k).labels[(d - ROOT) as usize].clone()
                } else {
                    format!("s{}", op.comp(k).labels[d as usize])
                }
            },
            &leaf,
        ),
    }
}

/// `O ∘ F(sÕ)` on labelled leaves: a root in `O(k)` over `k` labelled bar trees.
fn rooted_labeled(op: &Operad, labels: &[u32]) -> Vec<Tree> {
    let deco = BarDeco { op };
    let idx: Vec<usize> = (0..labels.len()).collect();
    let mut out = BTreeSet::new();
    for part in set_partitions(&idx) {
        let k = part.len();
        if k > op.trunc || op.dim(k) == 0 {
            continue;
        }
        let subs: Vec<Vec<Tree>> = part
            .iter()
            .map(|b| labeled_trees(&deco, &b.iter().map(|&i| labels[i]).collect::<Vec<_>>()))
            .collect();
        if subs.iter().any(|s| s.is_empty()) {
            continue;
        }
        let mut choice = vec![0usize; k];
        loop {
            let kids: Vec<Tree> = (0..k).map(|b| subs[b][choice[b]].clone()).collect();
            for r in 0..op.dim(k) {
                let t = Tree::Node(ROOT + r as u32, kids.clone());
                if let Some((_, c)) = canonicalize(&t, &deco, &|_| 0) {
                    out.insert(c);
                }
            }
            let mut b = 0;
            while b < k {
                choice[b] += 1;
                if choice[b] < subs[b].len() {
                    break;
                }
                choice[b] = 0;
                b += 1;
            }
            if b == k {
                break;
            }
        }
    }
    out.into_iter().collect()
}

/// `O ∘ F(sÕ) ∘ X̂` through degree `top`.
fn rooted_coeff(op: &Operad, deco: &BarDeco<'_>, plain: &[Vec<Tree>], degs: &[i64], top: i64) -> Vec<Vec<Tree>> {
    let ld = |l: u32| degs[l as usize];
    let mut pool: Vec<(Tree, i64)> =
        plain.iter().enumerate().flat_map(|(d, v)| v.iter().map(move |t| (t.clone(), d as i64))).collect();
    pool.sort();
    let mut out: Vec<Vec<Tree>> = vec![vec![]; plain.len()];
    for k in 1..=op.trunc {
        for r in 0..op.dim(k) {
            let budget = top - op.deg(k, r);
            let mut cur = vec![];
            choose(&pool, 0, k, budget, &mut cur, &mut |kids: &[usize]| {
                let ch: Vec<Tree> = kids.iter().map(|&i| pool[i].0.clone()).collect();
                let t = Tree::Node(ROOT + r as u32, ch);
                if let Some((_, c)) = canonicalize(&t, deco, &ld) {
                    if c == t {
                        let d = t.degree(deco, &ld);
                        out[d as usize].push(t);
                    }
                }
            });
        }
    }
    for v in &mut out {
        v.sort();
    }
    out
}

fn choose(pool: &[(Tree, i64)], from: usize, k: usize, budget: i64, cur: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if k == 0 {
        emit(cur);
        return;
    }
    for i in from..pool.len() {
        if pool[i].1 > budget {
            continue;
        }
        cur.push(i);
        choose(pool, i, k - 1, budget - pool[i].1, cur, emit);
        cur.pop();
    }
}

/// `B(O,X)`; its underlying complex is `Σ^∞X`.
pub fn bar_algebra(x: Arc<Algebra>, top: i64) -> Result<BarComplex> {
    BarComplex::build(x.op.clone(), false, Leaves::Coeff(x), top)
}

/// `B(O)(n) = B(𝕀, O, 𝕀)(n)`.
pub fn bar_operad(op: Arc<Operad>, n: usize) -> Result<BarComplex> {
    BarComplex::build(op, false, Leaves::Labeled(n), 0)
}

/// `B(R, O, L)` with `R = O` when `right_o`, and `L = 𝕀` in arity `n` or `L = X̂`.
pub fn two_sided_bar(op: Arc<Operad>, right_o: bool, leaves: Leaves, top: i64) -> Result<BarComplex> {
    BarComplex::build(op, right_o, leaves, top)
}

/// `B(O)(n)` with its `Σ_n`-action by relabelling leaves.
pub fn bar_operad_sym(op: Arc<Operad>, n: usize) -> Result<(BarComplex, SymmetricComplex)> {
    let b = bar_operad(op.clone(), n)?;
    let deco = BarDeco { op: &op };
    let f = op.field();
    let mut swaps = vec![];
    for i in 0..n.saturating_sub(1) {
        let p = transposition(n, i);
        let mut per = BTreeMap::new();
        for (d, ts) in &b.trees {
            let mut trip = vec![];
            for (j, t) in ts.iter().enumerate() {
                let (neg, t2) = act_on_labels(t, &p, &deco).expect("labelled trees never vanish");
                trip.push((b.index[&t2].1, j, f.sign(neg)));
            }
            per.insert(*d, SparseMatrix::from_triplets(f, ts.len(), ts.len(), trip)?);
        }
        swaps.push(per);
    }
    let s = SymmetricComplex::new(n, b.complex.clone(), swaps)?;
    Ok((b, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::QuasiFree;
    use crate::chain::homology::homology;
    use crate::chain::ops::scalar_complex;
    use crate::operad::builtin_operad;

    fn op(name: &str, n: usize, f: Field) -> Arc<Operad> {
        Arc::new(builtin_operad(name, n, f).unwrap())
    }

    #[test]
    fn bar_of_com_small_arities() {
        let c = op("Com", 3, Field::Q);
        let b2 = bar_operad(c.clone(), 2).unwrap();
        assert_eq!(b2.complex.dims(), BTreeMap::from([(1, 1)]));
        let b3 = bar_operad(c.clone(), 3).unwrap();
        assert_eq!(b3.complex.dims(), BTreeMap::from([(1, 1), (2, 3)]));
        assert_eq!(homology(&b3.complex).table(), BTreeMap::from([(2, 2)]));
        let b1 = bar_operad(c, 1).unwrap();
        assert_eq!(b1.complex.dims(), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn bar_squares_to_zero_for_builtins() {
        for f in [Field::Q, Field::fp(2).unwrap(), Field::fp(3).unwrap()] {
            for name in ["Com", "Assoc", "Tau1"] {
                let o = op(name, 4, f);
                for n in 1..=4 {
                    bar_operad_sym(o.clone(), n).unwrap();
                }
            }
        }
    }

    #[test]
    fn right_module_bar_is_acyclic() {
        let c = op("Com", 3, Field::Q);
        for n in 1..=3 {
            let b = two_sided_bar(c.clone(), true, Leaves::Labeled(n), 0).unwrap();
            let h = homology(&b.complex).table();
            let expect = if n == 1 { BTreeMap::from([(0, 1)]) } else { BTreeMap::new() };
            assert_eq!(h, expect, "arity {n}");
        }
    }

    #[test]
    fn bar_of_trivial_line_in_low_degrees() {
        let c = op("Com", 3, Field::Q);
        let x = Arc::new(Algebra::trivial("k", c, &scalar_complex(Field::Q, 0, 1)).unwrap());
        let b = bar_algebra(x, 2).unwrap();
        assert_eq!(b.trees[&0].len(), 1);
        assert_eq!(b.trees[&1].len(), 2);
    }

    #[test]
    fn bar_with_twisted_coefficients_and_root() {
        let c = op("Com", 3, Field::Q);
        let mut q = QuasiFree::free(c.clone(), vec!["x".into(), "y".into()], vec![0, 1]).unwrap();
        q.dgen[1] = q.product(2, 0, &[&q.gen(0), &q.gen(0)]);
        let x = Arc::new(Algebra::free("X", q, 4).unwrap());
        bar_algebra(x.clone(), 4).unwrap();
        let b = two_sided_bar(c, true, Leaves::Coeff(x.clone()), 3).unwrap();
        let hx = homology(&x.complex);
        assert_eq!(homology(&b.complex).table_on(0, 2), hx.table_on(0, 2));
    }

    #[test]
    fn bar_of_free_algebra_is_its_generators() {
        let c = op("Com", 3, Field::Q);
        let qf = QuasiFree::free(c, vec!["x".into()], vec![0]).unwrap();
        let x = Arc::new(Algebra::free("X", qf, 3).unwrap());
        let b = bar_algebra(x, 4).unwrap();
        assert_eq!(homology(&b.complex).table_on(0, 3), BTreeMap::from([(0, 1)]));
    }
}
