//! Quasi-free algebras `(O(V), D)`: monomials are height-one trees with generator leaves.

use crate::operad::tree::{canonicalize, OpDeco, Tree};
use crate::operad::Operad;
use crate::linalg::{Field, Scalar};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Element of a free algebra: canonical monomials with coefficients.
pub type Elt = BTreeMap<Tree, Scalar>;

pub fn elt_add(a: &mut Elt, t: Tree, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match a.get_mut(&t) {
        Some(x) => {
            *x = x.add(&c);
            if x.is_zero() {
                a.remove(&t);
            }
        }
        None => {
            a.insert(t, c);
        }
    }
}

pub fn elt_axpy(a: &mut Elt, c: &Scalar, b: &Elt) {
    for (t, x) in b {
        elt_add(a, t.clone(), c.mul(x));
    }
}

pub fn elt_scale(a: &Elt, c: &Scalar) -> Elt {
    let mut out = Elt::new();
    elt_axpy(&mut out, c, a);
    out
}

#[derive(Clone, Debug)]
pub struct QuasiFree {
    pub op: Arc<Operad>,
    pub labels: Vec<String>,
    pub degs: Vec<i64>,
    /// `D(v)` for each generator.
    pub dgen: Vec<Elt>,
    /// False when the generators are only known up to some degree.
    pub gens_complete: bool,
}

impl QuasiFree {
    pub fn new(op: Arc<Operad>, labels: Vec<String>, degs: Vec<i64>, dgen: Vec<Elt>) -> Result<Self> {
        if degs.iter().any(|&d| d < 0) {
            return Err(Error::Invalid("generators must sit in nonnegative degrees".into()));
        }
        let q = QuasiFree { op, labels, degs, dgen, gens_complete: true };
        for (v, dv) in q.dgen.iter().enumerate() {
            for t in dv.keys() {
                if q.mono_deg(t) != q.degs[v] - 1 {
                    return Err(Error::Invalid(format!("D({}) has a term of the wrong degree", q.labels[v])));
                }
            }
        }
        Ok(q)
    }

    /// Free algebra with zero differential.
    pub fn free(op: Arc<Operad>, labels: Vec<String>, degs: Vec<i64>) -> Result<Self> {
        let n = labels.len();
        Self::new(op, labels, degs, vec![Elt::new(); n])
    }

    pub fn field(&self) -> Field {
        self.op.field()
    }

    pub fn ngens(&self) -> usize {
        self.labels.len()
    }

    pub fn deco(&self) -> OpDeco<'_> {
        OpDeco { op: &self.op, shift: 0 }
    }

    pub fn mono_deg(&self, t: &Tree) -> i64 {
        t.degree(&self.deco(), &|v| self.degs[v as usize])
    }

    pub fn elt_deg(&self, x: &Elt) -> Option<i64> {
        x.keys().next().map(|t| self.mono_deg(t))
    }

    pub fn gen(&self, v: usize) -> Elt {
        Elt::from([(Tree::Leaf(v as u32), self.field().one())])
    }

    fn canon_into(&self, t: Tree, c: Scalar, out: &mut Elt) {
        if let Some((neg, t2)) = canonicalize(&t, &self.deco(), &|v| self.degs[v as usize]) {
            elt_add(out, t2, if neg { c.neg() } else { c });
        }
    }

    pub fn canon(&self, t: Tree) -> Elt {
        let mut out = Elt::new();
        self.canon_into(t, self.field().one(), &mut out);
        out
    }

    /// Degree of the leaves of a monomial and its operation `(arity, index)`.
    fn split(&self, t: &Tree) -> ((usize, usize), Vec<u32>) {
        match t {
            Tree::Leaf(v) => ((1, 0), vec![*v]),
            Tree::Node(p, ch) => ((ch.len(), *p as usize), t.leaves()),
        }
    }

    /// `m(p; t_1, ..., t_k)` on monomials.
    pub fn product_basis(&self, k: usize, p: usize, ts: &[&Tree]) -> Elt {
        let f = self.field();
        let mut qs = vec![];
        let mut leaves = vec![];
        let mut odd = false;
        let mut leaves_deg = 0i64;
        for t in ts {
            let ((r, q), ls) = self.split(t);
            if self.op.deg(r, q) % 2 != 0 && leaves_deg % 2 != 0 {
                odd = !odd;
            }
            leaves_deg += ls.iter().map(|&v| self.degs[v as usize]).sum::<i64>();
            qs.push((r, q));
            leaves.extend(ls);
        }
        let (ar, comp) = self.op.gamma(k, p, &qs);
        let mut out = Elt::new();
        if ar > self.op.trunc {
            return out;
        }
        let sign = f.sign(odd);
        for (r, c) in comp {
            let t = Tree::Node(r as u32, leaves.iter().map(|&v| Tree::Leaf(v)).collect());
            self.canon_into(t, c.mul(&sign), &mut out);
        }
        out
    }

    /// Multilinear extension of the product.
    pub fn product(&self, k: usize, p: usize, args: &[&Elt]) -> Elt {
        let mut out = Elt::new();
        if args.iter().any(|a| a.is_empty()) {
            return out;
        }
        let lists: Vec<Vec<(&Tree, &Scalar)>> = args.iter().map(|a| a.iter().collect()).collect();
        let mut idx = vec![0usize; k];
        loop {
            let ts: Vec<&Tree> = (0..k).map(|i| lists[i][idx[i]].0).collect();
            let mut c = self.field().one();
            for i in 0..k {
                c = c.mul(lists[i][idx[i]].1);
            }
            elt_axpy(&mut out, &c, &self.product_basis(k, p, &ts));
            let mut i = 0;
            while i < k {
                idx[i] += 1;
                if idx[i] < lists[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        out
    }

    /// Extends a map on generators of degree `dd` to a derivation; `op_d` adds the operad
    /// differential on the operation.
    pub fn derivation(&self, x: &Elt, dd: i64, on_gen: &dyn Fn(usize) -> Elt, op_d: bool) -> Elt {
        let f = self.field();
        let mut out = Elt::new();
        for (t, c) in x {
            match t {
                Tree::Leaf(v) => elt_axpy(&mut out, c, &on_gen(*v as usize)),
                Tree::Node(p, ch) => {
                    let k = ch.len();
                    let p = *p as usize;
                    if op_d {
                        for (q, e) in &self.op.comp(k).d[p] {
                            let mut part = Elt::new();
                            self.canon_into(Tree::Node(*q as u32, ch.clone()), e.clone(), &mut part);
                            elt_axpy(&mut out, c, &part);
                        }
                    }
                    let leaf_elts: Vec<Elt> = ch.iter().map(|l| Elt::from([(l.clone(), f.one())])).collect();
                    let mut before = self.op.deg(k, p);
                    for j in 0..k {
                        let Tree::Leaf(v) = ch[j] else { unreachable!("monomials have height one") };
                        let img = on_gen(v as usize);
                        if !img.is_empty() {
                            let mut args: Vec<&Elt> = leaf_elts.iter().collect();
                            args[j] = &img;
                            let s = f.sign(dd % 2 != 0 && before % 2 != 0);
                            elt_axpy(&mut out, &c.mul(&s), &self.product(k, p, &args));
                        }
                        before += self.degs[v as usize];
                    }
                }
            }
        }
        out
    }

    pub fn d(&self, x: &Elt) -> Elt {
        self.derivation(x, -1, &|v| self.dgen[v].clone(), true)
    }

    /// Largest degree of a nonzero monomial when the generators are complete.
    pub fn max_degree(&self) -> Option<i64> {
        if !self.gens_complete {
            return None;
        }
        let m = *self.degs.iter().max()?;
        let mut best = m;
        for r in 2..=self.op.trunc {
            if let Some(&od) = self.op.comp(r).degs.iter().max() {
                best = best.max(r as i64 * m + od);
            }
        }
        Some(best)
    }

    /// Canonical monomials of degree `0..=top`, sorted within each degree.
    pub fn monomials(&self, top: i64) -> BTreeMap<i64, Vec<Tree>> {
        let mut out: BTreeMap<i64, Vec<Tree>> = (0..=top.max(-1)).map(|d| (d, vec![])).collect();
        for (v, &d) in self.degs.iter().enumerate() {
            if d <= top {
                out.entry(d).or_default().push(Tree::Leaf(v as u32));
            }
        }
        let n = self.ngens();
        for r in 2..=self.op.trunc {
            let c = self.op.comp(r);
            if c.dim() == 0 {
                continue;
            }
            let min_op = *c.degs.iter().min().unwrap();
            let mut cur = vec![];
            self.multisets(0, r, top - min_op, &mut cur, &mut |vs: &[usize]| {
                let leaves: Vec<Tree> = vs.iter().map(|&v| Tree::Leaf(v as u32)).collect();
                let ld: i64 = vs.iter().map(|&v| self.degs[v]).sum();
                for p in 0..c.dim() {
                    let d = ld + c.degs[p];
                    if d > top {
                        continue;
                    }
                    let t = Tree::Node(p as u32, leaves.clone());
                    if let Some((false, t2)) = canonicalize(&t, &self.deco(), &|v| self.degs[v as usize]) {
                        if t2 == t {
                            out.entry(d).or_default().push(t);
                        }
                    }
                }
            });
            let _ = n;
        }
        for v in out.values_mut() {
            v.sort();
        }
        out
    }

    fn multisets(&self, from: usize, count: usize, budget: i64, cur: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
        if count == 0 {
            emit(cur);
            return;
        }
        for v in from..self.ngens() {
            if self.degs[v] > budget {
                continue;
            }
            cur.push(v);
            self.multisets(v, count - 1, budget - self.degs[v], cur, emit);
            cur.pop();
        }
    }

    /// Linear part `d₁` of the differential on generators.
    pub fn linear_part(&self, v: usize) -> Vec<(usize, Scalar)> {
        self.dgen[v]
            .iter()
            .filter_map(|(t, c)| match t {
                Tree::Leaf(w) => Some((*w as usize, c.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn show(&self, t: &Tree) -> String {
        match t {
            Tree::Leaf(v) => self.labels[*v as usize].clone(),
            _ => t.show(&|k, d| self.op.comp(k).labels[d as usize].clone(), &|v| self.labels[v as usize].clone()),
        }
    }

    pub fn show_elt(&self, x: &Elt) -> String {
        if x.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = x.iter().map(|(t, c)| format!("{c}*{}", self.show(t))).collect();
        parts.join(" + ")
    }

    /// Relabels generators into another quasi-free algebra by an index map.
    pub fn transport(&self, x: &Elt, to: &QuasiFree, map: &dyn Fn(usize) -> usize) -> Elt {
        let mut out = Elt::new();
        for (t, c) in x {
            let t2 = t.map_leaves(&|v| map(v as usize) as u32);
            to.canon_into(t2, c.clone(), &mut out);
        }
        out
    }

    /// Sends generators to elements of `to` and extends multiplicatively (degree-zero map).
    pub fn extend_map(&self, x: &Elt, to: &QuasiFree, on_gen: &dyn Fn(usize) -> Elt) -> Elt {
        let mut out = Elt::new();
        for (t, c) in x {
            match t {
                Tree::Leaf(v) => elt_axpy(&mut out, c, &on_gen(*v as usize)),
                Tree::Node(p, ch) => {
                    let imgs: Vec<Elt> = ch
                        .iter()
                        .map(|l| match l {
                            Tree::Leaf(v) => on_gen(*v as usize),
                            _ => unreachable!(),
                        })
                        .collect();
                    let args: Vec<&Elt> = imgs.iter().collect();
                    elt_axpy(&mut out, c, &to.product(ch.len(), *p as usize, &args));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::builtin_operad;

    #[test]
    fn com_on_even_and_odd() {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        let x = QuasiFree::free(op.clone(), vec!["x".into()], vec![0]).unwrap();
        let m = x.monomials(0);
        assert_eq!(m[&0].len(), 3);
        let y = QuasiFree::free(op, vec!["y".into()], vec![1]).unwrap();
        let m = y.monomials(3);
        assert_eq!(m.values().map(|v| v.len()).sum::<usize>(), 1);
    }

    #[test]
    fn derivation_leibniz() {
        // Com(x, y), D y = x·x: D(y·y) = 2 x x y
        let f = Field::Q;
        let op = Arc::new(builtin_operad("Com", 3, f).unwrap());
        let mut q = QuasiFree::free(op, vec!["x".into(), "y".into()], vec![0, 1]).unwrap();
        let xx = q.product(2, 0, &[&q.gen(0), &q.gen(0)]);
        q.dgen[1] = xx;
        let xy = q.product(2, 0, &[&q.gen(0), &q.gen(1)]);
        let dxy = q.d(&xy);
        assert_eq!(dxy.len(), 1);
        assert_eq!(q.d(&dxy).len(), 0);
    }
}
