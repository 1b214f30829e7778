//! Free operads on symmetric sequences and the composition product.

use super::perm::{koszul_odd, set_partitions};
use super::symseq::{Component, SymSeq};
use super::tree::{canonicalize, labeled_trees, Deco, Tree};
use crate::chain::{SymmetricComplex, WindowedComplex};
use crate::linalg::{Field, Scalar, SparseMatrix};
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// A symmetric sequence used as vertex decorations.
pub struct SeqDeco<'a> {
    pub seq: &'a SymSeq,
    pub shift: i64,
}

impl Deco for SeqDeco<'_> {
    fn field(&self) -> Field {
        self.seq.field
    }
    fn max_arity(&self) -> usize {
        self.seq.max_arity()
    }
    fn dim(&self, arity: usize) -> usize {
        if arity < 2 {
            0
        } else {
            self.seq.dim(arity)
        }
    }
    fn deg(&self, arity: usize, d: u32) -> i64 {
        self.seq.comps[arity].degs[d as usize] + self.shift
    }
    fn act(&self, arity: usize, perm: &[usize], d: u32) -> (u32, bool) {
        let (b, s) = self.seq.comps[arity].act(perm, d as usize);
        (b as u32, s)
    }
}

pub type Terms = Vec<(Scalar, Tree)>;

/// Applies a degree −1 map factorwise with Koszul signs (pre-order factor order).
/// `vd` acts on vertex decorations, `ld` on leaves; results are not canonicalized.
pub fn tree_d0(
    t: &Tree,
    deco: &dyn Deco,
    leaf_deg: &dyn Fn(u32) -> i64,
    vd: &dyn Fn(usize, u32) -> Vec<(u32, Scalar)>,
    ld: &dyn Fn(u32) -> Vec<(u32, Scalar)>,
) -> Terms {
    let f = deco.field();
    fn go(
        t: &Tree,
        before: i64,
        f: Field,
        deco: &dyn Deco,
        leaf_deg: &dyn Fn(u32) -> i64,
        vd: &dyn Fn(usize, u32) -> Vec<(u32, Scalar)>,
        ld: &dyn Fn(u32) -> Vec<(u32, Scalar)>,
    ) -> Terms {
        let sign = f.sign(before % 2 != 0);
        match t {
            Tree::Leaf(l) => ld(*l).into_iter().map(|(l2, c)| (c.mul(&sign), Tree::Leaf(l2))).collect(),
            Tree::Node(d, ch) => {
                let k = ch.len();
                let mut out: Terms =
                    vd(k, *d).into_iter().map(|(d2, c)| (c.mul(&sign), Tree::Node(d2, ch.clone()))).collect();
                let mut acc = before + deco.deg(k, *d);
                for j in 0..k {
                    for (c, sub) in go(&ch[j], acc, f, deco, leaf_deg, vd, ld) {
                        let mut ch2 = ch.clone();
                        ch2[j] = sub;
                        out.push((c, Tree::Node(*d, ch2)));
                    }
                    acc += ch[j].degree(deco, leaf_deg);
                }
                out
            }
        }
    }
    go(t, 0, f, deco, leaf_deg, vd, ld)
}

/// Canonicalizes and sums terms.
pub fn canon_terms(terms: Terms, deco: &dyn Deco, leaf_deg: &dyn Fn(u32) -> i64) -> Vec<(Tree, Scalar)> {
    let f = deco.field();
    let mut acc: BTreeMap<Tree, Scalar> = BTreeMap::new();
    for (c, t) in terms {
        if let Some((neg, t2)) = canonicalize(&t, deco, leaf_deg) {
            let c = if neg { c.neg() } else { c };
            let e = acc.entry(t2).or_insert_with(|| f.zero());
            *e = e.add(&c);
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Assembles a complex from trees grouped by degree and a differential on them.
pub fn tree_complex(
    field: Field,
    by_deg: &BTreeMap<i64, Vec<Tree>>,
    bounded: bool,
    label: &dyn Fn(&Tree) -> String,
    diff: &mut dyn FnMut(&Tree) -> Vec<(Tree, Scalar)>,
) -> Result<WindowedComplex> {
    let nonempty: Vec<i64> = by_deg.iter().filter(|(_, v)| !v.is_empty()).map(|(d, _)| *d).collect();
    let (Some(&lo), Some(&hi)) = (by_deg.keys().next(), by_deg.keys().last()) else {
        return Ok(WindowedComplex::zero(field));
    };
    if nonempty.is_empty() && bounded {
        return Ok(WindowedComplex::zero(field));
    }
    let basis: Vec<Vec<Tree>> = (lo..=hi).map(|d| by_deg.get(&d).cloned().unwrap_or_default()).collect();
    WindowedComplex::from_basis(field, lo, basis, bounded, label, |_, t| diff(t))
}

/// `F(M)(n)`: canonical trees with `n` labelled leaves and `M`-decorated vertices.
pub fn free_object(m: &SymSeq, n: usize) -> Result<WindowedComplex> {
    if m.dim(0) != 0 || m.dim(1) != 0 {
        return Err(Error::Invalid("free object needs M(0) = M(1) = 0".into()));
    }
    let f = m.field;
    if n == 0 {
        return Ok(WindowedComplex::zero(f));
    }
    let deco = SeqDeco { seq: m, shift: 0 };
    let labels: Vec<u32> = (0..n as u32).collect();
    let trees = labeled_trees(&deco, &labels);
    let leaf0 = |_: u32| 0i64;
    let mut by_deg: BTreeMap<i64, Vec<Tree>> = BTreeMap::new();
    for t in trees {
        by_deg.entry(t.degree(&deco, &leaf0)).or_default().push(t);
    }
    if by_deg.is_empty() {
        return Ok(WindowedComplex::zero(f));
    }
    let label = |t: &Tree| {
        t.show(&|k, d| m.comps[k].labels[d as usize].clone(), &|l| (l + 1).to_string())
    };
    let vd = |k: usize, d: u32| -> Vec<(u32, Scalar)> {
        m.comps[k].d[d as usize].iter().map(|(b, c)| (*b as u32, c.clone())).collect()
    };
    let nold = |_: u32| vec![];
    tree_complex(f, &by_deg, true, &label, &mut |t| {
        canon_terms(tree_d0(t, &deco, &leaf0, &vd, &nold), &deco, &leaf0)
    })
}

/// Basis element of `(M∘N)(n)`: blocks listed by least element, an `M(k)` element, one
/// `N(|J_i|)` element per block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositeBasis {
    pub blocks: Vec<Vec<usize>>,
    pub top: usize,
    pub below: Vec<usize>,
}

fn comp_or_empty(s: &SymSeq, n: usize) -> Component {
    s.comps.get(n).cloned().unwrap_or_else(|| Component::empty(n))
}

/// `(M∘N)(n)` with its Σ_n-action; the unit law `𝕀∘N = N` holds on the nose.
pub fn compose_product(m: &SymSeq, nseq: &SymSeq, n: usize) -> Result<SymmetricComplex> {
    if m.field != nseq.field {
        return Err(Error::FieldMismatch(m.field.to_string(), nseq.field.to_string()));
    }
    let f = m.field;
    let elems: Vec<usize> = (0..n).collect();
    let mut basis: Vec<(i64, CompositeBasis)> = vec![];
    for blocks in set_partitions(&elems) {
        let k = blocks.len();
        let mk = comp_or_empty(m, k);
        if mk.dim() == 0 {
            continue;
        }
        let comps: Vec<Component> = blocks.iter().map(|b| comp_or_empty(nseq, b.len())).collect();
        if comps.iter().any(|c| c.dim() == 0) {
            continue;
        }
        let mut choice = vec![0usize; k];
        loop {
            for top in 0..mk.dim() {
                let deg = mk.degs[top] + (0..k).map(|i| comps[i].degs[choice[i]]).sum::<i64>();
                basis.push((deg, CompositeBasis { blocks: blocks.clone(), top, below: choice.clone() }));
            }
            let mut i = 0;
            while i < k {
                choice[i] += 1;
                if choice[i] < comps[i].dim() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    let mut by_deg: BTreeMap<i64, Vec<CompositeBasis>> = BTreeMap::new();
    for (d, b) in basis {
        by_deg.entry(d).or_default().push(b);
    }
    let (Some(&lo), Some(&hi)) = (by_deg.keys().next(), by_deg.keys().last()) else {
        return Ok(SymmetricComplex::trivial(n, Arc::new(WindowedComplex::zero(f))));
    };
    let degs = |b: &CompositeBasis| -> (i64, Vec<i64>) {
        let k = b.blocks.len();
        let top = m.comps[k].degs[b.top];
        let below = b.blocks.iter().zip(&b.below).map(|(bl, &x)| nseq.comps[bl.len()].degs[x]).collect();
        (top, below)
    };
    let label = |b: &CompositeBasis| {
        let k = b.blocks.len();
        let parts: Vec<String> = b
            .blocks
            .iter()
            .zip(&b.below)
            .map(|(bl, &x)| {
                let ls: Vec<String> = bl.iter().map(|e| (e + 1).to_string()).collect();
                format!("{}[{}]", nseq.comps[bl.len()].labels[x], ls.join(","))
            })
            .collect();
        format!("{}({})", m.comps[k].labels[b.top], parts.join(","))
    };
    let basis: Vec<Vec<CompositeBasis>> = (lo..=hi).map(|d| by_deg.get(&d).cloned().unwrap_or_default()).collect();
    let cx = WindowedComplex::from_basis(f, lo, basis.clone(), true, label, |_, b| {
        let k = b.blocks.len();
        let (top, below) = degs(b);
        let mut out = vec![];
        for (t2, c) in &m.comps[k].d[b.top] {
            out.push((CompositeBasis { top: *t2, ..b.clone() }, c.clone()));
        }
        let mut acc = top;
        for i in 0..k {
            let sign = f.sign(acc % 2 != 0);
            for (x, c) in &nseq.comps[b.blocks[i].len()].d[b.below[i]] {
                let mut nb = b.clone();
                nb.below[i] = *x;
                out.push((nb, c.mul(&sign)));
            }
            acc += below[i];
        }
        out
    })?;
    // Σ_n action by adjacent transpositions of labels
    let index: Vec<HashMap<&CompositeBasis, usize>> =
        basis.iter().map(|v| v.iter().enumerate().map(|(i, b)| (b, i)).collect()).collect();
    let mut swaps = vec![];
    for a in 0..n.saturating_sub(1) {
        let mut per_deg = BTreeMap::new();
        for (k, v) in basis.iter().enumerate() {
            let cols = v
                .iter()
                .map(|b| {
                    let (neg, nb) = act_composite(m, nseq, a, b, &degs);
                    vec![(index[k][&nb], f.sign(neg))]
                })
                .collect();
            per_deg.insert(lo + k as i64, SparseMatrix::from_cols(f, v.len(), cols));
        }
        swaps.push(per_deg);
    }
    SymmetricComplex::new(n, Arc::new(cx), swaps)
}

fn act_composite(
    m: &SymSeq,
    nseq: &SymSeq,
    a: usize,
    b: &CompositeBasis,
    degs: &dyn Fn(&CompositeBasis) -> (i64, Vec<i64>),
) -> (bool, CompositeBasis) {
    let k = b.blocks.len();
    let find = |e: usize| b.blocks.iter().position(|bl| bl.contains(&e)).unwrap();
    let (ia, ib) = (find(a), find(a + 1));
    if ia == ib {
        let bl = &b.blocks[ia];
        let j = bl.iter().position(|&e| e == a).unwrap();
        let (x, neg) = nseq.comps[bl.len()].swaps[j][b.below[ia]];
        let mut nb = b.clone();
        nb.below[ia] = x;
        return (neg, nb);
    }
    let swapped: Vec<Vec<usize>> = b
        .blocks
        .iter()
        .map(|bl| {
            bl.iter()
                .map(|&e| if e == a { a + 1 } else if e == a + 1 { a } else { e })
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| swapped[i][0]);
    let mut pos = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let (_, below_degs) = degs(b);
    let mut neg = koszul_odd(&below_degs, &pos);
    let (top, s) = m.comps[k].act(&pos, b.top);
    neg ^= s;
    let nb = CompositeBasis {
        blocks: order.iter().map(|&i| swapped[i].clone()).collect(),
        top,
        below: order.iter().map(|&i| b.below[i]).collect(),
    };
    (neg, nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology;
    use crate::operad::builtin_operad;

    fn point_seq(f: Field, arities: &[usize]) -> SymSeq {
        let mut comps = vec![Component::empty(0)];
        for n in 1..=*arities.iter().max().unwrap() {
            comps.push(if arities.contains(&n) {
                Component::trivial(n, vec![format!("e{n}")], vec![0])
            } else {
                Component::empty(n)
            });
        }
        SymSeq::new(f, comps)
    }

    #[test]
    fn unit_law() {
        let f = Field::Q;
        let a = builtin_operad("Assoc", 3, f).unwrap();
        let u = SymSeq::unit(f);
        for n in 1..=3 {
            let left = compose_product(&u, &a.seq, n).unwrap();
            let right = compose_product(&a.seq, &u, n).unwrap();
            assert_eq!(left.complex.dims(), right.complex.dims());
            assert_eq!(left.complex.total_dim(), a.dim(n));
        }
    }

    #[test]
    fn partition_oracle() {
        let f = Field::Q;
        let s = point_seq(f, &[1, 2]);
        assert_eq!(compose_product(&s, &s, 2).unwrap().complex.total_dim(), 2);
        // brute force: Σ over partitions into blocks of size <= 2, with M(k) nonzero for k <= 2
        let c = compose_product(&s, &s, 3).unwrap();
        assert_eq!(c.complex.total_dim(), 3);
        assert!(homology(&c.complex).table().values().sum::<usize>() == 3);
    }

    #[test]
    fn free_binary_trees() {
        let f = Field::Q;
        let s = point_seq(f, &[2]);
        assert_eq!(free_object(&s, 3).unwrap().dims(), BTreeMap::from([(0, 3)]));
        assert_eq!(free_object(&s, 2).unwrap().total_dim(), 1);
        assert!(free_object(&point_seq(f, &[1, 2]), 2).is_err());
    }
}
