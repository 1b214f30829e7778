//! Rooted trees with decorated vertices, their canonical non-planar forms, and enumeration.

use super::core::Operad;
use super::perm::{all_perms, koszul_odd};
use crate::linalg::Field;
use std::collections::{BTreeMap, HashMap};

/// A planar representative. `Leaf` carries a label or a basis index of the coefficients;
/// `Node` carries the index of its decoration in the arity-`children.len()` basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf(u32),
    Node(u32, Vec<Tree>),
}

/// Vertex decorations: a graded basis per arity with a signed monomial Σ-action.
pub trait Deco {
    fn field(&self) -> Field;
    fn max_arity(&self) -> usize;
    fn dim(&self, arity: usize) -> usize;
    /// Degree including any suspension carried by the vertex.
    fn deg(&self, arity: usize, d: u32) -> i64;
    fn act(&self, arity: usize, perm: &[usize], d: u32) -> (u32, bool);
}

/// Operad decorations in arities `>= 2`, suspended `shift` times.
pub struct OpDeco<'a> {
    pub op: &'a Operad,
    pub shift: i64,
}

impl Deco for OpDeco<'_> {
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
        self.op.deg(arity, d as usize) + self.shift
    }
    fn act(&self, arity: usize, perm: &[usize], d: u32) -> (u32, bool) {
        let (b, s) = self.op.act(arity, perm, d as usize);
        (b as u32, s)
    }
}

impl Tree {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf(_))
    }

    pub fn leaves(&self) -> Vec<u32> {
        let mut out = vec![];
        fn go(t: &Tree, out: &mut Vec<u32>) {
            match t {
                Tree::Leaf(l) => out.push(*l),
                Tree::Node(_, ch) => ch.iter().for_each(|c| go(c, out)),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn vertices(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(_, ch) => 1 + ch.iter().map(|c| c.vertices()).sum::<usize>(),
        }
    }

    pub fn degree(&self, deco: &dyn Deco, leaf_deg: &dyn Fn(u32) -> i64) -> i64 {
        match self {
            Tree::Leaf(l) => leaf_deg(*l),
            Tree::Node(d, ch) => deco.deg(ch.len(), *d) + ch.iter().map(|c| c.degree(deco, leaf_deg)).sum::<i64>(),
        }
    }

    /// Degrees of the tensor factors in pre-order (vertices and leaves).
    pub fn factor_degrees(&self, deco: &dyn Deco, leaf_deg: &dyn Fn(u32) -> i64) -> Vec<i64> {
        let mut out = vec![];
        fn go(t: &Tree, deco: &dyn Deco, ld: &dyn Fn(u32) -> i64, out: &mut Vec<i64>) {
            match t {
                Tree::Leaf(l) => out.push(ld(*l)),
                Tree::Node(d, ch) => {
                    out.push(deco.deg(ch.len(), *d));
                    ch.iter().for_each(|c| go(c, deco, ld, out));
                }
            }
        }
        go(self, deco, leaf_deg, &mut out);
        out
    }

    pub fn map_leaves(&self, f: &dyn Fn(u32) -> u32) -> Tree {
        match self {
            Tree::Leaf(l) => Tree::Leaf(f(*l)),
            Tree::Node(d, ch) => Tree::Node(*d, ch.iter().map(|c| c.map_leaves(f)).collect()),
        }
    }

    pub fn min_leaf(&self) -> u32 {
        self.leaves().into_iter().min().unwrap_or(u32::MAX)
    }

    /// Display with labels from closures.
    pub fn show(&self, deco: &dyn Fn(usize, u32) -> String, leaf: &dyn Fn(u32) -> String) -> String {
        match self {
            Tree::Leaf(l) => leaf(*l),
            Tree::Node(d, ch) => {
                let inner: Vec<String> = ch.iter().map(|c| c.show(deco, leaf)).collect();
                format!("{}({})", deco(ch.len(), *d), inner.join(","))
            }
        }
    }
}

/// Canonical form: children sorted, decorations adjusted by the induced permutation and the
/// Koszul sign of moving subtrees. Returns `None` when the element vanishes in the
/// coinvariants, else `(negate, tree)`.
pub fn canonicalize(t: &Tree, deco: &dyn Deco, leaf_deg: &dyn Fn(u32) -> i64) -> Option<(bool, Tree)> {
    match t {
        Tree::Leaf(_) => Some((false, t.clone())),
        Tree::Node(d, ch) => {
            let mut neg = false;
            let mut kids = Vec::with_capacity(ch.len());
            for c in ch {
                let (s, c2) = canonicalize(c, deco, leaf_deg)?;
                neg ^= s;
                kids.push(c2);
            }
            let degs: Vec<i64> = kids.iter().map(|c| c.degree(deco, leaf_deg)).collect();
            let k = kids.len();
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| kids[a].cmp(&kids[b]));
            let mut pos = vec![0; k];
            for (new, &old) in order.iter().enumerate() {
                pos[old] = new;
            }
            neg ^= koszul_odd(&degs, &pos);
            let (d1, s) = deco.act(k, &pos, *d);
            neg ^= s;
            let sorted: Vec<Tree> = order.iter().map(|&o| kids[o].clone()).collect();
            let sdegs: Vec<i64> = order.iter().map(|&o| degs[o]).collect();
            let (d2, s2) = resolve_ties(&sorted, &sdegs, k, d1, deco)?;
            Some((neg ^ s2, Tree::Node(d2, sorted)))
        }
    }
}

/// Orbit-minimal decoration under permutations of equal children.
fn resolve_ties(kids: &[Tree], degs: &[i64], k: usize, d: u32, deco: &dyn Deco) -> Option<(u32, bool)> {
    let mut groups: Vec<(usize, usize)> = vec![];
    let mut i = 0;
    while i < k {
        let mut j = i + 1;
        while j < k && kids[j] == kids[i] {
            j += 1;
        }
        if j - i > 1 {
            groups.push((i, j - i));
        }
        i = j;
    }
    if groups.is_empty() {
        return Some((d, false));
    }
    let char2 = deco.field().characteristic() == 2;
    let mut stab: Vec<Vec<usize>> = vec![(0..k).collect()];
    for &(start, len) in &groups {
        let mut next = vec![];
        for base in &stab {
            for p in all_perms(len) {
                let mut h = base.clone();
                for e in 0..len {
                    h[start + e] = start + p[e];
                }
                next.push(h);
            }
        }
        stab = next;
    }
    let mut seen: BTreeMap<u32, bool> = BTreeMap::new();
    for h in &stab {
        let eps = koszul_odd(degs, h);
        let (dh, s) = deco.act(k, h, d);
        let sign = eps ^ s;
        if let Some(&prev) = seen.get(&dh) {
            if prev != sign && !char2 {
                return None;
            }
        } else {
            seen.insert(dh, sign);
        }
    }
    let (&dmin, &sign) = seen.iter().next().unwrap();
    Some((dmin, sign))
}

/// Canonical trees with leaves labelled bijectively by `labels`, vertices of arity `>= 2`.
pub fn labeled_trees(deco: &dyn Deco, labels: &[u32]) -> Vec<Tree> {
    let mut memo = HashMap::new();
    labeled_rec(deco, labels, &mut memo)
}

fn labeled_rec(deco: &dyn Deco, labels: &[u32], memo: &mut HashMap<Vec<u32>, Vec<Tree>>) -> Vec<Tree> {
    if let Some(v) = memo.get(labels) {
        return v.clone();
    }
    if labels.len() == 1 {
        return vec![Tree::Leaf(labels[0])];
    }
    let idx: Vec<usize> = (0..labels.len()).collect();
    let mut out = vec![];
    for part in super::perm::set_partitions(&idx) {
        let k = part.len();
        if k < 2 || k > deco.max_arity() || deco.dim(k) == 0 {
            continue;
        }
        let subs: Vec<Vec<Tree>> = part
            .iter()
            .map(|b| {
                let ls: Vec<u32> = b.iter().map(|&i| labels[i]).collect();
                labeled_rec(deco, &ls, memo)
            })
            .collect();
        if subs.iter().any(|s| s.is_empty()) {
            continue;
        }
        let mut choice = vec![0usize; k];
        loop {
            let mut kids: Vec<Tree> = (0..k).map(|b| subs[b][choice[b]].clone()).collect();
            kids.sort();
            for d in 0..deco.dim(k) {
                out.push(Tree::Node(d as u32, kids.clone()));
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
    out.sort();
    memo.insert(labels.to_vec(), out.clone());
    out
}

/// Canonical trees whose leaves carry basis elements of a graded space (`leaf_degs[v]`),
/// grouped by total degree `0..=max_deg`. Every vertex must have positive degree.
pub fn decorated_trees(deco: &dyn Deco, leaf_degs: &[i64], max_deg: i64) -> Vec<Vec<Tree>> {
    let ld = |v: u32| leaf_degs[v as usize];
    let top = max_deg.max(-1);
    let mut by_deg: Vec<Vec<Tree>> = vec![vec![]; (top + 1) as usize];
    for (v, &d) in leaf_degs.iter().enumerate() {
        if (0..=top).contains(&d) {
            by_deg[d as usize].push(Tree::Leaf(v as u32));
        }
    }
    for e in 0..=top {
        let mut found = vec![];
        // all trees of degree < e, in Ord order, with their degrees
        let mut pool: Vec<(Tree, i64)> =
            (0..e).flat_map(|x| by_deg[x as usize].iter().map(move |t| (t.clone(), x))).collect();
        pool.extend(by_deg[e as usize].iter().filter(|t| t.is_leaf()).map(|t| (t.clone(), e)));
        pool.sort();
        for k in 2..=deco.max_arity() {
            for d in 0..deco.dim(k) {
                let dd = deco.deg(k, d as u32);
                assert!(dd > 0, "vertex decorations must have positive degree");
                let rest = e - dd;
                if rest < 0 {
                    continue;
                }
                let mut cur = vec![];
                multisets(&pool, 0, k, rest, &mut cur, &mut |kids: &[usize]| {
                    let ch: Vec<Tree> = kids.iter().map(|&i| pool[i].0.clone()).collect();
                    let t = Tree::Node(d as u32, ch);
                    if let Some((_, c)) = canonicalize(&t, deco, &ld) {
                        if c == t {
                            found.push(t);
                        }
                    }
                });
            }
        }
        found.sort();
        by_deg[e as usize].extend(found);
        by_deg[e as usize].sort();
    }
    by_deg
}

fn multisets(
    pool: &[(Tree, i64)],
    from: usize,
    count: usize,
    deg: i64,
    cur: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if count == 0 {
        if deg == 0 {
            emit(cur);
        }
        return;
    }
    for i in from..pool.len() {
        let d = pool[i].1;
        if d > deg {
            continue;
        }
        cur.push(i);
        multisets(pool, i, count - 1, deg - d, cur, emit);
        cur.pop();
    }
}

/// Relabels the leaves of a labelled tree by `perm` (label `l` becomes `perm[l]`, 0-based labels)
/// and canonicalizes.
pub fn act_on_labels(t: &Tree, perm: &[usize], deco: &dyn Deco) -> Option<(bool, Tree)> {
    let r = t.map_leaves(&|l| perm[l as usize] as u32);
    canonicalize(&r, deco, &|_| 0)
}

/// Basis of labelled trees of arity `n` with an index, used as decorations of another level.
#[derive(Clone, Debug)]
pub struct TreeBasis {
    pub field: Field,
    pub max_arity: usize,
    pub trees: Vec<Vec<Tree>>,
    pub degs: Vec<Vec<i64>>,
    pub index: Vec<HashMap<Tree, u32>>,
    pub shift: i64,
    /// `acts[n][i][t] = (t', neg)` for the transposition of labels `i, i+1`.
    pub acts: Vec<Vec<Vec<(u32, bool)>>>,
}

impl TreeBasis {
    /// Trees of arities `2..=max_arity` over `deco`, each decorating vertex suspended by `shift`.
    pub fn new(deco: &dyn Deco, max_arity: usize, shift: i64) -> Self {
        let mut trees = vec![vec![], vec![]];
        let mut degs = vec![vec![], vec![]];
        let mut index = vec![HashMap::new(), HashMap::new()];
        let mut acts = vec![vec![], vec![]];
        for n in 2..=max_arity {
            let labels: Vec<u32> = (0..n as u32).collect();
            let mut ts = labeled_trees(deco, &labels);
            ts.sort_by_key(|t| (t.degree(deco, &|_| 0), t.clone()));
            let ds: Vec<i64> = ts.iter().map(|t| t.degree(deco, &|_| 0) + shift).collect();
            let idx: HashMap<Tree, u32> = ts.iter().cloned().enumerate().map(|(i, t)| (t, i as u32)).collect();
            let mut a = vec![];
            for i in 0..n - 1 {
                let p = super::perm::transposition(n, i);
                a.push(
                    ts.iter()
                        .map(|t| {
                            let (s, c) = act_on_labels(t, &p, deco).expect("labelled trees never vanish");
                            (idx[&c], s)
                        })
                        .collect(),
                );
            }
            trees.push(ts);
            degs.push(ds);
            index.push(idx);
            acts.push(a);
        }
        TreeBasis { field: deco.field(), max_arity, trees, degs, index, shift, acts }
    }
}

impl Deco for TreeBasis {
    fn field(&self) -> Field {
        self.field
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        self.trees.get(arity).map_or(0, |v| v.len())
    }
    fn deg(&self, arity: usize, d: u32) -> i64 {
        self.degs[arity][d as usize]
    }
    fn act(&self, arity: usize, perm: &[usize], d: u32) -> (u32, bool) {
        let mut cur = (d, false);
        for i in super::perm::adjacent_word(perm) {
            let (nd, s) = self.acts[arity][i][cur.0 as usize];
            cur = (nd, cur.1 ^ s);
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::builtin_operad;

    #[test]
    fn binary_trees_on_three_leaves() {
        let op = builtin_operad("Com", 2, Field::Q).unwrap();
        let deco = OpDeco { op: &op, shift: 0 };
        assert_eq!(labeled_trees(&deco, &[0, 1, 2]).len(), 3);
        let op3 = builtin_operad("Com", 3, Field::Q).unwrap();
        let deco3 = OpDeco { op: &op3, shift: 1 };
        assert_eq!(labeled_trees(&deco3, &[0, 1, 2]).len(), 4);
        let a = builtin_operad("Assoc", 3, Field::Q).unwrap();
        assert_eq!(labeled_trees(&OpDeco { op: &a, shift: 1 }, &[0, 1, 2]).len(), 6 + 3 * 4);
    }

    #[test]
    fn canonical_form_is_idempotent_and_signed() {
        let op = builtin_operad("Com", 3, Field::Q).unwrap();
        let deco = OpDeco { op: &op, shift: 1 };
        // s mu(s mu(2,1), 0): moving the degree-1 subtree past a leaf costs nothing
        let t = Tree::Node(0, vec![Tree::Node(0, vec![Tree::Leaf(2), Tree::Leaf(1)]), Tree::Leaf(0)]);
        let (neg, c) = canonicalize(&t, &deco, &|_| 0).unwrap();
        assert!(!neg);
        assert_eq!(c, Tree::Node(0, vec![Tree::Leaf(0), Tree::Node(0, vec![Tree::Leaf(1), Tree::Leaf(2)])]));
        assert_eq!(canonicalize(&c, &deco, &|_| 0).unwrap(), (false, c.clone()));
        // two odd subtrees swapped
        let a = Tree::Node(0, vec![Tree::Leaf(2), Tree::Leaf(3)]);
        let b = Tree::Node(0, vec![Tree::Leaf(0), Tree::Leaf(1)]);
        let t2 = Tree::Node(0, vec![a, b]);
        let op4 = builtin_operad("Com", 4, Field::Q).unwrap();
        let (neg, _) = canonicalize(&t2, &OpDeco { op: &op4, shift: 1 }, &|_| 0).unwrap();
        assert!(neg);
    }

    #[test]
    fn odd_repeated_leaves_vanish() {
        let op = builtin_operad("Com", 3, Field::Q).unwrap();
        let deco = OpDeco { op: &op, shift: 0 };
        let t = Tree::Node(0, vec![Tree::Leaf(0), Tree::Leaf(0)]);
        assert!(canonicalize(&t, &deco, &|_| 1).is_none());
        assert!(canonicalize(&t, &deco, &|_| 0).is_some());
        let f2 = builtin_operad("Com", 3, Field::fp(2).unwrap()).unwrap();
        assert!(canonicalize(&t, &OpDeco { op: &f2, shift: 0 }, &|_| 1).is_some());
    }

    #[test]
    fn bar_trees_by_degree() {
        // B(Com<=3, x in degree 0): degree 1 has mu2(x,x) and mu3(x,x,x)
        let op = builtin_operad("Com", 3, Field::Q).unwrap();
        let deco = OpDeco { op: &op, shift: 1 };
        let t = decorated_trees(&deco, &[0], 2);
        assert_eq!(t[0].len(), 1);
        assert_eq!(t[1].len(), 2);
        // degree 2: binary-in-binary only (other nestings exceed arity) plus mixed 2/3 nestings
        assert!(t[2].iter().all(|x| x.vertices() == 2));
    }
}
