use super::perm::{all_perms, block_perm, identity, transposition};
use super::symseq::{Component, SymSeq};
use crate::linalg::matrix::{axpy, collect, scale};
use crate::linalg::{Field, SVec, Scalar};
use crate::{Error, Result};
use std::collections::HashMap;

/// Reduced operad truncated above arity `trunc`, stored by partial compositions.
/// Arity 1 is spanned by the unit (basis index 0); compositions with it are implicit.
#[derive(Clone, Debug)]
pub struct Operad {
    pub name: String,
    pub trunc: usize,
    pub seq: SymSeq,
    /// `(m, i, n)` with `1 <= i <= m` maps `a * dim O(n) + b` to `a ∘_i b`.
    compose: HashMap<(usize, usize, usize), Vec<SVec>>,
}

impl PartialEq for Operad {
    fn eq(&self, o: &Self) -> bool {
        self.same_structure(o) && self.seq.comps.iter().zip(&o.seq.comps).all(|(a, b)| a.labels == b.labels)
    }
}

impl Operad {
    /// Assembles an operad; `compose` must cover every `(m, i, n)` with `m, n >= 2` and
    /// `m + n - 1 <= trunc` (missing entries mean zero).
    pub fn from_parts(
        name: impl Into<String>,
        trunc: usize,
        field: Field,
        mut comps: Vec<Component>,
        compose: HashMap<(usize, usize, usize), Vec<SVec>>,
    ) -> Result<Self> {
        if trunc == 0 {
            return Err(Error::Invalid("truncation must be at least 1".into()));
        }
        comps.resize_with(trunc + 1, || Component::empty(0));
        for (n, c) in comps.iter_mut().enumerate() {
            if c.swaps.len() != n.saturating_sub(1) {
                if c.dim() == 0 {
                    *c = Component::empty(n);
                } else {
                    return Err(Error::Invalid(format!("arity {n}: wrong number of transpositions")));
                }
            }
        }
        if comps[0].dim() != 0 {
            return Err(Error::Invalid("operad is not reduced: arity 0 is nonzero".into()));
        }
        if comps[1].dim() == 0 {
            comps[1] = Component::trivial(1, vec!["id".into()], vec![0]);
        }
        if comps[1].dim() != 1 || comps[1].degs[0] != 0 || !comps[1].d[0].is_empty() {
            return Err(Error::Invalid("operad is not reduced: arity 1 must be the unit".into()));
        }
        let mut table = HashMap::new();
        for m in 2..=trunc {
            for n in 2..=trunc {
                if m + n - 1 > trunc {
                    continue;
                }
                for i in 1..=m {
                    let size = comps[m].dim() * comps[n].dim();
                    let mut v = compose.get(&(m, i, n)).cloned().unwrap_or_default();
                    if v.is_empty() {
                        v = vec![vec![]; size];
                    }
                    if v.len() != size {
                        return Err(Error::Invalid(format!("composition table ({m}, {i}, {n}) has wrong size")));
                    }
                    table.insert((m, i, n), v);
                }
            }
        }
        Ok(Operad { name: name.into(), trunc, seq: SymSeq::new(field, comps), compose: table })
    }

    pub fn field(&self) -> Field {
        self.seq.field
    }

    pub fn comp(&self, n: usize) -> &Component {
        static EMPTY: std::sync::OnceLock<Component> = std::sync::OnceLock::new();
        self.seq.comps.get(n).unwrap_or_else(|| EMPTY.get_or_init(|| Component::empty(0)))
    }

    pub fn dim(&self, n: usize) -> usize {
        self.seq.dim(n)
    }

    pub fn deg(&self, n: usize, b: usize) -> i64 {
        self.comp(n).degs[b]
    }

    /// `a ∘_i b` for basis elements `a ∈ O(m)`, `b ∈ O(n)`; `i` is 1-based.
    pub fn compose_basis(&self, m: usize, i: usize, a: usize, n: usize, b: usize) -> SVec {
        let f = self.field();
        if m == 1 {
            return vec![(b, f.one())];
        }
        if n == 1 {
            return vec![(a, f.one())];
        }
        match self.compose.get(&(m, i, n)) {
            Some(t) => t[a * self.dim(n) + b].clone(),
            None => vec![],
        }
    }

    pub fn compose_vec(&self, m: usize, i: usize, x: &SVec, n: usize, y: &SVec) -> SVec {
        let mut out = vec![];
        for (a, c) in x {
            for (b, e) in y {
                axpy(&mut out, &c.mul(e), &self.compose_basis(m, i, *a, n, *b));
            }
        }
        out
    }

    /// `γ(p; q_1, ..., q_k) = ((p ∘_1 q_1) ∘_{1+r_1} q_2) ...` on basis elements.
    pub fn gamma(&self, k: usize, p: usize, qs: &[(usize, usize)]) -> (usize, SVec) {
        let f = self.field();
        let mut cur = vec![(p, f.one())];
        let mut ar = k;
        let mut pos = 1;
        for &(r, q) in qs {
            cur = self.compose_vec(ar, pos, &cur, r, &vec![(q, f.one())]);
            ar = ar + r - 1;
            pos += r;
            if cur.is_empty() {
                return (ar, vec![]);
            }
        }
        (ar, cur)
    }

    /// Action of a permutation of inputs (input `k` becomes input `perm[k]`).
    pub fn act(&self, n: usize, perm: &[usize], b: usize) -> (usize, bool) {
        if n <= 1 {
            return (b, false);
        }
        self.comp(n).act(perm, b)
    }

    pub fn act_vec(&self, n: usize, perm: &[usize], v: &SVec) -> SVec {
        if n <= 1 {
            return v.clone();
        }
        self.comp(n).act_vec(perm, v)
    }

    pub fn d_vec(&self, n: usize, v: &SVec) -> SVec {
        self.comp(n).d_vec(v)
    }

    pub fn is_zero_above(&self, n: usize) -> bool {
        (n + 1..=self.trunc).all(|k| self.dim(k) == 0)
    }

    /// Equality up to renaming basis labels.
    pub fn same_structure(&self, o: &Operad) -> bool {
        if self.trunc != o.trunc || self.field() != o.field() {
            return false;
        }
        for (a, b) in self.seq.comps.iter().zip(&o.seq.comps) {
            if a.degs != b.degs || a.d != b.d || a.swaps != b.swaps {
                return false;
            }
        }
        self.compose == o.compose
    }

    /// Copy with one composition entry replaced; used to exercise the validator.
    pub fn with_entry(&self, key: (usize, usize, usize), idx: usize, v: SVec) -> Operad {
        let mut o = self.clone();
        if let Some(t) = o.compose.get_mut(&key) {
            t[idx] = v;
        }
        o
    }

    pub fn with_d(&self, n: usize, b: usize, v: SVec) -> Operad {
        let mut o = self.clone();
        o.seq.comps[n].d[b] = v;
        o
    }

    /// All axiom failures within the truncation.
    pub fn validate(&self) -> Vec<String> {
        let f = self.field();
        let mut out = self.seq.check();
        let t = self.trunc;
        let lab = |n: usize, b: usize| self.comp(n).labels[b].clone();
        let e = |b: usize| vec![(b, f.one())];
        for m in 2..=t {
            for n in 2..=t {
                if m + n - 1 > t {
                    continue;
                }
                for i in 1..=m {
                    for a in 0..self.dim(m) {
                        for b in 0..self.dim(n) {
                            let c = self.compose_basis(m, i, a, n, b);
                            let want = self.deg(m, a) + self.deg(n, b);
                            if c.iter().any(|(r, _)| self.deg(m + n - 1, *r) != want) {
                                out.push(format!("{} o_{i} {} has a term of the wrong degree", lab(m, a), lab(n, b)));
                            }
                            // derivation
                            let lhs = self.d_vec(m + n - 1, &c);
                            let mut rhs = self.compose_vec(m, i, &self.d_vec(m, &e(a)), n, &e(b));
                            let s = f.sign(self.deg(m, a) % 2 != 0);
                            axpy(&mut rhs, &s, &self.compose_vec(m, i, &e(a), n, &self.d_vec(n, &e(b))));
                            if lhs != rhs {
                                out.push(format!(
                                    "derivation failure: d({} o_{i} {}) ≠ d{} o_{i} {} ± {} o_{i} d{}",
                                    lab(m, a),
                                    lab(n, b),
                                    lab(m, a),
                                    lab(n, b),
                                    lab(m, a),
                                    lab(n, b)
                                ));
                            }
                        }
                    }
                }
            }
        }
        // associativity
        for m in 2..=t {
            for n in 2..=t {
                for l in 2..=t {
                    if m + n + l - 2 > t {
                        continue;
                    }
                    for a in 0..self.dim(m) {
                        for b in 0..self.dim(n) {
                            for c in 0..self.dim(l) {
                                self.check_assoc(m, n, l, a, b, c, &mut out);
                            }
                        }
                    }
                }
            }
        }
        // equivariance
        for m in 2..=t {
            for n in 2..=t {
                if m + n - 1 > t {
                    continue;
                }
                for i in 1..=m {
                    for a in 0..self.dim(m) {
                        for b in 0..self.dim(n) {
                            self.check_equivariance(m, i, n, a, b, &mut out);
                        }
                    }
                }
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn check_assoc(&self, m: usize, n: usize, l: usize, a: usize, b: usize, c: usize, out: &mut Vec<String>) {
        let f = self.field();
        let e = |x: usize| vec![(x, f.one())];
        let lab = |k: usize, x: usize| self.comp(k).labels[x].clone();
        let name = format!("({}, {}, {})", lab(m, a), lab(n, b), lab(l, c));
        for i in 1..=m {
            let pq = self.compose_basis(m, i, a, n, b);
            for j in 1..=n {
                let lhs = self.compose_vec(m + n - 1, i + j - 1, &pq, l, &e(c));
                let qr = self.compose_basis(n, j, b, l, c);
                let rhs = self.compose_vec(m, i, &e(a), n + l - 1, &qr);
                if lhs != rhs {
                    out.push(format!("associativity failure (sequential) at {name}, i={i}, j={j}"));
                }
            }
            for j in i + 1..=m {
                let lhs = self.compose_vec(m + n - 1, j + n - 1, &pq, l, &e(c));
                let pr = self.compose_basis(m, j, a, l, c);
                let mut rhs = self.compose_vec(m + l - 1, i, &pr, n, &e(b));
                if self.deg(n, b) % 2 != 0 && self.deg(l, c) % 2 != 0 {
                    rhs = scale(&rhs, &f.int(-1));
                }
                if lhs != rhs {
                    out.push(format!("associativity failure (parallel) at {name}, i={i}, j={j}"));
                }
            }
        }
    }

    fn check_equivariance(&self, m: usize, i: usize, n: usize, a: usize, b: usize, out: &mut Vec<String>) {
        let f = self.field();
        let lab = |k: usize, x: usize| self.comp(k).labels[x].clone();
        let base = self.compose_basis(m, i, a, n, b);
        let r = m + n - 1;
        // σ acting on the outer operation
        for s in 0..m - 1 {
            let sigma = transposition(m, s);
            let (sa, neg) = self.act(m, &sigma, a);
            let mut lhs = self.compose_basis(m, sigma[i - 1] + 1, sa, n, b);
            if neg {
                lhs = scale(&lhs, &f.int(-1));
            }
            let mut sizes = vec![1; m];
            sizes[i - 1] = n;
            let big = block_perm(&sizes, &sigma);
            let rhs = self.act_vec(r, &big, &base);
            if lhs != rhs {
                out.push(format!(
                    "equivariance failure: σ{} acting on {} in {} o_{i} {}",
                    s + 1,
                    lab(m, a),
                    lab(m, a),
                    lab(n, b)
                ));
            }
        }
        // τ acting on the inner operation
        for s in 0..n - 1 {
            let tau = transposition(n, s);
            let (tb, neg) = self.act(n, &tau, b);
            let mut lhs = self.compose_basis(m, i, a, n, tb);
            if neg {
                lhs = scale(&lhs, &f.int(-1));
            }
            let mut big = identity(r);
            big.swap(i - 1 + s, i + s);
            let rhs = self.act_vec(r, &big, &base);
            if lhs != rhs {
                out.push(format!(
                    "equivariance failure: σ{} acting on {} in {} o_{i} {}",
                    s + 1,
                    lab(n, b),
                    lab(m, a),
                    lab(n, b)
                ));
            }
        }
    }
}

/// Built-in operads.
pub fn builtin_operad(name: &str, trunc: usize, field: Field) -> Result<Operad> {
    if trunc == 0 {
        return Err(Error::Invalid("truncation must be at least 1".into()));
    }
    let op = match name {
        "Com" => com(trunc, field)?,
        "Assoc" => assoc(trunc, field)?,
        "Tau1" => Operad::from_parts("Tau1", trunc, field, vec![], HashMap::new())?,
        _ => return Err(Error::Invalid(format!("unknown operad `{name}`"))),
    };
    let failures = op.validate();
    if !failures.is_empty() {
        return Err(Error::Invalid(failures.join("; ")));
    }
    Ok(op)
}

fn com(trunc: usize, field: Field) -> Result<Operad> {
    let mut comps = vec![Component::empty(0), Component::empty(1)];
    for n in 2..=trunc {
        comps.push(Component::trivial(n, vec![format!("mu{n}")], vec![0]));
    }
    let mut table = HashMap::new();
    for m in 2..=trunc {
        for n in 2..=trunc {
            if m + n - 1 <= trunc {
                for i in 1..=m {
                    table.insert((m, i, n), vec![vec![(0, field.one())]]);
                }
            }
        }
    }
    Operad::from_parts("Com", trunc, field, comps, table)
}

fn word_label(w: &[usize]) -> String {
    let s: String = w.iter().map(|k| char::from_digit((k + 1) as u32, 36).unwrap()).collect();
    format!("w{s}")
}

fn assoc(trunc: usize, field: Field) -> Result<Operad> {
    let mut comps = vec![Component::empty(0), Component::empty(1)];
    let mut words: Vec<Vec<Vec<usize>>> = vec![vec![], vec![]];
    for n in 2..=trunc {
        let ws = all_perms(n);
        let index: HashMap<Vec<usize>, usize> = ws.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let swaps = (0..n - 1)
            .map(|s| {
                let t = transposition(n, s);
                ws.iter().map(|w| (index[&w.iter().map(|&k| t[k]).collect::<Vec<_>>()], false)).collect()
            })
            .collect();
        comps.push(Component {
            labels: ws.iter().map(|w| word_label(w)).collect(),
            degs: vec![0; ws.len()],
            d: vec![vec![]; ws.len()],
            swaps,
        });
        words.push(ws);
    }
    let mut table = HashMap::new();
    for m in 2..=trunc {
        for n in 2..=trunc {
            let r = m + n - 1;
            if r > trunc {
                continue;
            }
            let index: HashMap<&Vec<usize>, usize> = words[r].iter().enumerate().map(|(i, w)| (w, i)).collect();
            for i in 1..=m {
                let mut entries = vec![];
                for w in &words[m] {
                    for u in &words[n] {
                        let mut out = vec![];
                        for &k in w {
                            if k + 1 == i {
                                out.extend(u.iter().map(|&x| x + i - 1));
                            } else if k + 1 > i {
                                out.push(k + n - 1);
                            } else {
                                out.push(k);
                            }
                        }
                        entries.push(vec![(index[&out], field.one())]);
                    }
                }
                table.insert((m, i, n), entries);
            }
        }
    }
    Operad::from_parts("Assoc", trunc, field, comps, table)
}

/// Collects `(coef, basis)` pairs into a vector, for table construction.
pub fn combo(terms: Vec<(usize, Scalar)>) -> SVec {
    collect(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_dimensions() {
        let c = builtin_operad("Com", 3, Field::Q).unwrap();
        let a = builtin_operad("Assoc", 3, Field::Q).unwrap();
        assert_eq!((c.dim(3), a.dim(3)), (1, 6));
        assert!(builtin_operad("Lie", 3, Field::Q).is_err());
        let t = builtin_operad("Tau1", 3, Field::Q).unwrap();
        assert_eq!(t.compose_basis(1, 1, 0, 1, 0), vec![(0, Field::Q.one())]);
        assert_eq!(t.dim(2), 0);
    }

    #[test]
    fn truncated_composition_vanishes() {
        let c = builtin_operad("Com", 2, Field::Q).unwrap();
        assert!(c.compose_basis(2, 1, 0, 2, 0).is_empty());
    }

    #[test]
    fn assoc_over_f2_valid() {
        let a = builtin_operad("Assoc", 4, Field::fp(2).unwrap()).unwrap();
        assert_eq!(a.dim(4), 24);
    }

    #[test]
    fn validator_locates_failures() {
        let f = Field::Q;
        let c = builtin_operad("Com", 4, f).unwrap();
        let bad = c.with_entry((2, 1, 2), 0, vec![(0, f.int(-1))]);
        let rep = bad.validate();
        assert!(rep.iter().any(|m| m.contains("associativity")), "{rep:?}");
    }
}
