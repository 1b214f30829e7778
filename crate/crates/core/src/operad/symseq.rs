use super::perm::adjacent_word;
use crate::chain::WindowedComplex;
use crate::linalg::matrix::{axpy, collect};
use crate::linalg::{Field, SVec, SparseMatrix};
use crate::Result;

/// One arity component: a finite graded basis, a differential and monomial actions of the
/// adjacent transpositions. The basis is kept sorted by degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub labels: Vec<String>,
    pub degs: Vec<i64>,
    pub d: Vec<SVec>,
    /// `swaps[i][b] = (b', negate)` is the action of the transposition of inputs `i, i+1`.
    pub swaps: Vec<Vec<(usize, bool)>>,
}

impl Component {
    pub fn empty(arity: usize) -> Self {
        Component { labels: vec![], degs: vec![], d: vec![], swaps: vec![vec![]; arity.saturating_sub(1)] }
    }

    pub fn trivial(arity: usize, labels: Vec<String>, degs: Vec<i64>) -> Self {
        let n = labels.len();
        Component {
            labels,
            degs,
            d: vec![vec![]; n],
            swaps: vec![(0..n).map(|b| (b, false)).collect(); arity.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn arity(&self) -> usize {
        self.swaps.len() + 1
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Action of a permutation on a basis element: `(b', negate)`.
    pub fn act(&self, perm: &[usize], b: usize) -> (usize, bool) {
        let mut cur = (b, false);
        for i in adjacent_word(perm) {
            let (nb, s) = self.swaps[i][cur.0];
            cur = (nb, cur.1 ^ s);
        }
        cur
    }

    pub fn act_vec(&self, perm: &[usize], v: &SVec) -> SVec {
        collect(
            v.iter()
                .map(|(b, x)| {
                    let (nb, s) = self.act(perm, *b);
                    (nb, if s { x.neg() } else { x.clone() })
                })
                .collect(),
        )
    }

    pub fn d_vec(&self, v: &SVec) -> SVec {
        let mut out = vec![];
        for (b, x) in v {
            axpy(&mut out, x, &self.d[*b]);
        }
        out
    }

    /// Position of `b` inside its degree.
    pub fn local(&self, b: usize) -> usize {
        b - self.degs.iter().take_while(|&&d| d < self.degs[b]).count()
    }

    pub fn global(&self, deg: i64, i: usize) -> usize {
        self.degs.iter().take_while(|&&d| d < deg).count() + i
    }

    /// The component as a bounded complex.
    pub fn complex(&self, f: Field) -> Result<WindowedComplex> {
        if self.dim() == 0 {
            return Ok(WindowedComplex::zero(f));
        }
        let lo = self.degs[0];
        let hi = *self.degs.last().unwrap();
        let mut labels = vec![];
        let mut ds = vec![];
        for deg in lo..=hi {
            let ids: Vec<usize> = (0..self.dim()).filter(|&b| self.degs[b] == deg).collect();
            labels.push(ids.iter().map(|&b| self.labels[b].clone()).collect());
            let rows = if deg == lo { 0 } else { self.degs.iter().filter(|&&d| d == deg - 1).count() };
            let cols =
                ids.iter().map(|&b| self.d[b].iter().map(|(r, x)| (self.local(*r), x.clone())).collect()).collect();
            ds.push(SparseMatrix::from_cols(f, rows, cols));
        }
        WindowedComplex::new(f, lo, labels, ds, true)
    }

    /// Matrix of the transposition `i` on the degree-`deg` part.
    pub fn swap_matrix(&self, f: Field, i: usize, deg: i64) -> SparseMatrix {
        let ids: Vec<usize> = (0..self.dim()).filter(|&b| self.degs[b] == deg).collect();
        let cols = ids
            .iter()
            .map(|&b| {
                let (nb, s) = self.swaps[i][b];
                vec![(self.local(nb), f.sign(s))]
            })
            .collect();
        SparseMatrix::from_cols(f, ids.len(), cols)
    }

    /// Coxeter relations and compatibility of the action with `d`; failures as messages.
    pub fn check(&self, f: Field, arity: usize) -> Vec<String> {
        let mut out = vec![];
        let n = self.dim();
        let ap = |i: usize, v: &SVec| -> SVec {
            collect(v.iter().map(|(b, x)| {
                let (nb, s) = self.swaps[i][*b];
                (nb, if s { x.neg() } else { x.clone() })
            }).collect())
        };
        let unit = |b: usize| vec![(b, f.one())];
        for b in 0..n {
            for (r, _) in &self.d[b] {
                if self.degs[*r] != self.degs[b] - 1 {
                    out.push(format!("arity {arity}: d({}) has a term of the wrong degree", self.labels[b]));
                }
            }
            let dd = self.d_vec(&self.d[b]);
            if !dd.is_empty() {
                out.push(format!("arity {arity}: d∘d({}) ≠ 0", self.labels[b]));
            }
        }
        for i in 0..self.swaps.len() {
            for b in 0..n {
                let (nb, _) = self.swaps[i][b];
                if self.degs[nb] != self.degs[b] {
                    out.push(format!("arity {arity}: swap {} changes the degree of {}", i + 1, self.labels[b]));
                }
                if ap(i, &ap(i, &unit(b))) != unit(b) {
                    out.push(format!("Coxeter violation in arity {arity}: σ{}² ≠ id on {}", i + 1, self.labels[b]));
                }
                if i + 1 < self.swaps.len() {
                    let l = ap(i, &ap(i + 1, &ap(i, &unit(b))));
                    let r = ap(i + 1, &ap(i, &ap(i + 1, &unit(b))));
                    if l != r {
                        out.push(format!(
                            "Coxeter violation in arity {arity}: braid relation σ{}σ{}σ{} on {}",
                            i + 1,
                            i + 2,
                            i + 1,
                            self.labels[b]
                        ));
                    }
                }
                for j in i + 2..self.swaps.len() {
                    if ap(i, &ap(j, &unit(b))) != ap(j, &ap(i, &unit(b))) {
                        out.push(format!(
                            "Coxeter violation in arity {arity}: σ{} and σ{} do not commute on {}",
                            i + 1,
                            j + 1,
                            self.labels[b]
                        ));
                    }
                }
                if self.d_vec(&ap(i, &unit(b))) != ap(i, &self.d[b]) {
                    out.push(format!("arity {arity}: σ{} does not commute with d on {}", i + 1, self.labels[b]));
                }
            }
        }
        out
    }
}

/// Arity-indexed components; arities beyond `comps.len() - 1` are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SymSeq {
    pub field: Field,
    pub comps: Vec<Component>,
}

impl SymSeq {
    pub fn new(field: Field, comps: Vec<Component>) -> Self {
        SymSeq { field, comps }
    }

    pub fn max_arity(&self) -> usize {
        self.comps.len().saturating_sub(1)
    }

    pub fn comp(&self, n: usize) -> Option<&Component> {
        self.comps.get(n).filter(|c| c.dim() > 0)
    }

    pub fn dim(&self, n: usize) -> usize {
        self.comps.get(n).map_or(0, |c| c.dim())
    }

    /// The unit sequence: `𝕜` in arity 1.
    pub fn unit(field: Field) -> Self {
        SymSeq {
            field,
            comps: vec![Component::empty(0), Component::trivial(1, vec!["id".into()], vec![0])],
        }
    }

    pub fn check(&self) -> Vec<String> {
        self.comps.iter().enumerate().flat_map(|(n, c)| c.check(self.field, n)).collect()
    }
}
