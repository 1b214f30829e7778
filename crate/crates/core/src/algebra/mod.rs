//! Algebras over truncated operads: quasi-free presentations, trivial algebras, sub-objects,
//! products, path objects and the pullback/pushout models built from them.

pub mod free;
pub mod parse;
pub mod path;
pub mod pushout;

pub use free::{elt_add, elt_axpy, elt_scale, Elt, QuasiFree};
pub use parse::{parse_algebra, write_algebra};
pub use path::{homotopy_pullback, loop_phi, path_object, LoopPhi, PathObject};
pub use pushout::{cylinder, homotopy_pushout, suspension_closed, Cylinder};

use crate::chain::ops::truncate_nonneg;
use crate::chain::{ChainMap, WindowedComplex};
use crate::linalg::matrix::{axpy, scale};
use crate::linalg::{Echelon, Field, SVec, SparseMatrix};
use crate::operad::tree::Tree;
use crate::operad::Operad;
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Realized quasi-free algebra: monomials of degree `<= hi` with an index.
#[derive(Clone, Debug)]
pub struct FreeBasis {
    pub qf: QuasiFree,
    pub basis: BTreeMap<i64, Vec<Tree>>,
    pub index: HashMap<Tree, (i64, usize)>,
}

#[derive(Clone, Debug)]
pub enum Kind {
    Free(Arc<FreeBasis>),
    Trivial,
    /// Basis vectors are the stored vectors of the echelon form in each degree.
    Sub { ambient: Arc<Algebra>, basis: BTreeMap<i64, Echelon> },
    Product(Vec<Arc<Algebra>>),
    /// `Λ_L ⊗ X` in degrees `>= lo(X) - 1`.
    Path { l: usize, x: Arc<Algebra> },
}

#[derive(Clone, Debug)]
pub struct Algebra {
    pub name: String,
    pub op: Arc<Operad>,
    pub complex: Arc<WindowedComplex>,
    pub kind: Kind,
}

/// Path coefficient basis element: `t^a` or `t^a dt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coef {
    T(usize),
    Dt(usize),
}

impl Coef {
    pub fn deg(self) -> i64 {
        match self {
            Coef::T(_) => 0,
            Coef::Dt(_) => -1,
        }
    }
}

impl Algebra {
    pub fn field(&self) -> Field {
        self.op.field()
    }

    /// Realizes a quasi-free algebra through degree `top` (everything when it is finite).
    pub fn free(name: impl Into<String>, qf: QuasiFree, top: i64) -> Result<Algebra> {
        let f = qf.field();
        let op = qf.op.clone();
        let (hi, bounded) = if qf.ngens() == 0 && qf.gens_complete {
            (-1, true)
        } else {
            match qf.max_degree() {
                Some(m) if m <= top => (m, true),
                _ => (top, false),
            }
        };
        let basis = qf.monomials(hi);
        let mut index = HashMap::new();
        for (d, ts) in &basis {
            for (i, t) in ts.iter().enumerate() {
                index.insert(t.clone(), (*d, i));
            }
        }
        let complex = if hi < 0 {
            let z = WindowedComplex::zero(f);
            if bounded {
                z
            } else {
                WindowedComplex::new(f, 0, vec![vec![]], vec![SparseMatrix::zero(f, 0, 0)], false)?
            }
        } else {
            let rows: Vec<Vec<Tree>> = (0..=hi).map(|d| basis.get(&d).cloned().unwrap_or_default()).collect();
            WindowedComplex::from_basis(f, 0, rows, bounded, |t| qf.show(t), |_, t| {
                qf.d(&Elt::from([(t.clone(), f.one())])).into_iter().collect()
            })?
        };
        Ok(Algebra {
            name: name.into(),
            op,
            complex: Arc::new(complex),
            kind: Kind::Free(Arc::new(FreeBasis { qf, basis, index })),
        })
    }

    /// `(red₀ C)_triv`.
    pub fn trivial(name: impl Into<String>, op: Arc<Operad>, c: &WindowedComplex) -> Result<Algebra> {
        if c.field != op.field() {
            return Err(Error::FieldMismatch(c.field.to_string(), op.field().to_string()));
        }
        let r = if c.is_zero() && c.bounded() { c.clone() } else { truncate_nonneg(c)?.0 };
        Ok(Algebra { name: name.into(), op, complex: Arc::new(r), kind: Kind::Trivial })
    }

    pub fn zero(op: Arc<Operad>) -> Algebra {
        let f = op.field();
        Algebra { name: "0".into(), op, complex: Arc::new(WindowedComplex::zero(f)), kind: Kind::Trivial }
    }

    pub fn presentation(&self) -> Option<&FreeBasis> {
        match &self.kind {
            Kind::Free(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.kind, Kind::Trivial)
    }

    /// Sub-object spanned degreewise by `spans` (must be a subcomplex; closure under the
    /// action is checked lazily when products are taken).
    pub fn sub(name: impl Into<String>, ambient: Arc<Algebra>, spans: BTreeMap<i64, Vec<SVec>>) -> Result<Algebra> {
        let f = ambient.field();
        let a = &ambient.complex;
        let mut basis: BTreeMap<i64, Echelon> = BTreeMap::new();
        for (d, vs) in &spans {
            let mut e = Echelon::new(f, a.dim(*d));
            for v in vs {
                e.insert(v);
            }
            if !e.is_empty() {
                basis.insert(*d, e);
            }
        }
        let (lo, hi) = match (basis.keys().next(), basis.keys().last()) {
            (Some(&l), Some(&h)) => (l.max(a.lo()), h.max(a.hi())),
            _ => (a.lo().max(0), a.hi()),
        };
        let lo = lo.min(hi);
        let mut labels = vec![];
        let mut ds = vec![];
        for d in lo..=hi {
            let n = basis.get(&d).map_or(0, |e| e.len());
            labels.push((0..n).map(|i| format!("b{d}_{i}")).collect());
            let rows = if d == lo { 0 } else { basis.get(&(d - 1)).map_or(0, |e| e.len()) };
            let mut cols = vec![];
            for i in 0..n {
                let v = basis[&d].stored(i);
                let dv = a.apply_d(d, v);
                if d == lo {
                    if !dv.is_empty() && a.known(d - 1) {
                        return Err(Error::Invalid("sub-object is not closed under d".into()));
                    }
                    cols.push(vec![]);
                    continue;
                }
                let c = match basis.get(&(d - 1)) {
                    Some(e) => e.coords(&dv),
                    None => dv.is_empty().then(Vec::new),
                };
                cols.push(c.ok_or_else(|| Error::Invalid(format!("sub-object is not closed under d at degree {d}")))?);
            }
            ds.push(SparseMatrix::from_cols(f, rows, cols));
        }
        let c = WindowedComplex::new(f, lo, labels, ds, a.bounded())?;
        Ok(Algebra { name: name.into(), op: ambient.op.clone(), complex: Arc::new(c), kind: Kind::Sub { ambient, basis } })
    }

    pub fn product(name: impl Into<String>, parts: Vec<Arc<Algebra>>) -> Result<Algebra> {
        let op = parts.first().ok_or_else(|| Error::Invalid("empty product".into()))?.op.clone();
        for p in &parts {
            if !p.op.same_structure(&op) {
                return Err(Error::Invalid("product of algebras over different operads".into()));
            }
        }
        let cs: Vec<&WindowedComplex> = parts.iter().map(|p| p.complex.as_ref()).collect();
        let c = crate::chain::ops::direct_sum_all(&cs)?;
        Ok(Algebra { name: name.into(), op, complex: Arc::new(c), kind: Kind::Product(parts) })
    }

    /// Offset of part `j` in degree `d` of a product.
    fn part_offset(parts: &[Arc<Algebra>], j: usize, d: i64) -> usize {
        parts[..j].iter().map(|p| p.complex.dim(d)).sum()
    }

    fn locate_part(parts: &[Arc<Algebra>], d: i64, i: usize) -> (usize, usize) {
        let mut i = i;
        for (j, p) in parts.iter().enumerate() {
            let n = p.complex.dim(d);
            if i < n {
                return (j, i);
            }
            i -= n;
        }
        panic!("index outside the product")
    }

    /// Decodes a path basis element in degree `d`.
    pub fn path_decode(l: usize, x: &Algebra, d: i64, i: usize) -> (Coef, i64, usize) {
        let n0 = x.complex.dim(d);
        if i < (l + 1) * n0 {
            (Coef::T(i / n0), d, i % n0)
        } else {
            let j = i - (l + 1) * n0;
            let n1 = x.complex.dim(d + 1);
            (Coef::Dt(j / n1), d + 1, j % n1)
        }
    }

    pub fn path_encode(l: usize, x: &Algebra, c: Coef, xi: usize, xdeg: i64) -> usize {
        match c {
            Coef::T(a) => a * x.complex.dim(xdeg) + xi,
            Coef::Dt(a) => (l + 1) * x.complex.dim(xdeg - 1) + a * x.complex.dim(xdeg) + xi,
        }
    }

    /// `m(p; x_1, ..., x_k)` on basis elements `(degree, index)`; the result lives in degree
    /// `Σ deg + |p|`.
    pub fn act_basis(&self, k: usize, p: usize, xs: &[(i64, usize)]) -> Result<SVec> {
        let f = self.field();
        if k == 1 {
            return Ok(vec![(xs[0].1, f.one())]);
        }
        let out_deg: i64 = xs.iter().map(|x| x.0).sum::<i64>() + self.op.deg(k, p);
        match &self.kind {
            Kind::Trivial => Ok(vec![]),
            Kind::Free(b) => {
                let ts: Vec<&Tree> = xs.iter().map(|&(d, i)| &b.basis[&d][i]).collect();
                let prod = b.qf.product_basis(k, p, &ts);
                b.to_svec(out_deg, &prod)
            }
            Kind::Product(parts) => {
                let loc: Vec<(usize, usize)> = xs.iter().map(|&(d, i)| Self::locate_part(parts, d, i)).collect();
                let j = loc[0].0;
                if loc.iter().any(|l| l.0 != j) {
                    return Ok(vec![]);
                }
                let inner: Vec<(i64, usize)> = xs.iter().zip(&loc).map(|(x, l)| (x.0, l.1)).collect();
                let r = parts[j].act_basis(k, p, &inner)?;
                let off = Self::part_offset(parts, j, out_deg);
                Ok(r.into_iter().map(|(i, c)| (i + off, c)).collect())
            }
            Kind::Sub { ambient, basis } => {
                let args: Vec<(i64, SVec)> =
                    xs.iter().map(|&(d, i)| (d, basis[&d].stored(i).clone())).collect();
                let r = ambient.act_vec(k, p, &args)?;
                if r.is_empty() {
                    return Ok(r);
                }
                basis
                    .get(&out_deg)
                    .and_then(|e| e.coords(&r))
                    .ok_or_else(|| Error::Invalid(format!("{}: product leaves the sub-object", self.name)))
            }
            Kind::Path { l, x } => {
                let l = *l;
                let dec: Vec<(Coef, i64, usize)> = xs.iter().map(|&(d, i)| Self::path_decode(l, x, d, i)).collect();
                let mut tdeg = 0;
                let mut dts = 0;
                let mut odd = false;
                let mut before = self.op.deg(k, p);
                for (c, xd, _) in &dec {
                    match c {
                        Coef::T(a) => tdeg += a,
                        Coef::Dt(a) => {
                            tdeg += a;
                            dts += 1;
                            if before % 2 != 0 {
                                odd = !odd;
                            }
                        }
                    }
                    before += xd;
                }
                let coef = match dts {
                    0 if tdeg <= l => Coef::T(tdeg),
                    1 if tdeg < l => Coef::Dt(tdeg),
                    _ => return Ok(vec![]),
                };
                let inner: Vec<(i64, usize)> = dec.iter().map(|(_, d, i)| (*d, *i)).collect();
                let r = x.act_basis(k, p, &inner)?;
                let xdeg = out_deg - coef.deg();
                let s = f.sign(odd);
                Ok(r.into_iter().map(|(i, c)| (Self::path_encode(l, x, coef, i, xdeg), c.mul(&s))).collect())
            }
        }
    }

    /// Multilinear extension of `act_basis`.
    pub fn act_vec(&self, k: usize, p: usize, args: &[(i64, SVec)]) -> Result<SVec> {
        let mut out = vec![];
        if args.iter().any(|a| a.1.is_empty()) {
            return Ok(out);
        }
        let mut idx = vec![0usize; k];
        loop {
            let xs: Vec<(i64, usize)> = (0..k).map(|i| (args[i].0, args[i].1[idx[i]].0)).collect();
            let mut c = self.field().one();
            for i in 0..k {
                c = c.mul(&args[i].1[idx[i]].1);
            }
            let r = self.act_basis(k, p, &xs)?;
            axpy(&mut out, &c, &r);
            let mut i = 0;
            while i < k {
                idx[i] += 1;
                if idx[i] < args[i].1.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == k {
                return Ok(out);
            }
        }
    }

    /// Basis tuples `(x_1 <= ... <= x_k)` (by degree, then index) of total degree `e - |p|`.
    fn tuples(&self, k: usize, total: i64, out: &mut Vec<Vec<(i64, usize)>>, cap: usize) {
        let c = &self.complex;
        let flat: Vec<(i64, usize)> =
            c.degrees().flat_map(|d| (0..c.dim(d)).map(move |i| (d, i))).filter(|x| x.0 <= total).collect();
        fn rec(
            flat: &[(i64, usize)],
            from: usize,
            k: usize,
            rest: i64,
            cur: &mut Vec<(i64, usize)>,
            out: &mut Vec<Vec<(i64, usize)>>,
            cap: usize,
        ) {
            if out.len() >= cap {
                return;
            }
            if k == 0 {
                if rest == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for i in from..flat.len() {
                if flat[i].0 > rest {
                    continue;
                }
                cur.push(flat[i]);
                rec(flat, i, k - 1, rest - flat[i].0, cur, out, cap);
                cur.pop();
            }
        }
        rec(&flat, 0, k, total, &mut vec![], out, cap);
    }

    /// Checks Leibniz, equivariance and associativity on basis tuples inside the window,
    /// examining at most `cap` tuples per arity.
    pub fn validate(&self, cap: usize) -> Vec<String> {
        let f = self.field();
        let c = &self.complex;
        let vhi = c.valid_hi();
        let mut bad = vec![];
        let known = |d: i64| d >= c.lo() && d <= vhi;
        for k in 2..=self.op.trunc {
            let comp = self.op.comp(k);
            for p in 0..comp.dim() {
                let dp = comp.degs[p];
                for e in c.lo()..=vhi {
                    let mut tuples = vec![];
                    self.tuples(k, e - dp, &mut tuples, cap);
                    for xs in tuples {
                        let prod = match self.act_basis(k, p, &xs) {
                            Ok(v) => v,
                            Err(err) => {
                                bad.push(err.to_string());
                                continue;
                            }
                        };
                        // Leibniz
                        if known(e) && known(e - 1) {
                            let lhs = c.apply_d(e, &prod);
                            let mut rhs = vec![];
                            for (q, co) in &comp.d[p] {
                                if let Ok(r) = self.act_basis(k, *q, &xs) {
                                    axpy(&mut rhs, co, &r);
                                }
                            }
                            let mut before = dp;
                            for j in 0..k {
                                let (dj, ij) = xs[j];
                                let dx = c.apply_d(dj, &vec![(ij, f.one())]);
                                if !dx.is_empty() {
                                    let args: Vec<(i64, SVec)> = (0..k)
                                        .map(|l| if l == j { (dj - 1, dx.clone()) } else { (xs[l].0, vec![(xs[l].1, f.one())]) })
                                        .collect();
                                    if let Ok(r) = self.act_vec(k, p, &args) {
                                        axpy(&mut rhs, &f.sign(before % 2 != 0), &r);
                                    }
                                }
                                before += dj;
                            }
                            if lhs != rhs {
                                bad.push(format!("Leibniz fails for arity {k} op {p} at degree {e}"));
                            }
                        }
                        // equivariance under the adjacent transpositions
                        for i in 0..k - 1 {
                            let pos = crate::operad::perm::transposition(k, i);
                            let (q, neg) = self.op.act(k, &pos, p);
                            let degs: Vec<i64> = xs.iter().map(|x| x.0).collect();
                            let eps = crate::operad::perm::koszul_odd(&degs, &pos);
                            let mut ys = xs.clone();
                            ys.swap(i, i + 1);
                            if let Ok(r) = self.act_basis(k, q, &ys) {
                                let r = scale(&r, &f.sign(neg ^ eps));
                                if r != prod {
                                    bad.push(format!("equivariance fails for arity {k} op {p} at degree {e}"));
                                }
                            }
                        }
                    }
                }
            }
        }
        bad.extend(self.validate_assoc(cap));
        bad
    }

    fn validate_assoc(&self, cap: usize) -> Vec<String> {
        let f = self.field();
        let c = &self.complex;
        let vhi = c.valid_hi();
        let mut bad = vec![];
        for m in 2..=self.op.trunc {
            for n in 2..=self.op.trunc + 1 - m {
                for a in 0..self.op.dim(m) {
                    for b in 0..self.op.dim(n) {
                        let (da, db) = (self.op.deg(m, a), self.op.deg(n, b));
                        for e in c.lo()..=vhi {
                            let mut tuples = vec![];
                            self.tuples(m + n - 1, e - da - db, &mut tuples, cap);
                            for xs in tuples {
                                for i in 1..=m {
                                    let comp = self.op.compose_basis(m, i, a, n, b);
                                    let mut lhs = vec![];
                                    for (r, co) in &comp {
                                        if let Ok(v) = self.act_basis(m + n - 1, *r, &xs) {
                                            axpy(&mut lhs, co, &v);
                                        }
                                    }
                                    let inner = &xs[i - 1..i - 1 + n];
                                    let Ok(mid) = self.act_basis(n, b, inner) else { continue };
                                    let mid_deg = inner.iter().map(|x| x.0).sum::<i64>() + db;
                                    let mut args: Vec<(i64, SVec)> =
                                        xs[..i - 1].iter().map(|x| (x.0, vec![(x.1, f.one())])).collect();
                                    args.push((mid_deg, mid));
                                    args.extend(xs[i - 1 + n..].iter().map(|x| (x.0, vec![(x.1, f.one())])));
                                    let Ok(rhs) = self.act_vec(m, a, &args) else { continue };
                                    let before: i64 = xs[..i - 1].iter().map(|x| x.0).sum();
                                    let rhs = scale(&rhs, &f.sign(db % 2 != 0 && before % 2 != 0));
                                    if lhs != rhs {
                                        bad.push(format!("associativity fails for ({m},{i},{n}) at degree {e}"));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        bad
    }

    /// Indecomposables `X / (decomposables)`; for quasi-free algebras these are `(V, d₁)`.
    pub fn abelianization(&self) -> Result<WindowedComplex> {
        let f = self.field();
        match &self.kind {
            Kind::Trivial => Ok((*self.complex).clone()),
            Kind::Free(b) => generator_complex(&b.qf, self.complex.hi(), self.complex.bounded()),
            _ => {
                let c = &self.complex;
                if c.is_zero() && c.bounded() {
                    return Ok(WindowedComplex::zero(f));
                }
                let mut dec: BTreeMap<i64, Echelon> = BTreeMap::new();
                for e in c.degrees() {
                    let mut ech = Echelon::new(f, c.dim(e));
                    for k in 2..=self.op.trunc {
                        for p in 0..self.op.dim(k) {
                            let mut tuples = vec![];
                            self.tuples(k, e - self.op.deg(k, p), &mut tuples, usize::MAX);
                            for xs in tuples {
                                ech.insert(&self.act_basis(k, p, &xs)?);
                            }
                        }
                    }
                    dec.insert(e, ech);
                }
                quotient_complex(c, &dec)
            }
        }
    }
}

impl FreeBasis {
    pub fn to_svec(&self, deg: i64, x: &Elt) -> Result<SVec> {
        let mut out = vec![];
        for (t, c) in x {
            match self.index.get(t) {
                Some(&(d, i)) if d == deg => out.push((i, c.clone())),
                Some(_) => return Err(Error::Invalid("element of mixed degree".into())),
                None => return Err(Error::Window(format!("monomial {} lies outside the realized window", self.qf.show(t)))),
            }
        }
        Ok(crate::linalg::matrix::collect(out))
    }

    pub fn to_elt(&self, deg: i64, v: &SVec) -> Elt {
        v.iter().map(|(i, c)| (self.basis[&deg][*i].clone(), c.clone())).collect()
    }
}

/// `(V, d₁)` from a presentation.
pub fn generator_complex(qf: &QuasiFree, hi: i64, bounded: bool) -> Result<WindowedComplex> {
    let f = qf.field();
    if qf.ngens() == 0 {
        return Ok(WindowedComplex::zero(f));
    }
    let top = if bounded { *qf.degs.iter().max().unwrap() } else { hi };
    let by_deg: Vec<Vec<usize>> = (0..=top).map(|d| (0..qf.ngens()).filter(|&v| qf.degs[v] == d).collect()).collect();
    WindowedComplex::from_basis(f, 0, by_deg, bounded, |&v| qf.labels[v].clone(), |_, &v| qf.linear_part(v))
}

/// Quotient of a complex by a subcomplex given by echelon forms; the basis of the quotient is
/// the standard basis vectors off the pivot rows.
pub fn quotient_complex(c: &WindowedComplex, sub: &BTreeMap<i64, Echelon>) -> Result<WindowedComplex> {
    let f = c.field;
    let keep = |d: i64| -> Vec<usize> {
        let piv: std::collections::HashSet<usize> = sub.get(&d).map(|e| e.pivot_rows().into_iter().collect()).unwrap_or_default();
        (0..c.dim(d)).filter(|i| !piv.contains(i)).collect()
    };
    let mut labels = vec![];
    let mut ds = vec![];
    for d in c.degrees() {
        let k = keep(d);
        let below = keep(d - 1);
        let pos: HashMap<usize, usize> = below.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        labels.push(k.iter().map(|&i| c.labels(d)[i].clone()).collect());
        let rows = if d == c.lo() { 0 } else { below.len() };
        let mut cols = vec![];
        for &i in &k {
            if d == c.lo() {
                cols.push(vec![]);
                continue;
            }
            let dv = c.apply_d(d, &vec![(i, f.one())]);
            let r = match sub.get(&(d - 1)) {
                Some(e) => e.reduce_full(&dv).0,
                None => dv,
            };
            cols.push(r.into_iter().map(|(row, x)| (pos[&row], x)).collect());
        }
        ds.push(SparseMatrix::from_cols(f, rows, cols));
    }
    WindowedComplex::new(f, c.lo(), labels, ds, c.bounded())
}

/// A map of algebras over the same operad, stored as its underlying chain map.
#[derive(Clone, Debug)]
pub struct AlgMap {
    pub source: Arc<Algebra>,
    pub target: Arc<Algebra>,
    pub chain: ChainMap,
}

impl AlgMap {
    /// Extends generator images (vectors in the target) multiplicatively from a quasi-free source.
    pub fn from_generators(source: Arc<Algebra>, target: Arc<Algebra>, images: &[(i64, SVec)]) -> Result<AlgMap> {
        let b = source.presentation().ok_or_else(|| Error::Invalid("source is not quasi-free".into()))?.clone();
        for (v, (d, _)) in images.iter().enumerate() {
            if *d != b.qf.degs[v] {
                return Err(Error::Invalid(format!("image of {} has the wrong degree", b.qf.labels[v])));
            }
        }
        let mut err = None;
        let chain = ChainMap::from_fn(source.complex.clone(), target.complex.clone(), |deg, i| {
            let t = &b.basis[&deg][i];
            let r = match t {
                Tree::Leaf(v) => Ok(images[*v as usize].1.clone()),
                Tree::Node(p, ch) => {
                    let args: Vec<(i64, SVec)> = ch
                        .iter()
                        .map(|l| match l {
                            Tree::Leaf(v) => images[*v as usize].clone(),
                            _ => unreachable!(),
                        })
                        .collect();
                    target.act_vec(ch.len(), *p as usize, &args)
                }
            };
            r.unwrap_or_else(|e| {
                err = Some(e);
                vec![]
            })
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(AlgMap { source, target, chain: chain? })
    }

    /// Between quasi-free algebras, from generator images as elements.
    pub fn from_elts(source: Arc<Algebra>, target: Arc<Algebra>, images: &[Elt]) -> Result<AlgMap> {
        let tb = target.presentation().ok_or_else(|| Error::Invalid("target is not quasi-free".into()))?;
        let sb = source.presentation().ok_or_else(|| Error::Invalid("source is not quasi-free".into()))?;
        let mut imgs = vec![];
        for (v, x) in images.iter().enumerate() {
            let d = sb.qf.degs[v];
            let vx = if target.complex.known(d) || target.complex.bounded() {
                tb.to_svec(d, x)?
            } else {
                vec![]
            };
            imgs.push((d, vx));
        }
        Self::from_generators(source, target, &imgs)
    }

    pub fn identity(a: Arc<Algebra>) -> AlgMap {
        AlgMap { source: a.clone(), target: a.clone(), chain: ChainMap::identity(a.complex.clone()) }
    }

    pub fn zero(source: Arc<Algebra>, target: Arc<Algebra>) -> AlgMap {
        let chain = ChainMap::zero(source.complex.clone(), target.complex.clone());
        AlgMap { source, target, chain }
    }

    pub fn then(&self, g: &AlgMap) -> AlgMap {
        AlgMap { source: self.source.clone(), target: g.target.clone(), chain: self.chain.then(&g.chain) }
    }

    /// Checks `f(m(p; x)) = m(p; f x)` on basis tuples (at most `cap` per arity and degree).
    pub fn check_multiplicative(&self, cap: usize) -> Vec<String> {
        let s = &self.source;
        let mut bad = vec![];
        let vhi = s.complex.valid_hi().min(self.target.complex.valid_hi());
        for k in 2..=s.op.trunc {
            for p in 0..s.op.dim(k) {
                for e in s.complex.lo()..=vhi {
                    let mut tuples = vec![];
                    s.tuples(k, e - s.op.deg(k, p), &mut tuples, cap);
                    for xs in tuples {
                        let Ok(prod) = s.act_basis(k, p, &xs) else { continue };
                        let lhs = self.chain.apply(e, &prod);
                        let args: Vec<(i64, SVec)> = xs.iter().map(|&(d, i)| (d, self.chain.apply(d, &vec![(i, s.field().one())]))).collect();
                        match self.target.act_vec(k, p, &args) {
                            Ok(rhs) if rhs == lhs => {}
                            Ok(_) => bad.push(format!("map is not multiplicative for arity {k} at degree {e}")),
                            Err(err) => bad.push(err.to_string()),
                        }
                    }
                }
            }
        }
        bad
    }
}

pub(crate) fn unit_vec(f: Field, i: usize) -> SVec {
    vec![(i, f.one())]
}
