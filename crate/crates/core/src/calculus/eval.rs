//! Evaluation of functor expressions on objects and on maps.

use super::expr::{Atom, Cat, FunctorExpr, Node};
use crate::algebra::{elt_add, loop_phi, suspension_closed, AlgMap, Algebra, Elt, QuasiFree};
use crate::bar::{bar_algebra, cobar_primitive, suspension, BarComplex, BarDeco};
use crate::chain::ops::{direct_sum, direct_sum_map, scalar_complex, shift, shift_map, tensor, tensor_map, truncate_nonneg};
use crate::chain::{ChainMap, WindowedComplex};
use crate::linalg::matrix::collect;
use crate::linalg::{reduce, Field, SVec, Scalar, SparseMatrix};
use crate::operad::tree::{canonicalize, Tree};
use crate::operad::Operad;
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum Value {
    Alg(Arc<Algebra>),
    Chain(Arc<WindowedComplex>),
}

impl Value {
    pub fn complex(&self) -> &Arc<WindowedComplex> {
        match self {
            Value::Alg(a) => &a.complex,
            Value::Chain(c) => c,
        }
    }

    pub fn field(&self) -> Field {
        self.complex().field
    }

    pub fn alg(&self) -> Result<&Arc<Algebra>> {
        match self {
            Value::Alg(a) => Ok(a),
            Value::Chain(_) => Err(Error::Category("expected an algebra, got a chain complex".into())),
        }
    }

    pub fn chain(&self) -> Result<&Arc<WindowedComplex>> {
        match self {
            Value::Chain(c) => Ok(c),
            Value::Alg(_) => Err(Error::Category("expected a chain complex, got an algebra".into())),
        }
    }

    /// Whether this object lives in `c`.
    pub fn fits(&self, c: Cat) -> bool {
        match (self, c) {
            (Value::Alg(_), Cat::Alg) => true,
            (Value::Chain(_), Cat::Ch) => true,
            (Value::Chain(x), Cat::ChP) => (x.lo()..0).all(|d| x.dim(d) == 0),
            _ => false,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Morph {
    Alg(AlgMap),
    Chain(ChainMap),
}

impl Morph {
    pub fn chain(&self) -> &ChainMap {
        match self {
            Morph::Alg(m) => &m.chain,
            Morph::Chain(m) => m,
        }
    }

    pub fn alg(&self) -> Result<&AlgMap> {
        match self {
            Morph::Alg(m) => Ok(m),
            Morph::Chain(_) => Err(Error::Category("expected a map of algebras".into())),
        }
    }

    pub fn identity(v: &Value) -> Morph {
        match v {
            Value::Alg(a) => Morph::Alg(AlgMap::identity(a.clone())),
            Value::Chain(c) => Morph::Chain(ChainMap::identity(c.clone())),
        }
    }

    pub fn zero(s: &Value, t: &Value) -> Result<Morph> {
        Ok(match (s, t) {
            (Value::Alg(a), Value::Alg(b)) => Morph::Alg(AlgMap::zero(a.clone(), b.clone())),
            (Value::Chain(a), Value::Chain(b)) => Morph::Chain(ChainMap::zero(a.clone(), b.clone())),
            _ => return Err(Error::Category("zero map between different categories".into())),
        })
    }
}

/// Ambient data for evaluation: the operad and the t-degree of path objects.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub op: Arc<Operad>,
    pub tdeg: usize,
}

impl Ctx {
    pub fn new(op: Arc<Operad>) -> Self {
        Ctx { op, tdeg: 3 }
    }

    pub fn field(&self) -> Field {
        self.op.field()
    }
}

#[derive(Clone, Debug)]
enum Aux {
    None,
    Bar(Box<BarComplex>),
    Red0(Red0),
    Powers(Vec<Arc<WindowedComplex>>),
}

#[derive(Clone, Debug)]
struct Red0 {
    complex: Arc<WindowedComplex>,
    /// Cycles spanning degree 0, empty when the input already starts above 0.
    z: Vec<SVec>,
    pass: bool,
}

fn red0(c: &WindowedComplex) -> Result<Red0> {
    let (r, z) = truncate_nonneg(c)?;
    Ok(Red0 { complex: Arc::new(r), z, pass: c.lo() > 0 })
}

/// A value together with the intermediate objects used to build it, so that maps can be
/// pushed through the same bases.
#[derive(Clone, Debug)]
pub struct Evaluated {
    pub value: Value,
    kids: Vec<Evaluated>,
    aux: Aux,
}

impl Evaluated {
    fn leaf(value: Value) -> Self {
        Evaluated { value, kids: vec![], aux: Aux::None }
    }
}

/// `F(x)`, realized so that the value is known through degree `top` where the input allows.
pub fn eval(ctx: &Ctx, f: &FunctorExpr, x: &Value, top: i64) -> Result<Evaluated> {
    if !x.fits(f.dom) {
        return Err(Error::Category(format!("{f} expects an object of {}", f.dom)));
    }
    match &f.node {
        Node::Compose(a, b) => {
            let inner = eval(ctx, b, x, a.input_top(top))?;
            let outer = eval(ctx, a, &inner.value, top)?;
            Ok(Evaluated { value: outer.value.clone(), kids: vec![inner, outer], aux: Aux::None })
        }
        Node::Sum(a, b) => {
            let ea = eval(ctx, a, x, top)?;
            let eb = eval(ctx, b, x, top)?;
            let s = direct_sum(ea.value.complex(), eb.value.complex())?;
            Ok(Evaluated { value: Value::Chain(Arc::new(s)), kids: vec![ea, eb], aux: Aux::None })
        }
        Node::Atom(a) => eval_atom(ctx, a, f.dom, x, top),
    }
}

fn eval_atom(ctx: &Ctx, a: &Atom, dom: Cat, x: &Value, top: i64) -> Result<Evaluated> {
    let field = ctx.field();
    if x.field() != field {
        return Err(Error::FieldMismatch(x.field().to_string(), field.to_string()));
    }
    let chain = |c: WindowedComplex| Ok(Evaluated::leaf(Value::Chain(Arc::new(c))));
    match a {
        Atom::Id => Ok(Evaluated::leaf(x.clone())),
        Atom::Zero => Ok(Evaluated::leaf(match x {
            Value::Alg(_) => Value::Alg(Arc::new(Algebra::zero(ctx.op.clone()))),
            Value::Chain(_) => Value::Chain(Arc::new(WindowedComplex::zero(field))),
        })),
        Atom::ForgetU => Ok(Evaluated::leaf(Value::Chain(x.alg()?.complex.clone()))),
        Atom::Free => {
            let a = cobar_primitive(ctx.op.clone(), x.chain()?, top)?;
            Ok(Evaluated::leaf(Value::Alg(Arc::new(a))))
        }
        Atom::Triv | Atom::OmegaInf => {
            let r = red0(x.chain()?)?;
            let alg = Algebra { name: "triv".into(), op: ctx.op.clone(), complex: r.complex.clone(), kind: crate::algebra::Kind::Trivial };
            Ok(Evaluated { value: Value::Alg(Arc::new(alg)), kids: vec![], aux: Aux::Red0(r) })
        }
        Atom::Red0 => {
            let r = red0(x.chain()?)?;
            Ok(Evaluated { value: Value::Chain(r.complex.clone()), kids: vec![], aux: Aux::Red0(r) })
        }
        Atom::Shift(k) => chain(shift(x.chain()?, *k)),
        Atom::Susp if dom.is_chain() => chain(shift(x.chain()?, 1)),
        Atom::Loop if dom.is_chain() => chain(shift(x.chain()?, -1)),
        Atom::Susp => {
            let z = x.alg()?;
            let s = match z.presentation() {
                Some(b) => Algebra::free(format!("Σ{}", z.name), suspension_closed(&b.qf), top)?,
                None => suspension(z, top)?,
            };
            Ok(Evaluated::leaf(Value::Alg(Arc::new(s))))
        }
        Atom::Loop => {
            let l = loop_phi(x.alg()?.clone(), ctx.tdeg)?;
            Ok(Evaluated::leaf(Value::Alg(l.omega)))
        }
        Atom::SigmaInf | Atom::BarAlg => {
            let b = bar_algebra(x.alg()?.clone(), top)?;
            Ok(Evaluated { value: Value::Chain(b.complex.clone()), kids: vec![], aux: Aux::Bar(Box::new(b)) })
        }
        Atom::TensorPower(n) => {
            let c = x.chain()?;
            match n {
                0 => chain(scalar_complex(field, 0, 1)),
                1 => Ok(Evaluated::leaf(x.clone())),
                _ => {
                    let mut powers = vec![c.clone()];
                    for _ in 1..*n {
                        let next = tensor(powers.last().unwrap(), c)?;
                        powers.push(Arc::new(next));
                    }
                    let v = Value::Chain(powers.last().unwrap().clone());
                    Ok(Evaluated { value: v, kids: vec![], aux: Aux::Powers(powers) })
                }
            }
        }
    }
}

/// `F(m): F(x) → F(y)` for `m: x → y`, on the bases of the given evaluations.
pub fn fmap(ctx: &Ctx, f: &FunctorExpr, src: &Evaluated, tgt: &Evaluated, m: &Morph) -> Result<Morph> {
    match &f.node {
        Node::Compose(a, b) => {
            let inner = fmap(ctx, b, &src.kids[0], &tgt.kids[0], m)?;
            fmap(ctx, a, &src.kids[1], &tgt.kids[1], &inner)
        }
        Node::Sum(a, b) => {
            let ma = fmap(ctx, a, &src.kids[0], &tgt.kids[0], m)?;
            let mb = fmap(ctx, b, &src.kids[1], &tgt.kids[1], m)?;
            let s = direct_sum_map(&[ma.chain(), mb.chain()], src.value.complex().clone(), tgt.value.complex().clone())?;
            Ok(Morph::Chain(s))
        }
        Node::Atom(a) => fmap_atom(ctx, a, f.dom, src, tgt, m),
    }
}

fn fmap_atom(ctx: &Ctx, a: &Atom, dom: Cat, src: &Evaluated, tgt: &Evaluated, m: &Morph) -> Result<Morph> {
    let (s, t) = (&src.value, &tgt.value);
    let chain_of = |c: ChainMap| Ok(Morph::Chain(c));
    match a {
        Atom::Id => Ok(m.clone()),
        Atom::Zero => Morph::zero(s, t),
        Atom::ForgetU => chain_of(m.alg()?.chain.clone()),
        Atom::Free => {
            let g = m.chain();
            let (sa, ta) = (s.alg()?, t.alg()?);
            let (vs, vt) = (&g.source, &g.target);
            let tstart = gen_starts(vt);
            let mut images = vec![];
            for d in vs.degrees() {
                for i in 0..vs.dim(d) {
                    let mut e = Elt::new();
                    for (r, c) in g.apply(d, &vec![(i, ctx.field().one())]) {
                        elt_add(&mut e, Tree::Leaf((tstart[&d] + r) as u32), c);
                    }
                    images.push(e);
                }
            }
            Ok(Morph::Alg(AlgMap::from_elts(sa.clone(), ta.clone(), &images)?))
        }
        Atom::Triv | Atom::OmegaInf | Atom::Red0 => {
            let (Aux::Red0(rs), Aux::Red0(rt)) = (&src.aux, &tgt.aux) else { unreachable!() };
            let c = red0_map(m.chain(), rs, rt)?;
            match a {
                Atom::Red0 => chain_of(c),
                _ => Ok(Morph::Alg(AlgMap { source: s.alg()?.clone(), target: t.alg()?.clone(), chain: c })),
            }
        }
        Atom::Shift(k) => chain_of(shift_map(m.chain(), *k, s.complex().clone(), t.complex().clone())),
        Atom::Susp if dom.is_chain() => chain_of(shift_map(m.chain(), 1, s.complex().clone(), t.complex().clone())),
        Atom::Loop if dom.is_chain() => chain_of(shift_map(m.chain(), -1, s.complex().clone(), t.complex().clone())),
        Atom::Susp => {
            let g = m.alg()?;
            if g.source.presentation().is_none() || g.target.presentation().is_none() {
                return Err(Error::Invalid("Susp acts on maps of quasi-free algebras only".into()));
            }
            let images: Vec<Elt> = QuasiFree::images_of(g)?
                .into_iter()
                .map(|e| e.into_iter().filter(|(t, _)| t.is_leaf()).collect())
                .collect();
            Ok(Morph::Alg(AlgMap::from_elts(s.alg()?.clone(), t.alg()?.clone(), &images)?))
        }
        Atom::Loop => Err(Error::Invalid("Loop on algebras is evaluated on objects only".into())),
        Atom::SigmaInf | Atom::BarAlg => {
            let (Aux::Bar(bs), Aux::Bar(bt)) = (&src.aux, &tgt.aux) else { unreachable!() };
            chain_of(bar_map(bs, bt, m.chain())?)
        }
        Atom::TensorPower(n) => match n {
            0 => chain_of(ChainMap::identity(s.complex().clone())),
            1 => Ok(m.clone()),
            _ => {
                let (Aux::Powers(ps), Aux::Powers(pt)) = (&src.aux, &tgt.aux) else { unreachable!() };
                let g = m.chain();
                let mut cur = g.clone();
                for k in 1..*n {
                    cur = tensor_map(&cur, g, ps[k].clone(), pt[k].clone())?;
                }
                chain_of(cur)
            }
        },
    }
}

/// Index of the first generator of each degree, in the order used by `cobar_primitive`.
fn gen_starts(c: &WindowedComplex) -> HashMap<i64, usize> {
    let mut out = HashMap::new();
    let mut n = 0;
    for d in c.degrees() {
        out.insert(d, n);
        n += c.dim(d);
    }
    out
}

/// Coordinates of `v` in the span of `basis` (columns in a space of dimension `rows`).
pub(crate) fn coords_in(field: Field, basis: &[SVec], rows: usize, v: &SVec) -> Option<SVec> {
    if v.is_empty() {
        return Some(vec![]);
    }
    let m = SparseMatrix::from_cols(field, rows, basis.to_vec());
    reduce(&m).ok()?.solve_sparse(v)
}

fn red0_map(g: &ChainMap, rs: &Red0, rt: &Red0) -> Result<ChainMap> {
    let f = g.source.field;
    let tdim0 = g.target.dim(0);
    ChainMap::from_fn(rs.complex.clone(), rt.complex.clone(), |deg, i| {
        if deg != 0 || (rs.pass && rt.pass) {
            return g.apply(deg, &vec![(i, f.one())]);
        }
        let x = if rs.pass { vec![(i, f.one())] } else { rs.z[i].clone() };
        let y = g.apply(0, &x);
        if rt.pass {
            return y;
        }
        coords_in(f, &rt.z, tdim0, &y).expect("cycles map to cycles")
    })
}

/// `B(g): B(O,X) → B(O,Y)`, applying `g` to every leaf.
fn bar_map(bs: &BarComplex, bt: &BarComplex, g: &ChainMap) -> Result<ChainMap> {
    let f = bs.op.field();
    let ids: HashMap<(i64, usize), u32> = bt.leaf_basis.iter().enumerate().map(|(i, x)| (*x, i as u32)).collect();
    let deco = BarDeco { op: &bt.op };
    let ld = |l: u32| bt.leaf_basis[l as usize].0;
    let mut err = None;
    let map = ChainMap::from_fn(bs.complex.clone(), bt.complex.clone(), |deg, i| {
        let t = bs.tree(deg, i);
        let mut out = vec![];
        let expand = substitute(t, f, &|l| {
            let (d, k) = bs.leaf_basis[l as usize];
            g.apply(d, &vec![(k, f.one())])
                .into_iter()
                .filter_map(|(r, c)| ids.get(&(d, r)).map(|&id| (id, c)))
                .collect()
        });
        for (t2, c) in expand {
            let Some((neg, t3)) = canonicalize(&t2, &deco, &ld) else { continue };
            match bt.index.get(&t3) {
                Some(&(d, j)) if d == deg => out.push((j, if neg { c.neg() } else { c })),
                _ => {
                    err = Some(Error::Window(format!("image of a bar tree lies outside the target window at degree {deg}")));
                }
            }
        }
        collect(out)
    });
    if let Some(e) = err {
        return Err(e);
    }
    map
}

/// Multilinear substitution of leaves.
fn substitute(t: &Tree, f: Field, leaf: &dyn Fn(u32) -> Vec<(u32, Scalar)>) -> Vec<(Tree, Scalar)> {
    match t {
        Tree::Leaf(l) => leaf(*l).into_iter().map(|(m, c)| (Tree::Leaf(m), c)).collect(),
        Tree::Node(p, ch) => {
            let mut acc: Vec<(Vec<Tree>, Scalar)> = vec![(vec![], f.one())];
            for c in ch {
                let opts = substitute(c, f, leaf);
                let mut next = vec![];
                for (prefix, x) in &acc {
                    for (s, y) in &opts {
                        let mut v = prefix.clone();
                        v.push(s.clone());
                        next.push((v, x.mul(y)));
                    }
                }
                acc = next;
            }
            acc.into_iter().map(|(kids, c)| (Tree::Node(*p, kids), c)).collect()
        }
    }
}
