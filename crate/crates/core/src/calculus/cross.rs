//! Cross-effects `cr_nF` (total fibers over coproducts) and co-cross-effects `cr^nF` (total
//! cofibers over sums), with their naturality in the slots and the slot-permuting action.

use super::eval::{eval, fmap, Ctx, Evaluated, Morph, Value};
use super::expr::FunctorExpr;
use crate::algebra::pushout::zero_presentation;
use crate::algebra::{AlgMap, Algebra, Elt, QuasiFree};
use crate::chain::cube::{cube_total_cofiber, cube_total_fiber, total_fiber_map, CubeDiagram};
use crate::chain::ops::direct_sum_all;
use crate::chain::{ChainMap, WindowedComplex};
use crate::{Error, Result};
use std::sync::Arc;

/// `∐` of the given objects: coproduct of presentations for algebras, direct sum for complexes.
pub fn coproduct(ctx: &Ctx, parts: &[&Value], top: i64) -> Result<Value> {
    if !parts.is_empty() && parts.iter().all(|p| matches!(p, Value::Chain(_))) {
        let cs: Vec<&WindowedComplex> = parts.iter().map(|p| p.complex().as_ref()).collect();
        return Ok(Value::Chain(Arc::new(direct_sum_all(&cs)?)));
    }
    let mut q = zero_presentation(ctx.op.clone());
    let mut names = vec![];
    for p in parts {
        let a = p.alg()?;
        let b = a.presentation().ok_or_else(|| Error::Invalid(format!("{} is not quasi-free", a.name)))?;
        q = q.coproduct(&b.qf)?;
        names.push(a.name.clone());
    }
    let name = if names.is_empty() { "0".to_string() } else { names.join("⊔") };
    Ok(Value::Alg(Arc::new(Algebra::free(name, q, top)?)))
}

/// The map between coproducts sending summand `k` to summand `blocks[k].0` by `blocks[k].1`,
/// or to zero.
pub fn coproduct_map(src: &Value, src_parts: &[&Value], tgt: &Value, tgt_parts: &[&Value], blocks: &[Option<(usize, &Morph)>]) -> Result<Morph> {
    match (src, tgt) {
        (Value::Chain(s), Value::Chain(t)) => {
            let f = s.field;
            let m = ChainMap::from_fn(s.clone(), t.clone(), |deg, i| {
                let mut off = 0;
                let mut k = 0;
                while i >= off + src_parts[k].complex().dim(deg) {
                    off += src_parts[k].complex().dim(deg);
                    k += 1;
                }
                let Some((u, g)) = blocks[k] else { return vec![] };
                let toff: usize = tgt_parts[..u].iter().map(|p| p.complex().dim(deg)).sum();
                g.chain().apply(deg, &vec![(i - off, f.one())]).into_iter().map(|(r, x)| (r + toff, x)).collect()
            })?;
            Ok(Morph::Chain(m))
        }
        (Value::Alg(s), Value::Alg(t)) => {
            let tq = &t.presentation().ok_or_else(|| Error::Invalid("target is not quasi-free".into()))?.qf;
            let gens = |p: &Value| p.alg().ok().and_then(|a| a.presentation()).map_or(0, |b| b.qf.ngens());
            let toffs: Vec<usize> = tgt_parts.iter().scan(0, |acc, p| {
                let o = *acc;
                *acc += gens(p);
                Some(o)
            }).collect();
            let mut images = vec![];
            for (k, p) in src_parts.iter().enumerate() {
                match blocks[k] {
                    None => images.extend((0..gens(p)).map(|_| Elt::new())),
                    Some((u, g)) => {
                        let g = g.alg()?;
                        let gq = &g.target.presentation().unwrap().qf;
                        for e in QuasiFree::images_of(g)? {
                            images.push(gq.transport(&e, tq, &|w| w + toffs[u]));
                        }
                    }
                }
            }
            Ok(Morph::Alg(AlgMap::from_elts(s.clone(), t.clone(), &images)?))
        }
        _ => Err(Error::Category("coproduct map between different categories".into())),
    }
}

fn members(t: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| t & (1 << i) != 0).collect()
}

/// The cube `T ↦ F(∐_{i∉T} X_i)` with its total fiber.
#[derive(Clone, Debug)]
pub struct CrossCube {
    pub n: usize,
    pub slots: Vec<Value>,
    pub inputs: Vec<Value>,
    pub evals: Vec<Evaluated>,
    pub cube: CubeDiagram,
    pub total: Arc<WindowedComplex>,
}

fn check_reduced(f: &FunctorExpr) -> Result<()> {
    if !f.reduced() {
        return Err(Error::Invalid(format!("{f} is not reduced; cross-effects need F(0) ≃ 0")));
    }
    Ok(())
}

fn present(t: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| t & (1 << i) == 0).collect()
}

/// Builds the cross-effect cube; vertex values are realized through `top`.
pub fn cross_cube(ctx: &Ctx, f: &FunctorExpr, slots: &[Value], top: i64) -> Result<CrossCube> {
    check_reduced(f)?;
    let n = slots.len();
    if n == 0 {
        return Err(Error::Invalid("cross-effects need at least one slot".into()));
    }
    let in_top = f.input_top(top);
    let mut inputs = vec![];
    let mut evals = vec![];
    for t in 0..(1usize << n) {
        let parts: Vec<&Value> = present(t, n).into_iter().map(|i| &slots[i]).collect();
        let x = if parts.is_empty() { empty_object(ctx, &slots[0])? } else { coproduct(ctx, &parts, in_top)? };
        evals.push(eval(ctx, f, &x, top)?);
        inputs.push(x);
    }
    let objects: Vec<Arc<WindowedComplex>> = evals.iter().map(|e| e.value.complex().clone()).collect();
    let ids: Vec<Morph> = slots.iter().map(Morph::identity).collect();
    let cube = CubeDiagram::new(n, objects, |t, j| {
        let u = t | 1 << j;
        let (pt, pu) = (present(t, n), present(u, n));
        let blocks: Vec<Option<(usize, &Morph)>> =
            pt.iter().map(|&k| if k == j { None } else { Some((pu.iter().position(|&x| x == k).unwrap(), &ids[k])) }).collect();
        let sp: Vec<&Value> = pt.iter().map(|&k| &slots[k]).collect();
        let tp: Vec<&Value> = pu.iter().map(|&k| &slots[k]).collect();
        let m = coproduct_map(&inputs[t], &sp, &inputs[u], &tp, &blocks)?;
        Ok(fmap(ctx, f, &evals[t], &evals[u], &m)?.chain().clone())
    })?;
    let total = Arc::new(cube_total_fiber(&cube)?);
    Ok(CrossCube { n, slots: slots.to_vec(), inputs, evals, cube, total })
}

fn empty_object(ctx: &Ctx, like: &Value) -> Result<Value> {
    Ok(match like {
        Value::Alg(_) => Value::Alg(Arc::new(Algebra::free("0", zero_presentation(ctx.op.clone()), 0)?)),
        Value::Chain(c) => Value::Chain(Arc::new(WindowedComplex::zero(c.field))),
    })
}

/// Map of cross-effects induced by slot maps `a.slots[k] → b.slots[k]`.
pub fn cross_map(ctx: &Ctx, f: &FunctorExpr, a: &CrossCube, b: &CrossCube, slot_maps: &[Morph]) -> Result<ChainMap> {
    let n = a.n;
    let mut vertex = vec![];
    for t in 0..(1usize << n) {
        let p = present(t, n);
        let blocks: Vec<Option<(usize, &Morph)>> = p.iter().enumerate().map(|(pos, &k)| Some((pos, &slot_maps[k]))).collect();
        let sp: Vec<&Value> = p.iter().map(|&k| &a.slots[k]).collect();
        let tp: Vec<&Value> = p.iter().map(|&k| &b.slots[k]).collect();
        let m = coproduct_map(&a.inputs[t], &sp, &b.inputs[t], &tp, &blocks)?;
        vertex.push((t, fmap(ctx, f, &a.evals[t], &b.evals[t], &m)?.chain().clone(), false));
    }
    total_fiber_map(&a.cube, &b.cube, a.total.clone(), b.total.clone(), &vertex)
}

/// Action of the transposition of slots `i, i+1` on a cross-effect with equal slots. The cube
/// coordinates are odd, so the vertex `T` picks up a sign when it contains both slots.
pub fn cross_swap(ctx: &Ctx, f: &FunctorExpr, a: &CrossCube, i: usize) -> Result<ChainMap> {
    let n = a.n;
    let tau = |k: usize| if k == i { i + 1 } else if k == i + 1 { i } else { k };
    let ids: Vec<Morph> = a.slots.iter().map(Morph::identity).collect();
    let mut vertex = vec![];
    for t in 0..(1usize << n) {
        let u = members(t, n).into_iter().map(tau).fold(0usize, |acc, k| acc | 1 << k);
        let (pt, pu) = (present(t, n), present(u, n));
        let blocks: Vec<Option<(usize, &Morph)>> =
            pt.iter().map(|&k| Some((pu.iter().position(|&x| x == tau(k)).unwrap(), &ids[k]))).collect();
        let sp: Vec<&Value> = pt.iter().map(|&k| &a.slots[k]).collect();
        let tp: Vec<&Value> = pu.iter().map(|&k| &a.slots[k]).collect();
        let m = coproduct_map(&a.inputs[t], &sp, &a.inputs[u], &tp, &blocks)?;
        let neg = t & (1 << i) != 0 && t & (1 << (i + 1)) != 0;
        vertex.push((u, fmap(ctx, f, &a.evals[t], &a.evals[u], &m)?.chain().clone(), neg));
    }
    total_fiber_map(&a.cube, &a.cube, a.total.clone(), a.total.clone(), &vertex)
}

/// `cr_nF(X_1, …, X_n)` through `top`.
pub fn cross_effect(ctx: &Ctx, f: &FunctorExpr, xs: &[Value], top: i64) -> Result<WindowedComplex> {
    Ok((*cross_cube(ctx, f, xs, top)?.total).clone())
}

/// `cr^nF(W_1, …, W_n)`: total cofiber of `T ↦ F(⊕_{i∈T} W_i)` along the inclusions.
pub fn co_cross_effect(ctx: &Ctx, f: &FunctorExpr, ws: &[Value], top: i64) -> Result<WindowedComplex> {
    if !f.dom.is_chain() || !f.cod.is_chain() {
        return Err(Error::Category(format!("co-cross-effects need a functor between chain categories, got {} → {}", f.dom, f.cod)));
    }
    check_reduced(f)?;
    let n = ws.len();
    let in_top = f.input_top(top);
    let mut inputs = vec![];
    let mut evals = vec![];
    for t in 0..(1usize << n) {
        let parts: Vec<&Value> = members(t, n).into_iter().map(|i| &ws[i]).collect();
        let x = if parts.is_empty() { empty_object(ctx, &ws[0])? } else { coproduct(ctx, &parts, in_top)? };
        evals.push(eval(ctx, f, &x, top)?);
        inputs.push(x);
    }
    let objects: Vec<Arc<WindowedComplex>> = evals.iter().map(|e| e.value.complex().clone()).collect();
    let ids: Vec<Morph> = ws.iter().map(Morph::identity).collect();
    let cube = CubeDiagram::new(n, objects, |t, j| {
        let u = t | 1 << j;
        let (mt, mu) = (members(t, n), members(u, n));
        let blocks: Vec<Option<(usize, &Morph)>> = mt.iter().map(|&k| Some((mu.iter().position(|&x| x == k).unwrap(), &ids[k]))).collect();
        let sp: Vec<&Value> = mt.iter().map(|&k| &ws[k]).collect();
        let tp: Vec<&Value> = mu.iter().map(|&k| &ws[k]).collect();
        let m = coproduct_map(&inputs[t], &sp, &inputs[u], &tp, &blocks)?;
        Ok(fmap(ctx, f, &evals[t], &evals[u], &m)?.chain().clone())
    })?;
    cube_total_cofiber(&cube)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::expr::Cat;
    use crate::chain::homology::homology;
    use crate::chain::ops::scalar_complex;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;
    use std::collections::BTreeMap;

    fn ctx(f: Field) -> Ctx {
        Ctx::new(Arc::new(builtin_operad("Com", 3, f).unwrap()))
    }

    fn line(f: Field, d: i64) -> Value {
        Value::Chain(Arc::new(scalar_complex(f, d, 1)))
    }

    fn betti(c: &WindowedComplex, lo: i64, hi: i64) -> BTreeMap<i64, usize> {
        homology(c).table_on(lo, hi)
    }

    #[test]
    fn tensor_square_cross_and_co_cross() {
        let c = ctx(Field::Q);
        let f = FunctorExpr::parse("Tensor(2)", None).unwrap();
        let xs = [line(Field::Q, 0), line(Field::Q, 0)];
        let cr = cross_effect(&c, &f, &xs, 4).unwrap();
        assert_eq!(betti(&cr, -2, 4), BTreeMap::from([(0, 2)]));
        let co = co_cross_effect(&c, &f, &xs, 4).unwrap();
        assert_eq!(betti(&co, -2, 4), BTreeMap::from([(0, 2)]));
    }

    #[test]
    fn identity_has_no_second_cross_effect() {
        let c = ctx(Field::Q);
        let f = FunctorExpr::parse("Id", Some(Cat::Ch)).unwrap();
        let xs = [line(Field::Q, 1), line(Field::Q, 2)];
        assert!(betti(&cross_effect(&c, &f, &xs, 4).unwrap(), -2, 4).is_empty());
        assert!(betti(&co_cross_effect(&c, &f, &xs, 4).unwrap(), -2, 4).is_empty());
        let one = cross_effect(&c, &f, &xs[..1], 4).unwrap();
        assert_eq!(betti(&one, -2, 4), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn identity_on_algebras_second_cross_effect() {
        // cr_2 Id(O(x), O(y)) over Com≤3 with x, y in degree 0: xy, x²y, xy²
        let c = ctx(Field::Q);
        let f = FunctorExpr::parse("Id", Some(Cat::Alg)).unwrap();
        let gen = |name: &str| {
            let q = QuasiFree::free(c.op.clone(), vec![name.into()], vec![0]).unwrap();
            Value::Alg(Arc::new(Algebra::free(name, q, 4).unwrap()))
        };
        let cr = cross_effect(&c, &f, &[gen("x"), gen("y")], 4).unwrap();
        assert_eq!(betti(&cr, -2, 4), BTreeMap::from([(0, 3)]));
    }

    #[test]
    fn non_reduced_functor_is_rejected() {
        let c = ctx(Field::Q);
        let f = FunctorExpr::parse("Tensor(0)", None).unwrap();
        assert!(cross_effect(&c, &f, &[line(Field::Q, 0)], 2).is_err());
    }

    #[test]
    fn swap_action_on_tensor_square() {
        let c = ctx(Field::Q);
        let f = FunctorExpr::parse("Tensor(2)", None).unwrap();
        let cc = cross_cube(&c, &f, &[line(Field::Q, 0), line(Field::Q, 0)], 3).unwrap();
        let s = cross_swap(&c, &f, &cc, 0).unwrap();
        assert!(s.then(&s).same_as(&ChainMap::identity(cc.total.clone())));
    }
}
