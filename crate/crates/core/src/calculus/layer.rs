//! Layers `D_nF`, Taylor stages `T_nF` over joins, and chain-rule comparisons.

use super::eval::{eval, fmap, Ctx, Evaluated, Morph, Value};
use super::expr::{Cat, FunctorExpr};
use super::orbits::{diagonal_tensor, homotopy_orbits, invariant_dims, tensor_power};
use super::stable::{derivative, stabilized_cross_effect, DerivativeResult, StabilizeOpts, Stabilized};
use crate::algebra::pushout::{pushout_presentation, zero_presentation};
use crate::algebra::{AlgMap, Algebra, Elt};
use crate::bar::bar_algebra;
use crate::chain::cube::{cube_total_fiber, CubeDiagram};
use crate::chain::homology::homology;
use crate::chain::ops::{cone, direct_sum_all, shift};
use crate::chain::{ChainMap, WindowedComplex};
use crate::operad::perm::set_partitions;
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// `Σ^∞X`: `(V, d₁)` for quasi-free algebras, which is quasi-isomorphic to the bar construction
/// and far smaller; the bar construction for other algebras; `X` itself for complexes.
pub fn sigma_inf(x: &Value, top: i64) -> Result<Arc<WindowedComplex>> {
    match x {
        Value::Alg(a) if a.presentation().is_some() => Ok(Arc::new(a.abelianization()?)),
        Value::Alg(a) => Ok(bar_algebra(a.clone(), top)?.complex),
        Value::Chain(c) => Ok(c.clone()),
    }
}

#[derive(Clone, Debug)]
pub struct LayerResult {
    pub n: usize,
    pub derivative: DerivativeResult,
    /// `(∂_nF ⊗ (Σ^∞X)^{⊗n})_{hΣ_n}`.
    pub corollary: WindowedComplex,
    /// `(△̂_nF(X))_{hΣ_n}`.
    pub theorem: WindowedComplex,
    pub stable: Stabilized,
    /// The value lies in algebras and is read as `Ω^∞` of the complexes above.
    pub via_omega_inf: bool,
}

impl LayerResult {
    pub fn betti(&self) -> (BTreeMap<i64, usize>, BTreeMap<i64, usize>) {
        let (lo, hi) = (self.stable.lo, self.stable.hi);
        (homology(&self.corollary).table_on(lo, hi), homology(&self.theorem).table_on(lo, hi))
    }
}

/// `D_nF(X)` by both routes.
pub fn d_n_layer(ctx: &Ctx, f: &FunctorExpr, n: usize, x: &Value, opts: &StabilizeOpts) -> Result<LayerResult> {
    let der = derivative(ctx, f, n, opts)?;
    let top = opts.hi + 1;
    let sx = sigma_inf(x, top)?;
    let power = tensor_power(&sx, n)?;
    let diag = diagonal_tensor(der.object(), &power)?;
    let corollary = homotopy_orbits(&diag, top)?;
    let stable = stabilized_cross_effect(ctx, f, n, x, opts)?;
    let theorem = homotopy_orbits(&stable.object, top)?;
    Ok(LayerResult { n, derivative: der, corollary, theorem, stable, via_omega_inf: f.cod == Cat::Alg })
}

/// Generator (or basis) index maps between joins.
#[derive(Clone, Debug)]
enum IdxMap {
    Alg(Vec<usize>),
    Chain(BTreeMap<i64, Vec<usize>>),
}

fn identity_idx(x: &Value) -> Result<IdxMap> {
    Ok(match x {
        Value::Alg(a) => IdxMap::Alg((0..presentation(a)?.ngens()).collect()),
        Value::Chain(c) => IdxMap::Chain(c.degrees().map(|d| (d, (0..c.dim(d)).collect())).collect()),
    })
}

fn presentation(a: &Algebra) -> Result<&crate::algebra::QuasiFree> {
    Ok(&a.presentation().ok_or_else(|| Error::Invalid(format!("{} is not quasi-free; joins need a presentation", a.name)))?.qf)
}

/// `Y*t`: homotopy cofiber of the fold `∐_t Y → Y`.
fn join_obj(ctx: &Ctx, y: &Value, t: usize, top: i64) -> Result<Value> {
    match y {
        Value::Alg(a) => {
            let yq = presentation(a)?;
            let k = yq.ngens();
            let mut z = zero_presentation(ctx.op.clone());
            for _ in 0..t {
                z = z.coproduct(yq)?;
            }
            let fold: Vec<Elt> = (0..t * k).map(|v| yq.gen(v % k)).collect();
            let zeros = vec![Elt::new(); t * k];
            let q = pushout_presentation(&z, &zero_presentation(ctx.op.clone()), yq, &zeros, &fold)?;
            Ok(Value::Alg(Arc::new(Algebra::free(format!("{}*{t}", a.name), q, top)?)))
        }
        Value::Chain(c) => {
            let copies: Vec<&WindowedComplex> = (0..t).map(|_| c.as_ref()).collect();
            let sum = Arc::new(direct_sum_all(&copies)?);
            let one = c.field.one();
            let fold = ChainMap::from_fn(sum, c.clone(), |deg, i| vec![(i % c.dim(deg), one.clone())])?;
            Ok(Value::Chain(Arc::new(cone(&fold)?)))
        }
    }
}

/// The map `Y*T → Y'*T'` induced by `g: Y → Y'` and `T ⊆ T'`.
fn join_idx(y: &Value, y2: &Value, g: &IdxMap, t: &[usize], t2: &[usize]) -> Result<IdxMap> {
    let pos: Vec<usize> = t.iter().map(|e| t2.iter().position(|x| x == e).unwrap()).collect();
    match (y, y2, g) {
        (Value::Alg(a), Value::Alg(b), IdxMap::Alg(g)) => {
            let (k, k2) = (presentation(a)?.ngens(), presentation(b)?.ngens());
            let mut out: Vec<usize> = g.clone();
            for &c in &pos {
                out.extend((0..k).map(|v| k2 + c * k2 + g[v]));
            }
            Ok(IdxMap::Alg(out))
        }
        (Value::Chain(a), Value::Chain(b), IdxMap::Chain(g)) => {
            let mut out = BTreeMap::new();
            let lo = a.lo().min(a.lo() + 1);
            for deg in lo..=a.hi() + 1 {
                let (ny, ny1) = (a.dim(deg), a.dim(deg - 1));
                let (my, my1) = (b.dim(deg), b.dim(deg - 1));
                let mut v: Vec<usize> = (0..ny).map(|i| g[&deg][i]).collect();
                for &c in &pos {
                    v.extend((0..ny1).map(|r| my + c * my1 + g[&(deg - 1)][r]));
                }
                out.insert(deg, v);
            }
            Ok(IdxMap::Chain(out))
        }
        _ => Err(Error::Category("join map between different categories".into())),
    }
}

fn idx_morph(src: &Value, tgt: &Value, m: &IdxMap) -> Result<Morph> {
    match (src, tgt, m) {
        (Value::Alg(a), Value::Alg(b), IdxMap::Alg(g)) => {
            let bq = presentation(b)?;
            let images: Vec<Elt> = g.iter().map(|&w| bq.gen(w)).collect();
            Ok(Morph::Alg(AlgMap::from_elts(a.clone(), b.clone(), &images)?))
        }
        (Value::Chain(a), Value::Chain(b), IdxMap::Chain(g)) => {
            let one = a.field.one();
            Ok(Morph::Chain(ChainMap::from_fn(a.clone(), b.clone(), |deg, i| vec![(g[&deg][i], one.clone())])?))
        }
        _ => Err(Error::Category("join map between different categories".into())),
    }
}

fn members(t: usize, m: usize) -> Vec<usize> {
    (0..m).filter(|i| t & (1 << i) != 0).collect()
}

/// `T_n^{(i)}F(X)`: the `i`-fold iterate of `holim_{∅≠T⊆[n+1]} F(X*T)`, realized through `top`.
/// It is the total fiber of the `i(n+1)`-cube that is zero wherever some level is empty,
/// shifted up by `i`.
pub fn taylor_stage(ctx: &Ctx, f: &FunctorExpr, n: usize, x: &Value, iterations: usize, top: i64) -> Result<WindowedComplex> {
    if !x.fits(f.dom) {
        return Err(Error::Category(format!("input does not lie in {}", f.dom)));
    }
    if iterations == 0 {
        return Ok((**eval(ctx, f, x, top)?.value.complex()).clone());
    }
    let m = n + 1;
    let dim = iterations * m;
    let vtop = top + dim as i64 + 2;
    let in_top = f.input_top(vtop);
    let level = |u: usize, j: usize| (u >> (j * m)) & ((1 << m) - 1);
    // joins by level prefix
    let mut joins: HashMap<Vec<usize>, Value> = HashMap::new();
    let mut chain_of = |u: usize| -> Result<Option<Vec<Value>>> {
        let mut out = vec![x.clone()];
        let mut key = vec![];
        for j in 0..iterations {
            let t = level(u, j);
            if t == 0 {
                return Ok(None);
            }
            key.push(t);
            if !joins.contains_key(&key) {
                let v = join_obj(ctx, out.last().unwrap(), t.count_ones() as usize, in_top)?;
                joins.insert(key.clone(), v);
            }
            out.push(joins[&key].clone());
        }
        Ok(Some(out))
    };
    let mut chains: Vec<Option<Vec<Value>>> = vec![];
    let mut evals: Vec<Option<Evaluated>> = vec![];
    for u in 0..(1usize << dim) {
        let c = chain_of(u)?;
        evals.push(match &c {
            Some(c) => Some(eval(ctx, f, c.last().unwrap(), vtop)?),
            None => None,
        });
        chains.push(c);
    }
    let zero = Arc::new(WindowedComplex::zero(ctx.field()));
    let objects: Vec<Arc<WindowedComplex>> = evals.iter().map(|e| e.as_ref().map_or(zero.clone(), |e| e.value.complex().clone())).collect();
    let cube = CubeDiagram::new(dim, objects.clone(), |u, b| {
        let w = u | 1 << b;
        let (Some(cu), Some(cw)) = (&chains[u], &chains[w]) else {
            return Ok(ChainMap::zero(objects[u].clone(), objects[w].clone()));
        };
        let mut g = identity_idx(x)?;
        for j in 0..iterations {
            g = join_idx(&cu[j], &cw[j], &g, &members(level(u, j), m), &members(level(w, j), m))?;
        }
        let mor = idx_morph(&cu[iterations], &cw[iterations], &g)?;
        Ok(fmap(ctx, f, evals[u].as_ref().unwrap(), evals[w].as_ref().unwrap(), &mor)?.chain().clone())
    })?;
    let t = cube_total_fiber(&cube)?;
    Ok(shift(&t, iterations as i64).truncate_above(top + 1))
}

/// One degree of a chain-rule comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRuleRow {
    pub deg: i64,
    pub lhs: usize,
    pub rhs: usize,
    pub lhs_invariants: usize,
}

#[derive(Clone, Debug)]
pub struct ChainRuleReport {
    pub n: usize,
    pub lhs: DerivativeResult,
    pub rows: Vec<ChainRuleRow>,
    pub equal: bool,
}

fn convolve(a: &BTreeMap<i64, usize>, b: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for (da, x) in a {
        for (db, y) in b {
            *out.entry(da + db).or_insert(0) += x * y;
        }
    }
    out.retain(|_, v| *v > 0);
    out
}

/// Betti numbers of `(A∘B)(n) = ⊕_π A(|π|) ⊗ ⊗_{b∈π} B(|b|)` over set partitions of `[n]`.
pub fn composition_betti(a: &dyn Fn(usize) -> BTreeMap<i64, usize>, b: &dyn Fn(usize) -> BTreeMap<i64, usize>, n: usize) -> BTreeMap<i64, usize> {
    let elems: Vec<usize> = (0..n).collect();
    let mut total = BTreeMap::new();
    for pi in set_partitions(&elems) {
        let mut t = a(pi.len());
        for block in &pi {
            t = convolve(&t, &b(block.len()));
        }
        for (d, v) in t {
            *total.entry(d).or_insert(0) += v;
        }
    }
    total
}

/// Compares `∂_n(F∘G)` with `(∂_*F ∘ ∂_*G)(n)` degree by degree.
pub fn chain_rule_check(ctx: &Ctx, f: &FunctorExpr, g: &FunctorExpr, n: usize, opts: &StabilizeOpts) -> Result<ChainRuleReport> {
    let fg = FunctorExpr::compose(f.clone(), g.clone())?;
    let lhs = derivative(ctx, &fg, n, opts)?;
    let mut df = vec![BTreeMap::new()];
    let mut dg = vec![BTreeMap::new()];
    for k in 1..=n {
        df.push(derivative(ctx, f, k, opts)?.betti());
        dg.push(derivative(ctx, g, k, opts)?.betti());
    }
    let rhs = composition_betti(&|k| df[k].clone(), &|k| dg[k].clone(), n);
    let lb = lhs.betti();
    let inv = invariant_dims(lhs.object());
    let rows: Vec<ChainRuleRow> = (opts.lo..=opts.hi)
        .map(|d| ChainRuleRow {
            deg: d,
            lhs: lb.get(&d).copied().unwrap_or(0),
            rhs: rhs.get(&d).copied().unwrap_or(0),
            lhs_invariants: inv.get(&d).copied().unwrap_or(0),
        })
        .collect();
    let equal = rows.iter().all(|r| r.lhs == r.rhs);
    Ok(ChainRuleReport { n, lhs, rows, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{suspension_closed, QuasiFree};
    use crate::chain::ops::scalar_complex;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;

    fn ctx() -> Ctx {
        Ctx::new(Arc::new(builtin_operad("Com", 3, Field::Q).unwrap()))
    }

    fn free(c: &Ctx, degs: &[i64], top: i64) -> Value {
        let labels = (0..degs.len()).map(|i| format!("x{i}")).collect();
        let q = QuasiFree::free(c.op.clone(), labels, degs.to_vec()).unwrap();
        Value::Alg(Arc::new(Algebra::free("X", q, top).unwrap()))
    }

    fn parse(s: &str, c: Cat) -> FunctorExpr {
        FunctorExpr::parse(s, Some(c)).unwrap()
    }

    #[test]
    fn first_stage_of_identity_loops_the_suspension() {
        let c = ctx();
        let x = free(&c, &[0], 5);
        let t = taylor_stage(&c, &parse("Id", Cat::Alg), 1, &x, 1, 3).unwrap();
        let q = presentation(x.alg().unwrap()).unwrap();
        let sx = Algebra::free("ΣX", suspension_closed(q), 5).unwrap();
        let want: BTreeMap<i64, usize> = homology(&sx.complex).table_on(0, 4).into_iter().map(|(d, b)| (d - 1, b)).collect();
        assert_eq!(homology(&t).table_on(0, 3), want);
        assert_eq!(want, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn generator_model_of_sigma_inf_matches_the_bar_construction() {
        let c = ctx();
        let mut q = QuasiFree::free(c.op.clone(), vec!["x".into(), "y".into()], vec![0, 1]).unwrap();
        q.dgen[1] = q.product(2, 0, &[&q.gen(0), &q.gen(0)]);
        for x in [free(&c, &[0], 4), Value::Alg(Arc::new(Algebra::free("X", q, 4).unwrap()))] {
            let small = sigma_inf(&x, 3).unwrap();
            let bar = bar_algebra(x.alg().unwrap().clone(), 3).unwrap().complex;
            assert_eq!(homology(&small).table_on(0, 2), homology(&bar).table_on(0, 2));
        }
    }

    #[test]
    fn zero_functor_has_zero_stages() {
        let c = ctx();
        let x = free(&c, &[0], 5);
        let t = taylor_stage(&c, &parse("0", Cat::Alg), 1, &x, 1, 3).unwrap();
        assert!(homology(&t).table().is_empty());
    }

    #[test]
    fn suspension_spectrum_is_linear() {
        let c = ctx();
        let x = free(&c, &[1], 6);
        let t = taylor_stage(&c, &parse("SigmaInf", Cat::Alg), 1, &x, 1, 3).unwrap();
        let direct = sigma_inf(&x, 5).unwrap();
        assert_eq!(homology(&t).table_on(0, 3), homology(&direct).table_on(0, 3));
        assert_eq!(homology(&t).table_on(0, 3), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn iterated_linear_stages_of_a_square() {
        // T_1(X^{⊗2}) = Ω(ΣX)^{⊗2} = s X^{⊗2}; each iteration suspends once more
        let c = ctx();
        let x = Value::Chain(Arc::new(scalar_complex(Field::Q, 0, 1)));
        let f = parse("Tensor(2)", Cat::Ch);
        for i in 1..=2 {
            let t = taylor_stage(&c, &f, 1, &x, i, 4).unwrap();
            assert_eq!(homology(&t).table_on(0, 4), BTreeMap::from([(i as i64, 1)]), "i = {i}");
        }
        let t2 = taylor_stage(&c, &f, 2, &x, 1, 3).unwrap();
        assert_eq!(homology(&t2).table_on(0, 3), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn layers_of_the_identity_agree() {
        let c = ctx();
        let f = parse("Id", Cat::Alg);
        for (degs, n, want) in [(vec![0], 1, vec![(0, 1)]), (vec![0], 2, vec![(0, 1)]), (vec![0, 0], 2, vec![(0, 3)])] {
            let x = free(&c, &degs, 6);
            let l = d_n_layer(&c, &f, n, &x, &StabilizeOpts::new(0, 2)).unwrap();
            let (a, b) = l.betti();
            assert_eq!(a, b, "{degs:?} n={n}");
            assert_eq!(a, want.into_iter().collect(), "{degs:?} n={n}");
        }
    }

    #[test]
    fn layer_of_zero_input_vanishes() {
        let c = ctx();
        let x = Value::Chain(Arc::new(WindowedComplex::zero(Field::Q)));
        let l = d_n_layer(&c, &parse("Tensor(2)", Cat::Ch), 2, &x, &StabilizeOpts::new(0, 3)).unwrap();
        assert_eq!(l.betti(), (BTreeMap::new(), BTreeMap::new()));
    }

    #[test]
    fn composition_product_counts() {
        let one = |k: usize| if k == 1 { BTreeMap::from([(0, 1)]) } else { BTreeMap::new() };
        let bar = |k: usize| match k {
            1 => BTreeMap::from([(0, 1)]),
            2 => BTreeMap::from([(1, 1)]),
            3 => BTreeMap::from([(2, 2)]),
            _ => BTreeMap::new(),
        };
        assert_eq!(composition_betti(&bar, &one, 3), bar(3));
        assert_eq!(composition_betti(&bar, &bar, 2), BTreeMap::from([(1, 2)]));
        // one block, three pair-singleton splits, three singletons
        assert_eq!(composition_betti(&bar, &bar, 3), BTreeMap::from([(2, 2 + 3 + 2)]));
    }

    #[test]
    fn chain_rule_with_identity_inside() {
        let c = ctx();
        let r = chain_rule_check(&c, &parse("Tensor(2)", Cat::Ch), &parse("Id", Cat::Ch), 2, &StabilizeOpts::new(0, 3)).unwrap();
        assert!(r.equal, "{:?}", r.rows);
    }
}
