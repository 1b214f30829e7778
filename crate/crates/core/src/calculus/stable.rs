//! Stabilized cross-effects `△̂_nF(X)` along diagonal suspensions, and derivatives `∂_nF`.
//!
//! Stage `p` is `s^{-np} cr_nF(Σ^pX, …, Σ^pX)`. The structure map to stage `p+1` is computed in
//! homology one slot at a time through `Y → CY → ΣY`: a cycle `z` is pushed into the cone slot,
//! bounded there, and the bounding chain is projected onto the suspension slot. The stable value
//! is the image of that map, once three consecutive stages agree on ranks.

use super::cross::{cross_cube, cross_map, cross_swap, CrossCube};
use super::eval::{Ctx, Morph, Value};
use super::expr::{Cat, FunctorExpr};
use crate::algebra::pushout::{pushout_presentation, zero_presentation};
use crate::algebra::{AlgMap, Algebra, Elt, QuasiFree};
use crate::chain::homology::{homology, HomologyReport};
use crate::chain::ops::{cone, scalar_complex, shift};
use crate::chain::sym::SymmetricComplex;
use crate::chain::{ChainMap, WindowedComplex};
use crate::linalg::matrix::{axpy, SVec};
use crate::linalg::{rank, reduce, Echelon, SparseMatrix};
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct StabilizeOpts {
    /// Window of the desuspended stages.
    pub lo: i64,
    pub hi: i64,
    /// First stage; defaults to 0, or `hi + 1` for functors built from bar constructions.
    pub p0: Option<i64>,
    /// Last stage that may be computed.
    pub max_p: Option<i64>,
}

impl StabilizeOpts {
    pub fn new(lo: i64, hi: i64) -> Self {
        StabilizeOpts { lo, hi, p0: None, max_p: None }
    }

    pub fn first(&self, f: &FunctorExpr) -> i64 {
        self.p0.unwrap_or(if f.uses_bar() { self.hi + 1 } else { 0 })
    }

    pub fn last(&self, f: &FunctorExpr) -> i64 {
        self.max_p.unwrap_or(self.first(f) + 4)
    }
}

/// Desuspended betti table of one stage, and ranks of its map to the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub p: i64,
    pub betti: BTreeMap<i64, usize>,
    pub map_rank: BTreeMap<i64, usize>,
}

#[derive(Clone, Debug)]
pub struct Stabilized {
    pub n: usize,
    pub lo: i64,
    pub hi: i64,
    /// Accepted stage: the maps out of stages `p` and `p+1` and their composite have equal rank.
    pub p: i64,
    pub stages: Vec<StageRecord>,
    pub composite_rank: BTreeMap<i64, usize>,
    /// Image of stage `p` in stage `p+1`, zero differential, induced action.
    pub object: SymmetricComplex,
}

impl Stabilized {
    pub fn betti(&self) -> BTreeMap<i64, usize> {
        (self.lo..=self.hi).map(|d| (d, self.object.complex.dim(d))).filter(|e| e.1 > 0).collect()
    }
}

/// `Y → CY → ΣY` with `q∘i = 0` and `CY` acyclic.
#[derive(Clone, Debug)]
struct SuspStep {
    cone: Value,
    next: Value,
    i: Morph,
    q: Morph,
}

fn susp_step(ctx: &Ctx, y: &Value, top: i64) -> Result<SuspStep> {
    match y {
        Value::Chain(yc) => {
            let one = yc.field.one();
            let c = Arc::new(cone(&ChainMap::identity(yc.clone()))?);
            let s = Arc::new(shift(yc, 1));
            let i = ChainMap::from_fn(yc.clone(), c.clone(), |_, k| vec![(k, one.clone())])?;
            let q = ChainMap::from_fn(c.clone(), s.clone(), |deg, k| {
                let nt = yc.dim(deg);
                if k < nt { vec![] } else { vec![(k - nt, one.clone())] }
            })?;
            Ok(SuspStep { cone: Value::Chain(c), next: Value::Chain(s), i: Morph::Chain(i), q: Morph::Chain(q) })
        }
        Value::Alg(a) => {
            if a.field().characteristic() != 0 {
                return Err(Error::Invalid("suspending algebras uses the cylinder e^θ, which needs characteristic 0".into()));
            }
            let yq = &a.presentation().ok_or_else(|| Error::Invalid(format!("{} is not quasi-free", a.name)))?.qf;
            let n = yq.ngens();
            let zero = zero_presentation(ctx.op.clone());
            let gens: Vec<Elt> = (0..n).map(|v| yq.gen(v)).collect();
            let zeros = vec![Elt::new(); n];
            let cq = pushout_presentation(yq, yq, &zero, &gens, &zeros)?;
            let sq = pushout_presentation(yq, &zero, &zero, &zeros, &zeros)?;
            let ca = Arc::new(Algebra::free(format!("C{}", a.name), cq.clone(), top)?);
            let sa = Arc::new(Algebra::free(format!("Σ{}", a.name), sq.clone(), top)?);
            let i = AlgMap::from_elts(a.clone(), ca.clone(), &(0..n).map(|v| cq.gen(v)).collect::<Vec<_>>())?;
            let qi: Vec<Elt> = (0..2 * n).map(|v| if v < n { Elt::new() } else { sq.gen(v - n) }).collect();
            let q = AlgMap::from_elts(ca.clone(), sa.clone(), &qi)?;
            Ok(SuspStep { cone: Value::Alg(ca), next: Value::Alg(sa), i: Morph::Alg(i), q: Morph::Alg(q) })
        }
    }
}

struct Stage {
    p: i64,
    slot: Value,
    cube: CrossCube,
    hom: HomologyReport,
}

fn stage_top(hi: i64, n: usize, p: i64) -> i64 {
    let n = n as i64;
    hi + n * (p + 1) + n + 2
}

fn build_stage(ctx: &Ctx, f: &FunctorExpr, slot: Value, n: usize, p: i64, hi: i64) -> Result<Stage> {
    let cube = cross_cube(ctx, f, &vec![slot.clone(); n], stage_top(hi, n, p))?;
    let hom = homology(&cube.total.truncate_above(hi + n as i64 * p + 1));
    Ok(Stage { p, slot, cube, hom })
}

/// Matrices (per desuspended degree) of the structure map `H(stage p) → H(stage p+1)`.
fn connecting(ctx: &Ctx, f: &FunctorExpr, a: &Stage, b: &Stage, step: &SuspStep, lo: i64, hi: i64) -> Result<BTreeMap<i64, SparseMatrix>> {
    let n = a.cube.n;
    let top = stage_top(hi, n, a.p);
    let mixed = |j: usize, mid: Option<&Value>| -> Vec<Value> {
        let mut s = vec![b.slot.clone(); j];
        if let Some(m) = mid {
            s.push(m.clone());
            s.extend(vec![a.slot.clone(); n - j - 1]);
        } else {
            s.extend(vec![a.slot.clone(); n - j]);
        }
        s
    };
    let mut cones = vec![];
    let mut between: Vec<Option<CrossCube>> = vec![None];
    for j in 0..n {
        cones.push(cross_cube(ctx, f, &mixed(j, Some(&step.cone)), top)?);
        between.push(if j + 1 < n { Some(cross_cube(ctx, f, &mixed(j + 1, None), top)?) } else { None });
    }
    let cube_at = |j: usize| -> &CrossCube {
        if j == 0 {
            &a.cube
        } else if j == n {
            &b.cube
        } else {
            between[j].as_ref().unwrap()
        }
    };
    let mut ins = vec![];
    let mut outs = vec![];
    for j in 0..n {
        let slot_maps = |m: &Morph, src: &CrossCube| -> Vec<Morph> {
            (0..n).map(|k| if k == j { m.clone() } else { Morph::identity(&src.slots[k]) }).collect()
        };
        ins.push(cross_map(ctx, f, cube_at(j), &cones[j], &slot_maps(&step.i, cube_at(j)))?);
        outs.push(cross_map(ctx, f, &cones[j], cube_at(j + 1), &slot_maps(&step.q, &cones[j]))?);
    }
    let mut solvers = HashMap::new();
    let mut out = BTreeMap::new();
    for d in lo..=hi {
        let deg0 = d + (n as i64) * a.p;
        let reps = a.hom.reps.get(&deg0).cloned().unwrap_or_default();
        let mut cols = vec![];
        for z in &reps {
            let mut v = z.clone();
            let mut deg = deg0;
            for j in 0..n {
                let iz = ins[j].apply(deg, &v);
                let key = (j, deg + 1);
                if let std::collections::hash_map::Entry::Vacant(e) = solvers.entry(key) {
                    e.insert(reduce(&cones[j].total.d(deg + 1))?);
                }
                let w = solvers[&key]
                    .solve_sparse(&iz)
                    .ok_or_else(|| Error::Invalid(format!("cone stage is not acyclic in degree {deg}")))?;
                v = outs[j].apply(deg + 1, &w);
                deg += 1;
            }
            let c = b.hom.class_of(deg, &v).ok_or_else(|| Error::Invalid(format!("connecting map left the cycles in degree {deg}")))?;
            cols.push(c);
        }
        let rows = b.hom.betti(d + (n as i64) * b.p);
        out.insert(d, SparseMatrix::from_cols(a.hom.field, rows, cols));
    }
    Ok(out)
}

fn desuspended_betti(s: &Stage, lo: i64, hi: i64) -> BTreeMap<i64, usize> {
    let n = s.cube.n as i64;
    (lo..=hi).map(|d| (d, s.hom.betti(d + n * s.p))).filter(|e| e.1 > 0).collect()
}

fn ranks(m: &BTreeMap<i64, SparseMatrix>) -> BTreeMap<i64, usize> {
    m.iter().map(|(d, x)| (*d, rank(x))).filter(|e| e.1 > 0).collect()
}

/// The image of `m` (per degree) inside `H(s)` as a symmetric complex with the induced action.
fn image_object(ctx: &Ctx, f: &FunctorExpr, s: &Stage, m: &BTreeMap<i64, SparseMatrix>, lo: i64, hi: i64) -> Result<SymmetricComplex> {
    let n = s.cube.n;
    let fl = s.hom.field;
    let sign = fl.sign(s.p.rem_euclid(2) == 1);
    let swaps: Vec<ChainMap> = (0..n.saturating_sub(1)).map(|i| cross_swap(ctx, f, &s.cube, i)).collect::<Result<_>>()?;
    let mut labels = vec![];
    let mut ds = vec![];
    let mut actions: Vec<BTreeMap<i64, SparseMatrix>> = vec![BTreeMap::new(); swaps.len()];
    for d in lo..=hi {
        let deg = d + (n as i64) * s.p;
        let nb = s.hom.betti(deg);
        let mut e = Echelon::new(fl, nb);
        let mut basis: Vec<SVec> = vec![];
        for col in m[&d].cols_iter() {
            if e.insert(col).is_some() {
                basis.push(col.clone());
            }
        }
        let bm = SparseMatrix::from_cols(fl, nb, basis.clone());
        let red = reduce(&bm)?;
        let reps = s.hom.reps.get(&deg).cloned().unwrap_or_default();
        for (i, sw) in swaps.iter().enumerate() {
            let mut cols = vec![];
            for v in &basis {
                let mut z = vec![];
                for (k, x) in v {
                    axpy(&mut z, x, &reps[*k]);
                }
                let img = sw.apply(deg, &z);
                let c = s.hom.class_of(deg, &img).ok_or_else(|| Error::Invalid("slot swap does not preserve cycles".into()))?;
                let c: SVec = c.into_iter().map(|(r, x)| (r, x.mul(&sign))).collect();
                let coords = red.solve_sparse(&c).ok_or_else(|| Error::Invalid(format!("stable image is not Σ_{n}-stable in degree {d}")))?;
                cols.push(coords);
            }
            actions[i].insert(d, SparseMatrix::from_cols(fl, basis.len(), cols));
        }
        let k = basis.len();
        let below = labels.last().map_or(0, |l: &Vec<String>| l.len());
        labels.push((0..k).map(|j| format!("h{d}.{j}")).collect());
        ds.push(SparseMatrix::zero(fl, if d == lo { 0 } else { below }, k));
    }
    let c = Arc::new(WindowedComplex::new(fl, lo, labels, ds, true)?);
    SymmetricComplex::new(n, c, actions)
}

/// `△̂_nF(X)` on the desuspended window, with the stage records.
pub fn stabilized_cross_effect(ctx: &Ctx, f: &FunctorExpr, n: usize, x: &Value, opts: &StabilizeOpts) -> Result<Stabilized> {
    if !x.fits(f.dom) {
        return Err(Error::Category(format!("input does not lie in {}", f.dom)));
    }
    let (lo, hi) = (opts.lo, opts.hi);
    let (p0, max_p) = (opts.first(f), opts.last(f));
    if p0 < 0 || max_p < p0 + 2 {
        return Err(Error::Invalid(format!("need 0 ≤ p0 and max_p ≥ p0 + 2 (p0 = {p0}, max_p = {max_p})")));
    }
    let mut slot = x.clone();
    for p in 0..p0 {
        slot = susp_step(ctx, &slot, f.input_top(stage_top(hi, n, p)))?.next;
    }
    let mut cur = build_stage(ctx, f, slot, n, p0, hi)?;
    let mut records: Vec<StageRecord> = vec![];
    let mut prev: Option<(Stage, BTreeMap<i64, SparseMatrix>)> = None;
    for p in p0..max_p {
        let step = susp_step(ctx, &cur.slot, f.input_top(stage_top(hi, n, p)))?;
        let next = build_stage(ctx, f, step.next.clone(), n, p + 1, hi)?;
        let m = connecting(ctx, f, &cur, &next, &step, lo, hi)?;
        records.push(StageRecord { p, betti: desuspended_betti(&cur, lo, hi), map_rank: ranks(&m) });
        if let Some((_, pm)) = &prev {
            let comp: BTreeMap<i64, SparseMatrix> = (lo..=hi).map(|d| (d, m[&d].mul(&pm[&d]))).collect();
            let (r0, r1, r01) = (ranks(pm), ranks(&m), ranks(&comp));
            if r0 == r1 && r1 == r01 {
                records.push(StageRecord { p: p + 1, betti: desuspended_betti(&next, lo, hi), map_rank: BTreeMap::new() });
                let object = image_object(ctx, f, &cur, pm, lo, hi)?;
                return Ok(Stabilized { n, lo, hi, p: p - 1, stages: records, composite_rank: r01, object });
            }
        }
        prev = Some((cur, m));
        cur = next;
    }
    Err(Error::Unstable(max_p))
}

/// `∂_nF`, with its stabilization record.
#[derive(Clone, Debug)]
pub struct DerivativeResult {
    pub n: usize,
    pub functor: String,
    pub stable: Stabilized,
}

impl DerivativeResult {
    pub fn betti(&self) -> BTreeMap<i64, usize> {
        self.stable.betti()
    }

    pub fn object(&self) -> &SymmetricComplex {
        &self.stable.object
    }
}

/// `O(k)` for algebra domains, `k` in degree 0 for chain domains.
pub fn canonical_point(ctx: &Ctx, dom: Cat) -> Result<Value> {
    Ok(match dom {
        Cat::Alg => {
            let q = QuasiFree::free(ctx.op.clone(), vec!["x".into()], vec![0])?;
            Value::Alg(Arc::new(Algebra::free("O(k)", q, 0)?))
        }
        _ => Value::Chain(Arc::new(scalar_complex(ctx.field(), 0, 1))),
    })
}

pub fn derivative(ctx: &Ctx, f: &FunctorExpr, n: usize, opts: &StabilizeOpts) -> Result<DerivativeResult> {
    if n == 0 {
        return Err(Error::Invalid("derivatives start at arity 1".into()));
    }
    let x = canonical_point(ctx, f.dom)?;
    let stable = stabilized_cross_effect(ctx, f, n, &x, opts)?;
    Ok(DerivativeResult { n, functor: f.to_string(), stable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;

    fn ctx(name: &str) -> Ctx {
        Ctx::new(Arc::new(builtin_operad(name, 3, Field::Q).unwrap()))
    }

    fn parse(s: &str, c: Cat) -> FunctorExpr {
        FunctorExpr::parse(s, Some(c)).unwrap()
    }

    #[test]
    fn identity_on_chains_is_its_own_stabilization() {
        let c = ctx("Com");
        let x = Value::Chain(Arc::new(scalar_complex(Field::Q, 1, 2)));
        let s = stabilized_cross_effect(&c, &parse("Id", Cat::Ch), 1, &x, &StabilizeOpts::new(0, 4)).unwrap();
        assert_eq!(s.betti(), BTreeMap::from([(1, 2)]));
        assert_eq!(s.p, 0);
    }

    #[test]
    fn tensor_square_derivative() {
        let c = ctx("Com");
        let d = derivative(&c, &parse("Tensor(2)", Cat::Ch), 2, &StabilizeOpts::new(0, 4)).unwrap();
        assert_eq!(d.betti(), BTreeMap::from([(0, 2)]));
        assert!(d.object().check().is_empty());
        // regular representation of Σ_2: the swap has trace 0
        let s = d.object().swap(0, 0);
        assert_eq!(s.get(0, 0).add(&s.get(1, 1)), Field::Q.zero());
        let d1 = derivative(&c, &parse("Tensor(2)", Cat::Ch), 1, &StabilizeOpts::new(0, 4)).unwrap();
        assert!(d1.betti().is_empty());
    }

    #[test]
    fn identity_on_algebras_matches_the_operad() {
        for (op, n, want) in [("Com", 1, 1), ("Com", 2, 1), ("Assoc", 2, 2)] {
            let c = ctx(op);
            let d = derivative(&c, &parse("Id", Cat::Alg), n, &StabilizeOpts::new(0, 4)).unwrap();
            assert_eq!(d.betti(), BTreeMap::from([(0, want)]), "{op} n={n}");
        }
    }

    #[test]
    fn unstable_runs_fail_loudly() {
        let c = ctx("Com");
        let o = StabilizeOpts { lo: 0, hi: 2, p0: Some(0), max_p: Some(1) };
        assert!(derivative(&c, &parse("Id", Cat::Alg), 2, &o).is_err());
    }
}
