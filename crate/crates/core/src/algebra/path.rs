//! Path objects `red₀(Λ_L ⊗ X)`, homotopy pullbacks as equalizers, and loop algebras.

use super::{unit_vec, AlgMap, Algebra, Coef, Kind};
use crate::chain::homology::induced_homology_map;
use crate::chain::ops::{shift, truncate_nonneg};
use crate::chain::{ChainMap, WindowedComplex};
use crate::linalg::matrix::axpy;
use crate::linalg::{reduce, SVec, SparseMatrix};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// `Λ_L ⊗ X` with the diagonal structure, in degrees `lo(X) - 1 ..`.
pub fn path_full(x: Arc<Algebra>, l: usize) -> Result<Algebra> {
    if l == 0 {
        return Err(Error::Invalid("t-degree bound must be at least 1".into()));
    }
    let f = x.field();
    let c = &x.complex;
    let bounded = c.bounded();
    let lo = c.lo() - 1;
    let hi = if bounded { c.hi() } else { c.hi() - 1 };
    let mut labels = vec![];
    let mut ds = vec![];
    for n in lo..=hi.max(lo) {
        let (n0, n1) = (c.dim(n), c.dim(n + 1));
        let mut lab = vec![];
        for a in 0..=l {
            lab.extend(c.labels(n).iter().map(|s| if a == 0 { s.clone() } else { format!("t^{a}*{s}") }));
        }
        for a in 0..l {
            lab.extend(c.labels(n + 1).iter().map(|s| if a == 0 { format!("dt*{s}") } else { format!("t^{a}dt*{s}") }));
        }
        let rows = if n == lo { 0 } else { (l + 1) * c.dim(n - 1) + l * n0 };
        let mut cols: Vec<SVec> = vec![];
        for a in 0..=l {
            for i in 0..n0 {
                let mut v = vec![];
                if a > 0 && n > lo {
                    v.push(((l + 1) * c.dim(n - 1) + (a - 1) * n0 + i, f.int(a as i64)));
                }
                if n > lo {
                    let dx = c.apply_d(n, &unit_vec(f, i));
                    let w: SVec = dx.into_iter().map(|(r, e)| (a * c.dim(n - 1) + r, e)).collect();
                    axpy(&mut v, &f.one(), &w);
                }
                cols.push(v);
            }
        }
        for a in 0..l {
            for i in 0..n1 {
                let mut v = vec![];
                if n > lo {
                    let dy = c.apply_d(n + 1, &unit_vec(f, i));
                    v = dy.into_iter().map(|(r, e)| ((l + 1) * c.dim(n - 1) + a * n0 + r, e.neg())).collect();
                }
                cols.push(v);
            }
        }
        labels.push(lab);
        ds.push(SparseMatrix::from_cols(f, rows, cols));
    }
    let complex = WindowedComplex::new(f, lo, labels, ds, bounded)?;
    Ok(Algebra {
        name: format!("Λ{l}⊗{}", x.name),
        op: x.op.clone(),
        complex: Arc::new(complex),
        kind: Kind::Path { l, x },
    })
}

/// Evaluation `t ↦ at`, `dt ↦ 0` on a vector of `Λ_L ⊗ X` in degree `n`.
fn evaluate(full: &Algebra, n: i64, v: &SVec, at: u8) -> SVec {
    let Kind::Path { l, x } = &full.kind else { unreachable!() };
    let mut out = vec![];
    for (i, c) in v {
        let (coef, _, xi) = Algebra::path_decode(*l, x, n, *i);
        if let Coef::T(a) = coef {
            if at == 1 || a == 0 {
                axpy(&mut out, c, &unit_vec(full.field(), xi));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct PathObject {
    pub full: Arc<Algebra>,
    pub path: Arc<Algebra>,
    pub p0: AlgMap,
    pub p1: AlgMap,
    pub s0: AlgMap,
}

/// `X^I = red₀(Λ_L ⊗ X)` with the evaluations `p0, p1` and the constant section `s0`.
pub fn path_object(x: Arc<Algebra>, l: usize) -> Result<PathObject> {
    let f = x.field();
    let full = Arc::new(path_full(x.clone(), l)?);
    let fc = &full.complex;
    let mut spans: BTreeMap<i64, Vec<SVec>> = BTreeMap::new();
    for n in fc.degrees() {
        if n < 0 {
            continue;
        }
        if n == 0 {
            spans.insert(0, reduce(&fc.d(0))?.kernel.into_cols());
        } else {
            spans.insert(n, (0..fc.dim(n)).map(|i| unit_vec(f, i)).collect());
        }
    }
    let path = Arc::new(Algebra::sub(format!("{}^I", x.name), full.clone(), spans)?);
    let Kind::Sub { basis, .. } = &path.kind else { unreachable!() };
    let eval = |at: u8| {
        ChainMap::from_fn(path.complex.clone(), x.complex.clone(), |n, i| evaluate(&full, n, basis[&n].stored(i), at))
    };
    let p0 = AlgMap { source: path.clone(), target: x.clone(), chain: eval(0)? };
    let p1 = AlgMap { source: path.clone(), target: x.clone(), chain: eval(1)? };
    let s0c = ChainMap::from_fn(x.complex.clone(), path.complex.clone(), |n, i| {
        basis.get(&n).and_then(|e| e.coords(&unit_vec(f, i))).unwrap_or_default()
    })?;
    let s0 = AlgMap { source: x.clone(), target: path.clone(), chain: s0c };
    Ok(PathObject { full, path, p0, p1, s0 })
}

/// `P_D = X ×_Z Z^I ×_Z Y` for `g: X → Z`, `f: Y → Z`, as a sub-object of the product.
pub fn homotopy_pullback(g: &AlgMap, f: &AlgMap, l: usize) -> Result<(Algebra, PathObject)> {
    if !Arc::ptr_eq(&g.target, &f.target) && g.target.complex != f.target.complex {
        return Err(Error::Invalid("pullback legs have different targets".into()));
    }
    let z = g.target.clone();
    let po = path_object(z.clone(), l)?;
    let prod = Arc::new(Algebra::product(
        format!("{}×{}×{}", g.source.name, po.path.name, f.source.name),
        vec![g.source.clone(), po.path.clone(), f.source.clone()],
    )?);
    let fl = z.field();
    let pc = &prod.complex;
    let mut spans = BTreeMap::new();
    for n in pc.degrees() {
        if n < 0 {
            continue;
        }
        let (nx, ni, ny) = (g.source.complex.dim(n), po.path.complex.dim(n), f.source.complex.dim(n));
        let nz = z.complex.dim(n);
        let gb = g.chain.block(n);
        let fb = f.chain.block(n);
        let p0 = po.p0.chain.block(n);
        let p1 = po.p1.chain.block(n);
        let mut cols = vec![];
        for j in 0..nx {
            cols.push(gb.col(j).clone());
        }
        for j in 0..ni {
            let mut v: SVec = p0.col(j).iter().map(|(r, c)| (*r, c.neg())).collect();
            v.extend(p1.col(j).iter().map(|(r, c)| (r + nz, c.neg())));
            cols.push(v);
        }
        for j in 0..ny {
            cols.push(fb.col(j).iter().map(|(r, c)| (r + nz, c.clone())).collect());
        }
        let m = SparseMatrix::from_cols(fl, 2 * nz, cols);
        debug_assert_eq!(m.cols, nx + ni + ny);
        spans.insert(n, reduce(&m)?.kernel.into_cols());
    }
    let p = Algebra::sub(format!("P({},{})", g.source.name, f.source.name), prod, spans)?;
    Ok((p, po))
}

#[derive(Clone, Debug)]
pub struct LoopPhi {
    pub omega: Arc<Algebra>,
    pub source: Arc<Algebra>,
    pub phi: AlgMap,
    pub quasi_iso: bool,
    /// False outside characteristic 0, where the comparison carries no guarantee.
    pub guaranteed: bool,
}

/// `ΩX` as the pullback of `0 → X ← 0` and `Φ: (red₀ s⁻¹X)_triv → ΩX`, `s⁻¹x ↦ (0, dt⊗x, 0)`.
pub fn loop_phi(x: Arc<Algebra>, l: usize) -> Result<LoopPhi> {
    let fl = x.field();
    let zero = Arc::new(Algebra::zero(x.op.clone()));
    let g = AlgMap::zero(zero.clone(), x.clone());
    let (omega, po) = homotopy_pullback(&g, &g, l)?;
    let omega = Arc::new(omega);
    let desusp = shift(&x.complex, -1);
    let (r, zs) = truncate_nonneg(&desusp)?;
    let source = Arc::new(Algebra {
        name: format!("s⁻¹{}", x.name),
        op: x.op.clone(),
        complex: Arc::new(r),
        kind: Kind::Trivial,
    });
    let Kind::Sub { basis: ob, .. } = &omega.kind else { unreachable!() };
    let Kind::Sub { basis: ib, .. } = &po.path.kind else { unreachable!() };
    let Kind::Path { l: ll, x: px } = &po.full.kind else { unreachable!() };
    let lo0 = desusp.lo() > 0;
    let mut err = None;
    let chain = ChainMap::from_fn(source.complex.clone(), omega.complex.clone(), |n, i| {
        let xv: SVec = if n == 0 && !lo0 { zs[i].clone() } else { unit_vec(fl, i) };
        let full: SVec = xv.iter().map(|(j, c)| (Algebra::path_encode(*ll, px, Coef::Dt(0), *j, n + 1), c.clone())).collect();
        let Some(inpath) = ib.get(&n).and_then(|e| e.coords(&full)) else {
            err = Some(Error::Invalid("dt⊗x is not in the path object".into()));
            return vec![];
        };
        let off = zero.complex.dim(n);
        let pv: SVec = inpath.into_iter().map(|(j, c)| (j + off, c)).collect();
        match ob.get(&n).and_then(|e| e.coords(&pv)) {
            Some(v) => v,
            None => {
                err = Some(Error::Invalid("Φ does not land in the loop object".into()));
                vec![]
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let phi = AlgMap { source: source.clone(), target: omega.clone(), chain: chain? };
    let quasi_iso = induced_homology_map(&phi.chain)?.quasi_iso;
    Ok(LoopPhi { omega, source, phi, quasi_iso, guaranteed: fl.characteristic() == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::QuasiFree;
    use crate::chain::homology::homology;
    use crate::chain::ops::scalar_complex;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;

    fn com(n: usize) -> Arc<crate::operad::Operad> {
        Arc::new(builtin_operad("Com", n, Field::Q).unwrap())
    }

    #[test]
    fn coefficients_are_contractible_to_a_point() {
        let op = com(2);
        let k = Arc::new(Algebra::trivial("k", op, &scalar_complex(Field::Q, 0, 1)).unwrap());
        let full = path_full(k, 3).unwrap();
        assert_eq!(homology(&full.complex).table(), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn evaluations_split_the_section() {
        let op = com(3);
        let qf = QuasiFree::free(op, vec!["x".into()], vec![1]).unwrap();
        let x = Arc::new(Algebra::free("X", qf, 4).unwrap());
        let po = path_object(x.clone(), 2).unwrap();
        let id = ChainMap::identity(x.complex.clone());
        assert!(po.s0.chain.then(&po.p0.chain).same_as(&id));
        assert!(po.s0.chain.then(&po.p1.chain).same_as(&id));
        assert!(induced_homology_map(&po.p0.chain).unwrap().quasi_iso);
        assert!(po.p0.check_multiplicative(50).is_empty());
    }

    #[test]
    fn loop_of_trivial_line() {
        let op = com(2);
        let x = Arc::new(Algebra::trivial("k1", op, &scalar_complex(Field::Q, 1, 1)).unwrap());
        for l in [2, 3] {
            let lp = loop_phi(x.clone(), l).unwrap();
            assert!(lp.quasi_iso);
            assert_eq!(homology(&lp.omega.complex).table_on(0, 2), BTreeMap::from([(0, 1)]));
        }
    }
}
