//! Cylinders of quasi-free algebras, the pushout model `X ⊔_Z (Z ⊗̂ I) ⊔_Z Y`, suspensions and
//! coproducts.

use super::free::{elt_add, elt_axpy, elt_scale, Elt, QuasiFree};
use super::{AlgMap, Algebra};
use crate::operad::tree::Tree;
use crate::{Error, Result};
use std::sync::Arc;

impl QuasiFree {
    /// `X ⊔ Y`: generators of `X` first, then those of `Y`.
    pub fn coproduct(&self, o: &QuasiFree) -> Result<QuasiFree> {
        if !self.op.same_structure(&o.op) {
            return Err(Error::Invalid("coproduct of algebras over different operads".into()));
        }
        let n = self.ngens();
        let mut labels = self.labels.clone();
        labels.extend(o.labels.iter().cloned());
        let mut degs = self.degs.clone();
        degs.extend(o.degs.iter().cloned());
        let mut q = QuasiFree {
            op: self.op.clone(),
            labels,
            degs,
            dgen: vec![],
            gens_complete: self.gens_complete && o.gens_complete,
        };
        let mut dgen: Vec<Elt> = self.dgen.iter().map(|x| self.transport(x, &q, &|v| v)).collect();
        dgen.extend(o.dgen.iter().map(|x| o.transport(x, &q, &|v| v + n)));
        q.dgen = dgen;
        Ok(q)
    }

    /// Generator images of a map between realized quasi-free algebras.
    pub fn images_of(m: &AlgMap) -> Result<Vec<Elt>> {
        let sb = m.source.presentation().ok_or_else(|| Error::Invalid("source is not quasi-free".into()))?;
        let tb = m.target.presentation().ok_or_else(|| Error::Invalid("target is not quasi-free".into()))?;
        let f = sb.qf.field();
        let mut out = vec![];
        for v in 0..sb.qf.ngens() {
            let d = sb.qf.degs[v];
            let Some(&(_, i)) = sb.index.get(&Tree::Leaf(v as u32)) else {
                return Err(Error::Window(format!("generator {} lies outside the window", sb.qf.labels[v])));
            };
            out.push(tb.to_elt(d, &m.chain.apply(d, &vec![(i, f.one())])));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct Cylinder {
    /// Generators `v` (0..n), `v'` (n..2n), `sv'` (2n..3n).
    pub qf: QuasiFree,
    /// `λ1(v) = e^θ(v)`.
    pub lambda1: Vec<Elt>,
}

impl Cylinder {
    pub fn n(&self) -> usize {
        self.qf.ngens() / 3
    }

    /// `θ = Di + iD`.
    pub fn theta(&self, x: &Elt) -> Elt {
        let n = self.n();
        let q = &self.qf;
        let i_gen = |v: usize| if v < n { q.gen(v + 2 * n) } else { Elt::new() };
        let ix = q.derivation(x, 1, &i_gen, false);
        let mut out = q.d(&ix);
        let dx = q.d(x);
        elt_axpy(&mut out, &q.field().one(), &q.derivation(&dx, 1, &i_gen, false));
        out
    }

    /// `e^θ(x) = Σ θ^k(x)/k!`, iterated until `θ^k(x) = 0`.
    pub fn exp_theta(&self, x: &Elt) -> Result<Elt> {
        let f = self.qf.field();
        if f.characteristic() != 0 {
            return Err(Error::Invalid("e^θ needs characteristic 0".into()));
        }
        let mut out = x.clone();
        let mut term = x.clone();
        for k in 1..=256i64 {
            term = elt_scale(&self.theta(&term), &f.frac(1, k).unwrap());
            if term.is_empty() {
                return Ok(out);
            }
            elt_axpy(&mut out, &f.one(), &term);
        }
        Err(Error::Invalid("θ is not nilpotent on this element".into()))
    }
}

/// `Z ⊗̂ I = (O(V ⊕ V' ⊕ sV'), D)` with `Dv' = 0`, `Dsv' = v'`.
pub fn cylinder(z: &QuasiFree) -> Result<Cylinder> {
    let n = z.ngens();
    let mut labels = z.labels.clone();
    labels.extend(z.labels.iter().map(|l| format!("{l}'")));
    labels.extend(z.labels.iter().map(|l| format!("s{l}'")));
    let mut degs = z.degs.clone();
    degs.extend(z.degs.iter().cloned());
    degs.extend(z.degs.iter().map(|d| d + 1));
    let mut q = QuasiFree { op: z.op.clone(), labels, degs, dgen: vec![], gens_complete: z.gens_complete };
    let mut dgen: Vec<Elt> = z.dgen.iter().map(|x| z.transport(x, &q, &|v| v)).collect();
    dgen.extend((0..n).map(|_| Elt::new()));
    dgen.extend((0..n).map(|v| q.gen(v + n)));
    q.dgen = dgen;
    let mut cyl = Cylinder { qf: q, lambda1: vec![] };
    let mut l1 = vec![];
    for v in 0..n {
        l1.push(cyl.exp_theta(&cyl.qf.gen(v))?);
    }
    cyl.lambda1 = l1;
    Ok(cyl)
}

/// Projection `p: Z ⊗̂ I → Z` on generator images.
pub fn cylinder_projection(c: &Cylinder) -> Vec<Elt> {
    let n = c.n();
    (0..3 * n).map(|v| if v < n { c.qf.gen(v) } else { Elt::new() }).collect()
}

/// Generators of the pushout model and `φ` on the cylinder generators.
pub fn pushout_presentation(z: &QuasiFree, x: &QuasiFree, y: &QuasiFree, g: &[Elt], f: &[Elt]) -> Result<QuasiFree> {
    let (na, nb, nz) = (x.ngens(), y.ngens(), z.ngens());
    let cyl = cylinder(z)?;
    let mut labels: Vec<String> = x.labels.iter().map(|l| l.to_string()).collect();
    labels.extend(y.labels.iter().cloned());
    labels.extend(z.labels.iter().map(|l| format!("s{l}'")));
    let mut degs = x.degs.clone();
    degs.extend(y.degs.iter().cloned());
    degs.extend(z.degs.iter().map(|d| d + 1));
    let mut c = QuasiFree {
        op: z.op.clone(),
        labels,
        degs,
        dgen: vec![],
        gens_complete: x.gens_complete && y.gens_complete && z.gens_complete,
    };
    let ga: Vec<Elt> = g.iter().map(|e| x.transport(e, &c, &|v| v)).collect();
    let fb: Vec<Elt> = f.iter().map(|e| y.transport(e, &c, &|v| v + na)).collect();
    // φ(v'), filled by increasing degree
    let mut prime: Vec<Option<Elt>> = vec![None; nz];
    let mut order: Vec<usize> = (0..nz).collect();
    order.sort_by_key(|&v| z.degs[v]);
    let one = z.field().one();
    for &v in &order {
        let mut r = cyl.lambda1[v].clone();
        elt_add(&mut r, Tree::Leaf(v as u32), one.neg());
        elt_add(&mut r, Tree::Leaf((v + nz) as u32), one.neg());
        let missing = std::cell::Cell::new(false);
        let phi_r = cyl.qf.extend_map(&r, &c, &|w| {
            if w < nz {
                ga[w].clone()
            } else if w < 2 * nz {
                prime[w - nz].clone().unwrap_or_else(|| {
                    missing.set(true);
                    Elt::new()
                })
            } else {
                c.gen(na + nb + w - 2 * nz)
            }
        });
        if missing.get() {
            return Err(Error::Invalid("e^θ(v) involves a primed generator of the same degree".into()));
        }
        let mut p = fb[v].clone();
        elt_axpy(&mut p, &one.neg(), &ga[v]);
        elt_axpy(&mut p, &one.neg(), &phi_r);
        prime[v] = Some(p);
    }
    let mut dgen: Vec<Elt> = x.dgen.iter().map(|e| x.transport(e, &c, &|v| v)).collect();
    dgen.extend(y.dgen.iter().map(|e| y.transport(e, &c, &|v| v + na)));
    dgen.extend(prime.into_iter().map(|p| p.unwrap()));
    c.dgen = dgen;
    Ok(c)
}

/// `C_D` for maps `g: Z → X`, `f: Z → Y` of realized quasi-free algebras, realized through `top`.
pub fn homotopy_pushout(g: &AlgMap, f: &AlgMap, top: i64) -> Result<Algebra> {
    let pres = |a: &Algebra| {
        a.presentation().map(|b| b.qf.clone()).ok_or_else(|| {
            Error::Invalid(format!("{} is not quasi-free; replace it cofibrantly first", a.name))
        })
    };
    let (z, x, y) = (pres(&g.source)?, pres(&g.target)?, pres(&f.target)?);
    if g.source.complex != f.source.complex {
        return Err(Error::Invalid("pushout legs have different sources".into()));
    }
    let gi = QuasiFree::images_of(g)?;
    let fi = QuasiFree::images_of(f)?;
    let c = pushout_presentation(&z, &x, &y, &gi, &fi)?;
    Algebra::free(format!("C({},{},{})", g.target.name, g.source.name, f.target.name), c, top)
}

/// Closed form `(O(sV), D₁)` with `D₁(sv) = −s d₁ v`.
pub fn suspension_closed(z: &QuasiFree) -> QuasiFree {
    let mut q = QuasiFree {
        op: z.op.clone(),
        labels: z.labels.iter().map(|l| format!("s{l}")).collect(),
        degs: z.degs.iter().map(|d| d + 1).collect(),
        dgen: vec![],
        gens_complete: z.gens_complete,
    };
    q.dgen = (0..z.ngens())
        .map(|v| {
            let mut e = Elt::new();
            for (w, c) in z.linear_part(v) {
                elt_add(&mut e, Tree::Leaf(w as u32), c.neg());
            }
            e
        })
        .collect();
    q
}

/// Zero algebra as a quasi-free algebra on no generators.
pub fn zero_presentation(op: Arc<crate::operad::Operad>) -> QuasiFree {
    QuasiFree { op, labels: vec![], degs: vec![], dgen: vec![], gens_complete: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::homology;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;

    fn dy_xx() -> QuasiFree {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        let mut q = QuasiFree::free(op, vec!["x".into(), "y".into()], vec![0, 1]).unwrap();
        q.dgen[1] = q.product(2, 0, &[&q.gen(0), &q.gen(0)]);
        q
    }

    #[test]
    fn cylinder_projection_splits_both_ends() {
        let z = dy_xx();
        let c = cylinder(&z).unwrap();
        let p = cylinder_projection(&c);
        for v in 0..z.ngens() {
            let back = c.qf.extend_map(&c.lambda1[v], &z, &|w| p[w].clone());
            assert_eq!(back, z.gen(v));
        }
        let a = Algebra::free("cyl", c.qf.clone(), 4).unwrap();
        let b = Algebra::free("z", z, 4).unwrap();
        assert_eq!(homology(&a.complex).table(), homology(&b.complex).table());
    }

    #[test]
    fn suspension_of_free_on_even_generator() {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        let z = QuasiFree::free(op.clone(), vec!["x".into()], vec![0]).unwrap();
        let s = Algebra::free("S", suspension_closed(&z), 5).unwrap();
        assert_eq!(homology(&s.complex).table(), [(1, 1)].into_iter().collect());
        let zero = zero_presentation(op);
        let c = pushout_presentation(&z, &zero, &zero, &[Elt::new()], &[Elt::new()]).unwrap();
        let c = Algebra::free("C", c, 5).unwrap();
        assert_eq!(homology(&c.complex).table_on(0, 4), homology(&s.complex).table_on(0, 4));
    }
}
