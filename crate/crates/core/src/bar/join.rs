//! Suspension of arbitrary algebras and joins `X*t`.

use super::replace::{cofibrant_replacement, CofibrantReplacement};
use super::bar_algebra;
use crate::algebra::pushout::{pushout_presentation, zero_presentation};
use crate::algebra::{elt_add, suspension_closed, Algebra, Elt, QuasiFree};
use crate::operad::tree::Tree;
use crate::{Error, Result};
use std::sync::Arc;

/// `ΣZ`: the closed form on a quasi-free presentation, else `(O(s UB(O,Z)), d₁)` with
/// `d₁(sb) = −s d b`.
pub fn suspension(z: &Algebra, top: i64) -> Result<Algebra> {
    let name = format!("Σ{}", z.name);
    if let Some(b) = z.presentation() {
        return Algebra::free(name, suspension_closed(&b.qf), top);
    }
    let bar = bar_algebra(Arc::new(z.clone()), top)?;
    let c = &bar.complex;
    let mut labels = vec![];
    let mut degs = vec![];
    let mut start = std::collections::HashMap::new();
    for d in c.degrees() {
        start.insert(d, labels.len());
        for l in c.labels(d) {
            labels.push(format!("s[{l}]"));
            degs.push(d + 1);
        }
    }
    let mut dgen = vec![];
    for d in c.degrees() {
        for i in 0..c.dim(d) {
            let mut e = Elt::new();
            for (r, x) in c.apply_d(d, &vec![(i, c.field.one())]) {
                elt_add(&mut e, Tree::Leaf((start[&(d - 1)] + r) as u32), x.neg());
            }
            dgen.push(e);
        }
    }
    let mut q = QuasiFree::new(z.op.clone(), labels, degs, dgen)?;
    q.gens_complete = c.bounded();
    Algebra::free(name, q, top)
}

#[derive(Clone, Debug)]
pub struct Join {
    pub t: usize,
    pub replacement: CofibrantReplacement,
    pub algebra: Algebra,
}

/// `X*t`: the homotopy cofiber of the fold `⊔_t X^c → X^c`, realized through `top`.
pub fn join(x: Arc<Algebra>, t: usize, top: i64) -> Result<Join> {
    let r = cofibrant_replacement(x.clone(), top)?;
    let xc = r.algebra.presentation().expect("cofibrant replacements are quasi-free").qf.clone();
    let name = format!("{}*{t}", x.name);
    let algebra = match t {
        0 => Algebra::free(name, xc, top)?,
        2 if x.field().characteristic() != 0 => Algebra::free(name, suspension_closed(&xc), top)?,
        _ => {
            if x.field().characteristic() != 0 {
                return Err(Error::Invalid(format!("X*{t} uses the cylinder e^θ, which needs characteristic 0")));
            }
            let n = xc.ngens();
            let mut z = zero_presentation(xc.op.clone());
            for _ in 0..t {
                z = z.coproduct(&xc)?;
            }
            let fold: Vec<Elt> = (0..t * n).map(|v| xc.gen(v % n)).collect();
            let zeros = vec![Elt::new(); t * n];
            let c = pushout_presentation(&z, &zero_presentation(xc.op.clone()), &xc, &zeros, &fold)?;
            Algebra::free(name, c, top)?
        }
    };
    Ok(Join { t, replacement: r, algebra })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::homology;
    use crate::chain::ops::scalar_complex;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;
    use std::collections::BTreeMap;

    #[test]
    fn joins_of_trivial_line() {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        let x = Arc::new(Algebra::trivial("k", op, &scalar_complex(Field::Q, 0, 1)).unwrap());
        let j0 = join(x.clone(), 0, 3).unwrap();
        assert_eq!(homology(&j0.algebra.complex).table_on(0, 2), BTreeMap::from([(0, 1)]));
        let j1 = join(x.clone(), 1, 3).unwrap();
        assert_eq!(homology(&j1.algebra.complex).table_on(0, 2), BTreeMap::new());
        let j2 = join(x.clone(), 2, 3).unwrap();
        let s = suspension(&x, 3).unwrap();
        assert_eq!(homology(&j2.algebra.complex).table_on(0, 2), homology(&s.complex).table_on(0, 2));
    }

    #[test]
    fn suspension_of_trivial_via_bar_matches_replacement() {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        let x = Algebra::trivial("k", op, &scalar_complex(Field::Q, 1, 1)).unwrap();
        let s = suspension(&x, 4).unwrap();
        let r = cofibrant_replacement(Arc::new(x), 4).unwrap();
        let s2 = Algebra::free("s", suspension_closed(&r.algebra.presentation().unwrap().qf), 4).unwrap();
        assert_eq!(homology(&s.complex).table_on(0, 3), homology(&s2.complex).table_on(0, 3));
    }
}
