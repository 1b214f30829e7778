//! Homotopy orbits of Σ_n-complexes, tensor powers with the permutation action, and the
//! diagonal action on tensor products.

use crate::chain::ops::{tensor, tensor_map};
use crate::chain::sym::SymmetricComplex;
use crate::chain::WindowedComplex;
use crate::linalg::matrix::{collect, SVec};
use crate::linalg::{reduce, Echelon, Field, SparseMatrix};
use crate::operad::perm::{all_perms, compose, identity, Perm};
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// `(1/n!) Σ_σ σ` in one degree.
fn averaging(s: &SymmetricComplex, deg: i64) -> Result<SparseMatrix> {
    let f = s.complex.field;
    let perms = all_perms(s.n);
    let inv = f.frac(1, perms.len() as i64).ok_or_else(|| Error::Invalid(format!("n! vanishes in {f}")))?;
    let k = s.complex.dim(deg);
    let mut m = SparseMatrix::zero(f, k, k);
    for p in &perms {
        m = m.add(&s.perm_matrix(p, deg));
    }
    Ok(m.scaled(&inv))
}

/// Subcomplex spanned degreewise by the columns of `spans`, in coordinates.
fn subcomplex(c: &WindowedComplex, spans: &BTreeMap<i64, Vec<SVec>>) -> Result<WindowedComplex> {
    let f = c.field;
    if c.is_zero() {
        return Ok(c.clone());
    }
    let mut labels = vec![];
    let mut ds = vec![];
    let mut prev: Option<(usize, crate::linalg::Reduction)> = None;
    for deg in c.degrees() {
        let basis = spans.get(&deg).cloned().unwrap_or_default();
        let mut cols = vec![];
        for b in &basis {
            let db = c.apply_d(deg, b);
            let x = match &prev {
                Some((_, red)) => red.solve_sparse(&db).ok_or_else(|| Error::Invalid(format!("span is not a subcomplex in degree {deg}")))?,
                None if db.is_empty() => vec![],
                None => return Err(Error::Invalid(format!("span is not a subcomplex in degree {deg}"))),
            };
            cols.push(x);
        }
        let rows = prev.as_ref().map_or(0, |p| p.0);
        ds.push(SparseMatrix::from_cols(f, rows, cols));
        labels.push((0..basis.len()).map(|j| format!("o{deg}.{j}")).collect());
        let bm = SparseMatrix::from_cols(f, c.dim(deg), basis.clone());
        prev = Some((basis.len(), reduce(&bm)?));
    }
    WindowedComplex::new(f, c.lo(), labels, ds, c.bounded())
}

/// Strict coinvariants realized as the image of the averaging idempotent (characteristic 0).
pub fn orbits_averaging(s: &SymmetricComplex) -> Result<WindowedComplex> {
    if s.complex.field.characteristic() != 0 && s.n > 1 {
        return Err(Error::Invalid("averaging needs characteristic 0".into()));
    }
    let mut spans = BTreeMap::new();
    for deg in s.complex.degrees() {
        let e = averaging(s, deg)?;
        let mut ech = Echelon::new(s.complex.field, s.complex.dim(deg));
        let mut basis = vec![];
        for col in e.cols_iter() {
            if ech.insert(col).is_some() {
                basis.push(col.clone());
            }
        }
        spans.insert(deg, basis);
    }
    subcomplex(&s.complex, &spans)
}

/// `B(k, Σ_n, C)`: normalized bar construction, `[g₁|…|g_k]⊗c` in degree `k + |c|`, realized
/// through `top`.
pub fn orbits_bar(s: &SymmetricComplex, top: i64) -> Result<WindowedComplex> {
    let c = &s.complex;
    let f = c.field;
    if c.is_zero() || s.n <= 1 {
        return Ok((**c).clone());
    }
    let top = if c.bounded() { top } else { top.min(c.hi()) };
    let perms: Vec<Perm> = all_perms(s.n).into_iter().filter(|p| *p != identity(s.n)).collect();
    let g = perms.len();
    let pos: HashMap<Perm, usize> = perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let mut rho: HashMap<(usize, i64), SparseMatrix> = HashMap::new();
    let lo = c.lo();
    // offsets of the bar-length blocks inside degree m
    let layout = |m: i64| -> Vec<(usize, usize)> {
        let mut out = vec![];
        let mut off = 0;
        for k in 0..=(m - lo).max(-1) {
            let k = k as usize;
            out.push((k, off));
            off += g.pow(k as u32) * c.dim(m - k as i64);
        }
        out
    };
    let mut labels = vec![];
    let mut ds = vec![];
    for m in lo..=top {
        let blocks = layout(m);
        let below = if m > lo { layout(m - 1) } else { vec![] };
        let mut lab = vec![];
        let mut cols = vec![];
        for &(k, _) in &blocks {
            let cd = m - k as i64;
            let dim = c.dim(cd);
            for word in 0..g.pow(k as u32) {
                let seq: Vec<usize> = (0..k).map(|i| (word / g.pow((k - 1 - i) as u32)) % g).collect();
                for ci in 0..dim {
                    lab.push(format!("[{}]{}", seq.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("|"), c.labels(cd)[ci]));
                    if m == lo {
                        cols.push(vec![]);
                        continue;
                    }
                    let mut v: Vec<(usize, crate::linalg::Scalar)> = vec![];
                    let at = |k2: usize, s2: &[usize], cvec: &SVec, sign: &crate::linalg::Scalar, v: &mut Vec<(usize, crate::linalg::Scalar)>| {
                        let Some(&(_, o)) = below.iter().find(|e| e.0 == k2) else { return };
                        let cd2 = m - 1 - k2 as i64;
                        let w = s2.iter().fold(0, |acc, &x| acc * g + x);
                        for (r, x) in cvec {
                            v.push((o + w * c.dim(cd2) + r, x.mul(sign)));
                        }
                    };
                    let unit = vec![(ci, f.one())];
                    if k > 0 {
                        // d_0 drops g₁
                        at(k - 1, &seq[1..], &unit, &f.one(), &mut v);
                        for i in 1..k {
                            let p = compose(&perms[seq[i - 1]], &perms[seq[i]]);
                            if let Some(&pi) = pos.get(&p) {
                                let mut s2 = seq[..i - 1].to_vec();
                                s2.push(pi);
                                s2.extend_from_slice(&seq[i + 1..]);
                                at(k - 1, &s2, &unit, &f.sign(i % 2 == 1), &mut v);
                            }
                        }
                        let last = seq[k - 1];
                        let r = rho.entry((last, cd)).or_insert_with(|| s.perm_matrix(&perms[last], cd));
                        let gc = r.col(ci).clone();
                        at(k - 1, &seq[..k - 1], &gc, &f.sign(k % 2 == 1), &mut v);
                    }
                    let dc = c.apply_d(cd, &unit);
                    if let Some(&(_, o)) = below.iter().find(|e| e.0 == k) {
                        let sign = f.sign(k % 2 == 1);
                        for (r, x) in &dc {
                            v.push((o + word * c.dim(cd - 1) + r, x.mul(&sign)));
                        }
                    }
                    cols.push(collect(v));
                }
            }
        }
        let rows = labels.last().map_or(0, |l: &Vec<String>| l.len());
        ds.push(SparseMatrix::from_cols(f, if m == lo { 0 } else { rows }, cols));
        labels.push(lab);
    }
    WindowedComplex::new(f, lo, labels, ds, false)
}

/// `C_{hΣ_n}`: averaging in characteristic 0, the bar construction otherwise.
pub fn homotopy_orbits(s: &SymmetricComplex, top: i64) -> Result<WindowedComplex> {
    if s.complex.field.characteristic() == 0 {
        orbits_averaging(s)
    } else {
        orbits_bar(s, top)
    }
}

/// Dimension of the fixed vectors per degree.
pub fn invariant_dims(s: &SymmetricComplex) -> BTreeMap<i64, usize> {
    let f = s.complex.field;
    let mut out = BTreeMap::new();
    for deg in s.complex.degrees() {
        let k = s.complex.dim(deg);
        if k == 0 {
            continue;
        }
        let id = SparseMatrix::identity(f, k);
        let mut rows: Vec<(usize, usize, crate::linalg::Scalar)> = vec![];
        for i in 0..s.swaps.len() {
            let m = s.swap(i, deg).add(&id.scaled(&f.int(-1)));
            for (r, c, x) in m.triplets() {
                rows.push((c, i * k + r, x));
            }
        }
        // kernel of the stacked (σ_i − 1), via its transpose's column space
        let stacked = SparseMatrix::from_triplets(f, s.swaps.len() * k, k, rows.into_iter().map(|(c, r, x)| (r, c, x)).collect()).unwrap();
        let dim = k - crate::linalg::rank(&stacked);
        if dim > 0 {
            out.insert(deg, dim);
        }
    }
    out
}

/// `C^{⊗n}` with the Koszul-signed permutation of factors.
pub fn tensor_power(c: &WindowedComplex, n: usize) -> Result<SymmetricComplex> {
    let f = c.field;
    if n == 0 {
        let k = Arc::new(crate::chain::ops::scalar_complex(f, 0, 1));
        return Ok(SymmetricComplex::trivial(0, k));
    }
    let (lo, hi) = (c.lo() * n as i64, c.hi() * n as i64);
    if c.is_zero() {
        return Ok(SymmetricComplex::trivial(n, Arc::new(c.clone())));
    }
    let bounded = c.bounded();
    let hi = if bounded { hi } else { c.hi() + (n as i64 - 1) * c.lo() };
    // tuples of (degree, index), lexicographic
    let mut basis: Vec<Vec<Vec<(i64, usize)>>> = vec![];
    for m in lo..=hi {
        let mut out = vec![];
        let mut cur = vec![];
        fn go(c: &WindowedComplex, n: usize, left: i64, cur: &mut Vec<(i64, usize)>, out: &mut Vec<Vec<(i64, usize)>>) {
            if cur.len() == n {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let rest = (n - cur.len() - 1) as i64;
            for d in c.lo()..=c.hi() {
                if left - d < rest * c.lo() || left - d > rest * c.hi() {
                    continue;
                }
                for i in 0..c.dim(d) {
                    cur.push((d, i));
                    go(c, n, left - d, cur, out);
                    cur.pop();
                }
            }
        }
        go(c, n, m, &mut cur, &mut out);
        basis.push(out);
    }
    let index: Vec<HashMap<Vec<(i64, usize)>, usize>> =
        basis.iter().map(|b| b.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect()).collect();
    let at = |m: i64| (m - lo) as usize;
    let mut labels = vec![];
    let mut ds = vec![];
    for m in lo..=hi {
        let mut cols = vec![];
        for t in &basis[at(m)] {
            let mut v = vec![];
            let mut before = 0i64;
            for (k, &(d, i)) in t.iter().enumerate() {
                let sign = f.sign(before.rem_euclid(2) == 1);
                for (r, x) in c.apply_d(d, &vec![(i, f.one())]) {
                    let mut u = t.clone();
                    u[k] = (d - 1, r);
                    v.push((index[at(m - 1)][&u], x.mul(&sign)));
                }
                before += d;
            }
            cols.push(collect(v));
        }
        let rows = if m == lo { 0 } else { basis[at(m - 1)].len() };
        ds.push(SparseMatrix::from_cols(f, rows, cols));
        labels.push(basis[at(m)].iter().map(|t| t.iter().map(|&(d, i)| c.labels(d)[i].clone()).collect::<Vec<_>>().join("⊗")).collect());
    }
    let complex = Arc::new(WindowedComplex::new(f, lo, labels, ds, bounded)?);
    let mut swaps = vec![];
    for i in 0..n - 1 {
        let mut per = BTreeMap::new();
        for m in lo..=hi {
            let cols: Vec<SVec> = basis[at(m)]
                .iter()
                .map(|t| {
                    let mut u = t.clone();
                    u.swap(i, i + 1);
                    let odd = (t[i].0 * t[i + 1].0).rem_euclid(2) == 1;
                    vec![(index[at(m)][&u], f.sign(odd))]
                })
                .collect();
            per.insert(m, SparseMatrix::from_cols(f, basis[at(m)].len(), cols));
        }
        swaps.push(per);
    }
    SymmetricComplex::new(n, complex, swaps)
}

/// `A ⊗ B` with the diagonal action `σ ↦ σ_A ⊗ σ_B`.
pub fn diagonal_tensor(a: &SymmetricComplex, b: &SymmetricComplex) -> Result<SymmetricComplex> {
    if a.n != b.n {
        return Err(Error::Invalid(format!("diagonal action needs equal arities, got {} and {}", a.n, b.n)));
    }
    let c = Arc::new(tensor(&a.complex, &b.complex)?);
    let mut swaps = vec![];
    for i in 0..a.n.saturating_sub(1) {
        let m = tensor_map(&a.swap_map(i), &b.swap_map(i), c.clone(), c.clone())?;
        swaps.push(c.degrees().map(|d| (d, m.block(d))).collect());
    }
    SymmetricComplex::new(a.n, c, swaps)
}

/// Regular representation of Σ_n on `k[Σ_n]` in degree `deg`; used by tests and the CLI.
pub fn regular(field: Field, n: usize, deg: i64) -> Result<SymmetricComplex> {
    let perms = all_perms(n);
    let pos: HashMap<Perm, usize> = perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let c = Arc::new(crate::chain::ops::scalar_complex(field, deg, perms.len()));
    let swaps = (0..n.saturating_sub(1))
        .map(|i| {
            let t = crate::operad::perm::transposition(n, i);
            let cols = perms.iter().map(|p| vec![(pos[&compose(&t, p)], field.one())]).collect();
            BTreeMap::from([(deg, SparseMatrix::from_cols(field, perms.len(), cols))])
        })
        .collect();
    SymmetricComplex::new(n, c, swaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::homology;
    use crate::chain::ops::scalar_complex;

    fn sym(n: usize, c: WindowedComplex, s: Vec<Vec<Vec<i64>>>, deg: i64) -> SymmetricComplex {
        let f = c.field;
        let swaps = s.into_iter().map(|m| BTreeMap::from([(deg, SparseMatrix::from_dense(f, &m))])).collect();
        SymmetricComplex::new(n, Arc::new(c), swaps).unwrap()
    }

    #[test]
    fn orbits_of_basic_actions() {
        let q = Field::Q;
        let triv = sym(2, scalar_complex(q, 0, 2), vec![vec![vec![1, 0], vec![0, 1]]], 0);
        assert_eq!(homology(&homotopy_orbits(&triv, 3).unwrap()).table(), BTreeMap::from([(0, 2)]));
        let swap = sym(2, scalar_complex(q, 0, 2), vec![vec![vec![0, 1], vec![1, 0]]], 0);
        assert_eq!(homology(&homotopy_orbits(&swap, 3).unwrap()).table(), BTreeMap::from([(0, 1)]));
        let sign = sym(2, scalar_complex(q, 0, 1), vec![vec![vec![-1]]], 0);
        assert!(homology(&homotopy_orbits(&sign, 3).unwrap()).table().is_empty());
    }

    #[test]
    fn bar_orbits_agree_with_averaging_in_char_zero() {
        let q = Field::Q;
        for n in 2..=3 {
            let r = regular(q, n, 0).unwrap();
            let bar = homology(&orbits_bar(&r, 4).unwrap()).table_on(0, 3);
            assert_eq!(bar, BTreeMap::from([(0, 1)]), "n = {n}");
            assert_eq!(homology(&orbits_averaging(&r).unwrap()).table(), bar);
        }
    }

    #[test]
    fn bar_orbits_see_group_homology_in_char_two() {
        // H_*(Σ_2; F_2) = F_2 in every degree
        let f2 = Field::fp(2).unwrap();
        let triv = sym(2, scalar_complex(f2, 0, 1), vec![vec![vec![1]]], 0);
        let h = homology(&orbits_bar(&triv, 5).unwrap()).table_on(0, 4);
        assert_eq!(h, (0..=4).map(|d| (d, 1)).collect());
    }

    #[test]
    fn perm_matrix_is_a_homomorphism() {
        let r = regular(Field::Q, 3, 0).unwrap();
        for a in all_perms(3) {
            for b in all_perms(3) {
                assert_eq!(r.perm_matrix(&compose(&a, &b), 0), r.perm_matrix(&a, 0).mul(&r.perm_matrix(&b, 0)));
            }
        }
    }

    #[test]
    fn tensor_powers_carry_koszul_signs() {
        let q = Field::Q;
        let odd = tensor_power(&scalar_complex(q, 1, 1), 2).unwrap();
        assert_eq!(odd.swap(0, 2).get(0, 0), q.int(-1));
        assert!(homology(&orbits_averaging(&odd).unwrap()).table().is_empty());
        let even = tensor_power(&scalar_complex(q, 0, 2), 3).unwrap();
        assert!(even.check().is_empty());
        assert_eq!(homology(&orbits_averaging(&even).unwrap()).table(), BTreeMap::from([(0, 4)]));
        assert_eq!(invariant_dims(&even), BTreeMap::from([(0, 4)]));
    }

    #[test]
    fn diagonal_tensor_with_regular_is_free() {
        let q = Field::Q;
        let r = regular(q, 3, 0).unwrap();
        let sign = sym(3, scalar_complex(q, 1, 1), vec![vec![vec![-1]], vec![vec![-1]]], 1);
        let t = diagonal_tensor(&r, &sign).unwrap();
        assert_eq!(homology(&orbits_averaging(&t).unwrap()).table(), BTreeMap::from([(1, 1)]));
    }
}
