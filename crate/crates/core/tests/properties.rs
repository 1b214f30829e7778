use hocalc::algebra::{Algebra, QuasiFree};
use hocalc::bar::{bar_algebra, bar_operad_sym};
use hocalc::calculus::{orbits_averaging, orbits_bar, tensor_power};
use hocalc::chain::ops::{cone, shift};
use hocalc::chain::{direct_sum, homology, telescope, tensor, ChainMap, WindowedComplex};
use hocalc::linalg::{Field, SparseMatrix};
use hocalc::operad::{builtin_operad, parse_operad_unchecked, write_operad};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

type Table = BTreeMap<i64, usize>;

fn field(i: u8) -> Field {
    match i {
        0 => Field::Q,
        1 => Field::fp(2).unwrap(),
        _ => Field::fp(3).unwrap(),
    }
}

/// `C_k ← C_{k+1}` with an arbitrary integer matrix.
fn two_term(f: Field, k: i64, rows: usize, cols: usize, entries: &[i64]) -> WindowedComplex {
    let m: Vec<Vec<i64>> = (0..rows).map(|r| (0..cols).map(|c| entries[(r * cols + c) % entries.len()]).collect()).collect();
    let d1 = if rows == 0 { SparseMatrix::zero(f, 0, cols) } else { SparseMatrix::from_dense(f, &m) };
    let labels = vec![(0..rows).map(|i| format!("a{i}")).collect(), (0..cols).map(|i| format!("b{i}")).collect()];
    WindowedComplex::new(f, k, labels, vec![SparseMatrix::zero(f, 0, rows), d1], true).unwrap()
}

fn complex_in(f: Field) -> impl Strategy<Value = WindowedComplex> {
    prop::collection::vec((-1i64..3, 0usize..3, 0usize..3, prop::collection::vec(-2i64..3, 1..9)), 1..3).prop_map(
        move |parts| {
            let mut c = WindowedComplex::zero(f);
            for (k, r, s, e) in parts {
                c = direct_sum(&c, &two_term(f, k, r, s, &e)).unwrap();
            }
            c
        },
    )
}

fn complex() -> impl Strategy<Value = WindowedComplex> {
    (0u8..3).prop_flat_map(|i| complex_in(field(i)))
}

fn pair() -> impl Strategy<Value = (WindowedComplex, WindowedComplex)> {
    (0u8..3).prop_flat_map(|i| (complex_in(field(i)), complex_in(field(i))))
}

fn table(c: &WindowedComplex) -> Table {
    homology(c).table()
}

fn d_squared_zero(c: &WindowedComplex) -> bool {
    c.degrees().all(|d| d - 1 < c.lo() || c.d(d - 1).mul(&c.d(d)).is_zero())
}

fn convolve(a: &Table, b: &Table) -> Table {
    let mut out = Table::new();
    for (p, x) in a {
        for (q, y) in b {
            *out.entry(p + q).or_default() += x * y;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructions_square_to_zero((a, b) in pair(), k in -2i64..3) {
        let id = ChainMap::identity(Arc::new(a.clone()));
        for c in [
            tensor(&a, &b).unwrap(),
            direct_sum(&a, &b).unwrap(),
            shift(&a, k),
            cone(&id).unwrap(),
            tensor_power(&b, 2).unwrap().complex.as_ref().clone(),
        ] {
            prop_assert!(d_squared_zero(&c));
        }
    }

    #[test]
    fn kunneth((a, b) in pair()) {
        prop_assert_eq!(table(&tensor(&a, &b).unwrap()), convolve(&table(&a), &table(&b)));
    }

    #[test]
    fn cone_of_identity_is_acyclic(a in complex()) {
        let id = ChainMap::identity(Arc::new(a));
        prop_assert!(table(&cone(&id).unwrap()).is_empty());
    }

    #[test]
    fn coxeter_relations_on_tensor_powers(a in complex(), n in 2usize..4) {
        prop_assume!(a.total_dim() <= 4 || n == 2);
        let s = tensor_power(&a, n).unwrap();
        prop_assert!(s.check().is_empty(), "{:?}", s.check());
    }

    #[test]
    fn maschke_orbits(a in complex_in(Field::Q), n in 2usize..4) {
        prop_assume!(a.total_dim() <= 3 || n == 2);
        let s = tensor_power(&a, n).unwrap();
        // bar length grows with the degree, so compare on the three lowest degrees
        let lo = s.complex.lo();
        let avg = homology(&orbits_averaging(&s).unwrap()).table_on(lo, lo + 2);
        let bar = homology(&orbits_bar(&s, lo + 3).unwrap()).table_on(lo, lo + 2);
        prop_assert_eq!(avg, bar);
    }

    #[test]
    fn telescope_of_eventually_constant_tower(a in complex(), junk in prop::collection::vec(complex(), 0..3), tail in 1usize..4) {
        let f = a.field;
        let c = Arc::new(a);
        let mut stages: Vec<Arc<WindowedComplex>> = junk.into_iter().filter(|j| j.field == f).map(Arc::new).collect();
        let mut maps = vec![];
        for w in stages.windows(2) {
            maps.push(ChainMap::zero(w[0].clone(), w[1].clone()));
        }
        if let Some(last) = stages.last() {
            maps.push(ChainMap::zero(last.clone(), c.clone()));
        }
        stages.push(c.clone());
        for _ in 0..tail {
            maps.push(ChainMap::identity(c.clone()));
            stages.push(c.clone());
        }
        prop_assert_eq!(table(&telescope(&stages, &maps).unwrap()), table(&c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn builtin_operads_validate(which in 0usize..2, n in 1usize..5, fi in 0u8..3) {
        let name = ["Com", "Assoc"][which];
        let op = builtin_operad(name, n, field(fi)).unwrap();
        prop_assert!(op.validate().is_empty());
        prop_assert!(op.seq.check().is_empty());
    }

    #[test]
    fn perturbed_composition_is_caught(c in -3i64..4, fi in 0u8..2) {
        let f = field(fi);
        let text = write_operad(&builtin_operad("Com", 3, f).unwrap());
        let bent = text.replace("mu2 o_2 mu2 -> 1*mu3", &format!("mu2 o_2 mu2 -> {c}*mu3"));
        let op = parse_operad_unchecked(&bent).unwrap();
        let same = f.int(c) == f.one();
        prop_assert_eq!(op.validate().is_empty(), same);
    }

    #[test]
    fn coxeter_relations_on_bar_operads(which in 0usize..2, n in 2usize..4) {
        let op = Arc::new(builtin_operad(["Com", "Assoc"][which], 3, Field::Q).unwrap());
        let (_, s) = bar_operad_sym(op, n).unwrap();
        prop_assert!(s.check().is_empty());
    }

    #[test]
    fn window_enlargement(deg in 1i64..3, d in 2i64..4) {
        let op = Arc::new(builtin_operad("Com", 3, Field::Q).unwrap());
        let free = |top: i64| {
            let q = QuasiFree::free(op.clone(), vec!["x".into()], vec![deg]).unwrap();
            Arc::new(Algebra::free("X", q, top).unwrap())
        };
        let narrow = homology(&bar_algebra(free(d + 1), d + 1).unwrap().complex).table_on(0, d);
        let wide = homology(&bar_algebra(free(d + 3), d + 3).unwrap().complex).table_on(0, d);
        prop_assert_eq!(&narrow, &wide);
        // the bar construction of a free algebra sees only its generators
        prop_assert_eq!(narrow, BTreeMap::from([(deg, 1)]));
        prop_assert!(d_squared_zero(&bar_algebra(free(d + 1), d + 1).unwrap().complex));
    }
}
