//! Acceptance suite: one PASS/FAIL line per criterion. Run with `cargo test --test acceptance`.

use hocalc::algebra::pushout::zero_presentation;
use hocalc::algebra::{homotopy_pushout, loop_phi, parse_algebra, AlgMap, Algebra, QuasiFree};
use hocalc::bar::{bar_algebra, bar_operad, bar_operad_sym, cobar_bar_operad, cofibrant_replacement, suspension};
use hocalc::calculus::{
    chain_rule_check, co_cross_effect, composition_betti, cross_effect, d_n_layer, derivative, orbits_averaging,
    orbits_bar, tensor_power, Cat, Ctx, FunctorExpr, StabilizeOpts, Value,
};
use hocalc::chain::ops::scalar_complex;
use hocalc::chain::{direct_sum, homology, telescope, tensor, ChainMap, WindowedComplex};
use hocalc::linalg::Field;
use hocalc::operad::{builtin_operad, parse_operad_unchecked, Operad};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Table = BTreeMap<i64, usize>;
type Check = Result<String, String>;

fn op(name: &str, f: Field) -> Arc<Operad> {
    Arc::new(builtin_operad(name, 3, f).unwrap())
}

fn f2() -> Field {
    Field::fp(2).unwrap()
}

fn betti(c: &WindowedComplex, lo: i64, hi: i64) -> Table {
    homology(c).table_on(lo, hi)
}

fn show(t: &Table) -> String {
    let v: Vec<String> = t.iter().map(|(d, b)| format!("{d}:{b}")).collect();
    format!("{{{}}}", v.join(","))
}

fn expect(what: &str, got: &Table, want: &Table) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {} want {}", show(got), show(want)))
    }
}

fn tab(xs: &[(i64, usize)]) -> Table {
    xs.iter().copied().collect()
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn free(o: &Arc<Operad>, degs: &[i64], top: i64) -> Arc<Algebra> {
    let labels = (0..degs.len()).map(|i| format!("x{i}")).collect();
    Arc::new(Algebra::free("X", QuasiFree::free(o.clone(), labels, degs.to_vec()).unwrap(), top).unwrap())
}

fn dyxx(o: &Arc<Operad>, top: i64) -> Arc<Algebra> {
    let src = "algebra dyxx over Com\ngen x deg 0\ngen y deg 1\ntwist 2 {\n  y -> 1*mu2(x,x)\n}\n";
    let (name, q) = parse_algebra(src, o.clone()).unwrap();
    Arc::new(Algebra::free(name, q, top).unwrap())
}

fn trivial_line(o: &Arc<Operad>) -> Arc<Algebra> {
    Arc::new(Algebra::trivial("k1", o.clone(), &scalar_complex(Field::Q, 1, 1)).unwrap())
}

fn samples(top: i64) -> Vec<(&'static str, Arc<Algebra>)> {
    let o = op("Com", Field::Q);
    vec![("free on x0", free(&o, &[0], top)), ("trivial k[1]", trivial_line(&o)), ("dy = x·x", dyxx(&o, top))]
}

fn parse_id(src: &str, c: Cat) -> FunctorExpr {
    FunctorExpr::parse(src, Some(c)).unwrap()
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Homology of `O(n)` from the operad's own component complex.
fn operad_betti(o: &Operad, n: usize) -> Table {
    let c = o.comp(n).complex(o.field()).unwrap();
    betti(&c, -10, 10)
}

fn c1() -> Check {
    let mut notes = vec![];
    for name in ["Com", "Assoc"] {
        let o = op(name, Field::Q);
        let ctx = Ctx::new(o.clone());
        for n in 1..=3 {
            let d = derivative(&ctx, &parse_id("Id", Cat::Alg), n, &StabilizeOpts::new(0, 6)).map_err(e)?;
            let want = operad_betti(&o, n);
            let closed = tab(&[(0, if name == "Com" { 1 } else { factorial(n) })]);
            expect(&format!("{name} n={n} oracle"), &want, &closed)?;
            expect(&format!("{name} n={n}"), &d.betti(), &want)?;
            if d.stable.p > 6 {
                return Err(format!("{name} n={n}: stabilized only at p={}", d.stable.p));
            }
            notes.push(format!("{name}({n})={} p={}", show(&d.betti()), d.stable.p));
        }
    }
    Ok(notes.join(" "))
}

fn c2() -> Check {
    let o = op("Com", Field::Q);
    let ctx = Ctx::new(o.clone());
    let f = parse_id("SigmaInf.OmegaInf", Cat::Ch);
    let mut notes = vec![];
    for (n, want) in [(2, tab(&[(1, 1)])), (3, tab(&[(2, 2)]))] {
        let direct = betti(&bar_operad(o.clone(), n).map_err(e)?.complex, 0, 6);
        expect(&format!("B(Com)({n})"), &direct, &want)?;
        let d = derivative(&ctx, &f, n, &StabilizeOpts::new(0, 6)).map_err(e)?;
        expect(&format!("n={n}"), &d.betti(), &direct)?;
        notes.push(format!("n={n} {} p={}", show(&direct), d.stable.p));
    }
    Ok(notes.join(" "))
}

fn c3() -> Check {
    let top = 7;
    let mut notes = vec![];
    for (name, z) in samples(top) {
        let zc = match z.presentation() {
            Some(_) => z.clone(),
            None => {
                let r = cofibrant_replacement(z.clone(), top).map_err(e)?;
                if !r.verdict() {
                    return Err(format!("{name}: cofibrant replacement is not a quasi-iso"));
                }
                r.algebra.clone()
            }
        };
        let zero = Arc::new(Algebra::free("0", zero_presentation(zc.op.clone()), top).map_err(e)?);
        let g = AlgMap::zero(zc, zero);
        let model = betti(&homotopy_pushout(&g, &g, top).map_err(e)?.complex, 0, 5);
        let closed = betti(&suspension(&z, top).map_err(e)?.complex, 0, 5);
        expect(name, &model, &closed)?;
        notes.push(format!("{name} {}", show(&model)));
    }
    Ok(notes.join("; "))
}

fn c4() -> Check {
    let mut notes = vec![];
    for (name, x) in samples(6) {
        let mut tables = vec![];
        for l in [3, 4] {
            let lp = loop_phi(x.clone(), l).map_err(e)?;
            if !lp.quasi_iso {
                return Err(format!("{name}: Φ not a quasi-iso at L={l}"));
            }
            tables.push(betti(&lp.omega.complex, 0, 4));
        }
        expect(&format!("{name} L=3 vs L=4"), &tables[0], &tables[1])?;
        notes.push(format!("{name} {}", show(&tables[0])));
    }
    Ok(notes.join("; "))
}

fn c5() -> Check {
    for f in [Field::Q, f2()] {
        let o = op("Com", f);
        for n in 1..=3 {
            let c = cobar_bar_operad(o.clone(), n).map_err(e)?;
            if !c.induced.quasi_iso {
                return Err(format!("{f} arity {n}: counit fails in degrees {:?}", c.induced.failing));
            }
            expect(&format!("{f} arity {n}"), &betti(&c.complex, -10, 10), &operad_betti(&o, n))?;
        }
    }
    Ok("Q and F2, arities 1..3".into())
}

fn c6() -> Check {
    let ctx = Ctx::new(op("Com", Field::Q));
    let x = Value::Chain(Arc::new(scalar_complex(Field::Q, 1, 1)));
    let xs = [x.clone(), x];
    let mut notes = vec![];
    for (src, m) in [("Tensor(2)", 2), ("Tensor(3)", 3), ("SigmaInf.OmegaInf", 0)] {
        let f = parse_id(src, Cat::Ch);
        let cr = betti(&cross_effect(&ctx, &f, &xs, 7).map_err(e)?, 0, 5);
        let co = betti(&co_cross_effect(&ctx, &f, &xs, 7).map_err(e)?, 0, 5);
        expect(src, &cr, &co)?;
        if m > 0 {
            // words in two letters of length m using both letters
            expect(&format!("{src} count"), &cr, &tab(&[(m as i64, (1 << m) - 2)]))?;
        }
        notes.push(format!("{src} {}", show(&cr)));
    }
    Ok(notes.join("; "))
}

fn c7() -> Check {
    let o = op("Com", Field::Q);
    let ctx = Ctx::new(o.clone());
    let f = parse_id("SigmaInf.OmegaInf", Cat::Ch);
    let r = chain_rule_check(&ctx, &f, &f, 2, &StabilizeOpts::new(0, 3)).map_err(e)?;
    let lhs: Table = r.rows.iter().filter(|w| w.lhs > 0).map(|w| (w.deg, w.lhs)).collect();
    let rhs: Table = r.rows.iter().filter(|w| w.rhs > 0).map(|w| (w.deg, w.rhs)).collect();
    let bar = |k: usize| betti(&bar_operad(o.clone(), k).unwrap().complex, 0, 6);
    let oracle = composition_betti(&bar, &bar, 2);
    expect("oracle", &oracle, &tab(&[(1, 2)]))?;
    expect("lhs", &lhs, &oracle)?;
    expect("rhs", &rhs, &oracle)?;
    if !r.equal {
        return Err("report says unequal".into());
    }
    Ok(format!("both sides {}", show(&lhs)))
}

fn c8() -> Check {
    let o = op("Com", Field::Q);
    let ctx = Ctx::new(o.clone());
    let f = parse_id("Id", Cat::Alg);
    let mut notes = vec![];
    for degs in [vec![0], vec![0, 0]] {
        for n in [1, 2] {
            let x = Value::Alg(free(&o, &degs, 6));
            let l = d_n_layer(&ctx, &f, n, &x, &StabilizeOpts::new(0, 2)).map_err(e)?;
            let (a, b) = l.betti();
            expect(&format!("{} generators n={n}", degs.len()), &a, &b)?;
            notes.push(format!("{}gen n={n} {}", degs.len(), show(&a)));
        }
    }
    Ok(notes.join(" "))
}

fn d_squared_zero(c: &WindowedComplex) -> Result<(), String> {
    for d in c.degrees() {
        if d > c.lo() && c.known(d) && c.known(d - 1)
            && !c.d(d - 1).mul(&c.d(d)).is_zero() {
                return Err(format!("d² ≠ 0 in degree {d}"));
            }
    }
    Ok(())
}

fn shipped(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/examples").join(name);
    std::fs::read_to_string(p).unwrap()
}

/// Fixed instances of each property suite; the randomized versions live in `properties`.
fn c9() -> Check {
    let o = op("Com", Field::Q);
    let q = Field::Q;
    let k0 = scalar_complex(q, 0, 1);
    let k1 = scalar_complex(q, 1, 1);
    // d² = 0
    for c in [
        bar_operad(o.clone(), 3).map_err(e)?.complex.as_ref().clone(),
        cobar_bar_operad(o.clone(), 3).map_err(e)?.complex.as_ref().clone(),
        bar_algebra(trivial_line(&o), 5).map_err(e)?.complex.as_ref().clone(),
        tensor(&direct_sum(&k0, &k1).map_err(e)?, &k1).map_err(e)?,
    ] {
        d_squared_zero(&c)?;
    }
    // Künneth
    let a = direct_sum(&k0, &scalar_complex(q, 2, 3)).map_err(e)?;
    let t = betti(&tensor(&a, &k1).map_err(e)?, -10, 10);
    expect("Künneth", &t, &tab(&[(1, 1), (3, 3)]))?;
    // Coxeter
    let sym = bar_operad_sym(op("Assoc", q), 3).map_err(e)?.1;
    let tp = tensor_power(&direct_sum(&k0, &k1).map_err(e)?, 3).map_err(e)?;
    for s in [&sym, &tp] {
        let bad = s.check();
        if !bad.is_empty() {
            return Err(bad.join("; "));
        }
    }
    // operad validation: built-ins, shipped files, and the deliberately broken one
    for name in ["Com", "Assoc"] {
        for n in 1..=4 {
            builtin_operad(name, n, q).map_err(e)?;
        }
    }
    for file in ["com3.op", "assoc3.op", "com3_f2.op"] {
        let bad = parse_operad_unchecked(&shipped(file)).map_err(e)?.validate();
        if !bad.is_empty() {
            return Err(format!("{file}: {}", bad.join("; ")));
        }
    }
    if parse_operad_unchecked(&shipped("broken.op")).map_err(e)?.validate().is_empty() {
        return Err("broken.op validated".into());
    }
    // window enlargement
    let narrow = betti(&bar_algebra(free(&o, &[1], 4), 4).map_err(e)?.complex, 0, 3);
    let wide = betti(&bar_algebra(free(&o, &[1], 6), 6).map_err(e)?.complex, 0, 3);
    expect("window", &narrow, &wide)?;
    // Maschke
    let avg = betti(&orbits_averaging(&tp).map_err(e)?, 0, 3);
    let hbar = betti(&orbits_bar(&tp, 5).map_err(e)?, 0, 3);
    expect("Maschke", &avg, &hbar)?;
    // telescope of a constant tower
    let c = Arc::new(a);
    let id = ChainMap::identity(c.clone());
    let tel = telescope(&[c.clone(), c.clone(), c.clone()], &[id.clone(), id]).map_err(e)?;
    expect("telescope", &betti(&tel, -10, 10), &betti(&c, -10, 10))?;
    Ok("fixed instances; randomized suites in `properties`".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check, u64); 9] = [
        ("derivatives of the identity", c1, 60 * 6),
        ("derivatives of Σ^∞Ω^∞", c2, 120),
        ("suspension models", c3, 60 * 3),
        ("loop comparison", c4, 60),
        ("cobar-bar counit", c5, 120),
        ("cross = co-cross", c6, 60),
        ("chain rule", c7, 120),
        ("layer routes", c8, 120),
        ("property suites", c9, 60),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let t = start.elapsed();
        let res = match res {
            Ok(_) if t > Duration::from_secs(*limit) => Err(format!("took {:.1} s, limit {limit} s", t.as_secs_f64())),
            r => r,
        };
        match res {
            Ok(note) => println!("criterion {} ({name}): PASS [{:.2} s] {note}", i + 1, t.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{:.2} s] {msg}", i + 1, t.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
