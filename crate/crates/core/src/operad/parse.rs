use super::core::Operad;
use super::symseq::Component;
use crate::linalg::matrix::collect;
use crate::linalg::{Field, SVec};
use crate::text::{blocks, lines, parse_combination, parse_field, perr, Line};
use crate::{Error, Result};
use std::collections::HashMap;

fn num(l: &Line<'_>, col: usize, s: &str, what: &str) -> Result<usize> {
    s.parse().or_else(|_| l.err(col, format!("{what} must be a natural number")))
}

/// Parses an operad file without running the axiom checks.
pub fn parse_operad_unchecked(src: &str) -> Result<Operad> {
    let ls = lines(src);
    let bs = blocks(&ls)?;
    let Some(first) = bs.first() else {
        return perr(1, 1, "no operad declared");
    };
    let h = &first.header;
    let w = h.words();
    if w.len() != 6 || w[0].1 != "operad" || w[2].1 != "field" || w[4].1 != "truncation" {
        return h.err(1, "expected `operad NAME field Q|Fp truncation N`");
    }
    let name = w[1].1.to_string();
    let field: Field = parse_field(w[3].1).map_err(|m| Error::Parse { line: h.line, col: w[3].0, msg: m })?;
    let trunc = num(h, w[5].0, w[5].1, "truncation")?;
    if trunc == 0 {
        return h.err(w[5].0, "truncation must be at least 1");
    }
    // generators first, so later blocks may refer to any arity
    let mut gens: Vec<Vec<(String, i64, usize)>> = vec![vec![]; trunc + 1];
    for b in &bs[1..] {
        let w = b.header.words();
        if w.first().map(|x| x.1) != Some("arity") {
            continue;
        }
        if w.len() != 2 {
            return b.header.err(1, "expected `arity K { ... }`");
        }
        let k = num(&b.header, w[1].0, w[1].1, "arity")?;
        if k == 0 || k > trunc {
            return b.header.err(w[1].0, format!("arity {k} outside 1..={trunc}"));
        }
        for e in &b.body {
            let ew = e.words();
            if ew.len() != 4 || ew[0].1 != "gen" || ew[2].1 != "deg" {
                return e.err(ew.first().map_or(1, |x| x.0), "expected `gen LABEL deg D`");
            }
            let d: i64 = ew[3].1.parse().or_else(|_| e.err(ew[3].0, "degree must be an integer"))?;
            if gens[k].iter().any(|g| g.0 == ew[1].1) {
                return e.err(ew[1].0, format!("duplicate generator `{}` in arity {k}", ew[1].1));
            }
            gens[k].push((ew[1].1.to_string(), d, e.line));
        }
    }
    // each arity sorted by degree (stable)
    let mut comps: Vec<Component> = vec![];
    let mut index: Vec<HashMap<String, usize>> = vec![];
    for (k, g) in gens.iter().enumerate() {
        let mut o: Vec<usize> = (0..g.len()).collect();
        o.sort_by_key(|&i| g[i].1);
        let labels: Vec<String> = o.iter().map(|&i| g[i].0.clone()).collect();
        let degs: Vec<i64> = o.iter().map(|&i| g[i].1).collect();
        index.push(labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect());
        comps.push(Component::trivial(k, labels, degs));
    }
    if trunc >= 1 && !gens[1].is_empty() && (gens[1].len() != 1 || gens[1][0].1 != 0) {
        return perr(gens[1][0].2, 1, "arity 1 must contain exactly the unit in degree 0");
    }
    let lookup = |l: &Line<'_>, col: usize, k: usize, s: &str| -> Result<usize> {
        match index.get(k).and_then(|m| m.get(s)) {
            Some(&i) => Ok(i),
            None => l.err(col, format!("unknown element `{s}` in arity {k}")),
        }
    };
    let to_vec = |l: &Line<'_>, k: usize, rhs: &str| -> Result<SVec> {
        let terms = parse_combination(l, rhs, field)?;
        let mut v = vec![];
        for (c, a) in terms {
            let col = l.col_of(rhs);
            v.push((lookup(l, col, k, &a)?, c));
        }
        Ok(collect(v))
    };
    let mut table: HashMap<(usize, usize, usize), Vec<SVec>> = HashMap::new();
    let mut seen_swaps: Vec<Vec<bool>> = comps.iter().map(|c| vec![false; c.swaps.len()]).collect();
    for b in &bs[1..] {
        let h = &b.header;
        let w = h.words();
        match w.first().map(|x| x.1) {
            Some("arity") => {}
            Some("action") => {
                if w.len() != 4 || w[2].1 != "swap" {
                    return h.err(1, "expected `action K swap I { ... }`");
                }
                let k = num(h, w[1].0, w[1].1, "arity")?;
                let i = num(h, w[3].0, w[3].1, "transposition index")?;
                if k > trunc || i == 0 || i >= k {
                    return h.err(w[3].0, format!("no transposition σ{i} in arity {k}"));
                }
                if seen_swaps[k][i - 1] {
                    return h.err(1, format!("action of σ{i} in arity {k} given twice"));
                }
                seen_swaps[k][i - 1] = true;
                for e in &b.body {
                    let Some((lhs, rhs)) = e.text.split_once("->") else {
                        return e.err(1, "expected `LABEL -> ±LABEL`");
                    };
                    let src = lookup(e, e.col_of(lhs.trim()), k, lhs.trim())?;
                    let r = rhs.trim();
                    let (neg, lab) = match r.strip_prefix('-') {
                        Some(x) => (true, x.trim()),
                        None => (false, r.strip_prefix('+').unwrap_or(r).trim()),
                    };
                    let tgt = lookup(e, e.col_of(lab), k, lab)?;
                    comps[k].swaps[i - 1][src] = (tgt, neg);
                }
            }
            Some("compose") => {
                if w.len() != 4 {
                    return h.err(1, "expected `compose K I L { ... }`");
                }
                let k = num(h, w[1].0, w[1].1, "arity")?;
                let i = num(h, w[2].0, w[2].1, "slot")?;
                let l = num(h, w[3].0, w[3].1, "arity")?;
                if k > trunc || l > trunc || i == 0 || i > k {
                    return h.err(w[2].0, format!("no composition ∘_{i} from arity {k}"));
                }
                if k < 2 || l < 2 {
                    return h.err(w[1].0, "compositions with the unit are implicit");
                }
                let r = k + l - 1;
                let (dk, dl) = (comps[k].dim(), comps[l].dim());
                let entry = table.entry((k, i, l)).or_insert_with(|| vec![vec![]; dk * dl]);
                for e in &b.body {
                    let Some((lhs, rhs)) = e.text.split_once("->") else {
                        return e.err(1, "expected `A o_I B -> combination`");
                    };
                    let lw: Vec<&str> = lhs.split_whitespace().collect();
                    if lw.len() != 3 || lw[1] != format!("o_{i}") {
                        return e.err(e.col_of(lhs.trim()), format!("expected `A o_{i} B`"));
                    }
                    let a = lookup(e, e.col_of(lw[0]), k, lw[0])?;
                    let bb = lookup(e, e.col_of(lw[2]), l, lw[2])?;
                    if r > trunc {
                        continue;
                    }
                    entry[a * dl + bb] = to_vec(e, r, rhs)?;
                }
            }
            Some("d") => {
                if w.len() != 2 {
                    return h.err(1, "expected `d K { ... }`");
                }
                let k = num(h, w[1].0, w[1].1, "arity")?;
                if k > trunc {
                    return h.err(w[1].0, format!("arity {k} above the truncation"));
                }
                for e in &b.body {
                    let Some((lhs, rhs)) = e.text.split_once("->") else {
                        return e.err(1, "expected `LABEL -> combination`");
                    };
                    let src = lookup(e, e.col_of(lhs.trim()), k, lhs.trim())?;
                    comps[k].d[src] = to_vec(e, k, rhs)?;
                }
            }
            Some(other) => return h.err(1, format!("unknown block `{other}`")),
            None => return h.err(1, "empty block header"),
        }
    }
    Operad::from_parts(name, trunc, field, comps, table)
}

/// Parses and validates an operad file.
pub fn parse_operad(src: &str) -> Result<Operad> {
    let op = parse_operad_unchecked(src)?;
    let bad = op.validate();
    if !bad.is_empty() {
        return Err(Error::Invalid(bad.join("; ")));
    }
    Ok(op)
}

/// Writes an operad in the file format.
pub fn write_operad(op: &Operad) -> String {
    let mut s = format!("operad {} field {} truncation {}\n", op.name, op.field(), op.trunc);
    for k in 2..=op.trunc {
        let c = op.comp(k);
        if c.dim() == 0 {
            continue;
        }
        s.push_str(&format!("arity {k} {{\n"));
        for (l, d) in c.labels.iter().zip(&c.degs) {
            s.push_str(&format!("  gen {l} deg {d}\n"));
        }
        s.push_str("}\n");
        for (i, sw) in c.swaps.iter().enumerate() {
            if sw.iter().enumerate().all(|(b, &(t, n))| t == b && !n) {
                continue;
            }
            s.push_str(&format!("action {k} swap {} {{\n", i + 1));
            for (b, &(t, n)) in sw.iter().enumerate() {
                s.push_str(&format!("  {} -> {}{}\n", c.labels[b], if n { "-" } else { "" }, c.labels[t]));
            }
            s.push_str("}\n");
        }
        if c.d.iter().any(|v| !v.is_empty()) {
            s.push_str(&format!("d {k} {{\n"));
            for (b, v) in c.d.iter().enumerate() {
                if !v.is_empty() {
                    s.push_str(&format!("  {} -> {}\n", c.labels[b], combination(v, &op.comp(k).labels)));
                }
            }
            s.push_str("}\n");
        }
    }
    for m in 2..=op.trunc {
        for n in 2..=op.trunc {
            let r = m + n - 1;
            if r > op.trunc || op.dim(m) == 0 || op.dim(n) == 0 {
                continue;
            }
            for i in 1..=m {
                s.push_str(&format!("compose {m} {i} {n} {{\n"));
                for a in 0..op.dim(m) {
                    for b in 0..op.dim(n) {
                        let v = op.compose_basis(m, i, a, n, b);
                        s.push_str(&format!(
                            "  {} o_{i} {} -> {}\n",
                            op.comp(m).labels[a],
                            op.comp(n).labels[b],
                            combination(&v, &op.comp(r).labels)
                        ));
                    }
                }
                s.push_str("}\n");
            }
        }
    }
    s
}

fn combination(v: &SVec, labels: &[String]) -> String {
    if v.is_empty() {
        return "0".into();
    }
    let terms: Vec<String> = v.iter().map(|(i, c)| format!("{c}*{}", labels[*i])).collect();
    terms.join(" + ").replace("+ -", "- ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::builtin_operad;

    const COM3: &str = "operad C field Q truncation 3
arity 2 { gen m deg 0 }
arity 3 { gen t deg 0 }
compose 2 1 2 { m o_1 m -> t }
compose 2 2 2 { m o_2 m -> t }
";

    #[test]
    fn com3_matches_builtin() {
        let op = parse_operad(COM3).unwrap();
        assert!(op.same_structure(&builtin_operad("Com", 3, Field::Q).unwrap()));
    }

    #[test]
    fn roundtrip_assoc() {
        let a = builtin_operad("Assoc", 3, Field::Q).unwrap();
        let b = parse_operad(&write_operad(&a)).unwrap();
        assert!(a.same_structure(&b));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_operad(""), Err(Error::Parse { msg, .. }) if msg == "no operad declared"));
        let bad = "operad X field Q truncation 2\narity 2 { gen a deg 0; gen b deg 0 }\naction 2 swap 1 { a -> b; b -> -a }\n";
        let e = parse_operad(bad).unwrap_err().to_string();
        assert!(e.contains("Coxeter"), "{e}");
        let e = parse_operad("operad X field Q truncation 2\narity 2 { gen a deg 0 }\nd 2 { a -> zz }\n");
        assert!(matches!(e, Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn derivation_failure_located() {
        let src = "operad D field Q truncation 3
arity 2 { gen a deg 1; gen b deg 0 }
arity 3 { gen x deg 1; gen y deg 0; gen z deg 1 }
d 2 { a -> b }
d 3 { x -> 2*y }
compose 2 1 2 { a o_1 a -> 0; a o_1 b -> x; b o_1 a -> x; b o_1 b -> y }
compose 2 2 2 { a o_2 a -> 0; a o_2 b -> x; b o_2 a -> x; b o_2 b -> y }
";
        let op = parse_operad_unchecked(src).unwrap();
        let rep = op.validate();
        assert!(rep.iter().any(|m| m.contains("derivation")), "{rep:?}");
    }
}
