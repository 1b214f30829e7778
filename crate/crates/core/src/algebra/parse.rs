use super::free::{elt_axpy, Elt, QuasiFree};
use crate::operad::tree::Tree;
use crate::operad::Operad;
use crate::text::{blocks, lines, parse_combination, perr, Line};
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::Arc;

/// Parses an algebra file against the operad it names. Differentials are checked for degree
/// here; `D² = 0` is checked when the algebra is realized.
pub fn parse_algebra(src: &str, op: Arc<Operad>) -> Result<(String, QuasiFree)> {
    let ls = lines(src);
    let bs = blocks(&ls)?;
    let Some(first) = bs.first() else {
        return perr(1, 1, "no algebra declared");
    };
    let h = &first.header;
    let w = h.words();
    if w.len() != 4 || w[0].1 != "algebra" || w[2].1 != "over" {
        return h.err(1, "expected `algebra NAME over OPERAD`");
    }
    if w[3].1 != op.name {
        return h.err(w[3].0, format!("algebra is over `{}` but the operad is `{}`", w[3].1, op.name));
    }
    let name = w[1].1.to_string();
    let mut labels = vec![];
    let mut degs = vec![];
    let mut index: HashMap<String, usize> = HashMap::new();
    for b in &bs[1..] {
        if !b.body.is_empty() || b.header.text.contains('{') {
            continue;
        }
        let ew = b.header.words();
        if ew.first().map(|x| x.1) == Some("twist") {
            continue;
        }
        if ew.len() != 4 || ew[0].1 != "gen" || ew[2].1 != "deg" {
            return b.header.err(ew.first().map_or(1, |x| x.0), "expected `gen LABEL deg D`");
        }
        let d: i64 = ew[3].1.parse().or_else(|_| b.header.err(ew[3].0, "degree must be an integer"))?;
        if d < 0 {
            return b.header.err(ew[3].0, "generators must sit in nonnegative degrees");
        }
        if index.insert(ew[1].1.to_string(), labels.len()).is_some() {
            return b.header.err(ew[1].0, format!("duplicate generator `{}`", ew[1].1));
        }
        labels.push(ew[1].1.to_string());
        degs.push(d);
    }
    let mut q = QuasiFree::free(op.clone(), labels, degs)?;
    let field = op.field();
    for b in &bs[1..] {
        let ew = b.header.words();
        if ew.first().map(|x| x.1) != Some("twist") {
            if !b.body.is_empty() {
                return b.header.err(1, "unknown block");
            }
            continue;
        }
        if ew.len() != 2 {
            return b.header.err(1, "expected `twist K { ... }`");
        }
        let k: usize = ew[1].1.parse().or_else(|_| b.header.err(ew[1].0, "arity must be a natural number"))?;
        if k == 0 || k > op.trunc {
            return b.header.err(ew[1].0, format!("arity {k} outside 1..={}", op.trunc));
        }
        for e in &b.body {
            let Some((lhs, rhs)) = e.text.split_once("->") else {
                return e.err(1, "expected `LABEL -> combination`");
            };
            let lt = lhs.trim();
            let &v = index.get(lt).ok_or_else(|| Error::Parse {
                line: e.line,
                col: e.col_of(lt),
                msg: format!("unknown generator `{lt}`"),
            })?;
            let mut acc = Elt::new();
            for (c, atom) in parse_combination(e, rhs, field)? {
                let m = monomial(e, rhs, &atom, k, &op, &index, &q)?;
                elt_axpy(&mut acc, &c, &m);
            }
            for t in acc.keys() {
                if q.mono_deg(t) != q.degs[v] - 1 {
                    return e.err(e.col_of(rhs.trim()), format!("twist of `{lt}` must have degree {}", q.degs[v] - 1));
                }
            }
            let mut dv = q.dgen[v].clone();
            elt_axpy(&mut dv, &field.one(), &acc);
            q.dgen[v] = dv;
        }
    }
    Ok((name, q))
}

fn monomial(
    e: &Line<'_>,
    rhs: &str,
    atom: &str,
    k: usize,
    op: &Operad,
    index: &HashMap<String, usize>,
    q: &QuasiFree,
) -> Result<Elt> {
    let col = rhs.find(atom).map_or(1, |i| e.col_of(&rhs[i..]));
    let gen = |s: &str| -> Result<usize> {
        index.get(s.trim()).copied().ok_or_else(|| Error::Parse {
            line: e.line,
            col,
            msg: format!("unknown generator `{}`", s.trim()),
        })
    };
    if k == 1 {
        return Ok(q.gen(gen(atom)?));
    }
    let (p, args) = atom
        .split_once('(')
        .and_then(|(p, a)| a.strip_suffix(')').map(|a| (p.trim(), a)))
        .ok_or_else(|| Error::Parse { line: e.line, col, msg: format!("expected `op(L1,...,L{k})`, got `{atom}`") })?;
    let pi = op.comp(k).index_of(p).ok_or_else(|| Error::Parse {
        line: e.line,
        col,
        msg: format!("unknown operation `{p}` in arity {k}"),
    })?;
    let vs: Vec<usize> = args.split(',').map(gen).collect::<Result<_>>()?;
    if vs.len() != k {
        return perr(e.line, col, format!("`{p}` takes {k} arguments"));
    }
    Ok(q.canon(Tree::Node(pi as u32, vs.into_iter().map(|v| Tree::Leaf(v as u32)).collect())))
}

/// Writes a presentation back in the file format.
pub fn write_algebra(name: &str, q: &QuasiFree) -> String {
    let mut s = format!("algebra {name} over {}\n", q.op.name);
    for (l, d) in q.labels.iter().zip(&q.degs) {
        s.push_str(&format!("gen {l} deg {d}\n"));
    }
    for k in 1..=q.op.trunc {
        let mut body = String::new();
        for (v, dv) in q.dgen.iter().enumerate() {
            let terms: Vec<String> = dv
                .iter()
                .filter(|(t, _)| match t {
                    Tree::Leaf(_) => k == 1,
                    Tree::Node(_, ch) => ch.len() == k,
                })
                .map(|(t, c)| {
                    let m = match t {
                        Tree::Leaf(w) => q.labels[*w as usize].clone(),
                        Tree::Node(p, ch) => {
                            let args: Vec<String> = ch.iter().map(|l| q.show(l)).collect();
                            format!("{}({})", q.op.comp(k).labels[*p as usize], args.join(","))
                        }
                    };
                    format!("{c}*{m}")
                })
                .collect();
            if !terms.is_empty() {
                body.push_str(&format!("  {} -> {}\n", q.labels[v], terms.join(" + ").replace("+ -", "- ")));
            }
        }
        if !body.is_empty() {
            s.push_str(&format!("twist {k} {{\n{body}}}\n"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::linalg::Field;
    use crate::operad::builtin_operad;

    fn com3() -> Arc<Operad> {
        let mut o = builtin_operad("Com", 3, Field::Q).unwrap();
        o.name = "Com".into();
        Arc::new(o)
    }

    #[test]
    fn parses_and_round_trips() {
        let src = "algebra A over Com\ngen x deg 0\ngen y deg 1\ntwist 2 { y -> mu2(x,x) }\n";
        let (n, q) = parse_algebra(src, com3()).unwrap();
        assert_eq!(n, "A");
        assert_eq!(q.dgen[1].len(), 1);
        let (_, q2) = parse_algebra(&write_algebra("A", &q), com3()).unwrap();
        assert_eq!(q.dgen, q2.dgen);
        let a = Algebra::free("A", q, 3).unwrap();
        assert!(a.validate(200).is_empty());
    }

    #[test]
    fn located_errors() {
        let e = parse_algebra("algebra A over Com\ngen x deg 0\ntwist 2 { x -> mu2(x,z) }\n", com3()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_algebra("algebra A over Com\ngen x deg 0\ngen y deg 1\ntwist 2 { y -> mu2(x,y) }\n", com3());
        assert!(matches!(e, Err(Error::Parse { line: 4, .. })));
        let e = parse_algebra("algebra A over Lie\n", com3());
        assert!(matches!(e, Err(Error::Parse { line: 1, .. })));
    }
}
