use super::complex::WindowedComplex;
use crate::linalg::matrix::collect;
use crate::linalg::{Field, SparseMatrix};
use crate::text::{lines, parse_combination, parse_field, perr};
use crate::Result;
use std::collections::{BTreeMap, HashMap};

/// A parsed complex together with its declared name.
#[derive(Clone, Debug)]
pub struct NamedComplex {
    pub name: String,
    pub complex: WindowedComplex,
}

/// Parses the `complex NAME field F` / `gen L deg D` / `d L = ...` format.
pub fn parse_complex(src: &str) -> Result<NamedComplex> {
    let ls = lines(src);
    let Some(first) = ls.first() else {
        return perr(1, 1, "no complex declared");
    };
    let w = first.words();
    if w.len() != 4 || w[0].1 != "complex" || w[2].1 != "field" {
        return first.err(1, "expected `complex NAME field Q|Fp`");
    }
    let name = w[1].1.to_string();
    let field = parse_field(w[3].1).map_err(|m| crate::Error::Parse { line: first.line, col: w[3].0, msg: m })?;
    let mut gens: Vec<(String, i64)> = vec![];
    let mut where_: HashMap<String, usize> = HashMap::new();
    let mut diffs: Vec<(usize, usize, &str, crate::text::Line)> = vec![];
    for l in &ls[1..] {
        let w = l.words();
        match w[0].1 {
            "gen" => {
                if w.len() != 4 || w[2].1 != "deg" {
                    return l.err(w[0].0, "expected `gen LABEL deg D`");
                }
                let d: i64 = w[3].1.parse().or_else(|_| l.err(w[3].0, "degree must be an integer"))?;
                if where_.contains_key(w[1].1) {
                    return l.err(w[1].0, format!("duplicate generator `{}`", w[1].1));
                }
                where_.insert(w[1].1.to_string(), gens.len());
                gens.push((w[1].1.to_string(), d));
            }
            "d" => {
                let Some(eq) = l.text.find('=') else {
                    return l.err(w[0].0, "expected `d LABEL = combination`");
                };
                let lab = l.text[..eq].trim().trim_start_matches('d').trim();
                let Some(&g) = where_.get(lab) else {
                    return l.err(w.get(1).map_or(1, |x| x.0), format!("unknown generator `{lab}`"));
                };
                diffs.push((g, eq + 2, &l.text[eq + 1..], l.clone()));
            }
            other => return l.err(w[0].0, format!("unknown directive `{other}`")),
        }
    }
    if gens.is_empty() {
        return Ok(NamedComplex { name, complex: WindowedComplex::zero(field) });
    }
    let lo = gens.iter().map(|g| g.1).min().unwrap();
    let hi = gens.iter().map(|g| g.1).max().unwrap();
    let mut by_deg: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, g) in gens.iter().enumerate() {
        by_deg.entry(g.1).or_default().push(i);
    }
    let pos: HashMap<usize, usize> =
        by_deg.values().flat_map(|v| v.iter().enumerate().map(|(k, &g)| (g, k))).collect();
    let mut images: HashMap<usize, Vec<(usize, crate::linalg::Scalar)>> = HashMap::new();
    for (g, col, rhs, l) in diffs {
        let terms = parse_combination(&l, rhs, field)?;
        let mut v = vec![];
        for (c, a) in terms {
            let Some(&t) = where_.get(&a) else {
                return l.err(col, format!("unknown generator `{a}`"));
            };
            if gens[t].1 != gens[g].1 - 1 {
                return l.err(col, format!("`{a}` is not in degree {}", gens[g].1 - 1));
            }
            v.push((pos[&t], c));
        }
        if images.insert(g, collect(v)).is_some() {
            return l.err(1, format!("differential of `{}` given twice", gens[g].0));
        }
    }
    let mut labels = vec![];
    let mut ds = vec![];
    for deg in lo..=hi {
        let ids = by_deg.get(&deg).cloned().unwrap_or_default();
        labels.push(ids.iter().map(|&i| gens[i].0.clone()).collect());
        let rows = if deg == lo { 0 } else { by_deg.get(&(deg - 1)).map_or(0, |v| v.len()) };
        let cols = ids.iter().map(|i| images.remove(i).unwrap_or_default()).collect();
        ds.push(SparseMatrix::from_cols(field, rows, cols));
    }
    let complex = WindowedComplex::new(field, lo, labels, ds, true)?;
    Ok(NamedComplex { name, complex })
}

/// Writes a complex back in the text format.
pub fn write_complex(name: &str, c: &WindowedComplex) -> String {
    let mut s = format!("complex {name} field {}\n", field_name(c.field));
    for deg in c.degrees() {
        for l in c.labels(deg) {
            s.push_str(&format!("gen {l} deg {deg}\n"));
        }
    }
    for deg in c.degrees() {
        let d = c.d(deg);
        for (j, l) in c.labels(deg).iter().enumerate() {
            let col = d.col(j);
            if col.is_empty() {
                continue;
            }
            let terms: Vec<String> =
                col.iter().map(|(r, x)| format!("{x}*{}", c.labels(deg - 1)[*r])).collect();
            s.push_str(&format!("d {l} = {}\n", terms.join(" + ")));
        }
    }
    s
}

pub fn field_name(f: Field) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology::homology;

    #[test]
    fn parses_and_computes() {
        let src = "# times two\ncomplex C field Q\ngen a deg 1\ngen b deg 0\nd a = 2*b\n";
        let c = parse_complex(src).unwrap();
        assert_eq!(c.name, "C");
        assert!(homology(&c.complex).table().is_empty());
        let again = parse_complex(&write_complex("C", &c.complex)).unwrap();
        assert_eq!(again.complex, c.complex);
    }

    #[test]
    fn errors_located() {
        match parse_complex("complex C field Q\ngen a deg 1\nd a = 2*zz\n") {
            Err(crate::Error::Parse { line, .. }) => assert_eq!(line, 3),
            r => panic!("{r:?}"),
        }
        assert!(parse_complex("").is_err());
        assert!(parse_complex("complex C field F4").is_err());
    }

    #[test]
    fn empty_complex() {
        let c = parse_complex("complex Z field Q\n").unwrap();
        assert!(c.complex.is_zero());
    }
}
