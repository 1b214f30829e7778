//! Line-oriented helpers shared by the input-file parsers.

use crate::linalg::{Field, Scalar};
use crate::{Error, Result};

pub fn perr<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, col, msg: msg.into() })
}

/// A non-empty line with comments stripped; `line` is 1-based.
#[derive(Clone, Debug)]
pub struct Line<'a> {
    pub line: usize,
    pub text: &'a str,
}

impl<'a> Line<'a> {
    /// Whitespace-separated words with their 1-based columns.
    pub fn words(&self) -> Vec<(usize, &'a str)> {
        let mut out = vec![];
        let mut start = None;
        for (i, ch) in self.text.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    out.push((s + 1, &self.text[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            out.push((s + 1, &self.text[s..]));
        }
        out
    }

    pub fn err<T>(&self, col: usize, msg: impl Into<String>) -> Result<T> {
        perr(self.line, col, msg)
    }

    /// Column (1-based) of a substring of this line.
    pub fn col_of(&self, s: &str) -> usize {
        let base = self.text.as_ptr() as usize;
        let p = s.as_ptr() as usize;
        if p >= base && p <= base + self.text.len() {
            p - base + 1
        } else {
            1
        }
    }
}

pub fn lines(src: &str) -> Vec<Line<'_>> {
    src.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let t = match l.find('#') {
                Some(k) => &l[..k],
                None => l,
            };
            (!t.trim().is_empty()).then_some(Line { line: i + 1, text: t })
        })
        .collect()
}

pub fn parse_field(s: &str) -> std::result::Result<Field, String> {
    let t = s.trim();
    if t == "Q" {
        return Ok(Field::Q);
    }
    let digits = t
        .strip_prefix("Fp")
        .or_else(|| t.strip_prefix("F_"))
        .or_else(|| t.strip_prefix('F'))
        .ok_or_else(|| format!("unknown field `{t}`"))?;
    let p: u32 = digits.parse().map_err(|_| format!("unknown field `{t}`"))?;
    Field::fp(p)
}

/// Splits `s` at top-level `+`/`-` into signed terms, ignoring signs inside parentheses.
fn split_terms(s: &str) -> Vec<(bool, &str)> {
    let mut out = vec![];
    let mut depth = 0i32;
    let mut neg = false;
    let mut start = 0;
    let bytes: Vec<(usize, char)> = s.char_indices().collect();
    let mut seen = false;
    for &(i, ch) in &bytes {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            '+' | '-' if depth == 0 => {
                // a sign directly after `*` or `/` belongs to a coefficient, never happens here
                if seen {
                    out.push((neg, &s[start..i]));
                }
                neg = ch == '-';
                start = i + ch.len_utf8();
                seen = false;
                continue;
            }
            _ => {}
        }
        if !ch.is_whitespace() {
            seen = true;
        }
    }
    if seen {
        out.push((neg, &s[start..]));
    }
    out
}

/// Parses `c1*L1 + c2*L2 - L3`; a bare `0` is the empty combination.
pub fn parse_combination(
    line: &Line<'_>,
    s: &str,
    field: Field,
) -> Result<Vec<(Scalar, String)>> {
    let t = s.trim();
    if t == "0" || t.is_empty() {
        return Ok(vec![]);
    }
    let mut out = vec![];
    for (neg, term) in split_terms(s) {
        let term = term.trim();
        let col = line.col_of(term);
        let (coef, atom) = match term.split_once('*') {
            Some((c, a)) => {
                let c = field.parse(c).map_err(|m| Error::Parse { line: line.line, col, msg: m })?;
                (c, a.trim())
            }
            None => {
                if term.chars().all(|ch| ch.is_ascii_digit() || ch == '/') {
                    return line.err(col, format!("coefficient `{term}` without a basis element"));
                }
                (field.one(), term)
            }
        };
        if atom.is_empty() {
            return line.err(col, "missing basis element");
        }
        let coef = if neg { coef.neg() } else { coef };
        out.push((coef, atom.to_string()));
    }
    Ok(out)
}

/// Extracts `{ ... }` bodies that may span several lines. Returns the header words and the
/// body lines (each entry separated by newlines or `;`).
pub struct Block<'a> {
    pub header: Line<'a>,
    pub body: Vec<Line<'a>>,
}

pub fn blocks<'a>(ls: &[Line<'a>]) -> Result<Vec<Block<'a>>> {
    let mut out = vec![];
    let mut i = 0;
    while i < ls.len() {
        let l = &ls[i];
        match l.text.find('{') {
            None => {
                out.push(Block { header: l.clone(), body: vec![] });
                i += 1;
            }
            Some(k) => {
                let header = Line { line: l.line, text: &l.text[..k] };
                let rest = &l.text[k + 1..];
                let mut body = vec![];
                if let Some(e) = rest.find('}') {
                    push_entries(&mut body, l.line, &rest[..e]);
                    if !rest[e + 1..].trim().is_empty() {
                        return l.err(k + e + 3, "text after `}`");
                    }
                    out.push(Block { header, body });
                    i += 1;
                    continue;
                }
                push_entries(&mut body, l.line, rest);
                let mut j = i + 1;
                loop {
                    if j >= ls.len() {
                        return l.err(k + 1, "unclosed `{`");
                    }
                    let m = &ls[j];
                    if let Some(e) = m.text.find('}') {
                        push_entries(&mut body, m.line, &m.text[..e]);
                        break;
                    }
                    push_entries(&mut body, m.line, m.text);
                    j += 1;
                }
                out.push(Block { header, body });
                i = j + 1;
            }
        }
    }
    Ok(out)
}

fn push_entries<'a>(body: &mut Vec<Line<'a>>, line: usize, text: &'a str) {
    for part in text.split(';') {
        if !part.trim().is_empty() {
            body.push(Line { line, text: part });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_terms() {
        let l = Line { line: 1, text: "2*a - 1/2*b + c(x,y-z)" };
        let v = parse_combination(&l, l.text, Field::Q).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[1].0, Field::Q.frac(-1, 2).unwrap());
        assert_eq!(v[2].1, "c(x,y-z)");
    }

    #[test]
    fn fields() {
        assert_eq!(parse_field("Q").unwrap(), Field::Q);
        assert_eq!(parse_field("F2").unwrap(), Field::fp(2).unwrap());
        assert_eq!(parse_field("Fp3").unwrap(), Field::fp(3).unwrap());
        assert!(parse_field("F4").is_err());
    }

    #[test]
    fn multi_line_blocks() {
        let src = "arity 2 {\n gen a deg 0\n gen b deg 1 }\nd 2 { a -> b }";
        let ls = lines(src);
        let b = blocks(&ls).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].body.len(), 2);
        assert!(blocks(&lines("x {\n a")).is_err());
    }
}
