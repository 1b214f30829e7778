//! Functor expressions: grammar, category inference and the reduced flag.

use crate::{Error, Result};
use std::fmt;

/// `Alg` is algebras over the ambient operad, `ChP` nonnegatively graded complexes, `Ch` all
/// complexes. `ChP` objects may be used wherever `Ch` is expected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cat {
    Alg,
    ChP,
    Ch,
}

impl Cat {
    /// Objects of `self` are objects of `o`.
    pub fn fits(self, o: Cat) -> bool {
        self == o || (self == Cat::ChP && o == Cat::Ch)
    }

    pub fn is_chain(self) -> bool {
        self != Cat::Alg
    }

    fn parse(s: &str) -> Option<Cat> {
        match s {
            "Alg" => Some(Cat::Alg),
            "Ch+" | "ChP" => Some(Cat::ChP),
            "Ch" => Some(Cat::Ch),
            _ => None,
        }
    }
}

impl fmt::Display for Cat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cat::Alg => "Alg",
            Cat::ChP => "Ch+",
            Cat::Ch => "Ch",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Id,
    /// The constant zero functor.
    Zero,
    ForgetU,
    Free,
    Triv,
    Red0,
    Shift(i64),
    Susp,
    Loop,
    SigmaInf,
    OmegaInf,
    BarAlg,
    TensorPower(usize),
}

impl Atom {
    fn signatures(&self) -> Vec<(Cat, Cat)> {
        use Cat::*;
        match self {
            Atom::Id | Atom::Zero | Atom::Susp | Atom::Loop => vec![(Alg, Alg), (Ch, Ch)],
            Atom::ForgetU => vec![(Alg, ChP)],
            Atom::Free | Atom::Triv => vec![(ChP, Alg)],
            Atom::Red0 => vec![(Ch, ChP)],
            Atom::Shift(_) | Atom::TensorPower(_) => vec![(Ch, Ch)],
            Atom::SigmaInf | Atom::BarAlg => vec![(Alg, ChP)],
            Atom::OmegaInf => vec![(Ch, Alg)],
        }
    }

    fn name(&self) -> String {
        match self {
            Atom::Id => "Id".into(),
            Atom::Zero => "0".into(),
            Atom::ForgetU => "U".into(),
            Atom::Free => "Free".into(),
            Atom::Triv => "Triv".into(),
            Atom::Red0 => "Red0".into(),
            Atom::Shift(k) => format!("S^{k}"),
            Atom::Susp => "Susp".into(),
            Atom::Loop => "Loop".into(),
            Atom::SigmaInf => "SigmaInf".into(),
            Atom::OmegaInf => "OmegaInf".into(),
            Atom::BarAlg => "Bar".into(),
            Atom::TensorPower(n) => format!("Tensor({n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Atom(Atom),
    Sum(Box<FunctorExpr>, Box<FunctorExpr>),
    /// `Compose(F, G)` is `F ∘ G`.
    Compose(Box<FunctorExpr>, Box<FunctorExpr>),
}

/// A typed functor expression; every node carries its domain and codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorExpr {
    pub node: Node,
    pub dom: Cat,
    pub cod: Cat,
}

impl FunctorExpr {
    pub fn parse(src: &str, domain: Option<Cat>) -> Result<FunctorExpr> {
        let raw = Parser::new(src).parse_all()?;
        raw.resolve(domain)
    }

    pub fn atom(a: Atom, dom: Cat, cod: Cat) -> Result<FunctorExpr> {
        if !a.signatures().contains(&(dom, cod)) {
            return Err(Error::Category(format!("{} is not a functor {dom} → {cod}", a.name())));
        }
        Ok(FunctorExpr { node: Node::Atom(a), dom, cod })
    }

    pub fn compose(f: FunctorExpr, g: FunctorExpr) -> Result<FunctorExpr> {
        if !g.cod.fits(f.dom) {
            return Err(Error::Category(format!("cannot apply {f} ({}) after {g} ({})", f.dom, g.cod)));
        }
        let (dom, cod) = (g.dom, f.cod);
        Ok(FunctorExpr { node: Node::Compose(Box::new(f), Box::new(g)), dom, cod })
    }

    pub fn sum(f: FunctorExpr, g: FunctorExpr) -> Result<FunctorExpr> {
        let cod = join_cod(f.cod, g.cod)
            .ok_or_else(|| Error::Category(format!("sum of {} and {} is only defined for chain values", f.cod, g.cod)))?;
        if f.dom != g.dom {
            return Err(Error::Category(format!("summands have domains {} and {}", f.dom, g.dom)));
        }
        let dom = f.dom;
        Ok(FunctorExpr { node: Node::Sum(Box::new(f), Box::new(g)), dom, cod })
    }

    /// `F(0) ≃ 0`.
    pub fn reduced(&self) -> bool {
        match &self.node {
            Node::Atom(Atom::TensorPower(0)) => false,
            Node::Atom(_) => true,
            Node::Sum(f, g) | Node::Compose(f, g) => f.reduced() && g.reduced(),
        }
    }

    /// True when some node builds a bar construction.
    pub fn uses_bar(&self) -> bool {
        match &self.node {
            Node::Atom(a) => matches!(a, Atom::SigmaInf | Atom::BarAlg),
            Node::Sum(f, g) | Node::Compose(f, g) => f.uses_bar() || g.uses_bar(),
        }
    }

    /// Degree through which the input must be known for the value to be known through `top`.
    pub fn input_top(&self, top: i64) -> i64 {
        match &self.node {
            Node::Atom(a) => match (a, self.dom) {
                (Atom::Shift(k), _) => top - k,
                (Atom::Susp, _) => top - 1,
                (Atom::Loop, _) => top + 1,
                _ => top,
            },
            Node::Sum(f, g) => f.input_top(top).max(g.input_top(top)),
            Node::Compose(f, g) => g.input_top(f.input_top(top)),
        }
    }
}

fn join_cod(a: Cat, b: Cat) -> Option<Cat> {
    match (a, b) {
        (Cat::ChP, Cat::ChP) => Some(Cat::ChP),
        (x, y) if x.is_chain() && y.is_chain() => Some(Cat::Ch),
        _ => None,
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Atom(a) => f.write_str(&a.name()),
            Node::Compose(a, b) => {
                let wrap = |e: &FunctorExpr| matches!(e.node, Node::Sum(..));
                let l = if wrap(a) { format!("({a})") } else { a.to_string() };
                let r = if wrap(b) { format!("({b})") } else { b.to_string() };
                write!(f, "{l}.{r}")
            }
            Node::Sum(a, b) => write!(f, "{a} + {b}"),
        }
    }
}

/// Untyped parse tree.
#[derive(Clone, Debug)]
enum Raw {
    Atom(Atom, Option<Cat>, usize),
    Sum(Box<Raw>, Box<Raw>),
    Compose(Box<Raw>, Box<Raw>),
}

impl Raw {
    fn col(&self) -> usize {
        match self {
            Raw::Atom(_, _, c) => *c,
            Raw::Sum(a, _) | Raw::Compose(a, _) => a.col(),
        }
    }

    /// All typings `(dom, cod)`.
    fn typings(&self) -> Vec<(Cat, Cat)> {
        let mut out = match self {
            Raw::Atom(a, tag, _) => a.signatures().into_iter().filter(|(d, _)| tag.is_none_or(|t| t == *d)).collect(),
            Raw::Compose(f, g) => {
                let mut v = vec![];
                for (gd, gc) in g.typings() {
                    for (fd, fc) in f.typings() {
                        if gc.fits(fd) {
                            v.push((gd, fc));
                        }
                    }
                }
                v
            }
            Raw::Sum(f, g) => {
                let mut v = vec![];
                for (fd, fc) in f.typings() {
                    for (gd, gc) in g.typings() {
                        if fd == gd {
                            if let Some(c) = join_cod(fc, gc) {
                                v.push((fd, c));
                            }
                        }
                    }
                }
                v
            }
        };
        out.sort();
        out.dedup();
        out
    }

    fn resolve(&self, domain: Option<Cat>) -> Result<FunctorExpr> {
        let all = self.typings();
        if all.is_empty() {
            return Err(Error::Category(format!("no consistent categories for the expression at column {}", self.col())));
        }
        let fit: Vec<(Cat, Cat)> = match domain {
            Some(c) => {
                let exact: Vec<_> = all.iter().copied().filter(|(d, _)| *d == c).collect();
                if exact.is_empty() {
                    all.iter().copied().filter(|(d, _)| c.fits(*d)).collect()
                } else {
                    exact
                }
            }
            None => all.clone(),
        };
        match fit.as_slice() {
            [] => Err(Error::Category(format!("expression does not accept objects of {}", domain.unwrap()))),
            [(d, c)] => self.assign(*d, *c),
            _ => Err(Error::Parse {
                line: 1,
                col: self.col(),
                msg: format!(
                    "ambiguous categories ({}); annotate an atom, e.g. Id[Alg]",
                    fit.iter().map(|(d, c)| format!("{d} → {c}")).collect::<Vec<_>>().join(", ")
                ),
            }),
        }
    }

    fn assign(&self, dom: Cat, cod: Cat) -> Result<FunctorExpr> {
        match self {
            Raw::Atom(a, _, _) => FunctorExpr::atom(a.clone(), dom, cod),
            Raw::Compose(f, g) => {
                let mut found = vec![];
                for (gd, gc) in g.typings() {
                    if gd != dom {
                        continue;
                    }
                    for (fd, fc) in f.typings() {
                        if fc == cod && gc.fits(fd) {
                            found.push((gc, fd));
                        }
                    }
                }
                match found.as_slice() {
                    [(gc, fd)] => FunctorExpr::compose(f.assign(*fd, cod)?, g.assign(dom, *gc)?),
                    [] => Err(Error::Category(format!("no typing at column {}", self.col()))),
                    _ => Err(Error::Parse {
                        line: 1,
                        col: g.col(),
                        msg: "ambiguous intermediate category; annotate an atom".into(),
                    }),
                }
            }
            Raw::Sum(f, g) => {
                let pick = |r: &Raw| -> Result<Cat> {
                    let cs: Vec<Cat> = r.typings().into_iter().filter(|(d, c)| *d == dom && c.fits(cod)).map(|x| x.1).collect();
                    match cs.as_slice() {
                        [c] => Ok(*c),
                        [] => Err(Error::Category(format!("no typing at column {}", r.col()))),
                        _ => Err(Error::Parse { line: 1, col: r.col(), msg: "ambiguous summand category".into() }),
                    }
                };
                let (fc, gc) = (pick(f)?, pick(g)?);
                FunctorExpr::sum(f.assign(dom, fc)?, g.assign(dom, gc)?)
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: 1, col: self.pos + 1, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += self.peek().unwrap().len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn parse_all(&mut self) -> Result<Raw> {
        let e = self.sum()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return self.err(format!("unexpected '{}'", self.peek().unwrap()));
        }
        Ok(e)
    }

    fn sum(&mut self) -> Result<Raw> {
        let mut e = self.compose()?;
        while self.eat('+') {
            let r = self.compose()?;
            e = Raw::Sum(Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    /// `F.G.H = F.(G.H)`.
    fn compose(&mut self) -> Result<Raw> {
        let f = self.primary()?;
        if self.eat('.') {
            let g = self.compose()?;
            return Ok(Raw::Compose(Box::new(f), Box::new(g)));
        }
        Ok(f)
    }

    fn number(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().or_else(|_| {
            self.pos = start;
            self.err("expected an integer")
        })
    }

    fn primary(&mut self) -> Result<Raw> {
        self.skip_ws();
        let col = self.pos + 1;
        if self.eat('(') {
            let e = self.sum()?;
            if !self.eat(')') {
                return self.err("expected ')'");
            }
            return Ok(e);
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let word = &self.src[start..self.pos];
        let atom = match word {
            "Id" => Atom::Id,
            "0" => Atom::Zero,
            "U" => Atom::ForgetU,
            "Free" => Atom::Free,
            "Triv" => Atom::Triv,
            "Red0" => Atom::Red0,
            "Susp" => Atom::Susp,
            "Loop" => Atom::Loop,
            "SigmaInf" => Atom::SigmaInf,
            "OmegaInf" => Atom::OmegaInf,
            "Bar" => Atom::BarAlg,
            "S" => {
                if !self.eat('^') {
                    return self.err("expected '^' after S");
                }
                Atom::Shift(self.number()?)
            }
            "Tensor" => {
                if !self.eat('(') {
                    return self.err("expected '(' after Tensor");
                }
                let n = self.number()?;
                if n < 0 {
                    return self.err("tensor power must be nonnegative");
                }
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Atom::TensorPower(n as usize)
            }
            "" => return self.err("expected a functor"),
            w => {
                self.pos = start;
                return self.err(format!("unknown functor '{w}'"));
            }
        };
        let mut tag = None;
        if self.eat('[') {
            self.skip_ws();
            let s = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '+') {
                self.pos += 1;
            }
            tag = Cat::parse(&self.src[s..self.pos]);
            if tag.is_none() {
                self.pos = s;
                return self.err("expected a category: Alg, Ch+ or Ch");
            }
            if !self.eat(']') {
                return self.err("expected ']'");
            }
        }
        Ok(Raw::Atom(atom, tag, col))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comonad_is_a_chain_endofunctor() {
        let e = FunctorExpr::parse("SigmaInf.OmegaInf", None).unwrap();
        assert_eq!((e.dom, e.cod), (Cat::Ch, Cat::ChP));
        assert!(e.reduced() && e.uses_bar());
        assert_eq!(e.to_string(), "SigmaInf.OmegaInf");
    }

    #[test]
    fn bare_id_is_ambiguous_without_a_domain() {
        assert!(matches!(FunctorExpr::parse("Id", None), Err(Error::Parse { .. })));
        let e = FunctorExpr::parse("Id", Some(Cat::Alg)).unwrap();
        assert_eq!(e.cod, Cat::Alg);
        let e = FunctorExpr::parse("Id[Ch]", None).unwrap();
        assert_eq!(e.dom, Cat::Ch);
    }

    #[test]
    fn context_fixes_polymorphic_atoms() {
        let e = FunctorExpr::parse("U.Susp", None).unwrap();
        assert_eq!(e.dom, Cat::Alg);
        let e = FunctorExpr::parse("Susp.S^-1 + Tensor(2)", None).unwrap();
        assert_eq!((e.dom, e.cod), (Cat::Ch, Cat::Ch));
        let e = FunctorExpr::parse("Free.U", None).unwrap();
        assert_eq!((e.dom, e.cod), (Cat::Alg, Cat::Alg));
    }

    #[test]
    fn category_errors_and_reduced_flag() {
        assert!(FunctorExpr::parse("Free.Tensor(2)", None).is_err());
        assert!(FunctorExpr::parse("Free.Red0.Tensor(2)", None).is_ok());
        assert!(!FunctorExpr::parse("Tensor(0)", None).unwrap().reduced());
        assert!(FunctorExpr::parse("U + Id", Some(Cat::Alg)).is_err());
        let e = FunctorExpr::parse("Tensor(", None).unwrap_err();
        assert!(matches!(e, Error::Parse { col: 8, .. }), "{e:?}");
        assert!(matches!(FunctorExpr::parse("Foo", None), Err(Error::Parse { col: 1, .. })));
    }
}
