use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Ground field: characteristic 0 (the rationals) or a prime p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    p: u32,
}

impl Field {
    pub const Q: Field = Field { p: 0 };

    pub fn fp(p: u32) -> Result<Field, String> {
        if p < 2 || !is_prime(p) || p > (1 << 31) {
            return Err(format!("{p} is not a supported prime"));
        }
        Ok(Field { p })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn zero(&self) -> Scalar {
        if self.p == 0 {
            Scalar::Q(Q::S(Ratio::zero()))
        } else {
            Scalar::Fp(0, self.p)
        }
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        if self.p == 0 {
            Scalar::Q(Q::S(Ratio::from_integer(n)))
        } else {
            let p = self.p as i64;
            Scalar::Fp(n.rem_euclid(p) as u32, self.p)
        }
    }

    /// `num/den`; `None` when `den` vanishes in the field.
    pub fn frac(&self, num: i64, den: i64) -> Option<Scalar> {
        let d = self.int(den);
        if d.is_zero() {
            return None;
        }
        Some(self.int(num).div(&d))
    }

    pub fn sign(&self, odd: bool) -> Scalar {
        if odd {
            self.int(-1)
        } else {
            self.one()
        }
    }

    pub fn parse(&self, s: &str) -> Result<Scalar, String> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad number `{s}`"))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad number `{s}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        if self.p == 0 {
            Ok(Scalar::Q(Q::from_big(BigRational::new(n, d))))
        } else {
            let p = BigInt::from(self.p);
            let nr = n.mod_floor(&p).to_u32().unwrap();
            let dr = d.mod_floor(&p).to_u32().unwrap();
            if dr == 0 {
                return Err(format!("denominator of `{s}` vanishes mod {}", self.p));
            }
            Ok(Scalar::Fp(nr, self.p).div(&Scalar::Fp(dr, self.p)))
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.p == 0 {
            write!(f, "Q")
        } else {
            write!(f, "F{}", self.p)
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p as u64 {
        if (p as u64).is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Rational with an i64 fast path that falls back to big integers on overflow.
#[derive(Clone, Debug)]
pub enum Q {
    S(Ratio<i64>),
    B(BigRational),
}

impl Q {
    fn from_big(b: BigRational) -> Q {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Q::S(Ratio::new_raw(n, d)),
            _ => Q::B(b),
        }
    }

    fn big(&self) -> BigRational {
        match self {
            Q::S(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Q::B(b) => b.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Q::S(r) => r.is_zero(),
            Q::B(b) => b.is_zero(),
        }
    }

    fn op(
        &self,
        o: &Q,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Q {
        if let (Q::S(a), Q::S(b)) = (self, o) {
            if let Some(r) = small(a, b) {
                if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                    return Q::S(r);
                }
            }
        }
        Q::from_big(big(self.big(), o.big()))
    }
}

impl PartialEq for Q {
    fn eq(&self, o: &Q) -> bool {
        match (self, o) {
            (Q::S(a), Q::S(b)) => a == b,
            _ => self.big() == o.big(),
        }
    }
}
impl Eq for Q {}

impl std::hash::Hash for Q {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        let b = self.big();
        b.numer().hash(h);
        b.denom().hash(h);
    }
}

/// An exact field element tagged with its characteristic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(Q),
    Fp(u32, u32),
}

impl Scalar {
    pub fn characteristic(&self) -> u32 {
        match self {
            Scalar::Q(_) => 0,
            Scalar::Fp(_, p) => *p,
        }
    }

    pub fn field(&self) -> Field {
        Field { p: self.characteristic() }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(Q::S(r)) => r.is_one(),
            Scalar::Q(Q::B(b)) => b.is_one(),
            Scalar::Fp(v, _) => *v == 1,
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.op(b, |x, y| x.checked_add(y), |x, y| x + y)),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => {
                Scalar::Fp(((*a as u64 + *b as u64) % *p as u64) as u32, *p)
            }
            _ => panic!("characteristic mismatch"),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.op(b, |x, y| x.checked_sub(y), |x, y| x - y)),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => {
                Scalar::Fp(((*a as u64 + *p as u64 - *b as u64) % *p as u64) as u32, *p)
            }
            _ => panic!("characteristic mismatch"),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.op(b, |x, y| x.checked_mul(y), |x, y| x * y)),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => {
                Scalar::Fp(((*a as u64 * *b as u64) % *p as u64) as u32, *p)
            }
            _ => panic!("characteristic mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(Q::S(r)) => Scalar::Q(Q::S(-r)),
            Scalar::Q(Q::B(b)) => Scalar::Q(Q::from_big(-b.clone())),
            Scalar::Fp(v, p) => Scalar::Fp(if *v == 0 { 0 } else { p - v }, *p),
        }
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Q(Q::S(r)) => Scalar::Q(Q::S(r.recip())),
            Scalar::Q(Q::B(b)) => Scalar::Q(Q::from_big(b.recip())),
            Scalar::Fp(v, p) => {
                let (mut r, mut e, m) = (1u64, *p as u64 - 2, *p as u64);
                let mut b = *v as u64;
                while e > 0 {
                    if e & 1 == 1 {
                        r = r * b % m;
                    }
                    b = b * b % m;
                    e >>= 1;
                }
                Scalar::Fp(r as u32, *p)
            }
        }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => {
                assert!(!b.is_zero(), "division by zero");
                Scalar::Q(a.op(b, |x, y| x.checked_div(y), |x, y| x / y))
            }
            _ => self.mul(&o.inv()),
        }
    }

    /// Integer value when the scalar is an integer of small size.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Q(Q::S(r)) if r.is_integer() => Some(*r.numer()),
            Scalar::Q(_) => None,
            Scalar::Fp(v, _) => Some(*v as i64),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Scalar::Q(Q::S(r)) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Q(Q::B(b)) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
            Scalar::Fp(v, _) => write!(f, "{v}"),
        }
    }
}

/// Magnitude check used by tests that want to rule out silent coefficient blowup.
pub fn is_unit_magnitude(s: &Scalar) -> bool {
    match s {
        Scalar::Q(Q::S(r)) => r.abs().is_one(),
        Scalar::Q(Q::B(b)) => b.abs().is_one(),
        Scalar::Fp(v, _) => *v != 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes() {
        let f = Field::Q;
        let big = f.int(i64::MAX / 2);
        let s = big.mul(&big).mul(&big);
        let back = s.div(&big).div(&big);
        assert_eq!(back, big);
    }

    #[test]
    fn fp_inverse() {
        let f = Field::fp(7).unwrap();
        for a in 1..7 {
            let x = f.int(a);
            assert!(x.mul(&x.inv()).is_one());
        }
        assert!(Field::fp(9).is_err());
    }

    #[test]
    fn parse_fractions() {
        let f = Field::Q;
        assert_eq!(f.parse("-3/6").unwrap(), f.frac(-1, 2).unwrap());
        let g = Field::fp(5).unwrap();
        assert_eq!(g.parse("1/2").unwrap(), g.int(3));
        assert!(g.parse("1/5").is_err());
    }
}
