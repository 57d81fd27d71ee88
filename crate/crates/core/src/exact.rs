//! Exact rationals and negative continued fractions `[a_1, ..., a_k]^-`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced fraction with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Rational {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Rational> {
        if denom.is_zero() {
            return Err(Error::DomainError("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn integer(n: i64) -> Rational {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Numerator and denominator as machine integers.
    pub fn to_i64_pair(&self) -> Result<(i64, i64)> {
        match (self.numer().to_i64(), self.denom().to_i64()) {
            (Some(p), Some(q)) => Ok((p, q)),
            _ => Err(Error::Overflow(self.to_string())),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Rational {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn floor_i64(&self) -> Result<i64> {
        self.floor().to_i64().ok_or_else(|| Error::Overflow(self.to_string()))
    }

    pub fn ceil_i64(&self) -> Result<i64> {
        self.ceil().to_i64().ok_or_else(|| Error::Overflow(self.to_string()))
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Rational {
        Rational::integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Rational {
        Rational(BigRational::from_integer(n))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational(self.0.$f(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $f(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$f(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$f(&rhs.0))
            }
        }
        impl $tr<i64> for Rational {
            type Output = Rational;
            fn $f(self, rhs: i64) -> Rational {
                Rational(self.0.$f(BigRational::from_integer(BigInt::from(rhs))))
            }
        }
        impl<'a> $tr<i64> for &'a Rational {
            type Output = Rational;
            fn $f(self, rhs: i64) -> Rational {
                Rational((&self.0).$f(&BigRational::from_integer(BigInt::from(rhs))))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an integer: {s:?}")));
    }
    s.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

impl FromStr for Rational {
    type Err = Error;

    /// `"p/q"` or `"p"`; a minus sign is only allowed on the numerator.
    fn from_str(s: &str) -> Result<Rational> {
        let s = s.trim();
        match s.split_once('/') {
            None => Ok(Rational::from(parse_int(s)?)),
            Some((p, q)) => {
                let p = parse_int(p.trim())?;
                let q = q.trim();
                if q.starts_with('-') {
                    return Err(Error::Parse(format!("negative denominator in {s:?}")));
                }
                let q = parse_int(q)?;
                if q.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Rational::from_big(p, q)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CfForm {
    /// every coefficient at least 2
    Strict,
    /// first coefficient at least 1, the rest at least 2
    Slope,
}

/// Coefficients of a negative continued fraction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NegCf(Vec<i64>);

impl NegCf {
    pub fn new(coeffs: Vec<i64>, form: CfForm) -> Result<NegCf> {
        if coeffs.is_empty() {
            return Err(Error::DomainError("empty continued fraction".into()));
        }
        let first_min = match form {
            CfForm::Strict => 2,
            CfForm::Slope => 1,
        };
        if coeffs[0] < first_min || coeffs[1..].iter().any(|&a| a < 2) {
            return Err(Error::DomainError(format!(
                "coefficients {coeffs:?} violate the {form:?} bounds"
            )));
        }
        Ok(NegCf(coeffs))
    }

    /// No bounds checked; `neg_cf_eval` reports degenerate folds.
    pub fn unchecked(coeffs: Vec<i64>) -> NegCf {
        NegCf(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Longest expansion we will materialize; `n/(n-1)` alone has `n - 1` terms.
pub const MAX_CF_LEN: usize = 1 << 20;

/// Expand `x` by `a = ceil(x)`, then recurse on `1/(a - x)`.
pub fn neg_cf_expand(x: &Rational, form: CfForm) -> Result<NegCf> {
    match form {
        CfForm::Strict if *x <= Rational::one() => {
            return Err(Error::DomainError(format!("strict expansion needs x > 1, got {x}")))
        }
        CfForm::Slope if !x.is_positive() => {
            return Err(Error::DomainError(format!("slope expansion needs x > 0, got {x}")))
        }
        _ => {}
    }
    let mut out = Vec::new();
    let mut cur = x.clone();
    loop {
        if out.len() == MAX_CF_LEN {
            return Err(Error::Overflow(format!("continued fraction of {x} has more than {MAX_CF_LEN} terms")));
        }
        let a = cur.ceil();
        out.push(a.to_i64().ok_or_else(|| Error::Overflow(a.to_string()))?);
        let rest = Rational::from(a) - &cur;
        if rest.is_zero() {
            break;
        }
        cur = rest.recip();
    }
    Ok(NegCf(out))
}

/// Fold `x <- a_i - 1/x` from the right.
pub fn neg_cf_eval(cf: &NegCf) -> Result<Rational> {
    let mut it = cf.0.iter().rev();
    let mut x = match it.next() {
        Some(&a) => Rational::integer(a),
        None => return Err(Error::DomainError("empty continued fraction".into())),
    };
    for &a in it {
        if x.is_zero() {
            return Err(Error::DegenerateCF);
        }
        x = Rational::integer(a) - x.recip();
    }
    Ok(x)
}

/// Evaluate a list of machine integers, bounds unchecked.
pub fn eval_coeffs(coeffs: &[i64]) -> Result<Rational> {
    neg_cf_eval(&NegCf::unchecked(coeffs.to_vec()))
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    // independent oracle: evaluate with plain i128 fractions
    fn fold_i128(c: &[i64]) -> Option<(i128, i128)> {
        let (mut p, mut q) = (*c.last()? as i128, 1i128);
        for &a in c.iter().rev().skip(1) {
            if p == 0 {
                return None;
            }
            let (np, nq) = (a as i128 * p - q, p);
            p = np;
            q = nq;
        }
        let g = num_integer::gcd(p, q);
        let s = if q < 0 { -1 } else { 1 };
        Some((s * p / g, s * q / g))
    }

    #[test]
    fn expand_examples() {
        assert_eq!(neg_cf_expand(&r(13, 5), CfForm::Strict).unwrap().coeffs(), &[3, 3, 2]);
        assert_eq!(neg_cf_expand(&r(2, 1), CfForm::Strict).unwrap().coeffs(), &[2]);
        assert_eq!(neg_cf_expand(&r(5, 3), CfForm::Strict).unwrap().coeffs(), &[2, 3]);
        assert_eq!(neg_cf_expand(&r(2, 1), CfForm::Slope).unwrap().coeffs(), &[2]);
        assert_eq!(neg_cf_expand(&r(133, 2), CfForm::Slope).unwrap().coeffs(), &[67, 2]);
        assert_eq!(neg_cf_expand(&r(1, 3), CfForm::Slope).unwrap().coeffs(), &[1, 2, 2]);
        assert_eq!(fold_i128(&[3, 3, 2]), Some((13, 5)));
        assert_eq!(fold_i128(&[2, 3]), Some((5, 3)));
    }

    #[test]
    fn expand_domain_errors() {
        assert!(matches!(neg_cf_expand(&r(1, 1), CfForm::Strict), Err(Error::DomainError(_))));
        assert!(matches!(neg_cf_expand(&r(1, 2), CfForm::Strict), Err(Error::DomainError(_))));
        assert!(matches!(neg_cf_expand(&r(0, 1), CfForm::Slope), Err(Error::DomainError(_))));
        assert!(matches!(neg_cf_expand(&r(-3, 2), CfForm::Slope), Err(Error::DomainError(_))));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(neg_cf_eval(&NegCf::new(vec![3, 3, 2], CfForm::Strict).unwrap()).unwrap(), r(13, 5));
        assert_eq!(eval_coeffs(&[7]).unwrap(), r(7, 1));
        for k in 1..30 {
            assert_eq!(eval_coeffs(&vec![2; k]).unwrap(), r(k as i64 + 1, k as i64));
        }
        assert_eq!(eval_coeffs(&[1, 1]).unwrap(), r(0, 1));
        assert_eq!(eval_coeffs(&[2, 1, 1]), Err(Error::DegenerateCF));
        assert!(NegCf::new(vec![], CfForm::Slope).is_err());
        assert!(NegCf::new(vec![2, 1], CfForm::Strict).is_err());
        assert!(NegCf::new(vec![1, 2], CfForm::Strict).is_err());
        assert!(NegCf::new(vec![1, 2], CfForm::Slope).is_ok());
    }

    #[test]
    fn round_trip_small_rationals() {
        for q in 1..=200i64 {
            for p in (q + 1)..=200 {
                if gcd_i64(p, q) != 1 {
                    continue;
                }
                let x = r(p, q);
                let cf = neg_cf_expand(&x, CfForm::Strict).unwrap();
                assert!(cf.len() as i64 <= p);
                assert!(cf.coeffs().iter().all(|&a| a >= 2));
                assert_eq!(neg_cf_eval(&cf).unwrap(), x);
                assert_eq!(fold_i128(cf.coeffs()), Some((p as i128, q as i128)));
            }
        }
    }

    #[test]
    fn strict_expansions_are_unique() {
        let mut seen = std::collections::HashMap::new();
        let mut stack: Vec<Vec<i64>> = (2..=5).map(|a| vec![a]).collect();
        while let Some(c) = stack.pop() {
            let v = eval_coeffs(&c).unwrap();
            if let Some(prev) = seen.insert(v.clone(), c.clone()) {
                panic!("{prev:?} and {c:?} both evaluate to {v}");
            }
            if c.len() < 5 {
                for a in 2..=5 {
                    let mut d = c.clone();
                    d.push(a);
                    stack.push(d);
                }
            }
        }
        assert_eq!(seen.len(), 4 + 16 + 64 + 256 + 1024);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("13/5".parse::<Rational>().unwrap(), r(13, 5));
        assert_eq!("-133/2".parse::<Rational>().unwrap(), r(-133, 2));
        assert_eq!("6".parse::<Rational>().unwrap(), r(6, 1));
        assert_eq!("4/2".parse::<Rational>().unwrap().to_string(), "2");
        for bad in ["", "/", "1/", "/2", "1/0", "1/-2", "a", "1.5", "--1", "1/2/3", "+3"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?}");
        }
        assert_eq!(r(-7, 3).to_string(), "-7/3");
        let js = serde_json::to_string(&r(5, 3)).unwrap();
        assert_eq!(js, "\"5/3\"");
        assert_eq!(serde_json::from_str::<Rational>(&js).unwrap(), r(5, 3));
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(r(-3, 4).floor(), BigInt::from(-1));
        assert_eq!(r(-4, 3).floor(), BigInt::from(-2));
        assert_eq!(r(21, 4).ceil(), BigInt::from(6));
        assert_eq!(r(6, 1).ceil(), BigInt::from(6));
    }
}
