//! Torus knots, cables of torus knots, their Alexander polynomials and Seifert fibered surgeries.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{gcd_i64, Rational};
use crate::plumbing::{normalize, Orientation, SeifertForm};

/// `T(r,s)` or its mirror `T(-r,s)`, with `1 <= r < s` coprime (`r = 1` is the unknot and is
/// rejected by the parser).
/// Largest genus accepted; keeps every derived quantity, including the
/// dense Alexander polynomial, comfortably inside machine integers and memory.
pub const MAX_GENUS: i64 = 1 << 20;

fn check_genus(g: i128, what: impl FnOnce() -> String) -> Result<()> {
    if g > MAX_GENUS as i128 {
        return Err(Error::InvalidKnot(format!("{} has genus above {MAX_GENUS}", what())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusKnot {
    pub negative: bool,
    pub r: i64,
    pub s: i64,
}

impl TorusKnot {
    pub fn new(negative: bool, r: i64, s: i64) -> Result<TorusKnot> {
        if r < 2 || s <= r || gcd_i64(r, s) != 1 {
            return Err(Error::InvalidKnot(format!(
                "torus knot needs coprime 2 <= r < s, got ({r},{s})"
            )));
        }
        check_genus((r as i128 - 1) * (s as i128 - 1) / 2, || format!("T({r},{s})"))?;
        Ok(TorusKnot { negative, r, s })
    }

    pub fn positive(r: i64, s: i64) -> Result<TorusKnot> {
        TorusKnot::new(false, r, s)
    }

    pub fn rs(&self) -> i64 {
        self.r * self.s
    }

    pub fn mirror(&self) -> TorusKnot {
        TorusKnot { negative: !self.negative, ..*self }
    }

    pub fn genus(&self) -> i64 {
        (self.r - 1) * (self.s - 1) / 2
    }
}

impl fmt::Display for TorusKnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negative { "-" } else { "" };
        write!(f, "T({sign}{},{})", self.r, self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Knot {
    Torus(TorusKnot),
    /// `C(a,b)` of the companion: winding number `a >= 2`, `gcd(a, b) = 1`.
    Cable { a: i64, b: i64, companion: TorusKnot },
}

impl Knot {
    pub fn torus(negative: bool, r: i64, s: i64) -> Result<Knot> {
        Ok(Knot::Torus(TorusKnot::new(negative, r, s)?))
    }

    pub fn cable(a: i64, b: i64, companion: TorusKnot) -> Result<Knot> {
        if a < 2 || b == 0 || gcd_i64(a, b) != 1 {
            return Err(Error::InvalidKnot(format!("cable needs a >= 2 and gcd(a,b) = 1, got ({a},{b})")));
        }
        let g = a as i128 * companion.genus() as i128 + (a as i128 - 1) * (b.unsigned_abs() as i128 - 1) / 2;
        check_genus(g, || format!("C({a},{b});{companion}"))?;
        Ok(Knot::Cable { a, b, companion })
    }

    pub fn companion(&self) -> TorusKnot {
        match *self {
            Knot::Torus(t) => t,
            Knot::Cable { companion, .. } => companion,
        }
    }

    pub fn is_cable(&self) -> bool {
        matches!(self, Knot::Cable { .. })
    }

    /// `mirror(C(a,b) K) = C(a,-b) mirror(K)`.
    pub fn mirror(&self) -> Knot {
        match *self {
            Knot::Torus(t) => Knot::Torus(t.mirror()),
            Knot::Cable { a, b, companion } => Knot::Cable { a, b: -b, companion: companion.mirror() },
        }
    }

    pub fn genus(&self) -> i64 {
        genus(self)
    }

    fn sort_key(&self) -> (u8, i64, i64, i64, i64, bool) {
        match *self {
            Knot::Torus(t) => (0, t.r, t.s, 0, 0, t.negative),
            Knot::Cable { a, b, companion: t } => (1, t.r, t.s, a, b, t.negative),
        }
    }
}

impl PartialOrd for Knot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Torus knots before cables, then `(r, s, a, b)`.
impl Ord for Knot {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for Knot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Knot::Torus(t) => write!(f, "{t}"),
            Knot::Cable { a, b, companion } => write!(f, "C({a},{b});{companion}"),
        }
    }
}

fn parse_pair(s: &str, head: char) -> Result<(i64, i64)> {
    let body = s
        .trim()
        .strip_prefix(head)
        .and_then(|x| x.trim_start().strip_prefix('('))
        .and_then(|x| x.trim_end().strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected {head}(x,y), got {s:?}")))?;
    let (x, y) = body
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected two integers in {s:?}")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad integer {t:?} in {s:?}")))
    };
    Ok((num(x)?, num(y)?))
}

fn parse_torus(s: &str) -> Result<TorusKnot> {
    let (r, s_) = parse_pair(s, 'T')?;
    if s_ < 0 {
        return Err(Error::InvalidKnot(format!("write the sign on r: {s:?}")));
    }
    TorusKnot::new(r < 0, r.abs(), s_)
}

impl FromStr for Knot {
    type Err = Error;

    /// `T(r,s)`, `T(-r,s)` or `C(a,b);T(r,s)`.
    fn from_str(s: &str) -> Result<Knot> {
        match s.split_once(';') {
            None => Ok(Knot::Torus(parse_torus(s)?)),
            Some((c, t)) => {
                let (a, b) = parse_pair(c, 'C')?;
                Knot::cable(a, b, parse_torus(t)?)
            }
        }
    }
}

impl Serialize for Knot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Knot {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `a_0 + sum a_i (t^i + t^-i)`, stored as `[a_0, .., a_g]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlexanderPoly {
    pub coeffs: Vec<i64>,
}

impl AlexanderPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn at_one(&self) -> i64 {
        self.coeffs[0] + 2 * self.coeffs[1..].iter().sum::<i64>()
    }

    /// Coefficients of `t^g Δ(t)`, degrees `0..=2g`.
    pub fn laurent(&self) -> Vec<i64> {
        let g = self.degree();
        let mut out = vec![0; 2 * g + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[g + i] = c;
            out[g - i] = c;
        }
        out
    }

    fn from_laurent(p: &[i64]) -> AlexanderPoly {
        let g = p.len() / 2;
        AlexanderPoly { coeffs: p[g..].to_vec() }
    }

    pub fn is_l_space_shaped(&self) -> bool {
        let nz: Vec<i64> = self.laurent().into_iter().filter(|&c| c != 0).collect();
        nz.iter().all(|c| c.abs() == 1) && nz.windows(2).all(|w| w[0] == -w[1])
    }
}

impl fmt::Display for AlexanderPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.degree() as i64;
        let mut first = true;
        for (k, &c) in self.laurent().iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let d = k as i64 - g;
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let m = c.abs();
            match d {
                0 => write!(f, "{m}")?,
                _ => {
                    if m != 1 {
                        write!(f, "{m}")?;
                    }
                    if d == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{d}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by `t^k - 1`.
fn div_t_k_minus_one(n: &[i64], k: usize) -> Vec<i64> {
    let d = n.len() - 1;
    let mut q = vec![0i64; d + 1 - k];
    for j in (k..=d).rev() {
        let above = if j < q.len() { q[j] } else { 0 };
        q[j - k] = n[j] + above;
    }
    debug_assert!((0..k).all(|j| n[j] == -q.get(j).copied().unwrap_or(0)));
    q
}

fn t_pow_minus_one(k: usize) -> Vec<i64> {
    let mut p = vec![0; k + 1];
    p[0] = -1;
    p[k] = 1;
    p
}

/// `(t^rs - 1)(t - 1) / ((t^r - 1)(t^s - 1))`, degree `(r-1)(s-1)`; `r = 1` gives 1.
fn torus_poly(r: i64, s: i64) -> Vec<i64> {
    let (r, s) = (r as usize, s as usize);
    let n = poly_mul(&t_pow_minus_one(r * s), &t_pow_minus_one(1));
    div_t_k_minus_one(&div_t_k_minus_one(&n, r), s)
}

fn substitute_power(p: &[i64], a: usize) -> Vec<i64> {
    let mut out = vec![0; (p.len() - 1) * a + 1];
    for (i, &c) in p.iter().enumerate() {
        out[i * a] = c;
    }
    out
}

/// Mirroring leaves the polynomial unchanged; cables use `Δ_K(t^a) Δ_{T(a,|b|)}(t)`.
pub fn alexander(k: &Knot) -> AlexanderPoly {
    let p = match *k {
        Knot::Torus(t) => torus_poly(t.r, t.s),
        Knot::Cable { a, b, companion } => poly_mul(
            &substitute_power(&torus_poly(companion.r, companion.s), a as usize),
            &torus_poly(a.min(b.abs()), a.max(b.abs())),
        ),
    };
    AlexanderPoly::from_laurent(&p)
}

pub fn genus(k: &Knot) -> i64 {
    match *k {
        Knot::Torus(t) => t.genus(),
        Knot::Cable { a, b, companion } => a * companion.genus() + (a - 1) * (b.abs() - 1) / 2,
    }
}

/// `t_0, .., t_g` with `t_i = sum_{j>=1} j a_{i+j}`; the last entry is 0.
pub fn torsion_coeffs(d: &AlexanderPoly) -> Vec<i64> {
    let g = d.degree();
    let mut t = vec![0i64; g + 1];
    let mut tail = 0i64;
    for i in (0..g).rev() {
        tail += d.coeffs[i + 1];
        t[i] = t[i + 1] + tail;
    }
    t
}

/// Inverse of `torsion_coeffs`: `a_j = t_{j-1} - 2 t_j + t_{j+1}`, `a_0` from `Δ(1) = 1`.
pub fn alexander_from_torsion(t: &[i64]) -> Result<AlexanderPoly> {
    if t.last().copied().unwrap_or(0) != 0 || t.is_empty() {
        return Err(Error::DomainError("torsion sequence must end in 0".into()));
    }
    let at = |i: usize| t.get(i).copied().unwrap_or(0);
    let g = t.len() - 1;
    let mut coeffs = vec![0i64; g + 1];
    for (j, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = at(j - 1) - 2 * at(j) + at(j + 1);
    }
    coeffs[0] = 1 - 2 * coeffs[1..].iter().sum::<i64>();
    Ok(AlexanderPoly { coeffs })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surgery {
    pub raw: SeifertForm,
    pub normalized: SeifertForm,
    pub orientation: Orientation,
}

/// `(s', r')` with `1 <= s' < r`, `1 <= r' < s`, `s' s + r' r = rs + 1`.
pub fn dual_pair(r: i64, s: i64) -> (i64, i64) {
    for sp in 1..r {
        let rem = r * s + 1 - sp * s;
        if rem > 0 && rem % r == 0 {
            let rp = rem / r;
            if (1..s).contains(&rp) {
                return (sp, rp);
            }
        }
    }
    unreachable!("r and s are coprime")
}

/// `S^3_{p/q}(T(r,s)) = S^2(1; r/s', s/r', p/q - rs)`, and `S^3_{p/q}(T(-r,s)) = -S^3_{-p/q}(T(r,s))`.
pub fn torus_surgery(k: &TorusKnot, slope: &Rational) -> Result<Surgery> {
    let rs = Rational::integer(k.rs());
    let (sp, rp) = dual_pair(k.r, k.s);
    let raw = if k.negative {
        if *slope == -rs.clone() {
            return Err(Error::ReducibleSurgery(slope.to_string()));
        }
        SeifertForm::raw(
            -1,
            [Rational::new(-k.r, sp), Rational::new(-k.s, rp), slope + &rs],
        )
    } else {
        if *slope == rs {
            return Err(Error::ReducibleSurgery(slope.to_string()));
        }
        SeifertForm::raw(1, [Rational::new(k.r, sp), Rational::new(k.s, rp), slope - &rs])
    };
    let (normalized, orientation) = normalize(raw.e, &raw.fibers)?;
    Ok(Surgery { raw, normalized, orientation })
}

/// `S^3_{ab + δ/q}(C(a,b) K) = S^3_{(qab + δ)/(qa^2)}(K)` for `δ = ±1`.
pub fn cable_surgery(a: i64, b: i64, companion: &TorusKnot, slope: &Rational) -> Result<Surgery> {
    Knot::cable(a, b, *companion)?;
    let off = slope - &Rational::integer(a * b);
    if off.is_zero() || off.numer().magnitude() != &1u32.into() {
        return Err(Error::NotSeifertSlope(format!(
            "{slope} is not of the form ab ± 1/q for C({a},{b})"
        )));
    }
    torus_surgery(companion, &(slope / &Rational::integer(a * a)))
}

pub fn surgery(k: &Knot, slope: &Rational) -> Result<Surgery> {
    match k {
        Knot::Torus(t) => torus_surgery(t, slope),
        Knot::Cable { a, b, companion } => cable_surgery(*a, *b, companion, slope),
    }
}

/// Open slope interval; `None` ends are infinite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SlopeInterval {
    Empty,
    Open { lo: Option<Rational>, hi: Option<Rational> },
}

impl SlopeInterval {
    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            SlopeInterval::Empty => false,
            SlopeInterval::Open { lo, hi } => {
                lo.as_ref().is_none_or(|l| x > l) && hi.as_ref().is_none_or(|h| x < h)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SlopeInterval::Empty => true,
            SlopeInterval::Open { lo: Some(l), hi: Some(h) } => l >= h,
            _ => false,
        }
    }
}

impl fmt::Display for SlopeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeInterval::Empty => write!(f, "empty"),
            SlopeInterval::Open { lo, hi } => {
                let l = lo.as_ref().map_or("-inf".to_string(), |x| x.to_string());
                let h = hi.as_ref().map_or("inf".to_string(), |x| x.to_string());
                write!(f, "({l}, {h})")
            }
        }
    }
}

/// Both chiralities of every torus knot with `rs <= max_rs`.
pub fn torus_knots_up_to(max_rs: i64) -> Vec<TorusKnot> {
    let mut out = Vec::new();
    for r in 2..max_rs {
        if r * (r + 1) > max_rs {
            break;
        }
        for s in r + 1..=max_rs / r {
            if gcd_i64(r, s) != 1 {
                continue;
            }
            for neg in [false, true] {
                out.push(TorusKnot::new(neg, r, s).expect("valid parameters"));
            }
        }
    }
    out
}

/// Slopes at which surgery on `T(±r,s)` has normalized central weight `e`.
pub fn e_window(negative: bool, r: i64, s: i64, e: i64) -> SlopeInterval {
    let rs = Rational::integer(r * s);
    let one = Rational::one();
    let open = |lo: Option<Rational>, hi: Option<Rational>| SlopeInterval::Open { lo, hi };
    match (negative, e) {
        (_, e) if e < 1 => SlopeInterval::Empty,
        (false, 1) => SlopeInterval::Empty,
        (true, 1) => open(Some(Rational::zero()), None),
        (false, 2) => open(Some(Rational::zero()), Some(rs - one)),
        (true, 2) => open(None, Some(-rs - one)),
        (false, e) => open(
            Some(&rs - &Rational::new(1, e - 2)),
            Some(&rs - &Rational::new(1, e - 1)),
        ),
        (true, e) => open(
            Some(-&rs - Rational::new(1, e - 2)),
            Some(-&rs - Rational::new(1, e - 1)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(s: &str) -> Knot {
        s.parse().unwrap()
    }

    fn sfs(s: &str) -> SeifertForm {
        s.parse::<SeifertForm>().unwrap().canonical()
    }

    /// Δ by the product formula over i128 using long division on the full numerator, written
    /// independently of the module's routine.
    fn alexander_oracle(r: usize, s: usize) -> Vec<i128> {
        // (1 - t^rs)(1 - t) / ((1 - t^r)(1 - t^s)) as a power series truncated at rs
        let n = r * s;
        let mut num = vec![0i128; n + 2];
        num[0] += 1;
        num[1] -= 1;
        num[n] -= 1;
        num[n + 1] += 1;
        // multiply by 1/(1 - t^r) = sum t^{kr}, truncated
        let geo = |p: &Vec<i128>, k: usize| {
            let mut out = vec![0i128; p.len()];
            for i in 0..p.len() {
                out[i] = p[i] + if i >= k { out[i - k] } else { 0 };
            }
            out
        };
        let q = geo(&geo(&num, r), s);
        q[..=(r - 1) * (s - 1)].to_vec()
    }

    #[test]
    fn alexander_examples() {
        assert_eq!(alexander(&k("T(2,3)")).coeffs, vec![-1, 1]);
        assert_eq!(alexander(&k("T(2,3)")).to_string(), "t - 1 + t^-1");
        assert_eq!(AlexanderPoly::from_laurent(&torus_poly(1, 7)).coeffs, vec![1]);
        let c = alexander(&k("C(2,33);T(3,5)"));
        assert_eq!(c.degree(), 24);
        assert_eq!(c.at_one(), 1);
        for r in 2..8 {
            for s in r + 1..12 {
                if gcd_i64(r, s) != 1 {
                    continue;
                }
                let p = torus_poly(r, s);
                let o = alexander_oracle(r as usize, s as usize);
                assert_eq!(p.iter().map(|&x| x as i128).collect::<Vec<_>>(), o, "T({r},{s})");
            }
        }
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus(&k("T(5,13)")), 24);
        assert_eq!(genus(&k("T(2,3)")), 1);
        assert_eq!(genus(&k("C(2,33);T(3,5)")), 24);
        for r in 2..8 {
            for s in r + 1..=60 / r {
                if gcd_i64(r, s) == 1 {
                    let t = Knot::torus(false, r, s).unwrap();
                    assert_eq!(alexander(&t).degree() as i64, genus(&t));
                }
            }
        }
        for (a, b, c) in [(2, 1, "T(2,3)"), (3, 7, "T(2,5)"), (2, -15, "T(-3,4)"), (5, 3, "T(2,3)")] {
            let kk = Knot::cable(a, b, k(c).companion()).unwrap();
            let d = alexander(&kk);
            assert_eq!(d.degree() as i64, genus(&kk), "{kk}");
            assert_eq!(d.at_one(), 1);
        }
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(torsion_coeffs(&alexander(&k("T(2,3)"))), vec![1, 0]);
        assert_eq!(torsion_coeffs(&AlexanderPoly { coeffs: vec![1] }), vec![0]);
        for r in 2..7 {
            for s in r + 1..=40 / r {
                if gcd_i64(r, s) != 1 {
                    continue;
                }
                let d = alexander(&Knot::torus(false, r, s).unwrap());
                assert!(d.is_l_space_shaped());
                let t = torsion_coeffs(&d);
                // direct definition
                for i in 0..t.len() {
                    let direct: i64 = (1..d.coeffs.len()).filter(|j| i + j < d.coeffs.len()).map(|j| j as i64 * d.coeffs[i + j]).sum();
                    assert_eq!(t[i], direct);
                }
                assert!(t.windows(2).all(|w| w[0] >= w[1]));
                assert_eq!(*t.last().unwrap(), 0);
                assert_eq!(alexander_from_torsion(&t).unwrap(), d);
            }
        }
    }

    #[test]
    fn surgery_examples() {
        let t = TorusKnot::positive(5, 13).unwrap();
        assert_eq!(dual_pair(5, 13), (2, 8));
        let out = torus_surgery(&t, &Rational::new(133, 2)).unwrap();
        assert_eq!(out.raw, "1;5/2,13/8,3/2".parse().unwrap());
        assert_eq!(out.normalized, sfs("2;13/5,5/3,3"));
        assert_eq!(out.orientation, Orientation::Reversed);

        let out = torus_surgery(&TorusKnot::positive(2, 3).unwrap(), &Rational::new(21, 4)).unwrap();
        assert_eq!((out.normalized, out.orientation), (sfs("3;2,3/2,3/2"), Orientation::Preserved));

        let mirrored = torus_surgery(&t.mirror(), &Rational::new(-133, 2)).unwrap();
        assert_eq!((mirrored.normalized, mirrored.orientation), (sfs("2;13/5,5/3,3"), Orientation::Preserved));

        let c = cable_surgery(2, 33, &TorusKnot::positive(3, 5).unwrap(), &Rational::new(133, 2)).unwrap();
        assert_eq!((c.normalized, c.orientation), (sfs("2;13/5,5/3,3"), Orientation::Reversed));
        let c = surgery(&k("C(2,-33);T(-3,5)"), &Rational::new(-133, 2)).unwrap();
        assert_eq!((c.normalized, c.orientation), (sfs("2;13/5,5/3,3"), Orientation::Preserved));

        let c = cable_surgery(2, 7, &TorusKnot::positive(2, 3).unwrap(), &Rational::new(29, 2)).unwrap();
        let d = torus_surgery(&TorusKnot::positive(2, 3).unwrap(), &Rational::new(29, 8)).unwrap();
        assert_eq!(c, d);

        assert!(matches!(torus_surgery(&TorusKnot::positive(2, 3).unwrap(), &6.into()), Err(Error::ReducibleSurgery(_))));
        assert!(matches!(cable_surgery(2, 33, &TorusKnot::positive(3, 5).unwrap(), &66.into()), Err(Error::NotSeifertSlope(_))));
        assert!(matches!(cable_surgery(2, 33, &TorusKnot::positive(3, 5).unwrap(), &Rational::new(200, 3)), Err(Error::NotSeifertSlope(_))));
    }

    #[test]
    fn windows() {
        assert_eq!(e_window(false, 2, 3, 2).to_string(), "(0, 5)");
        assert_eq!(e_window(false, 2, 3, 3).to_string(), "(5, 11/2)");
        assert_eq!(e_window(true, 2, 3, 2).to_string(), "(-inf, -7)");
        assert_eq!(e_window(true, 2, 3, 1).to_string(), "(0, inf)");
        assert!(e_window(false, 2, 3, 1).is_empty());
        assert!(!e_window(true, 2, 3, 3).contains(&Rational::new(-15, 2)));
        assert!(e_window(true, 2, 3, 3).contains(&Rational::new(-27, 4)));
    }

    #[test]
    fn parse_and_print() {
        for s in ["T(2,3)", "T(-5,13)", "C(2,33);T(3,5)", "C(2,-33);T(-3,5)"] {
            assert_eq!(k(s).to_string(), s);
        }
        assert_eq!(k(" T( 2 , 3 ) "), k("T(2,3)"));
        assert!(matches!("T(3,2)".parse::<Knot>(), Err(Error::InvalidKnot(_))));
        assert!(matches!("T(2,4)".parse::<Knot>(), Err(Error::InvalidKnot(_))));
        assert!(matches!("C(2,4);T(2,3)".parse::<Knot>(), Err(Error::InvalidKnot(_))));
        assert!(matches!("T(2,3".parse::<Knot>(), Err(Error::Parse(_))));
        assert!(matches!("X(2,3)".parse::<Knot>(), Err(Error::Parse(_))));
        assert_eq!(k("C(2,33);T(3,5)").mirror(), k("C(2,-33);T(-3,5)"));
        let js = serde_json::to_string(&k("C(2,33);T(3,5)")).unwrap();
        assert_eq!(serde_json::from_str::<Knot>(&js).unwrap(), k("C(2,33);T(3,5)"));
        let mut v = vec![k("C(2,33);T(3,5)"), k("T(5,13)"), k("T(2,3)")];
        v.sort();
        assert_eq!(v, vec![k("T(2,3)"), k("T(5,13)"), k("C(2,33);T(3,5)")]);
    }

    proptest! {
        #[test]
        fn epsilon_matches_closed_form(r in 2i64..7, s in 3i64..8, p in -100i64..=100, q in 2i64..=9) {
            prop_assume!(r < s && gcd_i64(r, s) == 1 && gcd_i64(p, q) == 1);
            let x = Rational::new(p, q);
            let t = TorusKnot::positive(r, s).unwrap();
            match torus_surgery(&t, &x) {
                Ok(out) => {
                    let rs = Rational::integer(r * s);
                    let expect = &x / &(&rs - &x) / (r * s);
                    prop_assert_eq!(crate::plumbing::epsilon(&out.raw), expect);
                }
                Err(e) => prop_assert!(matches!(e, Error::LensSpaceDegenerate { .. }), "{e}"),
            }
        }

        #[test]
        fn central_weight_matches_window(neg in any::<bool>(), r in 2i64..6, s in 3i64..8, e in 1i64..=5, t in 1i64..1000) {
            prop_assume!(r < s && gcd_i64(r, s) == 1);
            let w = e_window(neg, r, s, e);
            prop_assume!(!w.is_empty());
            // a point strictly inside the window
            let x = match &w {
                SlopeInterval::Open { lo: Some(l), hi: Some(h) } => l + &((h - l) * Rational::new(t, 1001)),
                SlopeInterval::Open { lo: None, hi: Some(h) } => h - &Rational::new(t, 7),
                SlopeInterval::Open { lo: Some(l), hi: None } => l + &Rational::new(t, 7),
                _ => unreachable!(),
            };
            prop_assume!(!x.is_integer());
            let out = torus_surgery(&TorusKnot::new(neg, r, s).unwrap(), &x).unwrap();
            prop_assert_eq!(out.normalized.e, e);
            prop_assert_eq!(out.orientation, Orientation::Preserved);
        }
    }
}
