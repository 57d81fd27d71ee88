//! Small Seifert fibered spaces `S^2(e; p1/q1, p2/q2, p3/q3)` and their star-shaped plumbings.

mod inequalities;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{neg_cf_eval, neg_cf_expand, CfForm, NegCf, Rational};
use crate::lattice::GramLattice;
use crate::linalg;

pub use inequalities::{
    brute_force_minimum, enumerate_star_plumbings, chain_objectives, joined_chain_objective,
    star_objective, verify_inequalities, verify_chain_bounds, Inequality,
    verify_joined_chains, verify_star_bound, InequalityReport, SuiteReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Preserved,
    Reversed,
}

impl Orientation {
    pub fn is_reversed(self) -> bool {
        self == Orientation::Reversed
    }

    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Preserved => Orientation::Reversed,
            Orientation::Reversed => Orientation::Preserved,
        }
    }
}

/// `S^2(e; f1, f2, f3)`. Normalized means every fiber `> 1`, sorted descending, and `eps > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeifertForm {
    pub e: i64,
    pub fibers: [Rational; 3],
}

impl SeifertForm {
    /// Raw form, no normalization applied.
    pub fn raw(e: i64, fibers: [Rational; 3]) -> SeifertForm {
        SeifertForm { e, fibers }
    }

    /// Build and normalize, failing if the orientation had to be reversed.
    pub fn normalized(e: i64, fibers: [Rational; 3]) -> Result<SeifertForm> {
        let (y, o) = normalize(e, &fibers)?;
        if o.is_reversed() {
            return Err(Error::NotNormalized(format!(
                "{} bounds a negative definite plumbing; its reverse is {y}",
                SeifertForm::raw(e, fibers)
            )));
        }
        Ok(y)
    }

    pub fn is_normalized(&self) -> bool {
        let one = Rational::one();
        self.fibers.iter().all(|f| *f > one)
            && self.fibers[0] >= self.fibers[1]
            && self.fibers[1] >= self.fibers[2]
            && epsilon(self).is_positive()
    }

    pub fn fiber_numerators(&self) -> Vec<i64> {
        self.fibers.iter().filter_map(|f| f.to_i64_pair().ok().map(|p| p.0.abs())).collect()
    }

    /// Same space with fibers sorted descending.
    pub fn canonical(&self) -> SeifertForm {
        let mut fibers = self.fibers.clone();
        fibers.sort_by(|a, b| b.cmp(a));
        SeifertForm { e: self.e, fibers }
    }

    /// Normalized up to the order of the fibers.
    pub fn require_normalized(&self) -> Result<()> {
        if self.canonical().is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.to_string()))
        }
    }
}

impl fmt::Display for SeifertForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S2({}; {}, {}, {})", self.e, self.fibers[0], self.fibers[1], self.fibers[2])
    }
}

impl fmt::Debug for SeifertForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SeifertForm {
    type Err = Error;

    /// `"e;p1/q1,p2/q2,p3/q3"` or the display form `"S2(e; p1/q1, p2/q2, p3/q3)"`.
    /// The result is raw; call `normalize` before use.
    fn from_str(s: &str) -> Result<SeifertForm> {
        let mut body = s.trim();
        if let Some(rest) = body.strip_prefix("S2(").or_else(|| body.strip_prefix("S²(")) {
            body = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("missing ')' in {s:?}")))?;
        }
        let (e, fibers) = body
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected \"e;f1,f2,f3\", got {s:?}")))?;
        let e: i64 = e
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad central weight {e:?}")))?;
        let parts: Vec<&str> = fibers.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected three fibers, got {}", parts.len())));
        }
        let mut fs = Vec::with_capacity(3);
        for p in parts {
            let r: Rational = p.parse()?;
            if r.is_zero() {
                return Err(Error::Parse("a fiber cannot be 0".into()));
            }
            fs.push(r);
        }
        let fibers: [Rational; 3] = fs.try_into().expect("three fibers");
        Ok(SeifertForm { e, fibers })
    }
}

impl Serialize for SeifertForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SeifertForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `e - q1/p1 - q2/p2 - q3/p3`.
pub fn epsilon(y: &SeifertForm) -> Rational {
    y.fibers.iter().fold(Rational::integer(y.e), |acc, f| acc - f.recip())
}

/// Shift every fiber into `(1, oo)`, then pass to the side with `eps > 0`.
pub fn normalize(e: i64, raw_fibers: &[Rational]) -> Result<(SeifertForm, Orientation)> {
    if raw_fibers.len() != 3 {
        return Err(Error::LengthMismatch { expected: 3, got: raw_fibers.len() });
    }
    let mut e = Rational::integer(e);
    let mut recips = Vec::with_capacity(3);
    let mut degenerate = false;
    for f in raw_fibers {
        if f.is_zero() {
            return Err(Error::DomainError("fiber 0".into()));
        }
        let rho = f.recip();
        let k = Rational::from(rho.floor());
        e = e - &k;
        let r = rho - k;
        if r.is_zero() {
            degenerate = true;
        }
        recips.push(r);
    }
    let e = e.to_i64_pair()?.0;
    if degenerate {
        let kept: Vec<String> = recips
            .iter()
            .filter(|r| !r.is_zero())
            .map(|r| r.recip().to_string())
            .collect();
        return Err(Error::LensSpaceDegenerate {
            partial: format!("S2({e}; {})", kept.join(", ")),
        });
    }
    let mut fibers: Vec<Rational> = recips.iter().map(|r| r.recip()).collect();
    fibers.sort_by(|a, b| b.cmp(a));
    let y = SeifertForm { e, fibers: fibers.try_into().expect("three fibers") };
    let eps = epsilon(&y);
    if eps.is_zero() {
        return Err(Error::NotRationalHomologySphere(y.to_string()));
    }
    if eps.is_positive() {
        Ok((y, Orientation::Preserved))
    } else {
        Ok((reverse_unchecked(&y)?, Orientation::Reversed))
    }
}

fn reverse_unchecked(y: &SeifertForm) -> Result<SeifertForm> {
    let mut fibers: Vec<Rational> = y
        .fibers
        .iter()
        .map(|f| {
            let p = Rational::from(f.numer().clone());
            let q = Rational::from(f.denom().clone());
            &p / &(&p - &q)
        })
        .collect();
    fibers.sort_by(|a, b| b.cmp(a));
    let e = 3i64.checked_sub(y.e).ok_or_else(|| Error::Overflow(format!("3 - ({})", y.e)))?;
    Ok(SeifertForm { e, fibers: fibers.try_into().expect("three fibers") })
}

/// Normal form of `-Y`: `(3 - e; p/(p - q), ...)`.
///
/// Accepts either orientation of a fiber-normalized form (every fiber `> 1`, sorted), so
/// that it is an involution.
pub fn orientation_reverse(y: &SeifertForm) -> Result<SeifertForm> {
    let one = Rational::one();
    if y.fibers.iter().any(|f| *f <= one) {
        return Err(Error::NotNormalized(format!("{y} has a fiber <= 1")));
    }
    reverse_unchecked(y)
}

/// `e >= 3`, or `e = 2` with `q_i/p_i + q_j/p_j < 1` for some pair.
pub fn is_quasi_alternating(y: &SeifertForm) -> bool {
    if y.e >= 3 {
        return true;
    }
    if y.e < 2 {
        return false;
    }
    let one = Rational::one();
    let r: Vec<Rational> = y.fibers.iter().map(|f| f.recip()).collect();
    (0..3).any(|i| (i + 1..3).any(|j| &r[i] + &r[j] < one))
}

/// Weighted star: a center joined to the head of each arm path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarPlumbing {
    pub central_weight: i64,
    pub arms: Vec<Vec<i64>>,
}

impl StarPlumbing {
    pub fn new(central_weight: i64, arms: Vec<Vec<i64>>) -> StarPlumbing {
        StarPlumbing { central_weight, arms }
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.arms.iter().map(|a| a.len()).sum::<usize>()
    }

    /// Weights in vertex order: center, then each arm outward from the center.
    pub fn weights(&self) -> Vec<i64> {
        let mut w = vec![self.central_weight];
        for a in &self.arms {
            w.extend_from_slice(a);
        }
        w
    }

    /// Index of arm `i`, position `j` in vertex order.
    pub fn vertex_index(&self, arm: usize, pos: usize) -> usize {
        1 + self.arms[..arm].iter().map(|a| a.len()).sum::<usize>() + pos
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut idx = 1;
        for a in &self.arms {
            let mut prev = 0;
            for _ in a {
                out.push((prev, idx));
                prev = idx;
                idx += 1;
            }
        }
        out
    }

    pub fn labels(&self) -> Vec<String> {
        let mut l = vec!["c".to_string()];
        for (i, a) in self.arms.iter().enumerate() {
            l.extend((0..a.len()).map(|j| format!("a{i}.{j}")));
        }
        l
    }

    /// Arm lists sorted, so that relabellings compare equal.
    pub fn canonical(&self) -> StarPlumbing {
        let mut arms = self.arms.clone();
        arms.sort();
        StarPlumbing { central_weight: self.central_weight, arms }
    }

    /// The Seifert form this plumbing presents (normal form if all weights are at least 2).
    pub fn seifert(&self) -> Result<SeifertForm> {
        if self.arms.len() != 3 {
            return Err(Error::UnsupportedShape(format!("{} arms", self.arms.len())));
        }
        let mut fibers = Vec::with_capacity(3);
        for a in &self.arms {
            fibers.push(neg_cf_eval(&NegCf::new(a.clone(), CfForm::Strict)?)?);
        }
        fibers.sort_by(|a, b| b.cmp(a));
        Ok(SeifertForm::raw(self.central_weight, fibers.try_into().expect("three fibers")))
    }

    pub fn is_quasi_alternating(&self) -> bool {
        self.seifert().map(|y| is_quasi_alternating(&y)).unwrap_or(false)
    }
}

pub fn star_plumbing(y: &SeifertForm) -> Result<StarPlumbing> {
    y.require_normalized()?;
    let arms = y
        .fibers
        .iter()
        .map(|f| neg_cf_expand(f, CfForm::Strict).map(|cf| cf.coeffs().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(StarPlumbing { central_weight: y.e, arms })
}

pub fn gram(g: &StarPlumbing) -> GramLattice {
    let w = g.weights();
    let n = w.len();
    let mut m = vec![vec![0i64; n]; n];
    for (i, &x) in w.iter().enumerate() {
        m[i][i] = x;
    }
    for (a, b) in g.edges() {
        m[a][b] = -1;
        m[b][a] = -1;
    }
    GramLattice { rank: n, gram: m, labels: g.labels() }
}

/// `n1 x1^2 - 2 x1 x2 + n2 x2^2 - ... + nk xk^2`.
pub fn q_form_eval(weights: &[i64], x: &[i64]) -> Result<i64> {
    if weights.len() != x.len() {
        return Err(Error::LengthMismatch { expected: weights.len(), got: x.len() });
    }
    let diag: i64 = weights.iter().zip(x).map(|(n, v)| n * v * v).sum();
    let off: i64 = x.windows(2).map(|p| p[0] * p[1]).sum();
    Ok(diag - 2 * off)
}

/// The transpose of the embedding is onto `Z^rank`: every invariant factor is 1.
pub fn surjectivity_check(embedding_rows: &[Vec<i64>]) -> bool {
    if embedding_rows.is_empty() {
        return true;
    }
    let inv = linalg::smith_invariants(embedding_rows);
    inv.len() == embedding_rows.len() && inv.iter().all(|d| d == &1.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn sfs(s: &str) -> SeifertForm {
        s.parse().unwrap()
    }

    #[test]
    fn star_examples() {
        let y = sfs("2;13/5,5/3,3/1");
        let g = star_plumbing(&y).unwrap();
        assert_eq!(g.central_weight, 2);
        assert_eq!(g.arms, vec![vec![3, 3, 2], vec![2, 3], vec![3]]);
        assert_eq!(g.vertex_count(), 1 + 3 + 2 + 1);
        assert_eq!(gram(&g).determinant(), BigInt::from(133));

        let y = sfs("2;3,3,2");
        let (y, o) = normalize(y.e, &y.fibers).unwrap();
        assert_eq!(o, Orientation::Preserved);
        let g = star_plumbing(&y).unwrap();
        assert_eq!(g.arms, vec![vec![3], vec![3], vec![2]]);
        let m = gram(&g).gram;
        assert_eq!(m, vec![
            vec![2, -1, -1, -1],
            vec![-1, 3, 0, 0],
            vec![-1, 0, 3, 0],
            vec![-1, 0, 0, 2]
        ]);
        assert_eq!(gram(&StarPlumbing::new(5, vec![])).gram, vec![vec![5]]);
        assert!(matches!(star_plumbing(&sfs("1;5/2,13/8,3/2")), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(&sfs("2;13/5,5/3,3/1")), r(133, 195));
        assert_eq!(epsilon(&sfs("1;5/2,13/8,3/2")), r(-133, 195));
        assert_eq!(epsilon(&sfs("3;2,2,2")), r(3, 2));
        // independent: (1/rs)(p/q)/(rs - p/q) for r=5, s=13, p/q = 133/2
        let x = r(133, 2);
        let expect = x.clone() / (Rational::integer(65) - x) / 65;
        assert_eq!(epsilon(&sfs("1;5/2,13/8,3/2")), expect);
    }

    #[test]
    fn reversal() {
        let y = sfs("2;13/5,5/3,3/1");
        let z = orientation_reverse(&y).unwrap();
        assert_eq!(z, sfs("1;5/2,13/8,3/2").canonical());
        assert_eq!(orientation_reverse(&z).unwrap(), y.canonical());
        assert_eq!(epsilon(&z), -epsilon(&y));
    }

    #[test]
    fn normalize_examples() {
        let (y, o) = normalize(1, &[r(2, 1), r(3, 2), r(-3, 4)]).unwrap();
        assert_eq!((y, o), (sfs("3;2,3/2,3/2"), Orientation::Preserved));
        let (y, o) = normalize(2, &[r(13, 5), r(5, 3), r(3, 1)]).unwrap();
        assert_eq!((y.clone(), o), (sfs("2;13/5,5/3,3").canonical(), Orientation::Preserved));
        assert_eq!(normalize(y.e, &y.fibers).unwrap().0, y);
        let (y, o) = normalize(1, &[r(5, 2), r(13, 8), r(3, 2)]).unwrap();
        assert_eq!((y, o), (sfs("2;13/5,5/3,3").canonical(), Orientation::Reversed));
        assert!(matches!(normalize(0, &[r(1, 1), r(2, 1), r(3, 1)]), Err(Error::LensSpaceDegenerate { .. })));
        assert!(matches!(normalize(1, &[r(1, 3), r(2, 1), r(3, 1)]), Err(Error::LensSpaceDegenerate { .. })));
        assert!(matches!(normalize(1, &[r(3, 1), r(3, 1), r(3, 1)]), Err(Error::NotRationalHomologySphere(_))));
    }

    #[test]
    fn qa_examples() {
        assert!(is_quasi_alternating(&sfs("2;13/5,5/3,3")));
        assert!(is_quasi_alternating(&sfs("3;2,2,2")));
        assert!(!is_quasi_alternating(&sfs("2;2,2,2")));
        assert!(!is_quasi_alternating(&sfs("1;5,5,5")));
    }

    #[test]
    fn q_form_examples() {
        assert_eq!(q_form_eval(&[2], &[1]).unwrap(), 2);
        assert_eq!(q_form_eval(&[3, 3, 2], &[1, 1, 1]).unwrap(), 4);
        assert_eq!(q_form_eval(&[3, 3, 2], &[0, 0, 0]).unwrap(), 0);
        assert!(q_form_eval(&[3], &[1, 1]).is_err());
    }

    #[test]
    fn surjectivity_examples() {
        assert!(surjectivity_check(&[vec![1, 0], vec![0, 1]]));
        assert!(!surjectivity_check(&[vec![2]]));
        assert!(surjectivity_check(&[vec![-1, 1, 0], vec![0, -1, 1]]));
        assert!(!surjectivity_check(&[vec![1, 1], vec![1, -1]]));
    }

    #[test]
    fn definiteness_and_determinant_scan() {
        // all normalized forms with fiber numerators <= 13, a handful of e
        let mut fibers = Vec::new();
        for p in 2..=13i64 {
            for q in 1..p {
                if num_integer::gcd(p, q) == 1 {
                    fibers.push(r(p, q));
                }
            }
        }
        let mut checked = 0;
        for e in -1..=4 {
            for (i, a) in fibers.iter().enumerate().step_by(3) {
                for (j, b) in fibers.iter().enumerate().skip(i).step_by(5) {
                    for c in fibers.iter().skip(j).step_by(7) {
                        let mut fs = vec![a.clone(), b.clone(), c.clone()];
                        fs.sort_by(|x, y| y.cmp(x));
                        let y = SeifertForm::raw(e, fs.try_into().unwrap());
                        let eps = epsilon(&y);
                        let arms: Vec<Vec<i64>> = y
                            .fibers
                            .iter()
                            .map(|f| neg_cf_expand(f, CfForm::Strict).unwrap().coeffs().to_vec())
                            .collect();
                        let g = gram(&StarPlumbing::new(e, arms));
                        assert_eq!(g.is_positive_definite(), eps.is_positive(), "{y}");
                        let prod: BigInt = y.fibers.iter().map(|f| f.numer().clone()).product();
                        let order = (Rational::from(prod) * eps).abs();
                        assert_eq!(Rational::from(g.determinant().abs()), order, "{y}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(sfs("S2(2; 13/5, 5/3, 3)"), sfs("2;13/5,5/3,3/1"));
        for bad in ["garbage", "2;1,2", "2;1,2,3,4", "x;1,2,3", "2;0,2,3", "S2(2;2,3,3", ""] {
            assert!(bad.parse::<SeifertForm>().is_err(), "{bad}");
        }
        let y = sfs("2;13/5,5/3,3");
        let js = serde_json::to_string(&y).unwrap();
        assert_eq!(serde_json::from_str::<SeifertForm>(&js).unwrap(), y);
    }
}
