//! Which torus knots and cables of torus knots realize a small Seifert fibered space by a
//! given non-integer surgery.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::changemaker::{build_cm_lattice, match_plumbing, stable_from_torsion, vi_sequence, VertexSetType};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::knots::{alexander, genus, surgery, torsion_coeffs, AlexanderPoly, Knot, Surgery, TorusKnot};
use crate::plumbing::{normalize, star_plumbing, Orientation, SeifertForm};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationQuery {
    pub y: SeifertForm,
    pub slope: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `e = 2`, negative slope
    #[serde(rename = "e=2,p/q<0")]
    CentralTwoNegative,
    #[serde(rename = "e>=3,p/q<0")]
    CentralThreeNegative,
    #[serde(rename = "e>=3,p/q>0")]
    CentralThreePositive,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::CentralTwoNegative => "e=2, p/q<0",
            Regime::CentralThreeNegative => "e>=3, p/q<0",
            Regime::CentralThreePositive => "e>=3, p/q>0",
        })
    }
}

pub fn regime(y: &SeifertForm, slope: &Rational) -> Result<Regime> {
    if slope.is_integer() {
        return Err(Error::IntegerSlope(slope.to_string()));
    }
    match (y.e, slope.is_negative()) {
        (2, true) => Ok(Regime::CentralTwoNegative),
        (e, true) if e >= 3 => Ok(Regime::CentralThreeNegative),
        (e, false) if e >= 3 => Ok(Regime::CentralThreePositive),
        (e, neg) => Err(Error::UnsupportedRegime(format!(
            "e = {e} with {} slope",
            if neg { "negative" } else { "positive" }
        ))),
    }
}

/// The changemaker side of an `e = 2` answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmCertificate {
    /// `|p/q|`, the slope of the lattice
    pub slope: Rational,
    pub stable: Vec<i64>,
    pub torsion: Vec<i64>,
    /// `V_0, …, V_{n/2}` of the lattice
    pub vi: Vec<i64>,
    pub vertex_set: VertexSetType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub surgery: Surgery,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cm: Option<CmCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub knot: Knot,
    pub alexander: AlexanderPoly,
    pub genus: i64,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationResult {
    pub query: RealizationQuery,
    pub regime: Regime,
    pub knots: Vec<Realization>,
}

impl RealizationResult {
    pub fn knot_list(&self) -> Vec<Knot> {
        self.knots.iter().map(|r| r.knot).collect()
    }
}

/// Torus knots and cables whose surgery at `p/q` has fiber numerators `nums` (sorted).
///
/// Surgery on `T(±r,s)` at `p'/q'` has numerators `r, s, |p' ∓ rs q'|`, and surgery on
/// `C(a,b)` at `(abq ± 1)/q` is surgery on the companion at `p/(q a²)`. So `{r, s}` is a pair
/// of the numerators and the third one fixes `a²`.
fn candidates(p: i64, q: i64, nums: &[i64]) -> Vec<Knot> {
    let mut out = Vec::new();
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        let (r, s, third) = (nums[i], nums[j], nums[k]);
        for negative in [false, true] {
            let Ok(c) = TorusKnot::new(negative, r, s) else { continue };
            out.push(Knot::Torus(c));
            let sign: i128 = if negative { -1 } else { 1 };
            for t in [third as i128, -(third as i128)] {
                // p - sign·rs·q·a² = t
                let den = sign * c.rs() as i128 * q as i128;
                let num = p as i128 - t;
                if num % den != 0 {
                    continue;
                }
                let a2 = num / den;
                if a2 < 4 {
                    continue;
                }
                let a = a2.isqrt();
                if a * a != a2 {
                    continue;
                }
                let Ok(a) = i64::try_from(a) else { continue };
                for delta in [1i64, -1] {
                    let Some(ab) = p.checked_sub(delta) else { continue };
                    if ab % q != 0 || (ab / q) % a != 0 {
                        continue;
                    }
                    if let Ok(k) = Knot::cable(a, ab / q / a, c) {
                        out.push(k);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Fiber numerators of `S³_{p/q}(K)`, which normalization leaves unchanged.
fn surgery_numerators(knot: &Knot, p: i64, q: i64) -> Vec<i128> {
    let (c, q) = match *knot {
        Knot::Torus(t) => (t, q),
        Knot::Cable { a, companion, .. } => (companion, q.saturating_mul(a).saturating_mul(a)),
    };
    let sign: i128 = if c.negative { -1 } else { 1 };
    let third = (p as i128 - sign * c.rs() as i128 * q as i128).unsigned_abs();
    let mut v = vec![c.r as i128, c.s as i128, third as i128];
    v.sort_unstable();
    v
}

/// Largest lattice rank certified; the plumbing match works with dense Gram matrices.
pub const MAX_CERTIFIED_RANK: usize = 4096;

fn certify_cm(knot: &Knot, slope: &Rational, y: &SeifertForm) -> Result<CmCertificate> {
    let lslope = slope.abs();
    let rank_estimate = lslope.ceil_i64()?.unsigned_abs() as usize;
    if rank_estimate > MAX_CERTIFIED_RANK {
        return Err(Error::SearchBudgetExceeded {
            what: format!("changemaker certificate for {knot} at {slope}"),
            budget: MAX_CERTIFIED_RANK as u64,
        });
    }
    let torsion = torsion_coeffs(&alexander(&knot.mirror()));
    let stable = stable_from_torsion(&lslope, &torsion)?;
    let l = build_cm_lattice(&lslope, &stable)?;
    let vi = vi_sequence(&l)?;
    if vi.iter().enumerate().any(|(i, &v)| v != torsion.get(i).copied().unwrap_or(0)) {
        return Err(Error::Internal(format!("V_i of {knot} disagree with its torsion coefficients")));
    }
    let vertex_set = match_plumbing(&l, &star_plumbing(y)?)?.ok_or_else(|| {
        Error::Internal(format!("the changemaker lattice of {knot} does not match the plumbing of {y}"))
    })?;
    Ok(CmCertificate { slope: lslope, stable, torsion, vi, vertex_set })
}

/// Every torus knot or cable of a torus knot `K` with `S³_{p/q}(K) = Y`, `Y` normalized.
pub fn realize(query: &RealizationQuery) -> Result<RealizationResult> {
    let y = query.y.canonical();
    let slope = &query.slope;
    let regime = regime(&y, slope)?;
    if !y.is_normalized() {
        let (n, o) = normalize(y.e, &y.fibers)?;
        return Err(Error::NotNormalized(format!("{y} normalizes to {n} ({o:?} orientation)")));
    }
    let mut numerators = y.fiber_numerators();
    numerators.sort_unstable();
    let (p, q) = slope.to_i64_pair()?;
    let wide: Vec<i128> = numerators.iter().map(|&x| x as i128).collect();
    let mut found: BTreeMap<Knot, Realization> = BTreeMap::new();
    for knot in candidates(p, q, &numerators) {
        if surgery_numerators(&knot, p, q) != wide {
            continue;
        }
        let s = match surgery(&knot, slope) {
            Ok(s) => s,
            Err(Error::LensSpaceDegenerate { .. })
            | Err(Error::ReducibleSurgery(_))
            | Err(Error::NotRationalHomologySphere(_)) => continue,
            Err(e) => return Err(e),
        };
        if s.orientation != Orientation::Preserved || s.normalized.canonical() != y {
            continue;
        }
        let g = genus(&knot);
        if y.e >= 3 && slope.abs() > Rational::integer(4 * g + 3) {
            continue;
        }
        let cm = match regime {
            Regime::CentralTwoNegative => Some(certify_cm(&knot, slope, &y)?),
            _ => None,
        };
        found.insert(
            knot,
            Realization { knot, alexander: alexander(&knot), genus: g, certificate: Certificate { surgery: s, cm } },
        );
    }
    Ok(RealizationResult { query: RealizationQuery { y, slope: slope.clone() }, regime, knots: found.into_values().collect() })
}

/// With denominator at least 9 every answer is a torus knot or a cable of one.
pub fn all_torus_or_cable(result: &RealizationResult, slope: &Rational) -> bool {
    let Ok((_, q)) = slope.to_i64_pair() else { return true };
    q < 9 || result.knots.iter().all(|r| matches!(r.knot, Knot::Torus(_) | Knot::Cable { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::e_window;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    fn y(s: &str) -> SeifertForm {
        s.parse::<SeifertForm>().unwrap().canonical()
    }

    fn run(s: &str, slope: Rational) -> Result<RealizationResult> {
        realize(&RealizationQuery { y: y(s), slope })
    }

    #[test]
    fn flagship_133() {
        let r = run("2;13/5,5/3,3", q(-133, 2)).unwrap();
        assert_eq!(r.regime, Regime::CentralTwoNegative);
        let mirrors: Vec<String> = r.knots.iter().map(|k| k.knot.mirror().to_string()).collect();
        assert_eq!(mirrors, ["T(5,13)", "C(2,33);T(3,5)"]);
        assert_ne!(r.knots[0].alexander, r.knots[1].alexander);
        let stables: Vec<Vec<i64>> = r.knots.iter().map(|k| k.certificate.cm.as_ref().unwrap().stable.clone()).collect();
        assert_eq!(stables, [vec![2, 3, 5, 5], vec![2, 2, 2, 4, 6]]);
        assert!(all_torus_or_cable(&r, &q(-133, 2)));
    }

    #[test]
    fn small_examples() {
        let r = run("2;2,3,3", q(-15, 2)).unwrap();
        assert_eq!(r.knot_list(), [Knot::torus(true, 2, 3).unwrap()]);
        let cm = r.knots[0].certificate.cm.as_ref().unwrap();
        assert_eq!(cm.stable, [2]);
        assert_eq!(cm.vertex_set.tag, crate::changemaker::VertexType::I);
        let r = run("3;2,3/2,3/2", q(21, 4)).unwrap();
        assert_eq!(r.knot_list(), [Knot::torus(false, 2, 3).unwrap()]);
        assert!(r.knots[0].certificate.cm.is_none());
    }

    #[test]
    fn regime_errors() {
        assert!(matches!(run("1;2,3/2,3/2", q(7, 2)), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(run("2;2,3,3", q(15, 2)), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(run("2;2,3,3", q(-7, 1)), Err(Error::IntegerSlope(_))));
        assert!(matches!(run("2;3/2,3/2,3/2", q(-7, 2)), Err(Error::NotRationalHomologySphere(_))));
        assert!(matches!(run("3;2,1,3", q(7, 2)), Err(Error::LensSpaceDegenerate { .. })));
    }

    #[test]
    fn raw_forms_are_rejected() {
        assert!(matches!(run("2;3/2,3/2,4/3", q(-7, 2)), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn results_lie_in_windows() {
        for (s, slope) in [("2;13/5,5/3,3", q(-133, 2)), ("3;2,3/2,3/2", q(21, 4))] {
            let r = run(s, slope.clone()).unwrap();
            for k in r.knots {
                let (c, sl) = match k.knot {
                    Knot::Torus(t) => (t, slope.clone()),
                    Knot::Cable { a, companion, .. } => (companion, &slope / &Rational::integer(a * a)),
                };
                assert!(e_window(c.negative, c.r, c.s, r.query.y.e).contains(&sl));
            }
        }
    }
}
