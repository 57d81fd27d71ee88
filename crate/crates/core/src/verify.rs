//! Property suites over generated instances, shared by the CLI and the acceptance harness.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::changemaker::{
    brown_criterion, build_cm_lattice, is_changemaker, mu_norms, standard_basis, stable_from_torsion, vi_sequence,
    ChangemakerLattice,
};
use crate::error::{Error, Result};
use crate::exact::{eval_coeffs, gcd_i64, Rational};
use crate::lattice::{is_unimodular, par_map};
use crate::kirby::{reduce_to_empty, ChainDiagram};
use crate::knots::{e_window, surgery, torus_knots_up_to, torus_surgery, Knot, SlopeInterval, TorusKnot};
use crate::plumbing::{enumerate_star_plumbings, epsilon, verify_chain_bounds, verify_star_bound, Orientation};
use crate::realize::{realize, RealizationQuery};

pub const SUITES: &[&str] = &[
    "brown-equivalence",
    "lemma44",
    "lemma46",
    "mu-cf",
    "basis-span",
    "blowdown",
    "window-consistency",
    "vi-roundtrip",
    "epsilon",
    "closure",
];

/// Outcome of one suite; `failures` holds printable counterexamples, capped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub bound: i64,
    pub seed: u64,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(suite: &str, bound: i64, seed: u64) -> SuiteOutcome {
        SuiteOutcome { suite: suite.to_string(), bound, seed, cases: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 32 {
            self.failures.push(what());
        }
    }
}

pub fn default_bound(suite: &str) -> Option<i64> {
    Some(match suite {
        "brown-equivalence" => 20,
        "lemma44" | "lemma46" => 3,
        "mu-cf" => 12,
        "basis-span" => 500,
        "blowdown" => 10,
        "window-consistency" | "closure" => 35,
        "vi-roundtrip" => 60,
        "epsilon" => 7,
        _ => return None,
    })
}

pub fn run_suite(suite: &str, bound: Option<i64>, seed: u64) -> Result<SuiteOutcome> {
    let b = match (bound, default_bound(suite)) {
        (_, None) => return Err(Error::Parse(format!("unknown suite {suite:?}; known: {}", SUITES.join(", ")))),
        (Some(b), _) => b,
        (None, Some(d)) => d,
    };
    let mut out = SuiteOutcome::new(suite, b, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        "brown-equivalence" => brown(&mut out, b),
        "lemma44" => chain_bounds(&mut out, b)?,
        "lemma46" => star_bounds(&mut out, 8, 5, b)?,
        "mu-cf" => mu_cf(&mut out, b)?,
        "basis-span" => basis_span(&mut out, b, 50, &mut rng)?,
        "blowdown" => blowdown(&mut out, b as usize)?,
        "window-consistency" => windows(&mut out, b, 5, &mut rng)?,
        "vi-roundtrip" => vi_roundtrip(&mut out, b, 40, &mut rng)?,
        "epsilon" => epsilon_suite(&mut out, b, 200, &mut rng)?,
        "closure" => closure(&mut out, b, 6, 400)?,
        _ => unreachable!(),
    }
    Ok(out)
}

/// All nondecreasing positive tuples with sum at most `max_sum`.
pub fn nondecreasing_tuples(max_sum: i64) -> Vec<Vec<i64>> {
    fn rec(prefix: &mut Vec<i64>, left: i64, out: &mut Vec<Vec<i64>>) {
        out.push(prefix.clone());
        let lo = prefix.last().copied().unwrap_or(1);
        for x in lo..=left {
            prefix.push(x);
            rec(prefix, left - x, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), max_sum, &mut out);
    out
}

fn brown(out: &mut SuiteOutcome, max_sum: i64) {
    for s in nondecreasing_tuples(max_sum) {
        out.check(is_changemaker(&s) == brown_criterion(&s), || format!("{s:?}"));
    }
}

fn chain_bounds(out: &mut SuiteOutcome, bound: i64) -> Result<()> {
    for len in 1..=4usize {
        let mut chain = vec![2i64; len];
        loop {
            for r in verify_chain_bounds(&chain, bound)? {
                let ok = r.passed();
                out.check(ok, || format!("{chain:?} {}: minimum {} < {}", r.suite, r.minimum, r.threshold));
            }
            let Some(i) = chain.iter().rposition(|&w| w < 5) else { break };
            chain[i] += 1;
            for w in &mut chain[i + 1..] {
                *w = 2;
            }
        }
    }
    Ok(())
}

/// The whole-plumbing inequality over every QA star in range.
pub fn star_bounds(out: &mut SuiteOutcome, max_vertices: usize, max_weight: i64, bound: i64) -> Result<()> {
    let gs = enumerate_star_plumbings(max_vertices, max_weight, true);
    for (g, r) in gs.iter().zip(par_map(&gs, |g| verify_star_bound(g, bound))) {
        let r = r?;
        out.check(r.passed(), || format!("{g:?}: minimum {} at {:?}", r.minimum, r.counterexamples.first()));
    }
    Ok(())
}

pub fn mu_cf(out: &mut SuiteOutcome, max_q: i64) -> Result<()> {
    let n = 8;
    for q in 2..=max_q {
        for r in 1..q {
            if gcd_i64(q, r) != 1 {
                continue;
            }
            let norms = mu_norms(&Rational::new(n * q - r, q))?;
            let got = eval_coeffs(&norms)?;
            out.check(got == Rational::new(q, q - r), || format!("q={q} r={r}: {norms:?} -> {got}"));
        }
    }
    Ok(())
}

/// Random changemaker lattices with slope numerator at most `max_p`.
pub fn random_lattices(rng: &mut ChaCha8Rng, max_p: i64, count: usize) -> Vec<ChangemakerLattice> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    while out.len() < count {
        let q = rng.gen_range(2..=9i64);
        let p = rng.gen_range(q + 1..=max_p);
        if gcd_i64(p, q) != 1 {
            continue;
        }
        let n = (p + q - 1) / q;
        let mut stable = Vec::new();
        let mut budget = n - 1;
        for _ in 0..rng.gen_range(0..6) {
            let x = rng.gen_range(2..=8i64);
            if x * x <= budget {
                stable.push(x);
                budget -= x * x;
            }
        }
        stable.sort_unstable();
        if !seen.insert((p, q, stable.clone())) {
            continue;
        }
        if let Ok(l) = build_cm_lattice(&Rational::new(p, q), &stable) {
            out.push(l);
        }
    }
    out
}

fn basis_span(out: &mut SuiteOutcome, max_p: i64, count: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    for l in random_lattices(rng, max_p, count) {
        let sb = standard_basis(&l);
        let tag = || format!("{} {:?}", l.slope, l.stable());
        let det = sb.gram().determinant();
        out.check(&det == l.slope.numer(), || format!("{}: det {det}", tag()));
        // coordinates of the standard basis in the kernel basis must form a unimodular matrix
        let kernel = l.complement()?;
        let coords = kernel.coordinates_all(&sb.elements());
        let spans = coords.is_some_and(|u| u.len() == kernel.rank() && is_unimodular(&u));
        out.check(spans, || format!("{}: basis does not span", tag()));
    }
    Ok(())
}

/// Stable tuples of half-integer lattices whose standard basis is a tree of gapless elements,
/// with the basis Gram matrix.
pub fn half_integer_plumbings(max_rank: usize, max_n: i64) -> Vec<(Rational, Vec<i64>, Vec<Vec<i64>>)> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let slope = Rational::new(2 * n - 1, 2);
        for st in nondecreasing_tuples(14) {
            if st.iter().any(|&x| x < 2) || st.iter().map(|x| x * x).sum::<i64>() > n - 1 {
                continue;
            }
            let Ok(l) = build_cm_lattice(&slope, &st) else { continue };
            if l.rank() > max_rank {
                continue;
            }
            let sb = standard_basis(&l);
            if sb.nu[1..].iter().any(|v| v.tight || !v.gapless) {
                continue;
            }
            let g = sb.gram().gram;
            if ChainDiagram::from_gram(&g).is_ok() {
                out.push((slope.clone(), st, g));
            }
        }
    }
    out
}

fn blowdown(out: &mut SuiteOutcome, max_rank: usize) -> Result<()> {
    for (slope, st, g) in half_integer_plumbings(max_rank, 40) {
        let mut d = ChainDiagram::from_gram(&g)?;
        // mark nu1 with weight +1
        d.nodes.insert(0, Rational::one());
        let trace = reduce_to_empty(&d);
        let ok = trace.as_ref().is_some_and(|t| t.len() == g.len());
        out.check(ok, || format!("{slope} {st:?}: no blow-down sequence"));
    }
    Ok(())
}

fn sample_in(w: &SlopeInterval, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let SlopeInterval::Open { lo, hi } = w else { return Vec::new() };
    let (lo, hi) = match (lo, hi) {
        (Some(l), Some(h)) => (l.clone(), h.clone()),
        (Some(l), None) => (l.clone(), l + &Rational::integer(40)),
        (None, Some(h)) => (h - &Rational::integer(40), h.clone()),
        (None, None) => (Rational::integer(-40), Rational::integer(40)),
    };
    let mut out = Vec::new();
    for _ in 0..12 {
        let d = rng.gen_range(2..=60i64);
        let t = Rational::new(rng.gen_range(1..d), d);
        let x = &lo + &(&(&hi - &lo) * &t);
        if !x.is_integer() && w.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn windows(out: &mut SuiteOutcome, max_rs: i64, max_e: i64, rng: &mut ChaCha8Rng) -> Result<()> {
    for t in torus_knots_up_to(max_rs) {
        for e in 1..=max_e {
            for x in sample_in(&e_window(t.negative, t.r, t.s, e), rng) {
                let Some(s) = nondegenerate(torus_surgery(&t, &x))? else { continue };
                let ok = s.normalized.e == e && s.orientation == Orientation::Preserved;
                out.check(ok, || format!("{t} at {x}: {} {:?}, window says e = {e}", s.normalized, s.orientation));
            }
        }
    }
    Ok(())
}

fn vi_roundtrip(out: &mut SuiteOutcome, max_p: i64, count: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    for l in random_lattices(rng, max_p, count) {
        let v = vi_sequence(&l)?;
        let back = stable_from_torsion(&l.slope, &v);
        let ok = back.as_ref().is_ok_and(|b| *b == l.stable());
        out.check(ok, || format!("{} {:?}: V = {v:?} gives {back:?}", l.slope, l.stable()));
    }
    Ok(())
}

fn epsilon_suite(out: &mut SuiteOutcome, max_s: i64, count: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut done = 0;
    while done < count {
        let r = rng.gen_range(2..max_s);
        let s = rng.gen_range(r + 1..=max_s);
        let q = rng.gen_range(2..=9i64);
        let p = rng.gen_range(-100..=100i64);
        if gcd_i64(r, s) != 1 || gcd_i64(p, q) != 1 {
            continue;
        }
        let t = TorusKnot::positive(r, s)?;
        let x = Rational::new(p, q);
        let Some(sg) = nondegenerate(torus_surgery(&t, &x))? else { continue };
        done += 1;
        let rs = Rational::integer(r * s);
        let want = &(&x / &rs) / &(&rs - &x);
        let got = epsilon(&sg.raw);
        out.check(got == want, || format!("{t} at {x}: {got} vs {want}"));
    }
    Ok(())
}

/// Lens space and reducible surgeries are outside every suite.
fn nondegenerate<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::LensSpaceDegenerate { .. } | Error::NotRationalHomologySphere(..)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Knots and slopes in the supported windows, with the normalized surgery.
pub fn closure_instances(max_rs: i64, max_q: i64, max_p: i64) -> Vec<(Knot, Rational)> {
    let mut out = Vec::new();
    let supported = |k: &Knot, x: &Rational| match surgery(k, x) {
        Ok(s) => {
            s.orientation == Orientation::Preserved
                && (s.normalized.e >= 3 || (s.normalized.e == 2 && x.is_negative()))
        }
        Err(_) => false,
    };
    for t in torus_knots_up_to(max_rs) {
        for q in 2..=max_q {
            for p in -max_p..=max_p {
                if gcd_i64(p, q) != 1 {
                    continue;
                }
                let x = Rational::new(p, q);
                let k = Knot::Torus(t);
                if supported(&k, &x) {
                    out.push((k, x));
                }
            }
        }
        for a in 2..=(max_p as f64).sqrt() as i64 + 1 {
            for q in 2..=max_q {
                for delta in [-1i64, 1] {
                    for b in -max_p..=max_p {
                        if b == 0 || gcd_i64(a, b) != 1 {
                            continue;
                        }
                        let p = q * a * b + delta;
                        if p.abs() > max_p {
                            continue;
                        }
                        let k = Knot::cable(a, b, t).expect("valid cable");
                        let x = Rational::new(p, q);
                        if supported(&k, &x) {
                            out.push((k, x));
                        }
                    }
                }
            }
        }
    }
    out
}

fn closure(out: &mut SuiteOutcome, max_rs: i64, max_q: i64, max_p: i64) -> Result<()> {
    let cases = closure_instances(max_rs, max_q, max_p);
    let verdicts = par_map(&cases, |(k, x)| -> Result<Option<String>> {
        let y = surgery(k, x)?.normalized;
        let r = realize(&RealizationQuery { y: y.clone(), slope: x.clone() });
        Ok(match r {
            Ok(r) if r.knots.iter().any(|z| z.knot == *k) => None,
            Ok(r) => Some(format!("{k} at {x}: {y} gave {:?}", r.knot_list())),
            Err(e) => Some(format!("{k} at {x}: {y} failed with {e}")),
        })
    });
    for v in verdicts {
        let v = v?;
        out.check(v.is_none(), || v.unwrap_or_default());
    }
    Ok(())
}
