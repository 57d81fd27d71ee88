//! One line per acceptance criterion. Each check has a pinned wall-clock limit;
//! running over it counts as a failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cm_realize::changemaker::{build_cm_lattice, standard_basis, vi_minimization};
use cm_realize::knots::{alexander, torsion_coeffs, Knot};
use cm_realize::lattice::{lattice_isomorphic, verify_isomorphism};
use cm_realize::plumbing::{gram, star_plumbing, SeifertForm};
use cm_realize::realize::{realize, RealizationQuery};
use cm_realize::verify::run_suite;
use cm_realize::Rational;

type Check = fn() -> Result<String, String>;

const SEED: u64 = 20;

fn flagship() -> Result<String, String> {
    let y: SeifertForm = "2;13/5,5/3,3/1".parse().map_err(|e| format!("{e}"))?;
    let target = gram(&star_plumbing(&y).map_err(|e| e.to_string())?);
    let slope = Rational::new(133, 2);
    for stable in [vec![2, 3, 5, 5], vec![2, 2, 2, 4, 6]] {
        let l = build_cm_lattice(&slope, &stable).map_err(|e| e.to_string())?;
        let g = standard_basis(&l).gram();
        match lattice_isomorphic(&g, &target).map_err(|e| e.to_string())? {
            Some(u) if verify_isomorphism(&g, &target, &u) => {}
            Some(_) => return Err(format!("{stable:?}: witness does not verify")),
            None => return Err(format!("{stable:?}: not isomorphic")),
        }
    }
    let r = realize(&RealizationQuery { y, slope: -slope }).map_err(|e| e.to_string())?;
    let mut mirrors: Vec<String> = r.knots.iter().map(|k| k.knot.mirror().to_string()).collect();
    mirrors.sort();
    if mirrors != ["C(2,33);T(3,5)", "T(5,13)"] {
        return Err(format!("realize returned mirrors {mirrors:?}"));
    }
    Ok("both lattices isomorphic to the plumbing, two knots".into())
}

fn suite(name: &str, bound: i64) -> Result<String, String> {
    let r = run_suite(name, Some(bound), SEED).map_err(|e| e.to_string())?;
    if r.passed() {
        Ok(format!("{} cases", r.cases))
    } else {
        Err(format!("{} of {} failed, first: {}", r.failures.len(), r.cases, r.failures[0]))
    }
}

fn vi_bridge() -> Result<String, String> {
    let cases: [(i64, &[i64], &str); 3] = [
        (15, &[2], "T(2,3)"),
        (133, &[2, 3, 5, 5], "T(5,13)"),
        (133, &[2, 2, 2, 4, 6], "C(2,33);T(3,5)"),
    ];
    let mut entries = 0;
    for (p, stable, knot) in cases {
        let l = build_cm_lattice(&Rational::new(p, 2), stable).map_err(|e| e.to_string())?;
        let k: Knot = knot.parse().map_err(|e| format!("{e}"))?;
        let t = torsion_coeffs(&alexander(&k));
        for i in 0..=l.n() / 2 {
            let v = vi_minimization(&l, i).map_err(|e| e.to_string())?;
            let want = t.get(i as usize).copied().unwrap_or(0);
            if v != want {
                return Err(format!("{p}/2 {stable:?}: V_{i} = {v}, t_{i}({knot}) = {want}"));
            }
            entries += 1;
        }
    }
    Ok(format!("{entries} entries agree"))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, Check); 10] = [
        ("1 flagship 133/2", 30, flagship),
        ("2 Brown equivalence, sum <= 20", 10, || suite("brown-equivalence", 20)),
        ("3 plumbing inequality, QA stars <= 8 vertices", 300, || suite("lemma46", 3)),
        ("4 mu continued fractions, q <= 12", 1, || suite("mu-cf", 12)),
        ("5 standard basis spans, det = p", 60, || suite("basis-span", 500)),
        ("6 V_i equals torsion coefficients", 120, vi_bridge),
        ("7 epsilon of torus surgeries", 5, || suite("epsilon", 7)),
        ("8 blow-down to the empty diagram", 60, || suite("blowdown", 10)),
        ("9 central weight windows", 60, || suite("window-consistency", 35)),
        ("10 self-enumeration closure", 600, || suite("closure", 35)),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let res = check();
        let took = start.elapsed();
        let res = match res {
            Ok(_) if took > Duration::from_secs(limit) => Err(format!("over the {limit}s limit")),
            r => r,
        };
        match res {
            Ok(msg) => println!("PASS  {name}: {msg} ({:.2}s, limit {limit}s)", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg} ({:.2}s, limit {limit}s)", took.as_secs_f64());
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
