use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use cm_realize::changemaker::{build_cm_lattice, parse_stable_list, standard_basis};
use cm_realize::knots::{alexander, genus, surgery, torsion_coeffs, Knot};
use cm_realize::plumbing::{epsilon, gram, is_quasi_alternating, normalize, star_plumbing, SeifertForm};
use cm_realize::realize::{realize, RealizationQuery};
use cm_realize::verify::run_suite;
use cm_realize::{Error, Rational, Result};

const SCHEMA: &str = "cm-realize/1";

#[derive(Parser)]
#[command(name = "cm-realize", version, about = "Torus knot and cable surgeries onto small Seifert fibered spaces")]
struct Cli {
    /// machine-readable output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Knots in S^3 with a surgery to the given space at the given slope
    Realize {
        /// normalized Seifert invariants, "e;p1/q1,p2/q2,p3/q3"
        #[arg(long)]
        sfs: String,
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// Seifert invariants of a surgery on T(r,s) or C(a,b);T(r,s)
    Surgery {
        #[arg(long, allow_hyphen_values = true)]
        knot: String,
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// The changemaker lattice of a slope and stable coefficients
    CmLattice {
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        /// comma-separated, e.g. 2,3,5,5
        #[arg(long, default_value = "")]
        stable: String,
        #[arg(long)]
        standard_basis: bool,
        #[arg(long)]
        gram: bool,
    },
    /// Normal form and star plumbing of a Seifert space
    Plumbing {
        #[arg(long, allow_hyphen_values = true)]
        sfs: String,
        #[arg(long)]
        gram: bool,
    },
    /// Alexander polynomial and torsion coefficients
    Alexander {
        #[arg(long, allow_hyphen_values = true)]
        knot: String,
    },
    /// Run a property suite
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a command produced: a JSON payload, its text rendering, and whether it counts as success.
struct Report {
    payload: Value,
    text: String,
    ok: bool,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Skip building JSON that will not be printed; certificates can be large.
fn lazy(json: bool, f: impl FnOnce() -> Value) -> Value {
    if json {
        f()
    } else {
        Value::Null
    }
}

fn run(cmd: &Command, json: bool) -> Result<Report> {
    match cmd {
        Command::Realize { sfs, slope } => {
            let y: SeifertForm = sfs.parse()?;
            let slope: Rational = slope.parse()?;
            let r = realize(&RealizationQuery { y, slope })?;
            let mut text = format!("{} at slope {} ({})\n", r.query.y, r.query.slope, r.regime);
            text += &format!("{} knot(s)\n", r.knots.len());
            for k in &r.knots {
                text += &format!("  {}  mirror {}  genus {}\n", k.knot, k.knot.mirror(), k.genus);
                if let Some(cm) = &k.certificate.cm {
                    text += &format!(
                        "    stable {:?}  V {:?}  vertex set Type {} ({:?})\n",
                        cm.stable, cm.vi, cm.vertex_set.tag, cm.vertex_set.via
                    );
                }
            }
            let payload = lazy(json, || json!({ "command": "realize", "result": to_value(&r) }));
            Ok(Report { payload, text, ok: true })
        }
        Command::Surgery { knot, slope } => {
            let k: Knot = knot.parse()?;
            let slope: Rational = slope.parse()?;
            let s = surgery(&k, &slope)?;
            let text = format!(
                "raw        {}\nnormalized {}\norientation {}\n",
                s.raw,
                s.normalized,
                if s.orientation.is_reversed() { "reversed" } else { "preserved" }
            );
            let payload = json!({ "command": "surgery", "knot": k, "slope": slope, "surgery": to_value(&s) });
            Ok(Report { payload, text, ok: true })
        }
        Command::CmLattice { slope, stable, standard_basis: want_basis, gram: want_gram } => {
            let slope: Rational = slope.parse()?;
            let stable = parse_stable_list(stable)?;
            let l = build_cm_lattice(&slope, &stable)?;
            let mut text = format!(
                "slope {}  cf {:?}  sigma {:?}  rank {}  ambient {}\n",
                l.slope,
                l.cf,
                l.sigma.0,
                l.rank(),
                l.ambient_rank()
            );
            let mut payload = json!({ "command": "cm-lattice", "lattice": to_value(&l), "rank": l.rank() });
            if *want_basis || *want_gram {
                let sb = standard_basis(&l);
                if *want_basis {
                    for n in &sb.nu {
                        let flags = match (n.tight, n.gapless) {
                            (true, _) => " tight",
                            (false, true) => " gapless",
                            _ => "",
                        };
                        text += &format!("  nu{} = {:?}{}\n", n.k, n.vector.0, flags);
                    }
                    for (k, m) in sb.mu.iter().enumerate() {
                        text += &format!("  mu{} = {:?}\n", k + 1, m.0);
                    }
                    payload["standard_basis"] = to_value(&sb);
                }
                if *want_gram {
                    let g = sb.gram();
                    text += &render_gram(&g.labels, &g.gram);
                    payload["gram"] = to_value(&g);
                }
            }
            Ok(Report { payload, text, ok: true })
        }
        Command::Plumbing { sfs, gram: want_gram } => {
            let raw: SeifertForm = sfs.parse()?;
            let (y, orientation) = normalize(raw.e, &raw.fibers)?;
            let g = star_plumbing(&y)?;
            let mut text = format!(
                "normalized {}{}\ncentral {}  arms {:?}\nepsilon {}  quasi-alternating {}\n",
                y,
                if orientation.is_reversed() { " (orientation reversed)" } else { "" },
                g.central_weight,
                g.arms,
                epsilon(&y),
                is_quasi_alternating(&y)
            );
            let mut payload = json!({
                "command": "plumbing",
                "normalized": y,
                "orientation": orientation,
                "plumbing": to_value(&g),
                "epsilon": epsilon(&y),
                "quasi_alternating": is_quasi_alternating(&y),
            });
            if *want_gram {
                let q = gram(&g);
                text += &render_gram(&q.labels, &q.gram);
                payload["gram"] = to_value(&q);
            }
            Ok(Report { payload, text, ok: true })
        }
        Command::Alexander { knot } => {
            let k: Knot = knot.parse()?;
            let d = alexander(&k);
            let t = torsion_coeffs(&d);
            let text = format!("{d}\ngenus {}\ntorsion {:?}\n", genus(&k), t);
            let payload = json!({
                "command": "alexander",
                "knot": k,
                "alexander": to_value(&d),
                "genus": genus(&k),
                "torsion": t,
            });
            Ok(Report { payload, text, ok: true })
        }
        Command::Verify { suite, bound, seed } => {
            let r = run_suite(suite, *bound, *seed)?;
            let mut text = format!(
                "{}: {} ({} cases, bound {}, seed {})\n",
                r.suite,
                if r.passed() { "pass" } else { "FAIL" },
                r.cases,
                r.bound,
                r.seed
            );
            for f in &r.failures {
                text += &format!("  counterexample: {f}\n");
            }
            let ok = r.passed();
            Ok(Report { payload: json!({ "command": "verify", "result": to_value(&r) }), text, ok })
        }
    }
}

fn render_gram(labels: &[String], g: &[Vec<i64>]) -> String {
    let mut s = String::new();
    for (l, row) in labels.iter().zip(g) {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
        s += &format!("  {l:>6} {}\n", cells.join(""));
    }
    s
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), SCHEMA.into());
    }
    v
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli.command, cli.json) {
        Ok(r) => {
            if cli.json {
                println!("{}", with_schema(r.payload));
            } else {
                print!("{}", r.text);
            }
            // a failing suite is an invariant violation
            ExitCode::from(if r.ok { 0 } else { 2 })
        }
        Err(e) => {
            if cli.json {
                println!("{}", with_schema(json!({ "error": { "kind": e.kind(), "message": e.to_string() } })));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code().clamp(1, 255) as u8
}
