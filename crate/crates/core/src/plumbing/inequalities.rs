//! Exhaustive checks of the quadratic-form lower bounds on chains and quasi-alternating stars.
//!
//! Every objective has the shape `sum a_v x_v^2 - 2 sum_{uv} x_u x_v + sum b_v |x_v|` on a
//! tree. Replacing `x` by `|x|` never raises it, so the minimum over the signed box equals the
//! minimum over `[0, B]^V`, which a tree DP finds in `O(V B^2)`. Counterexamples, when there
//! are any, are listed by brute force over the signed box.

use serde::{Deserialize, Serialize};

use super::{is_quasi_alternating, StarPlumbing};
use crate::error::{Error, Result};

const INF: i64 = i64::MAX / 4;
const MAX_LISTED: usize = 64;

/// `eval(x) >= threshold` for all `x` in the box (nonzero when `nonzero`).
#[derive(Debug, Clone)]
pub struct Inequality {
    pub quad: Vec<i64>,
    pub lin: Vec<i64>,
    pub edges: Vec<(usize, usize)>,
    pub nonzero: bool,
    pub threshold: i64,
}

impl Inequality {
    fn chain(quad: Vec<i64>, lin: Vec<i64>, nonzero: bool, threshold: i64) -> Inequality {
        let edges = (1..quad.len()).map(|i| (i - 1, i)).collect();
        Inequality { quad, lin, edges, nonzero, threshold }
    }

    pub fn len(&self) -> usize {
        self.quad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quad.is_empty()
    }

    pub fn eval(&self, x: &[i64]) -> i64 {
        let mut s: i64 = 0;
        for (i, &v) in x.iter().enumerate() {
            s += self.quad[i] * v * v + self.lin[i] * v.abs();
        }
        for &(a, b) in &self.edges {
            s -= 2 * x[a] * x[b];
        }
        s
    }

    fn box_size(&self, bound: i64) -> u128 {
        let side = (2 * bound + 1) as u128;
        let mut n: u128 = 1;
        for _ in 0..self.len() {
            n = n.saturating_mul(side);
        }
        if self.nonzero {
            n - 1
        } else {
            n
        }
    }

    /// Minimum over the box, via the tree DP on `[0, B]^V`.
    pub fn minimum(&self, bound: i64) -> i64 {
        let n = self.len();
        if n == 0 {
            return if self.nonzero { INF } else { 0 };
        }
        let b = bound.max(0) as usize;
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut order = vec![0usize];
        let mut parent = vec![usize::MAX; n];
        parent[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &u in &adj[v] {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    order.push(u);
                }
            }
            i += 1;
        }
        assert_eq!(order.len(), n, "objective graph must be a tree");
        let mut dp: Vec<Vec<[i64; 2]>> = vec![Vec::new(); n];
        for &v in order.iter().rev() {
            let mut cur: Vec<[i64; 2]> = (0..=b)
                .map(|x| {
                    let x = x as i64;
                    let val = self.quad[v] * x * x + self.lin[v] * x;
                    if x == 0 {
                        [val, INF]
                    } else {
                        [INF, val]
                    }
                })
                .collect();
            for &u in &adj[v] {
                if parent[u] != v || u == v {
                    continue;
                }
                let child = std::mem::take(&mut dp[u]);
                for (xv, slot) in cur.iter_mut().enumerate() {
                    let mut g = [INF, INF];
                    for (xu, c) in child.iter().enumerate() {
                        let cross = -2 * (xv as i64) * (xu as i64);
                        for f in 0..2 {
                            if c[f] < INF {
                                g[f] = g[f].min(c[f] + cross);
                            }
                        }
                    }
                    let mut next = [INF, INF];
                    for f in 0..2 {
                        for fu in 0..2 {
                            if slot[f] < INF && g[fu] < INF {
                                let k = f | fu;
                                next[k] = next[k].min(slot[f] + g[fu]);
                            }
                        }
                    }
                    *slot = next;
                }
            }
            dp[v] = cur;
        }
        let root = &dp[0];
        let f = usize::from(self.nonzero);
        let mut best = INF;
        for s in root {
            best = best.min(s[1]);
            if f == 0 {
                best = best.min(s[0]);
            }
        }
        best
    }

    /// Signed vectors violating the bound, lexicographic, at most `cap` of them.
    pub fn counterexamples(&self, bound: i64, cap: usize) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let n = self.len();
        let mut x = vec![-bound; n];
        loop {
            let zero = x.iter().all(|&v| v == 0);
            if !(self.nonzero && zero) && self.eval(&x) < self.threshold {
                out.push(x.clone());
                if out.len() >= cap {
                    return out;
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if x[i] < bound {
                    x[i] += 1;
                    for v in x.iter_mut().skip(i + 1) {
                        *v = -bound;
                    }
                    break;
                }
            }
        }
    }
}

/// Minimum by plain enumeration of the signed box; an oracle for the DP.
pub fn brute_force_minimum(ineq: &Inequality, bound: i64) -> i64 {
    let n = ineq.len();
    let mut best = INF;
    let mut x = vec![-bound; n];
    loop {
        if !(ineq.nonzero && x.iter().all(|&v| v == 0)) {
            best = best.min(ineq.eval(&x));
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if x[i] < bound {
                x[i] += 1;
                for v in x.iter_mut().skip(i + 1) {
                    *v = -bound;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub target: String,
    pub vectors: u128,
    pub minimum: i64,
    pub threshold: i64,
    pub counterexamples: Vec<Vec<i64>>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.minimum >= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub bound: i64,
    pub suites: Vec<SuiteReport>,
}

impl InequalityReport {
    pub fn vectors(&self) -> u128 {
        self.suites.iter().map(|s| s.vectors).sum()
    }

    pub fn failures(&self) -> usize {
        self.suites.iter().filter(|s| !s.passed()).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

fn run(suite: &str, target: String, ineq: &Inequality, bound: i64) -> SuiteReport {
    let minimum = ineq.minimum(bound);
    let counterexamples = if minimum < ineq.threshold {
        ineq.counterexamples(bound, MAX_LISTED)
    } else {
        Vec::new()
    };
    SuiteReport {
        suite: suite.to_string(),
        target,
        vectors: ineq.box_size(bound),
        minimum,
        threshold: ineq.threshold,
        counterexamples,
    }
}

fn slack(w: &[i64]) -> Vec<i64> {
    w.iter().map(|c| -(c - 2)).collect()
}

pub fn chain_objectives(chain: &[i64]) -> [Inequality; 3] {
    let mut q1 = vec![1];
    q1.extend_from_slice(chain);
    let mut l2 = vec![-1];
    l2.extend(slack(chain));
    let mut l3 = vec![1];
    l3.extend(slack(chain));
    [
        Inequality::chain(chain.to_vec(), slack(chain), true, 2),
        Inequality::chain(q1.clone(), l2, false, 0),
        Inequality::chain(q1, l3, true, 2),
    ]
}

/// The three chain bounds for weights `c_i >= 2`.
pub fn verify_chain_bounds(chain: &[i64], bound: i64) -> Result<Vec<SuiteReport>> {
    if chain.iter().any(|&c| c < 2) {
        return Err(Error::DomainError(format!("chain weights must be >= 2: {chain:?}")));
    }
    let target = format!("{chain:?}");
    let names = ["chain-i", "chain-ii", "chain-iii"];
    Ok(chain_objectives(chain)
        .iter()
        .zip(names)
        .map(|(q, n)| run(n, target.clone(), q, bound))
        .collect())
}

pub fn joined_chain_objective(a: &[i64], b: &[i64]) -> Inequality {
    let mut quad: Vec<i64> = a.iter().rev().copied().collect();
    quad.push(1);
    quad.extend_from_slice(b);
    let mut lin: Vec<i64> = slack(&a.iter().rev().copied().collect::<Vec<_>>());
    lin.push(1);
    lin.extend(slack(b));
    Inequality::chain(quad, lin, true, 2)
}

/// `Q_{a_k..a_1,1,b_1..b_l} + |c| >= 2 + ...` for a pair of arms with `q1/p1 + q2/p2 < 1`.
pub fn verify_joined_chains(a: &[i64], b: &[i64], bound: i64) -> Result<SuiteReport> {
    if !pair_qualifies(a, b) {
        return Err(Error::NotQuasiAlternating(format!(
            "arms {a:?}, {b:?} do not satisfy q1/p1 + q2/p2 < 1"
        )));
    }
    Ok(run("joined-chains", format!("{a:?} | {b:?}"), &joined_chain_objective(a, b), bound))
}

fn pair_qualifies(a: &[i64], b: &[i64]) -> bool {
    use crate::exact::{eval_coeffs, Rational};
    match (eval_coeffs(a), eval_coeffs(b)) {
        (Ok(x), Ok(y)) => x.recip() + y.recip() < Rational::one(),
        _ => false,
    }
}

pub fn star_objective(g: &StarPlumbing) -> Inequality {
    let w = g.weights();
    Inequality { lin: slack(&w), quad: w, edges: g.edges(), nonzero: true, threshold: 2 }
}

pub fn verify_star_bound(g: &StarPlumbing, bound: i64) -> Result<SuiteReport> {
    require_qa(g)?;
    Ok(run("star-bound", format!("{g:?}"), &star_objective(g), bound))
}

fn require_qa(g: &StarPlumbing) -> Result<()> {
    let y = g.seifert()?;
    if g.weights().iter().skip(1).any(|&w| w < 2) || !is_quasi_alternating(&y) {
        return Err(Error::NotQuasiAlternating(y.to_string()));
    }
    Ok(())
}

/// Every bound on `g`: the chain bounds on each arm, the pair bound on each qualifying pair
/// of arms at a weight-2 center, and the vertex bound on the whole plumbing.
pub fn verify_inequalities(g: &StarPlumbing, bound: i64) -> Result<InequalityReport> {
    require_qa(g)?;
    let mut suites = Vec::new();
    for arm in &g.arms {
        suites.extend(verify_chain_bounds(arm, bound)?);
    }
    if g.central_weight == 2 {
        for i in 0..g.arms.len() {
            for j in i + 1..g.arms.len() {
                if pair_qualifies(&g.arms[i], &g.arms[j]) {
                    suites.push(verify_joined_chains(&g.arms[i], &g.arms[j], bound)?);
                }
            }
        }
    }
    suites.push(verify_star_bound(g, bound)?);
    Ok(InequalityReport { bound, suites })
}

fn arms_up_to(max_len: usize, max_weight: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for a in &layer {
            for w in 2..=max_weight {
                let mut b = a.clone();
                b.push(w);
                next.push(b);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.sort();
    out
}

/// Three-armed stars with at most `max_vertices` vertices and all weights in `[2, max_weight]`,
/// one per arm permutation class, optionally only the quasi-alternating ones.
pub fn enumerate_star_plumbings(max_vertices: usize, max_weight: i64, qa_only: bool) -> Vec<StarPlumbing> {
    let mut out = Vec::new();
    if max_vertices < 4 || max_weight < 2 {
        return out;
    }
    let arms = arms_up_to(max_vertices - 3, max_weight);
    for i in 0..arms.len() {
        for j in i..arms.len() {
            if arms[i].len() + arms[j].len() + 2 > max_vertices {
                continue;
            }
            for k in j..arms.len() {
                if 1 + arms[i].len() + arms[j].len() + arms[k].len() > max_vertices {
                    continue;
                }
                for e in 2..=max_weight {
                    let g = StarPlumbing::new(e, vec![arms[i].clone(), arms[j].clone(), arms[k].clone()]);
                    if !qa_only || g.is_quasi_alternating() {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plumbing::{star_plumbing, SeifertForm};
    use proptest::prelude::*;

    #[test]
    fn chain_hand_values() {
        let [i, _, _] = chain_objectives(&[2, 2]);
        assert_eq!(i.eval(&[1, 1]), 2);
        let r = verify_chain_bounds(&[2, 2], 3).unwrap();
        assert!(r.iter().all(|s| s.passed()));
        assert_eq!(r[0].vectors, 48);
        assert_eq!(r[1].vectors, 343);
        assert!(verify_chain_bounds(&[1, 3], 2).is_err());
    }

    #[test]
    fn single_vertex_is_equality() {
        let g = star_plumbing(&"2;13/5,5/3,3".parse::<SeifertForm>().unwrap()).unwrap();
        let q = star_objective(&g);
        for v in 0..g.vertex_count() {
            let mut x = vec![0; g.vertex_count()];
            x[v] = 1;
            assert_eq!(q.eval(&x), 2);
        }
    }

    #[test]
    fn example_plumbing_has_no_counterexample() {
        let g = star_plumbing(&"2;13/5,5/3,3".parse::<SeifertForm>().unwrap()).unwrap();
        let r = verify_inequalities(&g, 3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.suites.iter().any(|s| s.suite == "joined-chains"));
        let s = r.suites.last().unwrap();
        assert_eq!(s.minimum, 2);
        assert_eq!(s.vectors, 7u128.pow(7) - 1);
    }

    #[test]
    fn non_qa_is_rejected_and_fails() {
        let g = StarPlumbing::new(2, vec![vec![2], vec![2], vec![2]]);
        assert!(matches!(verify_inequalities(&g, 2), Err(Error::NotQuasiAlternating(_))));
        let q = star_objective(&g);
        assert_eq!(q.eval(&[2, 1, 1, 1]), 2);
        assert!(verify_joined_chains(&[2], &[2], 2).is_err());
    }

    #[test]
    fn violated_objective_lists_counterexamples_in_order() {
        let q = Inequality::chain(vec![1, 1], vec![0, 0], true, 2);
        let bad = q.counterexamples(1, 100);
        assert_eq!(bad, vec![vec![-1, -1], vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(q.minimum(1), 0);
    }

    #[test]
    fn enumeration_counts() {
        // 4 vertices: three single-vertex arms, each a multiset of {2,3}, with e in {2,3}
        let all = enumerate_star_plumbings(4, 3, false);
        assert_eq!(all.len(), 4 * 2);
        let qa = enumerate_star_plumbings(4, 3, true);
        // e = 3: all 4; e = 2 needs a pair with 1/a + 1/b < 1, i.e. not both 2
        assert_eq!(qa.len(), 4 + 3);
    }

    proptest! {
        #[test]
        fn dp_matches_brute_force(
            quad in prop::collection::vec(0i64..5, 1..5),
            lin in prop::collection::vec(-3i64..4, 5),
            shape in prop::collection::vec(0usize..8, 4),
            nonzero in any::<bool>(),
        ) {
            let n = quad.len();
            let edges: Vec<(usize, usize)> = (1..n).map(|i| (shape[i - 1] % i, i)).collect();
            let q = Inequality { quad: quad.clone(), lin: lin[..n].to_vec(), edges, nonzero, threshold: 0 };
            // the sign reduction needs nonpositive off-diagonals and |x| in the linear part,
            // both of which hold by construction
            prop_assert_eq!(q.minimum(2), brute_force_minimum(&q, 2));
        }
    }
}
