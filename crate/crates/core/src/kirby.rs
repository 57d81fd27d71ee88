//! Diagram moves on rational-weighted trees of unknots: slam dunks, blow-ups and blow-downs.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::changemaker::{mu_norms, VertexType};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::plumbing::StarPlumbing;

/// A tree of unknots with rational surgery coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChainDiagram {
    pub nodes: BTreeMap<usize, Rational>,
    /// stored as `(low, high)`
    pub edges: BTreeSet<(usize, usize)>,
    /// the node the knot `K'` links, if any
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open_end: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    SlamDunk,
    ReverseSlamDunk,
    BlowDown,
    BlowUp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    #[serde(rename = "move")]
    pub kind: MoveKind,
    pub node: usize,
    pub before: ChainDiagram,
    pub after: ChainDiagram,
}

fn edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl ChainDiagram {
    pub fn new() -> ChainDiagram {
        ChainDiagram::default()
    }

    /// A linear chain, ids `0..n` in order.
    pub fn chain(coeffs: &[Rational]) -> ChainDiagram {
        let mut d = ChainDiagram::new();
        for (i, c) in coeffs.iter().enumerate() {
            d.nodes.insert(i, c.clone());
            if i > 0 {
                d.edges.insert((i - 1, i));
            }
        }
        d
    }

    pub fn integer_chain(weights: &[i64]) -> ChainDiagram {
        ChainDiagram::chain(&weights.iter().map(|&w| Rational::integer(w)).collect::<Vec<_>>())
    }

    /// Vertex ids follow the plumbing's vertex order.
    pub fn from_plumbing(g: &StarPlumbing) -> ChainDiagram {
        let mut d = ChainDiagram::new();
        for (i, w) in g.weights().into_iter().enumerate() {
            d.nodes.insert(i, Rational::integer(w));
        }
        for (a, b) in g.edges() {
            d.edges.insert(edge(a, b));
        }
        d
    }

    /// From a symmetric integer matrix whose nonzero off-diagonal entries form a tree.
    pub fn from_gram(gram: &[Vec<i64>]) -> Result<ChainDiagram> {
        let mut d = ChainDiagram::new();
        for (i, row) in gram.iter().enumerate() {
            d.nodes.insert(i, Rational::integer(row[i]));
            for (j, &x) in row.iter().enumerate().skip(i + 1) {
                match x {
                    0 => {}
                    1 | -1 => {
                        d.edges.insert((i, j));
                    }
                    _ => return Err(Error::UnsupportedShape(format!("entry {x} at ({i},{j})"))),
                }
            }
        }
        if !d.is_forest() || (!d.is_empty() && d.edges.len() + 1 != d.len()) {
            return Err(Error::UnsupportedShape("not a tree".into()));
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn coeff(&self, node: usize) -> Result<&Rational> {
        self.nodes.get(&node).ok_or(Error::NoSuchNode(node))
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == node { Some(b) } else if b == node { Some(a) } else { None })
            .collect()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.neighbors(node).len()
    }

    fn fresh_id(&self) -> usize {
        self.nodes.keys().next_back().map_or(0, |k| k + 1)
    }

    fn is_forest(&self) -> bool {
        let mut parent: BTreeMap<usize, usize> = self.nodes.keys().map(|&k| (k, k)).collect();
        fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let mut r = x;
            while p[&r] != r {
                r = p[&r];
            }
            p.insert(x, r);
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent.insert(ra, rb);
        }
        true
    }

    /// Linking matrix of an integer-weighted diagram, rows in id order.
    pub fn linking_matrix(&self) -> Result<Vec<Vec<i64>>> {
        let ids: Vec<usize> = self.nodes.keys().copied().collect();
        let pos: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let n = ids.len();
        let mut m = vec![vec![0i64; n]; n];
        for (i, id) in ids.iter().enumerate() {
            let c = &self.nodes[id];
            if !c.is_integer() {
                return Err(Error::DomainError(format!("node {id} has non-integer coefficient {c}")));
            }
            m[i][i] = c.floor_i64()?;
        }
        for &(a, b) in &self.edges {
            m[pos[&a]][pos[&b]] = -1;
            m[pos[&b]][pos[&a]] = -1;
        }
        Ok(m)
    }

    /// Compact form, e.g. `0:2 1:1 2:5 | 0-1 1-2`.
    pub fn describe(&self) -> String {
        let n: Vec<String> = self.nodes.iter().map(|(k, c)| format!("{k}:{c}")).collect();
        let e: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        format!("{} | {}", n.join(" "), e.join(" "))
    }
}

/// Replace the leaf's non-integer coefficient by an integer chain hung off it.
pub fn reverse_slam_dunk(d: &ChainDiagram, leaf: usize) -> Result<ChainDiagram> {
    let c = d.coeff(leaf)?.clone();
    if c.is_integer() {
        return Err(Error::NothingToDo(format!("node {leaf} already has integer coefficient {c}")));
    }
    if d.degree(leaf) > 1 {
        return Err(Error::UnsupportedShape(format!("node {leaf} is not a leaf")));
    }
    let mut out = d.clone();
    let mut cur = c;
    let mut at = leaf;
    loop {
        let a = Rational::from(cur.ceil());
        out.nodes.insert(at, a.clone());
        let rest = a - &cur;
        if rest.is_zero() {
            break;
        }
        cur = rest.recip();
        let id = out.fresh_id();
        out.nodes.insert(id, cur.clone());
        out.edges.insert(edge(at, id));
        at = id;
    }
    Ok(out)
}

/// Absorb `leaf` (coefficient `r`) into its integer-framed neighbour: `n ← n − 1/r`.
pub fn slam_dunk(d: &ChainDiagram, leaf: usize) -> Result<ChainDiagram> {
    let r = d.coeff(leaf)?.clone();
    let nb = d.neighbors(leaf);
    let [n] = nb[..] else {
        return Err(Error::UnsupportedShape(format!("node {leaf} has {} neighbours", nb.len())));
    };
    let c = d.coeff(n)?;
    if !c.is_integer() {
        return Err(Error::UnsupportedShape(format!("neighbour {n} has non-integer coefficient {c}")));
    }
    if r.is_zero() {
        return Err(Error::DomainError(format!("node {leaf} has coefficient 0")));
    }
    let mut out = d.clone();
    let merged = c.clone() - r.recip();
    out.nodes.remove(&leaf);
    out.edges.remove(&edge(leaf, n));
    out.nodes.insert(n, merged);
    if out.open_end == Some(leaf) {
        out.open_end = Some(n);
    }
    Ok(out)
}

/// Slam the path hanging from `root` through `tip` back into `root`.
pub fn fold_chain(d: &ChainDiagram, root: usize, tip: usize) -> Result<ChainDiagram> {
    let mut out = d.clone();
    let mut cur = tip;
    while cur != root {
        let nb = out.neighbors(cur);
        let [next] = nb[..] else {
            return Err(Error::UnsupportedShape(format!("node {cur} is not a leaf")));
        };
        out = slam_dunk(&out, cur)?;
        cur = next;
    }
    Ok(out)
}

/// Remove a `±1` node; neighbours shift by `∓1` and become adjacent.
pub fn blow_down(d: &ChainDiagram, node: usize) -> Result<ChainDiagram> {
    let c = d.coeff(node)?;
    let sign = if *c == Rational::one() {
        1
    } else if *c == Rational::integer(-1) {
        -1
    } else {
        return Err(Error::NotBlowable(format!("node {node} has coefficient {c}")));
    };
    let nb = d.neighbors(node);
    if nb.len() > 2 {
        return Err(Error::UnsupportedShape(format!("node {node} has degree {}", nb.len())));
    }
    let mut out = d.clone();
    out.nodes.remove(&node);
    for &x in &nb {
        out.edges.remove(&edge(node, x));
        let v = out.nodes[&x].clone() - sign;
        out.nodes.insert(x, v);
    }
    if let [a, b] = nb[..] {
        out.edges.insert(edge(a, b));
    }
    if out.open_end == Some(node) {
        out.open_end = None;
    }
    Ok(out)
}

/// Insert a `±1` node on the edge `a-b` (or as a leaf on `a`); the neighbours shift by `±1`.
/// Returns the diagram and the new node's id.
pub fn blow_up(d: &ChainDiagram, a: usize, b: Option<usize>, sign: i64) -> Result<(ChainDiagram, usize)> {
    if sign != 1 && sign != -1 {
        return Err(Error::DomainError(format!("blow-up sign {sign}")));
    }
    d.coeff(a)?;
    let mut out = d.clone();
    let id = out.fresh_id();
    out.nodes.insert(id, Rational::integer(sign));
    let mut touched = vec![a];
    if let Some(b) = b {
        d.coeff(b)?;
        if !out.edges.remove(&edge(a, b)) {
            return Err(Error::UnsupportedShape(format!("nodes {a} and {b} are not adjacent")));
        }
        touched.push(b);
    }
    for &x in &touched {
        out.edges.insert(edge(x, id));
        let v = out.nodes[&x].clone() + sign;
        out.nodes.insert(x, v);
    }
    Ok((out, id))
}

fn blowable(d: &ChainDiagram) -> Vec<usize> {
    d.nodes
        .iter()
        .filter(|(&k, c)| (c.abs() == Rational::one()) && d.degree(k) <= 2)
        .map(|(&k, _)| k)
        .collect()
}

/// A blow-down sequence emptying `d`, found by depth-first search.
pub fn reduce_to_empty(d: &ChainDiagram) -> Option<Vec<Move>> {
    fn rec(d: &ChainDiagram, trace: &mut Vec<Move>, dead: &mut HashSet<String>) -> bool {
        if d.is_empty() {
            return true;
        }
        let key = d.describe();
        if dead.contains(&key) {
            return false;
        }
        for node in blowable(d) {
            let Ok(next) = blow_down(d, node) else { continue };
            trace.push(Move { kind: MoveKind::BlowDown, node, before: d.clone(), after: next.clone() });
            if rec(&next, trace, dead) {
                return true;
            }
            trace.pop();
        }
        dead.insert(key);
        false
    }
    let mut trace = Vec::new();
    rec(d, &mut trace, &mut HashSet::new()).then_some(trace)
}

/// Position of the marked vertex: `None` for the center, else `(arm, index)`.
pub type MarkedVertex = Option<(usize, usize)>;

/// Rebuild `Γ` from `Δ` near its marked vertex.
pub fn marked_modification(
    delta: &StarPlumbing,
    marked: MarkedVertex,
    slope: &Rational,
    tag: VertexType,
) -> Result<StarPlumbing> {
    let Some((arm, pos)) = marked else {
        return Err(Error::UnsupportedShape("the central vertex cannot be marked".into()));
    };
    let a = delta.arms.get(arm).ok_or(Error::NoSuchNode(arm))?;
    if pos >= a.len() {
        return Err(Error::NoSuchNode(delta.vertex_index(arm, 0) + pos));
    }
    let mut out = delta.clone();
    let norms = mu_norms(slope)?;
    match tag {
        VertexType::I | VertexType::II => {
            let mut chain = vec![1 + norms[0]];
            chain.extend_from_slice(&norms[1..]);
            if chain.len() > 1 && pos + 1 != a.len() {
                return Err(Error::UnsupportedShape("the μ chain needs the marked vertex at an arm end".into()));
            }
            out.arms[arm].splice(pos..=pos, chain);
        }
        VertexType::III => {
            if pos + 1 == a.len() {
                return Err(Error::UnsupportedShape("marked vertex has degree 1".into()));
            }
            let (_, q) = slope.to_i64_pair()?;
            if pos == 0 {
                out.central_weight += 1;
            } else {
                out.arms[arm][pos - 1] += 1;
            }
            out.arms[arm][pos + 1] += 1;
            out.arms[arm].splice(pos..=pos, std::iter::repeat_n(2, (q - 2).max(0) as usize));
        }
    }
    Ok(out)
}
