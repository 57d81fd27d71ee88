//! Integer lattices: Gram presentations, sublattices of an orthonormal ambient `Z^N`,
//! irreducibility and unbreakability oracles, and an isomorphism search.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Search ceiling, overridable with `CM_REALIZE_SEARCH_BUDGET`.
pub fn search_budget() -> u64 {
    std::env::var("CM_REALIZE_SEARCH_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Worker threads for the embarrassingly parallel suites, from `CM_REALIZE_WORKERS`.
pub fn workers() -> usize {
    std::env::var("CM_REALIZE_WORKERS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// `items.iter().map(f)` over `workers()` threads, order preserved.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let w = workers().min(items.len().max(1));
    if w <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(w);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramLattice {
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub labels: Vec<String>,
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>, labels: Vec<String>) -> Result<GramLattice> {
        let rank = gram.len();
        if rank == 0 {
            return Err(Error::DomainError("lattice of rank 0".into()));
        }
        if let Some(row) = gram.iter().find(|r| r.len() != rank) {
            return Err(Error::LengthMismatch { expected: rank, got: row.len() });
        }
        if labels.len() != rank {
            return Err(Error::LengthMismatch { expected: rank, got: labels.len() });
        }
        for i in 0..rank {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::DomainError(format!("gram not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(GramLattice { rank, gram, labels })
    }

    /// As `new`, also checking positive definiteness by leading minors.
    pub fn definite(gram: Vec<Vec<i64>>, labels: Vec<String>) -> Result<GramLattice> {
        let g = GramLattice::new(gram, labels)?;
        if !g.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(g)
    }

    pub fn unlabeled(gram: Vec<Vec<i64>>) -> Result<GramLattice> {
        let labels = (0..gram.len()).map(|i| format!("v{i}")).collect();
        GramLattice::new(gram, labels)
    }

    pub fn determinant(&self) -> BigInt {
        linalg::det(&self.gram)
    }

    pub fn is_positive_definite(&self) -> bool {
        linalg::is_positive_definite(&self.gram)
    }

    pub fn norm(&self, x: &[i64]) -> i128 {
        linalg::quad(&self.gram, x)
    }

    pub fn pair(&self, x: &[i64], y: &[i64]) -> i128 {
        linalg::bilinear(&self.gram, x, y)
    }

    /// Parse the `{"rank", "gram", "labels"}` JSON form; labels may be omitted.
    pub fn from_json(s: &str) -> Result<GramLattice> {
        #[derive(Deserialize)]
        struct Raw {
            rank: Option<usize>,
            gram: Vec<Vec<i64>>,
            labels: Option<Vec<String>>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(r) = raw.rank {
            if r != raw.gram.len() {
                return Err(Error::Parse(format!("rank {r} but {} gram rows", raw.gram.len())));
            }
        }
        let g = match raw.labels {
            Some(l) => GramLattice::new(raw.gram, l),
            None => GramLattice::unlabeled(raw.gram),
        };
        g.map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Coordinates over the orthonormal ambient basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddedVector(pub Vec<i64>);

impl EmbeddedVector {
    pub fn zero(n: usize) -> EmbeddedVector {
        EmbeddedVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> EmbeddedVector {
        let mut v = vec![0; n];
        v[i] = 1;
        EmbeddedVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &EmbeddedVector) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> i64 {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &EmbeddedVector) -> EmbeddedVector {
        EmbeddedVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &EmbeddedVector) -> EmbeddedVector {
        EmbeddedVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> EmbeddedVector {
        EmbeddedVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> EmbeddedVector {
        self.scale(-1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeBasis {
    pub ambient_rank: usize,
    pub generators: Vec<EmbeddedVector>,
    /// when present the lattice is exactly the integer orthogonal complement of these
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<EmbeddedVector>>,
}

impl SublatticeBasis {
    pub fn new(ambient_rank: usize, generators: Vec<EmbeddedVector>) -> Result<SublatticeBasis> {
        if let Some(g) = generators.iter().find(|g| g.len() != ambient_rank) {
            return Err(Error::LengthMismatch { expected: ambient_rank, got: g.len() });
        }
        let rows: Vec<Vec<i64>> = generators.iter().map(|g| g.0.clone()).collect();
        if linalg::rank(&rows) != rows.len() {
            return Err(Error::DomainError("generators are linearly dependent".into()));
        }
        Ok(SublatticeBasis { ambient_rank, generators, normals: None })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.generators.iter().map(|g| g.0.clone()).collect()
    }

    /// Integer coordinates of `v` in this basis.
    pub fn coordinates(&self, v: &EmbeddedVector) -> Option<Vec<i64>> {
        if v.len() != self.ambient_rank {
            return None;
        }
        linalg::solve_rows_integral(&self.rows(), std::slice::from_ref(&v.0)).map(|mut r| r.remove(0))
    }

    /// Coordinates of several vectors at once; `None` if any is outside the lattice.
    pub fn coordinates_all(&self, vs: &[EmbeddedVector]) -> Option<Vec<Vec<i64>>> {
        if vs.iter().any(|v| v.len() != self.ambient_rank) {
            return None;
        }
        let targets: Vec<Vec<i64>> = vs.iter().map(|v| v.0.clone()).collect();
        linalg::solve_rows_integral(&self.rows(), &targets)
    }

    pub fn contains(&self, v: &EmbeddedVector) -> bool {
        if v.len() != self.ambient_rank {
            return false;
        }
        match &self.normals {
            Some(ns) => ns.iter().all(|n| n.dot(v) == 0),
            None => self.coordinates(v).is_some(),
        }
    }
}

pub fn orthogonal_complement(normals: &[EmbeddedVector], ambient_rank: usize) -> Result<SublatticeBasis> {
    if let Some(n) = normals.iter().find(|n| n.len() != ambient_rank) {
        return Err(Error::LengthMismatch { expected: ambient_rank, got: n.len() });
    }
    let rows: Vec<Vec<i64>> = normals.iter().map(|n| n.0.clone()).collect();
    if linalg::rank(&rows) != rows.len() {
        return Err(Error::DependentNormals);
    }
    let kernel = linalg::integer_kernel(&rows, ambient_rank);
    let generators = kernel
        .iter()
        .map(|k| linalg::to_i64_vec(k).map(EmbeddedVector))
        .collect::<Result<Vec<_>>>()?;
    for g in &generators {
        for n in normals {
            if g.dot(n) != 0 {
                return Err(Error::Internal("kernel vector not orthogonal to a normal".into()));
            }
        }
    }
    Ok(SublatticeBasis { ambient_rank, generators, normals: Some(normals.to_vec()) })
}

pub fn gram_of(basis: &SublatticeBasis) -> GramLattice {
    let g = &basis.generators;
    let gram = g.iter().map(|x| g.iter().map(|y| x.dot(y)).collect()).collect();
    let labels = (0..g.len()).map(|i| format!("b{i}")).collect();
    GramLattice { rank: g.len(), gram, labels }
}

/// Gram matrix of arbitrary vectors with the given labels.
pub fn gram_of_vectors(vs: &[EmbeddedVector], labels: Vec<String>) -> GramLattice {
    let gram = vs.iter().map(|x| vs.iter().map(|y| x.dot(y)).collect()).collect();
    GramLattice { rank: vs.len(), gram, labels }
}

/// All nonzero `x` in `L` with `|x|^2 <= bound`, via ambient coordinates `|x_i| <= sqrt(bound)`.
pub fn ambient_short_vectors(
    l: &SublatticeBasis,
    bound: i64,
    budget: u64,
) -> Result<Vec<EmbeddedVector>> {
    let n = l.ambient_rank;
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut steps = 0u64;
    let cap = (bound.max(0) as f64).sqrt().floor() as i64;
    fn rec(
        i: usize,
        rem: i64,
        cap: i64,
        x: &mut Vec<i64>,
        l: &SublatticeBasis,
        out: &mut Vec<EmbeddedVector>,
        steps: &mut u64,
        budget: u64,
    ) -> Result<()> {
        if i == x.len() {
            if x.iter().any(|&c| c != 0) {
                let v = EmbeddedVector(x.clone());
                if l.contains(&v) {
                    out.push(v);
                }
            }
            return Ok(());
        }
        for c in -cap..=cap {
            if c * c > rem {
                continue;
            }
            *steps += 1;
            if *steps > budget {
                return Err(Error::SearchBudgetExceeded {
                    what: "ambient vector enumeration".into(),
                    budget,
                });
            }
            x[i] = c;
            rec(i + 1, rem - c * c, cap, x, l, out, steps, budget)?;
        }
        x[i] = 0;
        Ok(())
    }
    rec(0, bound, cap, &mut x, l, &mut out, &mut steps, budget)?;
    Ok(out)
}

pub fn is_irreducible(v: &EmbeddedVector, l: &SublatticeBasis) -> Result<bool> {
    is_irreducible_with(v, l, search_budget())
}

pub fn is_irreducible_with(v: &EmbeddedVector, l: &SublatticeBasis, budget: u64) -> Result<bool> {
    if !l.contains(v) {
        return Err(Error::NotInLattice);
    }
    let nv = v.norm();
    for x in ambient_short_vectors(l, nv, budget)? {
        if x == *v {
            continue;
        }
        let y = v.sub(&x);
        if x.dot(&y) >= 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_unbreakable(v: &EmbeddedVector, l: &SublatticeBasis) -> Result<bool> {
    is_unbreakable_with(v, l, search_budget())
}

pub fn is_unbreakable_with(v: &EmbeddedVector, l: &SublatticeBasis, budget: u64) -> Result<bool> {
    if !l.contains(v) {
        return Err(Error::NotInLattice);
    }
    let nv = v.norm();
    for x in ambient_short_vectors(l, nv + 2, budget)? {
        let y = v.sub(&x);
        if y.is_zero() {
            continue;
        }
        if x.dot(&y) == -1 && x.norm() != 2 && y.norm() != 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Irreducibility of the lattice vector with Gram coordinates `x`.
pub fn is_irreducible_gram(g: &GramLattice, x: &[i64], budget: u64) -> Result<bool> {
    let nv = g.norm(x);
    let bound = i64::try_from(nv).map_err(|_| Error::Overflow(nv.to_string()))?;
    for y in linalg::short_vectors(&g.gram, bound, true, budget)? {
        if y == x {
            continue;
        }
        let z: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        if g.pair(&y, &z) >= 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_unbreakable_gram(g: &GramLattice, x: &[i64], budget: u64) -> Result<bool> {
    let nv = g.norm(x);
    let bound = i64::try_from(nv + 2).map_err(|_| Error::Overflow(nv.to_string()))?;
    for y in linalg::short_vectors(&g.gram, bound, true, budget)? {
        let z: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        if z.iter().all(|&c| c == 0) {
            continue;
        }
        if g.pair(&y, &z) == -1 && g.norm(&y) != 2 && g.norm(&z) != 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `U` (columns are images of B's basis in A's coordinates) with `U^T A U = B`.
pub fn lattice_isomorphic(a: &GramLattice, b: &GramLattice) -> Result<Option<Vec<Vec<i64>>>> {
    lattice_isomorphic_with(a, b, search_budget())
}

pub fn lattice_isomorphic_with(
    a: &GramLattice,
    b: &GramLattice,
    budget: u64,
) -> Result<Option<Vec<Vec<i64>>>> {
    if a.rank != b.rank {
        return Err(Error::NotIsomorphic(format!("rank {} vs {}", a.rank, b.rank)));
    }
    let (da, db) = (a.determinant(), b.determinant());
    if da != db {
        return Err(Error::NotIsomorphic(format!("determinant {da} vs {db}")));
    }
    if !a.is_positive_definite() || !b.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = a.rank;
    let maxdiag = (0..n).map(|i| b.gram[i][i]).max().unwrap_or(0);
    let shorts = linalg::short_vectors(&a.gram, maxdiag, true, budget)?;
    let mut by_norm: HashMap<i64, Vec<Vec<i64>>> = HashMap::new();
    for v in shorts {
        by_norm.entry(a.norm(&v) as i64).or_default().push(v);
    }
    // order B's basis so each new vector meets many already-placed neighbours
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let next = (0..n)
            .filter(|&i| !placed[i])
            .max_by_key(|&i| {
                let links = order.iter().filter(|&&j| b.gram[i][j] != 0).count();
                let cands = by_norm.get(&b.gram[i][i]).map_or(0, |c| c.len());
                (links, std::cmp::Reverse(cands), std::cmp::Reverse(i))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    let mut images: Vec<Vec<i64>> = vec![Vec::new(); n];
    let mut steps = 0u64;
    fn rec(
        k: usize,
        order: &[usize],
        a: &GramLattice,
        b: &GramLattice,
        by_norm: &HashMap<i64, Vec<Vec<i64>>>,
        images: &mut Vec<Vec<i64>>,
        steps: &mut u64,
        budget: u64,
    ) -> Result<bool> {
        if k == order.len() {
            return Ok(true);
        }
        let i = order[k];
        let Some(cands) = by_norm.get(&b.gram[i][i]) else {
            return Ok(false);
        };
        'cand: for c in cands {
            *steps += 1;
            if *steps > budget {
                return Err(Error::SearchBudgetExceeded { what: "lattice isomorphism".into(), budget });
            }
            for &j in &order[..k] {
                if a.pair(c, &images[j]) != b.gram[i][j] as i128 {
                    continue 'cand;
                }
            }
            images[i] = c.clone();
            if rec(k + 1, order, a, b, by_norm, images, steps, budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    if !rec(0, &order, a, b, &by_norm, &mut images, &mut steps, budget)? {
        return Ok(None);
    }
    // columns are images
    let u: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| images[c][r]).collect()).collect();
    if !linalg::det(&u).abs().is_one() {
        return Err(Error::Internal("isomorphism witness is not unimodular".into()));
    }
    Ok(Some(u))
}

/// Check `U^T A U = B`.
pub fn verify_isomorphism(a: &GramLattice, b: &GramLattice, u: &[Vec<i64>]) -> bool {
    if u.len() != a.rank || u.iter().any(|r| r.len() != b.rank) {
        return false;
    }
    let ut = linalg::transpose(u);
    let lhs = linalg::mat_mul(&linalg::mat_mul(&ut, &a.gram), u);
    lhs == b.gram && linalg::det(u).abs().is_one()
}

/// Witness for `B -> A` from one for `A -> B`.
pub fn invert_witness(u: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    linalg::inverse_unimodular(u)
}

pub fn is_unimodular(u: &[Vec<i64>]) -> bool {
    u.iter().all(|r| r.len() == u.len()) && linalg::det(u).abs().is_one()
}

/// All invariant factors equal to one: the rows span a primitive sublattice.
pub fn is_primitive(rows: &[Vec<i64>]) -> bool {
    linalg::smith_invariants(rows).iter().all(|d| d.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[i64]) -> EmbeddedVector {
        EmbeddedVector(v.to_vec())
    }

    #[test]
    fn complement_of_coordinate() {
        let b = orthogonal_complement(&[ev(&[1, 0])], 2).unwrap();
        assert_eq!(b.rank(), 1);
        assert_eq!(b.generators[0].0.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0, 1]);
        let g = gram_of(&b);
        assert_eq!(g.gram, vec![vec![1]]);
    }

    #[test]
    fn complement_133_over_2() {
        // ambient (f0, f1, e1..e7)
        let w1 = ev(&[-1, 1, 0, 0, 0, 0, 0, 0, 0]);
        let w0 = ev(&[1, 0, 1, 1, 1, 2, 3, 5, 5]);
        let b = orthogonal_complement(&[w1, w0], 9).unwrap();
        assert_eq!(b.rank(), 7);
        assert_eq!(gram_of(&b).determinant(), BigInt::from(133));
        assert!(is_primitive(&b.rows()));
    }

    #[test]
    fn dependent_normals_rejected() {
        let r = orthogonal_complement(&[ev(&[1, 2, 3]), ev(&[2, 4, 6])], 3);
        assert_eq!(r.unwrap_err(), Error::DependentNormals);
    }

    #[test]
    fn irreducibility_basics() {
        // A_2 embedded in Z^3
        let l = orthogonal_complement(&[ev(&[1, 1, 1])], 3).unwrap();
        let v = ev(&[1, -1, 0]);
        assert!(is_irreducible(&v, &l).unwrap());
        assert!(is_unbreakable(&v, &l).unwrap());
        assert!(!is_irreducible(&v.scale(2), &l).unwrap());
        assert_eq!(is_irreducible(&ev(&[1, 0, 0]), &l), Err(Error::NotInLattice));
        // (1,1,-2) = (1,-1,0) + (0,2,-2)? no: = (1,0,-1) + (0,1,-1), pairing 1 >= 0
        assert!(!is_irreducible(&ev(&[1, 1, -2]), &l).unwrap());
    }

    #[test]
    fn budget_is_reported() {
        let l = orthogonal_complement(&[ev(&[1, 1, 1, 1, 1, 1])], 6).unwrap();
        let v = ev(&[3, -3, 0, 0, 0, 0]);
        assert!(matches!(
            is_irreducible_with(&v, &l, 10),
            Err(Error::SearchBudgetExceeded { .. })
        ));
    }

    #[test]
    fn isomorphism_identity_and_permutation() {
        let a = GramLattice::unlabeled(vec![vec![2, -1, 0], vec![-1, 3, -1], vec![0, -1, 4]]).unwrap();
        let u = lattice_isomorphic(&a, &a).unwrap().unwrap();
        assert!(verify_isomorphism(&a, &a, &u));
        let b = GramLattice::unlabeled(vec![vec![4, -1, 0], vec![-1, 3, -1], vec![0, -1, 2]]).unwrap();
        let u = lattice_isomorphic(&a, &b).unwrap().unwrap();
        assert!(verify_isomorphism(&a, &b, &u));
        let inv = invert_witness(&u).unwrap();
        assert!(verify_isomorphism(&b, &a, &inv));
        let c = GramLattice::unlabeled(vec![vec![2, 0], vec![0, 3]]).unwrap();
        assert!(matches!(lattice_isomorphic(&a, &c), Err(Error::NotIsomorphic(_))));
    }

    #[test]
    fn nonisomorphic_same_determinant() {
        // det 4: Z^2 scaled diag(1,4) vs diag(2,2)
        let a = GramLattice::unlabeled(vec![vec![1, 0], vec![0, 4]]).unwrap();
        let b = GramLattice::unlabeled(vec![vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(lattice_isomorphic(&a, &b).unwrap(), None);
    }

    #[test]
    fn gram_json_round_trip() {
        let g = GramLattice::unlabeled(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(GramLattice::from_json(&s).unwrap(), g);
        assert!(GramLattice::from_json("{\"gram\":[[1,2],[3,4]]}").is_err());
        assert!(GramLattice::from_json("{\"rank\":3,\"gram\":[[1]]}").is_err());
        assert!(GramLattice::from_json("[").is_err());
    }

    #[test]
    fn gram_coordinate_oracles_agree_with_ambient() {
        let l = orthogonal_complement(&[ev(&[1, 1, 1, 2])], 4).unwrap();
        let g = gram_of(&l);
        for coords in [[1i64, 0, 0], [1, 1, 0], [2, 0, 1], [1, -1, 1]] {
            let v = l
                .generators
                .iter()
                .zip(coords)
                .fold(EmbeddedVector::zero(4), |acc, (b, c)| acc.add(&b.scale(c)));
            assert_eq!(
                is_irreducible(&v, &l).unwrap(),
                is_irreducible_gram(&g, &coords, 1_000_000).unwrap()
            );
            assert_eq!(
                is_unbreakable(&v, &l).unwrap(),
                is_unbreakable_gram(&g, &coords, 1_000_000).unwrap()
            );
        }
    }
}
