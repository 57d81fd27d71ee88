//! Changemaker lattices, their standard bases and the star-plumbing matcher.

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{neg_cf_expand, CfForm, Rational};
use crate::lattice::{self, EmbeddedVector, GramLattice, SublatticeBasis};
use crate::plumbing::{gram, StarPlumbing};

/// Every `1 <= n <= sum` is a subset sum.
pub fn is_changemaker(sigma: &[i64]) -> bool {
    if sigma.iter().any(|&x| x <= 0) {
        return false;
    }
    let total: i64 = sigma.iter().sum();
    let Ok(total) = usize::try_from(total) else {
        return false;
    };
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    let mut hi = 0usize;
    for &x in sigma {
        let x = x as usize;
        for v in (x..=hi + x).rev() {
            if reach[v - x] {
                reach[v] = true;
            }
        }
        hi += x;
    }
    reach.iter().all(|&r| r)
}

/// `σ₁ = 1` and each entry is at most one more than the sum before it.
pub fn brown_criterion(sigma: &[i64]) -> bool {
    let mut sum = 0i64;
    for &x in sigma {
        if x < 1 || x > sum + 1 {
            return false;
        }
        sum += x;
    }
    true
}

/// A nondecreasing positive tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SigmaTuple(pub Vec<i64>);

impl SigmaTuple {
    pub fn valid(sigma: Vec<i64>) -> Result<SigmaTuple> {
        if sigma.windows(2).any(|w| w[0] > w[1]) || sigma.iter().any(|&x| x < 1) {
            return Err(Error::DomainError(format!("{sigma:?} is not a nondecreasing positive tuple")));
        }
        if !is_changemaker(&sigma) {
            return Err(Error::NotChangemaker(format!("{sigma:?}")));
        }
        Ok(SigmaTuple(sigma))
    }

    pub fn stable(&self) -> Vec<i64> {
        self.0.iter().copied().filter(|&x| x > 1).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChangemakerLattice {
    pub slope: Rational,
    /// a₀..a_l
    pub cf: Vec<i64>,
    pub sigma: SigmaTuple,
    pub s: usize,
    pub t: usize,
    pub w: Vec<EmbeddedVector>,
    /// α₀..α_l
    pub alpha: Vec<usize>,
    /// the set M = {0..s} minus the interior α's, increasing
    pub beta: Vec<usize>,
    #[serde(skip)]
    complement: OnceLock<SublatticeBasis>,
}

impl PartialEq for ChangemakerLattice {
    fn eq(&self, other: &Self) -> bool {
        self.slope == other.slope && self.sigma == other.sigma
    }
}

impl ChangemakerLattice {
    pub fn ambient_rank(&self) -> usize {
        self.s + self.t + 1
    }

    /// Ambient index of `f_j`.
    pub fn f(&self, j: usize) -> usize {
        j
    }

    /// Ambient index of `e_i`, `1 <= i <= t`.
    pub fn e(&self, i: usize) -> usize {
        self.s + i
    }

    pub fn labels(&self) -> Vec<String> {
        let mut l: Vec<String> = (0..=self.s).map(|j| format!("f{j}")).collect();
        l.extend((1..=self.t).map(|i| format!("e{i}")));
        l
    }

    /// `ceil(p/q)`, the norm of `w₀`.
    pub fn n(&self) -> i64 {
        self.cf[0]
    }

    pub fn l(&self) -> usize {
        self.cf.len() - 1
    }

    /// Number of `μ_k` with `k >= 1`.
    pub fn m(&self) -> usize {
        self.beta.len() - 2
    }

    pub fn rank(&self) -> usize {
        self.t + self.m()
    }

    pub fn stable(&self) -> Vec<i64> {
        self.sigma.stable()
    }

    pub fn ones(&self) -> usize {
        self.sigma.0.iter().filter(|&&x| x == 1).count()
    }

    pub fn contains(&self, v: &EmbeddedVector) -> bool {
        v.len() == self.ambient_rank() && self.w.iter().all(|w| w.dot(v) == 0)
    }

    pub fn complement(&self) -> Result<&SublatticeBasis> {
        if let Some(c) = self.complement.get() {
            return Ok(c);
        }
        let c = lattice::orthogonal_complement(&self.w, self.ambient_rank())?;
        Ok(self.complement.get_or_init(|| c))
    }

    pub fn w_gram(&self) -> Vec<Vec<i64>> {
        self.w.iter().map(|a| self.w.iter().map(|b| a.dot(b)).collect()).collect()
    }
}

/// Slope coefficients and the padded tuple for `stable`.
fn padded_sigma(slope: &Rational, stable: &[i64]) -> Result<(Vec<i64>, Vec<i64>)> {
    if !slope.is_positive() || slope.is_integer() {
        return Err(Error::DomainError(format!("slope {slope} must be positive and non-integer")));
    }
    if let Some(x) = stable.iter().find(|&&x| x <= 1) {
        return Err(Error::DomainError(format!("stable coefficient {x} is not > 1")));
    }
    let mut st = stable.to_vec();
    st.sort_unstable();
    let cf = neg_cf_expand(slope, CfForm::Slope)?.coeffs().to_vec();
    let n = cf[0];
    let sq: i64 = st.iter().try_fold(0i64, |acc, &x| x.checked_mul(x).and_then(|y| acc.checked_add(y))).ok_or_else(|| Error::Overflow(format!("{st:?}")))?;
    let ones = n - 1 - sq;
    if ones < 0 {
        return Err(Error::IncompatibleStable(format!(
            "1 + sum of squares of {st:?} exceeds ceil({slope}) = {n}"
        )));
    }
    let mut sigma = vec![1i64; ones as usize];
    sigma.extend(st);
    Ok((cf, sigma))
}

/// `"2,3,5,5"`, optionally bracketed; empty means no stable coefficients.
pub fn parse_stable_list(s: &str) -> Result<Vec<i64>> {
    let body = s.trim();
    let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).unwrap_or(body).trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad stable coefficient {x:?}"))))
        .collect()
}

pub fn build_cm_lattice(slope: &Rational, stable: &[i64]) -> Result<ChangemakerLattice> {
    let (cf, sigma) = padded_sigma(slope, stable)?;
    if !is_changemaker(&sigma) {
        return Err(Error::NotChangemaker(format!("{sigma:?}")));
    }
    let l = cf.len() - 1;
    let mut alpha = vec![0usize];
    for &a in &cf[1..] {
        alpha.push(alpha.last().unwrap() + (a - 1) as usize);
    }
    let s = alpha[l];
    let t = sigma.len();
    let dim = s + t + 1;
    let mut w = Vec::with_capacity(l + 1);
    let mut w0 = vec![0i64; dim];
    w0[0] = 1;
    for (i, &x) in sigma.iter().enumerate() {
        w0[s + 1 + i] = x;
    }
    w.push(EmbeddedVector(w0));
    for k in 1..=l {
        let mut v = vec![0i64; dim];
        v[alpha[k - 1]] = -1;
        for j in alpha[k - 1] + 1..=alpha[k] {
            v[j] = 1;
        }
        w.push(EmbeddedVector(v));
    }
    let interior = &alpha[1..l];
    let beta: Vec<usize> = (0..=s).filter(|j| !interior.contains(j)).collect();
    Ok(ChangemakerLattice {
        slope: slope.clone(),
        cf,
        sigma: SigmaTuple(sigma),
        s,
        t,
        w,
        alpha,
        beta,
        complement: OnceLock::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuElement {
    pub k: usize,
    pub vector: EmbeddedVector,
    pub tight: bool,
    pub gapless: bool,
    /// indices of `e_i` with coefficient one, decreasing; empty when tight
    pub a_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardBasis {
    pub nu: Vec<NuElement>,
    pub mu: Vec<EmbeddedVector>,
    pub mu0: EmbeddedVector,
}

impl StandardBasis {
    pub fn elements(&self) -> Vec<EmbeddedVector> {
        let mut v: Vec<EmbeddedVector> = self.nu.iter().map(|n| n.vector.clone()).collect();
        v.extend(self.mu.iter().cloned());
        v
    }

    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.nu.iter().map(|n| format!("nu{}", n.k)).collect();
        v.extend((1..=self.mu.len()).map(|k| format!("mu{k}")));
        v
    }

    pub fn gram(&self) -> GramLattice {
        let els = self.elements();
        GramLattice { rank: els.len(), gram: sparse_gram(&els), labels: self.names() }
    }

    pub fn has_tight_beyond_first(&self) -> bool {
        self.nu.iter().any(|n| n.k > 1 && n.tight)
    }
}

fn sparse(v: &EmbeddedVector) -> Vec<(usize, i64)> {
    v.0.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect()
}

fn sparse_dot(a: &[(usize, i64)], b: &[(usize, i64)]) -> i64 {
    let (mut i, mut j, mut s) = (0, 0, 0i64);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

fn sparse_gram(vs: &[EmbeddedVector]) -> Vec<Vec<i64>> {
    let sp: Vec<_> = vs.iter().map(sparse).collect();
    let n = sp.len();
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let d = sparse_dot(&sp[i], &sp[j]);
            g[i][j] = d;
            g[j][i] = d;
        }
    }
    g
}

/// Greedy largest-index-first subset of `σ₁..σ_{k-1}` summing to `σ_k`, as 1-based indices.
fn greedy_a_set(sigma: &[i64], k: usize) -> Option<Vec<usize>> {
    let mut rem = sigma[k - 1];
    let mut out = Vec::new();
    for i in (1..k).rev() {
        if rem == 0 {
            break;
        }
        if sigma[i - 1] <= rem {
            rem -= sigma[i - 1];
            out.push(i);
        }
    }
    (rem == 0).then_some(out)
}

pub fn standard_basis(l: &ChangemakerLattice) -> StandardBasis {
    let dim = l.ambient_rank();
    let beta = &l.beta;
    let mut mu0 = vec![0i64; dim];
    for j in 0..=beta[1] {
        mu0[j] = 1;
    }
    let mut mu = Vec::with_capacity(l.m());
    for k in 1..=l.m() {
        let mut v = vec![0i64; dim];
        v[beta[k]] = -1;
        for j in beta[k] + 1..=beta[k + 1] {
            v[j] = 1;
        }
        mu.push(EmbeddedVector(v));
    }
    let sigma = &l.sigma.0;
    let mut prefix = 0i64;
    let mut nu = Vec::with_capacity(l.t);
    for k in 1..=l.t {
        let tight = sigma[k - 1] == prefix + 1;
        let mut v = vec![0i64; dim];
        v[l.e(k)] = -1;
        let a_set = if tight {
            for i in 1..k {
                v[l.e(i)] = 1;
            }
            for (j, &x) in mu0.iter().enumerate().take(l.s + 1) {
                v[j] += x;
            }
            Vec::new()
        } else {
            let a = greedy_a_set(sigma, k).expect("changemaker tuple admits a subset");
            for &i in &a {
                v[l.e(i)] = 1;
            }
            a
        };
        let gapless = !tight && a_set.iter().enumerate().all(|(idx, &i)| i == k - 1 - idx);
        prefix += sigma[k - 1];
        nu.push(NuElement { k, vector: EmbeddedVector(v), tight, gapless, a_set });
    }
    StandardBasis { nu, mu, mu0: EmbeddedVector(mu0) }
}

/// `‖μ₀‖, …, ‖μ_m‖` for the slope `p/q`.
pub fn mu_norms(slope: &Rational) -> Result<Vec<i64>> {
    if !slope.is_positive() || slope.is_integer() {
        return Err(Error::DomainError(format!("slope {slope} must be positive and non-integer")));
    }
    let cf = neg_cf_expand(slope, CfForm::Slope)?.coeffs().to_vec();
    let l = cf.len() - 1;
    let mut alpha = vec![0usize];
    for &a in &cf[1..] {
        alpha.push(alpha.last().unwrap() + (a - 1) as usize);
    }
    let s = alpha[l];
    let beta: Vec<usize> = (0..=s).filter(|j| !alpha[1..l].contains(j)).collect();
    let mut out = vec![beta[1] as i64 + 1];
    for k in 1..beta.len() - 1 {
        out.push((beta[k + 1] - beta[k] + 1) as i64);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexType {
    I,
    II,
    III,
}

impl std::fmt::Display for VertexType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VertexType::I => "I",
            VertexType::II => "II",
            VertexType::III => "III",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchPath {
    Template,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexImage {
    pub vertex: String,
    pub name: String,
    pub vector: EmbeddedVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSetType {
    pub tag: VertexType,
    pub via: MatchPath,
    /// Type II: the second type (b) neighbour `ν_g = −e_g + e_{g−1} + … + e₁`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_g: Option<usize>,
    /// in the plumbing's vertex order
    pub correspondence: Vec<VertexImage>,
}

impl VertexSetType {
    pub fn vectors(&self) -> Vec<EmbeddedVector> {
        self.correspondence.iter().map(|c| c.vector.clone()).collect()
    }
}

/// Type of the lattice's vertex set, read off the standard basis.
fn intrinsic_tag(sb: &StandardBasis) -> (VertexType, Option<usize>) {
    if sb.has_tight_beyond_first() {
        return (VertexType::III, None);
    }
    let n1 = sparse(&sb.nu[0].vector);
    let nbrs: Vec<usize> = sb.nu[1..]
        .iter()
        .filter(|n| sparse_dot(&n1, &sparse(&n.vector)) != 0)
        .map(|n| n.k)
        .collect();
    if nbrs.len() >= 2 {
        (VertexType::II, nbrs.iter().copied().find(|&k| k != 2))
    } else {
        (VertexType::I, None)
    }
}

struct Star {
    center: usize,
    arms: Vec<Vec<usize>>,
}

/// Signs making every edge `-1`, and the star shape, if the Gram is a weighted star tree.
fn star_shape(g: &[Vec<i64>]) -> Option<(Vec<i64>, Star)> {
    let n = g.len();
    let mut adj = vec![Vec::new(); n];
    let mut edges = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            match g[i][j] {
                0 => {}
                1 | -1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                    edges += 1;
                }
                _ => return None,
            }
        }
    }
    if n == 0 || edges != n - 1 {
        return None;
    }
    let mut sign = vec![0i64; n];
    sign[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if sign[v] == 0 {
                sign[v] = -sign[u] * g[u][v];
                queue.push_back(v);
            }
        }
    }
    if sign.contains(&0) {
        return None;
    }
    let hubs: Vec<usize> = (0..n).filter(|&i| adj[i].len() >= 3).collect();
    if hubs.len() != 1 || adj[hubs[0]].len() != 3 {
        return None;
    }
    let center = hubs[0];
    let mut arms = Vec::new();
    for &start in &adj[center] {
        let (mut prev, mut cur) = (center, start);
        let mut arm = vec![cur];
        loop {
            let next = adj[cur].iter().copied().find(|&x| x != prev);
            match next {
                Some(x) => {
                    prev = cur;
                    cur = x;
                    arm.push(cur);
                }
                None => break,
            }
        }
        arms.push(arm);
    }
    Some((sign, Star { center, arms }))
}

/// Try to identify `vs` (named `names`) with the vertices of `gamma`.
fn match_template(vs: &[EmbeddedVector], names: &[String], gamma: &StarPlumbing) -> Option<Vec<VertexImage>> {
    if vs.len() != gamma.vertex_count() {
        return None;
    }
    let g = sparse_gram(vs);
    let (sign, star) = star_shape(&g)?;
    let weights = |arm: &Vec<usize>| arm.iter().map(|&i| g[i][i]).collect::<Vec<i64>>();
    let found = StarPlumbing::new(g[star.center][star.center], star.arms.iter().map(weights).collect());
    if found.canonical() != gamma.canonical() {
        return None;
    }
    let labels = gamma.labels();
    let image = |i: usize, label: &str| VertexImage {
        vertex: label.to_string(),
        name: if sign[i] < 0 { format!("-{}", names[i]) } else { names[i].clone() },
        vector: vs[i].scale(sign[i]),
    };
    let mut out = vec![image(star.center, &labels[0])];
    let mut used = vec![false; star.arms.len()];
    for (ai, arm) in gamma.arms.iter().enumerate() {
        let pick = (0..star.arms.len()).find(|&j| !used[j] && &weights(&star.arms[j]) == arm)?;
        used[pick] = true;
        for (pos, &v) in star.arms[pick].iter().enumerate() {
            out.push(image(v, &labels[gamma.vertex_index(ai, pos)]));
        }
    }
    let imgs: Vec<EmbeddedVector> = out.iter().map(|o| o.vector.clone()).collect();
    (sparse_gram(&imgs) == gram(gamma).gram).then_some(out)
}

fn require_e2(gamma: &StarPlumbing) -> Result<()> {
    if gamma.central_weight != 2 {
        return Err(Error::WrongRegime(format!("central weight {} is not 2", gamma.central_weight)));
    }
    Ok(())
}

/// The structural templates only.
pub fn match_plumbing_templates(l: &ChangemakerLattice, gamma: &StarPlumbing) -> Result<Option<VertexSetType>> {
    require_e2(gamma)?;
    let sb = standard_basis(l);
    if !sb.has_tight_beyond_first() {
        if let Some(c) = match_template(&sb.elements(), &sb.names(), gamma) {
            let (tag, nu_g) = intrinsic_tag(&sb);
            return Ok(Some(VertexSetType { tag, via: MatchPath::Template, nu_g, correspondence: c }));
        }
        return Ok(None);
    }
    for nk in sb.nu.iter().filter(|n| n.k > 1 && n.tight) {
        let mut vs = Vec::new();
        let mut names = Vec::new();
        for n in sb.nu.iter().filter(|n| n.k != nk.k) {
            vs.push(n.vector.clone());
            names.push(format!("nu{}", n.k));
        }
        let mut c = nk.vector.clone();
        let mut cname = format!("nu{}", nk.k);
        for (i, m) in sb.mu.iter().enumerate() {
            vs.push(m.clone());
            names.push(format!("mu{}", i + 1));
            c = c.add(m);
            cname.push_str(&format!("+mu{}", i + 1));
        }
        vs.push(c.neg());
        names.push(format!("-({cname})"));
        if let Some(c) = match_template(&vs, &names, gamma) {
            return Ok(Some(VertexSetType { tag: VertexType::III, via: MatchPath::Template, nu_g: None, correspondence: c }));
        }
    }
    Ok(None)
}

/// Generic isomorphism search from the standard basis Gram to `gram(Γ)`.
pub fn match_plumbing_search(
    l: &ChangemakerLattice,
    gamma: &StarPlumbing,
    budget: u64,
) -> Result<Option<VertexSetType>> {
    require_e2(gamma)?;
    let sb = standard_basis(l);
    let a = sb.gram();
    let b = gram(gamma);
    if a.rank != b.rank || a.determinant() != b.determinant() {
        return Ok(None);
    }
    let Some(u) = lattice::lattice_isomorphic_with(&a, &b, budget)? else {
        return Ok(None);
    };
    let els = sb.elements();
    let names = sb.names();
    let dim = l.ambient_rank();
    let mut correspondence = Vec::with_capacity(b.rank);
    for (col, label) in b.labels.iter().enumerate() {
        let mut v = EmbeddedVector::zero(dim);
        let mut name = String::new();
        for (row, e) in els.iter().enumerate() {
            let c = u[row][col];
            if c == 0 {
                continue;
            }
            v = v.add(&e.scale(c));
            let term = match c {
                1 => names[row].clone(),
                -1 => format!("-{}", names[row]),
                _ => format!("{c}*{}", names[row]),
            };
            if !name.is_empty() && !term.starts_with('-') {
                name.push('+');
            }
            name.push_str(&term);
        }
        correspondence.push(VertexImage { vertex: label.clone(), name, vector: v });
    }
    let imgs: Vec<EmbeddedVector> = correspondence.iter().map(|c| c.vector.clone()).collect();
    if sparse_gram(&imgs) != b.gram {
        return Err(Error::Internal("isomorphism images do not reproduce the plumbing Gram".into()));
    }
    let (tag, nu_g) = intrinsic_tag(&sb);
    Ok(Some(VertexSetType { tag, via: MatchPath::Search, nu_g, correspondence }))
}

pub fn match_plumbing(l: &ChangemakerLattice, gamma: &StarPlumbing) -> Result<Option<VertexSetType>> {
    if let Some(m) = match_plumbing_templates(l, gamma)? {
        return Ok(Some(m));
    }
    match_plumbing_search(l, gamma, lattice::search_budget())
}

const VI_CEILING: i64 = 16;

/// `min Σ y(y−1)` over `k` unit coordinates in `[lo, hi]` summing to `s`: by convexity the
/// balanced split is optimal.
fn unit_cost(k: i64, lo: i64, hi: i64, s: i64) -> Option<i64> {
    if k == 0 {
        return (s == 0).then_some(0);
    }
    if s < k * lo || s > k * hi {
        return None;
    }
    let a = s.div_euclid(k);
    let r = s - a * k;
    Some((k - r) * a * (a - 1) + r * (a + 1) * a)
}

/// `2·min Σ y(y−1)` over weighted coordinates for every target sum, with `y` in
/// `[−1−x, 2+x]` on `f₀` and `[−σ−x, σ+1+x]` on `e_i`.
///
/// `f₀` and the `σ = 1` coordinates share weight and bounds, so they are handled in closed
/// form; only the stable coordinates go through the DP.
fn vi_table(sigma: &[i64], extra: i64) -> (i64, Vec<i64>) {
    let (ulo, uhi) = (-1 - extra, 2 + extra);
    let k = 1 + sigma.iter().filter(|&&x| x == 1).count() as i64;
    let stable: Vec<i64> = sigma.iter().copied().filter(|&x| x > 1).collect();
    let (slo, sdp) = vi_table_dp(&stable, extra);
    let lo = slo + k * ulo;
    let hi = slo + sdp.len() as i64 - 1 + k * uhi;
    let mut dp = vec![i64::MAX; (hi - lo + 1) as usize];
    for (j, &c) in sdp.iter().enumerate() {
        if c == i64::MAX {
            continue;
        }
        let u = slo + j as i64;
        for t in k * ulo..=k * uhi {
            let cost = c + unit_cost(k, ulo, uhi, t).expect("in range");
            let idx = (u + t - lo) as usize;
            if cost < dp[idx] {
                dp[idx] = cost;
            }
        }
    }
    (lo, dp)
}

/// Plain DP over `(σ, −σ−x, σ+1+x)` coordinates.
fn vi_table_dp(sigma: &[i64], extra: i64) -> (i64, Vec<i64>) {
    let coords: Vec<(i64, i64, i64)> = sigma.iter().map(|&x| (x, -x - extra, x + 1 + extra)).collect();
    let lo: i64 = coords.iter().map(|&(w, a, _)| w * a).sum();
    let hi: i64 = coords.iter().map(|&(w, _, b)| w * b).sum();
    let width = (hi - lo + 1) as usize;
    let mut dp = vec![i64::MAX; width];
    let mut reach_lo = 0i64;
    let mut reach_hi = 0i64;
    // index offset: sum value v sits at v - lo
    dp[(-lo) as usize] = 0;
    for &(w, a, b) in &coords {
        let mut next = vec![i64::MAX; width];
        for v in reach_lo..=reach_hi {
            let cur = dp[(v - lo) as usize];
            if cur == i64::MAX {
                continue;
            }
            for y in a..=b {
                let idx = (v + w * y - lo) as usize;
                let c = cur + y * (y - 1);
                if c < next[idx] {
                    next[idx] = c;
                }
            }
        }
        reach_lo += w * a;
        reach_hi += w * b;
        dp = next;
    }
    (lo, dp)
}

fn vi_from_table(sigma: &[i64], n: i64, table: &(i64, Vec<i64>)) -> Result<Vec<i64>> {
    let big_s = 1 + sigma.iter().sum::<i64>();
    let (lo, dp) = table;
    (0..=n / 2)
        .map(|i| {
            let target = (big_s + n) / 2 - i;
            let idx = target - lo;
            let v = usize::try_from(idx).ok().and_then(|k| dp.get(k)).copied().unwrap_or(i64::MAX);
            if v == i64::MAX || v % 2 != 0 {
                Err(Error::Internal(format!("no characteristic vector for i = {i}")))
            } else {
                Ok(v / 2)
            }
        })
        .collect()
}

/// `V₀, …, V_{⌊n/2⌋}` from the characteristic-vector minimization, with a stabilization certificate.
pub fn vi_sequence(l: &ChangemakerLattice) -> Result<Vec<i64>> {
    vi_sequence_for(&l.sigma.0, l.n())
}

fn vi_sequence_for(sigma: &[i64], n: i64) -> Result<Vec<i64>> {
    let big_s = 1 + sigma.iter().sum::<i64>();
    if (big_s - n) % 2 != 0 {
        return Err(Error::Internal("parity of w₀ disagrees with its norm".into()));
    }
    let mut prev = vi_from_table(sigma, n, &vi_table(sigma, 0))?;
    for extra in 1..=VI_CEILING {
        let cur = vi_from_table(sigma, n, &vi_table(sigma, extra))?;
        if cur == prev {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::SearchBudgetExceeded { what: "V_i coordinate bound".into(), budget: VI_CEILING as u64 })
}

pub fn vi_minimization(l: &ChangemakerLattice, i: i64) -> Result<i64> {
    let n = l.n();
    if i < 0 || i > n / 2 {
        return Err(Error::DomainError(format!("index {i} outside 0..={}", n / 2)));
    }
    Ok(vi_sequence(l)?[i as usize])
}

fn choose2(x: i64) -> i64 {
    x * (x - 1) / 2
}

/// Largest `Z` spread over `count` coordinates with balanced cost `Σ C(z+1,2) <= b`.
fn max_spread(count: i64, b: i64) -> i64 {
    let cost = |z: i64| {
        let (q, r) = (z / count, z % count);
        (count - r) * choose2(q + 1) + r * choose2(q + 2)
    };
    let mut z = 0;
    while cost(z + 1) <= b {
        z += 1;
    }
    z
}

/// `R(m)` for `m = 0..=cap`: the largest `Σ σ z` with `Σ C(z+1,2) <= m`, `z >= 0`.
fn r_profile(groups: &[(i64, i64)], cap: i64) -> Vec<i64> {
    let cap = cap as usize;
    let mut best = vec![0i64; cap + 1];
    for &(value, count) in groups {
        if count == 0 {
            continue;
        }
        let gain: Vec<i64> = (0..=cap).map(|b| value * max_spread(count, b as i64)).collect();
        let mut next = vec![0i64; cap + 1];
        for m in 0..=cap {
            next[m] = (0..=m).map(|b| best[m - b] + gain[b]).max().unwrap();
        }
        best = next;
    }
    best
}

fn groups_of(items: &[i64], ones: i64) -> Vec<(i64, i64)> {
    let mut g: Vec<(i64, i64)> = Vec::new();
    for &x in items {
        match g.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => g.push((x, 1)),
        }
    }
    g.push((1, ones));
    g
}

#[cfg(test)]
/// `V_i` through `R(m)`: the least `m` with `R(m) >= G − i`.
fn vi_via_profile(sigma: &[i64], n: i64) -> Vec<i64> {
    let big_g: i64 = sigma.iter().map(|&x| choose2(x)).sum();
    let stable: Vec<i64> = sigma.iter().rev().copied().filter(|&x| x > 1).collect();
    let ones = sigma.iter().filter(|&&x| x == 1).count() as i64 + 1;
    let prof = r_profile(&groups_of(&stable, ones), big_g);
    (0..=n / 2)
        .map(|i| {
            let d = big_g - i;
            if d <= 0 {
                0
            } else {
                prof.iter().position(|&r| r >= d).unwrap() as i64
            }
        })
        .collect()
}

/// Stable coefficients whose changemaker lattice has `V_i = t_i`.
pub fn stable_from_torsion(slope: &Rational, torsion: &[i64]) -> Result<Vec<i64>> {
    if torsion.iter().any(|&x| x < 0) || torsion.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::DomainError("torsion coefficients must be non-increasing and nonnegative".into()));
    }
    let (cf, _) = padded_sigma(slope, &[])?;
    let n = cf[0];
    let vi = |i: i64| torsion.get(i as usize).copied().unwrap_or(0);
    let big_g = (0..).find(|&i| vi(i) == 0).unwrap();
    let target: Vec<i64> = (0..=n / 2).map(vi).collect();
    if (n / 2 + 1..torsion.len() as i64).any(|i| vi(i) != 0) {
        return Err(Error::NoRealizingTuple(format!("torsion nonzero beyond index {}", n / 2)));
    }
    let v0 = vi(0);
    // R̂(m) = max{G − i : V_i <= m}
    let r_hat: Vec<i64> = (0..=v0).map(|m| big_g - (0..).find(|&i| vi(i) <= m).unwrap()).collect();

    struct Search<'a> {
        n: i64,
        big_g: i64,
        v0: i64,
        r_hat: &'a [i64],
        target: &'a [i64],
        slope: &'a Rational,
        found: Vec<Vec<i64>>,
    }

    impl Search<'_> {
        fn consistent(&self, prefix: &[i64], genus: i64, sq: i64) -> bool {
            let lower = r_profile(&groups_of(prefix, 1), self.v0);
            // at most `left` more items, none larger than the last one
            let last = prefix.last().copied().unwrap_or(i64::MAX).min(self.n);
            let left = self.big_g - genus;
            let mut up = prefix.to_vec();
            up.extend(std::iter::repeat_n(last, left as usize));
            let upper = r_profile(&groups_of(&up, self.n - sq), self.v0);
            (0..=self.v0 as usize).all(|m| {
                lower[m].min(self.big_g) <= self.r_hat[m] && self.r_hat[m] <= upper[m].min(self.big_g)
            })
        }

        fn leaf(&mut self, prefix: &[i64]) -> Result<()> {
            let mut st = prefix.to_vec();
            st.reverse();
            let l = match build_cm_lattice(self.slope, &st) {
                Ok(l) => l,
                Err(Error::NotChangemaker(_)) | Err(Error::IncompatibleStable(_)) => return Ok(()),
                Err(e) => return Err(e),
            };
            if vi_sequence(&l)? == self.target {
                self.found.push(st);
            }
            Ok(())
        }

        fn rec(&mut self, prefix: &mut Vec<i64>, genus: i64, sq: i64) -> Result<()> {
            if genus == self.big_g {
                return self.leaf(prefix);
            }
            if !self.consistent(prefix, genus, sq) {
                return Ok(());
            }
            let cap = prefix.last().copied().unwrap_or(i64::MAX);
            let mut x = 2i64;
            let mut options = Vec::new();
            while x <= cap && choose2(x) <= self.big_g - genus && sq + x * x < self.n {
                let rest = self.big_g - genus - choose2(x);
                if sq + x * x + 2 * rest < self.n {
                    options.push(x);
                }
                x += 1;
            }
            for &x in options.iter().rev() {
                prefix.push(x);
                self.rec(prefix, genus + choose2(x), sq + x * x)?;
                prefix.pop();
            }
            Ok(())
        }
    }

    let mut search =
        Search { n, big_g, v0, r_hat: &r_hat, target: &target, slope, found: Vec::new() };
    search.rec(&mut Vec::new(), 0, 0)?;
    match search.found.len() {
        0 => Err(Error::NoRealizingTuple(format!("no stable tuple has V = {target:?} at slope {slope}"))),
        1 => Ok(search.found.pop().unwrap()),
        _ => Err(Error::AmbiguousTuple(format!("{:?} all give V = {target:?}", search.found))),
    }
}
