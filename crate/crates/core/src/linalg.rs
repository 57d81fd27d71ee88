//! Exact integer and rational matrix routines shared by the lattice code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type BigMat = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> BigMat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::Overflow(x.to_string())))
        .collect()
}

/// Bareiss fraction-free determinant.
pub fn det(m: &[Vec<i64>]) -> BigInt {
    det_big(to_big(m))
}

pub fn det_big(mut a: BigMat) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// All leading principal minors positive.
pub fn is_positive_definite(gram: &[Vec<i64>]) -> bool {
    (1..=gram.len()).all(|k| {
        let minor: Vec<Vec<i64>> = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
        det(&minor).is_positive()
    })
}

/// Rank over the rationals.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut a = to_big(rows);
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..nrows {
            if a[i][c].is_zero() {
                continue;
            }
            let (x, y) = (a[r][c].clone(), a[i][c].clone());
            for j in c..ncols {
                let v = &a[i][j] * &x - &a[r][j] * &y;
                a[i][j] = v;
            }
            let g = a[i].iter().fold(BigInt::zero(), |g, v| g.gcd(v));
            if !g.is_zero() && !g.is_one() {
                for v in a[i].iter_mut() {
                    *v = &*v / &g;
                }
            }
        }
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}

/// Nonzero invariant factors of an integer matrix.
pub fn smith_invariants(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a = to_big(rows);
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..n {
                    let v = &a[i][j] - &q * &a[t][j];
                    a[i][j] = v;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..m {
                    let v = &a[i][j] - &q * &a[i][t];
                    a[i][j] = v;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide the rest of the block
            let mut fixed = false;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        for k in t..n {
                            let v = &a[t][k] + &a[i][k];
                            a[t][k] = v;
                        }
                        fixed = true;
                        break 'outer;
                    }
                }
            }
            if !fixed {
                break;
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Integral basis of `{x : rows . x = 0}`, via unimodular row reduction of `[A^T | I]`.
pub fn integer_kernel(rows: &[Vec<i64>], n: usize) -> BigMat {
    let k = rows.len();
    let mut m: BigMat = (0..n)
        .map(|i| {
            let mut r: Vec<BigInt> = rows.iter().map(|w| BigInt::from(w[i])).collect();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let mut piv = 0;
    for c in 0..k {
        loop {
            let mut best: Option<usize> = None;
            for i in piv..n {
                if !m[i][c].is_zero() && best.is_none_or(|b| m[i][c].abs() < m[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(piv, b);
            let mut done = true;
            for i in piv + 1..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[piv][c]);
                let pr = m[piv].clone();
                for (x, y) in m[i].iter_mut().zip(pr.iter()) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                piv += 1;
                break;
            }
        }
    }
    m.into_iter()
        .filter(|r| r[..k].iter().all(|x| x.is_zero()))
        .map(|r| r[k..].to_vec())
        .collect()
}

/// Solve `C * basis = targets` over the rationals; `None` when inconsistent.
pub fn solve_rows(basis: &[Vec<i64>], targets: &[Vec<i64>]) -> Option<Vec<Vec<BigRational>>> {
    let r = basis.len();
    let k = targets.len();
    let n = basis.first().or(targets.first()).map_or(0, |v| v.len());
    // augmented [B^T | T^T], n rows
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            basis
                .iter()
                .map(|b| BigRational::from_integer(b[i].into()))
                .chain(targets.iter().map(|t| BigRational::from_integer(t[i].into())))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..r {
        let Some(p) = (row..n).find(|&i| !a[i][c].is_zero()) else {
            return None;
        };
        a.swap(row, p);
        let inv = a[row][c].recip();
        for v in a[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..n {
            if i != row && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pr = a[row].clone();
                for (x, y) in a[i].iter_mut().zip(pr.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(row);
        row += 1;
    }
    for i in row..n {
        if a[i][r..].iter().any(|x| !x.is_zero()) {
            return None;
        }
    }
    Some(
        (0..k)
            .map(|t| (0..r).map(|c| a[pivots[c]][r + t].clone()).collect())
            .collect(),
    )
}

/// Like `solve_rows` but demands integer coefficients.
pub fn solve_rows_integral(basis: &[Vec<i64>], targets: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let sol = solve_rows(basis, targets)?;
    sol.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
                .collect::<Option<Vec<i64>>>()
        })
        .collect()
}

/// Inverse of a square integer matrix with determinant +-1.
pub fn inverse_unimodular(u: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = u.len();
    if !det(u).abs().is_one() {
        return None;
    }
    let id: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    // rows of X with X * U = I
    solve_rows_integral(u, &id)
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b.iter()).map(|(x, br)| x * br[j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Every lattice vector `x` (Gram coordinates) with `x^T G x <= bound`, nonzero, one of each
/// `+-` pair unless `both_signs`. Fincke-Pohst over a floating Cholesky factor with slack;
/// every returned vector is re-checked exactly.
pub fn short_vectors(
    gram: &[Vec<i64>],
    bound: i64,
    both_signs: bool,
    budget: u64,
) -> Result<Vec<Vec<i64>>> {
    let n = gram.len();
    let mut q = vec![vec![0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = gram[i][j] as f64;
        }
    }
    for i in 0..n {
        if q[i][i] <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let slack = 1e-7 * (1.0 + bound as f64);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut steps = 0u64;
    fn rec(
        i: usize,
        rem: f64,
        q: &[Vec<f64>],
        x: &mut Vec<i64>,
        gram: &[Vec<i64>],
        bound: i64,
        slack: f64,
        out: &mut Vec<Vec<i64>>,
        steps: &mut u64,
        budget: u64,
    ) -> Result<()> {
        let n = q.len();
        let u: f64 = (i + 1..n).map(|j| q[i][j] * x[j] as f64).sum();
        let rad = ((rem + slack).max(0.0) / q[i][i]).sqrt();
        let lo = (-u - rad).ceil() as i64;
        let hi = (-u + rad).floor() as i64;
        for xi in lo..=hi {
            *steps += 1;
            if *steps > budget {
                return Err(Error::SearchBudgetExceeded {
                    what: "short vector enumeration".into(),
                    budget,
                });
            }
            x[i] = xi;
            let t = xi as f64 + u;
            let r = rem - q[i][i] * t * t;
            if r < -slack {
                continue;
            }
            if i == 0 {
                if x.iter().all(|&v| v == 0) {
                    continue;
                }
                let norm = quad(gram, x);
                if norm <= bound as i128 {
                    out.push(x.clone());
                }
            } else {
                rec(i - 1, r, q, x, gram, bound, slack, out, steps, budget)?;
            }
        }
        x[i] = 0;
        Ok(())
    }
    if n > 0 {
        rec(n - 1, bound as f64, &q, &mut x, gram, bound, slack, &mut out, &mut steps, budget)?;
    }
    if !both_signs {
        out.retain(|v| v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0));
    }
    Ok(out)
}

pub fn quad(gram: &[Vec<i64>], x: &[i64]) -> i128 {
    let mut s = 0i128;
    for (i, row) in gram.iter().enumerate() {
        if x[i] == 0 {
            continue;
        }
        for (j, &g) in row.iter().enumerate() {
            s += x[i] as i128 * g as i128 * x[j] as i128;
        }
    }
    s
}

pub fn bilinear(gram: &[Vec<i64>], x: &[i64], y: &[i64]) -> i128 {
    let mut s = 0i128;
    for (i, row) in gram.iter().enumerate() {
        if x[i] == 0 {
            continue;
        }
        for (j, &g) in row.iter().enumerate() {
            s += x[i] as i128 * g as i128 * y[j] as i128;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det(&[vec![2, -1], vec![-1, 2]]), BigInt::from(3));
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), BigInt::from(0));
        assert_eq!(det(&[]), BigInt::from(1));
        // A_4 root lattice has determinant 5
        let a4: Vec<Vec<i64>> = (0..4usize)
            .map(|i| (0..4usize).map(|j| if i == j { 2 } else if i.abs_diff(j) == 1 { -1 } else { 0 }).collect())
            .collect();
        assert_eq!(det(&a4), BigInt::from(5));
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_invariants(&[vec![2]]), vec![BigInt::from(2)]);
        assert_eq!(
            smith_invariants(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]),
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        assert_eq!(smith_invariants(&[vec![1, 0], vec![0, 1]]), vec![BigInt::from(1); 2]);
    }

    #[test]
    fn kernel_is_primitive_and_orthogonal() {
        let rows = vec![vec![2, 4, 6, 1], vec![0, 3, 3, 3]];
        let k = integer_kernel(&rows, 4);
        assert_eq!(k.len(), 2);
        let k: Vec<Vec<i64>> = k.iter().map(|v| to_i64_vec(v).unwrap()).collect();
        for v in &k {
            for r in &rows {
                assert_eq!(r.iter().zip(v).map(|(a, b)| a * b).sum::<i64>(), 0);
            }
        }
        assert!(smith_invariants(&k).iter().all(|d| d.is_one()));
    }

    #[test]
    fn solve_and_inverse() {
        let b = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let t = vec![vec![2, 5, 3]];
        assert_eq!(solve_rows_integral(&b, &t), Some(vec![vec![2, 3]]));
        assert_eq!(solve_rows_integral(&b, &[vec![1, 0, 0]]), None);
        let u = vec![vec![2, 1], vec![1, 1]];
        let inv = inverse_unimodular(&u).unwrap();
        assert_eq!(mat_mul(&inv, &u), vec![vec![1, 0], vec![0, 1]]);
        assert!(inverse_unimodular(&[vec![2]]).is_none());
    }

    #[test]
    fn short_vectors_of_a2() {
        let g = vec![vec![2, -1], vec![-1, 2]];
        let v = short_vectors(&g, 2, true, 1_000).unwrap();
        assert_eq!(v.len(), 6);
        let v = short_vectors(&g, 2, false, 1_000).unwrap();
        assert_eq!(v.len(), 3);
        // brute force oracle
        let mut count = 0;
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                if (a, b) != (0, 0) && quad(&g, &[a, b]) <= 6 {
                    count += 1;
                }
            }
        }
        assert_eq!(short_vectors(&g, 6, true, 10_000).unwrap().len(), count);
    }
}
