//! Exact integer and rational linear algebra: row Hermite normal form,
//! integer kernels, echelon solves, determinants and ranks.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{Q, Z};

/// Result of a row Hermite normal form computation: `transform * input = form`.
#[derive(Debug, Clone)]
pub struct Hnf {
    /// All rows, zero rows last.
    pub form: Vec<Vec<Z>>,
    pub transform: Vec<Vec<Z>>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

fn sub_mul_row(rows: &mut [Vec<Z>], dst: usize, src: usize, f: &Z) {
    if f.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= f * y;
        }
    }
}

/// Row-style Hermite normal form with positive pivots and entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hnf_with_transform(input: &[Vec<Z>], ncols: usize) -> Hnf {
    let m = input.len();
    let mut a: Vec<Vec<Z>> = input.to_vec();
    let mut u: Vec<Vec<Z>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { Z::one() } else { Z::zero() }).collect())
        .collect();
    let mut r = 0;
    let mut pivots = vec![];
    for c in 0..ncols {
        if r == m {
            break;
        }
        loop {
            let best = (r..m)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(best) = best else { break };
            a.swap(r, best);
            u.swap(r, best);
            let mut done = true;
            for i in r + 1..m {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].div_floor(&a[r][c]);
                sub_mul_row(&mut a, i, r, &f);
                sub_mul_row(&mut u, i, r, &f);
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut().chain(u[r].iter_mut()) {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let f = a[i][c].div_floor(&a[r][c]);
            sub_mul_row(&mut a, i, r, &f);
            sub_mul_row(&mut u, i, r, &f);
        }
        pivots.push(c);
        r += 1;
    }
    Hnf {
        form: a,
        transform: u,
        rank: r,
        pivots,
    }
}

/// Nonzero rows of the Hermite normal form: the canonical basis of the row lattice.
pub fn hnf(rows: &[Vec<Z>], ncols: usize) -> Vec<Vec<Z>> {
    let h = hnf_with_transform(rows, ncols);
    h.form.into_iter().take(h.rank).collect()
}

/// Basis of the integer vectors `x` with `x · rows = 0`, in Hermite normal form.
pub fn left_kernel(rows: &[Vec<Z>], ncols: usize) -> Vec<Vec<Z>> {
    let m = rows.len();
    let h = hnf_with_transform(rows, ncols);
    let kernel: Vec<Vec<Z>> = h.transform.into_iter().skip(h.rank).collect();
    hnf(&kernel, m)
}

/// Expresses `v` in an echelon basis (each row has a distinct leading column,
/// increasing). Returns `None` if `v` is not in the rational span.
pub fn echelon_coords(basis: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let p = row.iter().position(|x| !x.is_zero())?;
        let c = &rest[p] / &row[p];
        if !c.is_zero() {
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &c * y;
            }
        }
        coords.push(c);
    }
    rest.iter().all(Zero::is_zero).then_some(coords)
}

/// Determinant by fraction-free elimination.
pub fn det(m: &[Vec<Z>]) -> Z {
    let n = m.len();
    if n == 0 {
        return Z::one();
    }
    let mut a = m.to_vec();
    let mut sign = Z::one();
    let mut prev = Z::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Z::zero(),
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

/// Rank over Q.
pub fn rank_q(rows: &[Vec<Q>]) -> usize {
    let mut a = rows.to_vec();
    let ncols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for j in c..ncols {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
        }
        r += 1;
    }
    r
}

pub fn rank_z(rows: &[Vec<Z>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    hnf_with_transform(rows, ncols).rank
}

/// Rank over Q of a sparse matrix given as rows of `(column, value)` maps.
/// Elimination keeps rows sparse, which makes permutation-like matrices cheap.
pub fn sparse_rank(rows: Vec<BTreeMap<usize, Q>>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Q>> = BTreeMap::new();
    for mut row in rows {
        row.retain(|_, v| !v.is_zero());
        while let Some((&lead, lead_val)) = row.iter().next() {
            let Some(prow) = pivots.get(&lead) else {
                pivots.insert(lead, row);
                break;
            };
            let f = lead_val / &prow[&lead];
            for (&j, v) in prow {
                let e = row.entry(j).or_insert_with(Q::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(&j);
                }
            }
        }
    }
    pivots.len()
}

/// Multiplies every row by the lcm of all denominators, returning the integer
/// matrix and that scale.
pub fn clear_denominators(rows: &[Vec<Q>]) -> (Vec<Vec<Z>>, Z) {
    let scale = rows
        .iter()
        .flatten()
        .fold(Z::one(), |acc, x| acc.lcm(x.denom()));
    let ints = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * Q::from_integer(scale.clone())).to_integer()).collect())
        .collect();
    (ints, scale)
}
