//! Smith normal form of sparse integer matrices, tracking column operations.
//!
//! Row operations are applied but not recorded: callers only need the
//! change of basis on the column (cochain) side.

use std::collections::BTreeSet;

use num_bigint::BigInt;


use crate::int::Int;

/// A nontrivial invariant factor `d` with the matching column `q` of the
/// column transform and row `w` of its inverse.
#[derive(Debug, Clone)]
pub(crate) struct Factor {
    pub d: BigInt,
    pub column: Vec<BigInt>,
    pub row: Vec<BigInt>,
}

#[derive(Debug, Clone)]
pub(crate) struct ColumnSnf {
    #[allow(dead_code)]
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub factors: Vec<Factor>,
}

/// Smith form of the matrix with the given sparse rows and `ncols` columns.
pub(crate) fn column_snf(rows: &[Vec<(usize, i64)>], ncols: usize) -> ColumnSnf {
    if let Some(out) = run::<i64>(rows, ncols) {
        return out;
    }
    run::<BigInt>(rows, ncols).expect("bigint arithmetic is total")
}

fn run<C: Int>(rows: &[Vec<(usize, i64)>], ncols: usize) -> Option<ColumnSnf> {
    let identity = |n: usize| -> Vec<Vec<C>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { C::one() } else { C::zero() }).collect())
            .collect()
    };
    let mut q = identity(ncols);
    let mut qinv = identity(ncols);
    let (rank, rest, cols) = eliminate_units::<C>(rows, ncols, &mut q, &mut qinv)?;
    let mut w = Work { a: rest, cols, q, qinv };
    let (dense_rank, diag) = dense_snf(&mut w)?;
    let factors = diag
        .into_iter()
        .enumerate()
        .filter(|(_, d)| !d.is_one())
        .map(|(k, d)| {
            let c = w.cols[k];
            Factor {
                d: d.to_big(),
                column: w.q[c].iter().map(Int::to_big).collect(),
                row: w.qinv[c].iter().map(Int::to_big).collect(),
            }
        })
        .collect();
    Some(ColumnSnf { rank: rank + dense_rank, factors })
}

/// `v[from..] -= q * p[from..]`
fn sub_mul<C: Int>(v: &mut [C], q: &C, p: &[C], from: usize) -> Option<()> {
    for (x, y) in v[from..].iter_mut().zip(&p[from..]) {
        if !y.is_zero() {
            *x = x.c_sub(&q.c_mul(y)?)?;
        }
    }
    Some(())
}

/// `a -= f * b` on sorted sparse rows.
fn sparse_sub<C: Int>(a: &[(usize, C)], f: &C, b: &[(usize, C)]) -> Option<Vec<(usize, C)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, C::zero().c_sub(&f.c_mul(&b[j].1)?)?));
            j += 1;
        } else {
            let v = a[i].1.c_sub(&f.c_mul(&b[j].1)?)?;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// `col_k -= f * col_j` on the transforms: `Q[k] -= f Q[j]`, `Q⁻¹[j] += f Q⁻¹[k]`.
fn transform_col_sub<C: Int>(q: &mut [Vec<C>], qinv: &mut [Vec<C>], k: usize, j: usize, f: &C) -> Option<()> {
    let (qj, qk) = pair_mut(q, j, k);
    sub_mul(qk, f, qj, 0)?;
    let (wj, wk) = pair_mut(qinv, j, k);
    for (x, y) in wj.iter_mut().zip(wk.iter()) {
        if !y.is_zero() {
            *x = x.c_add(&f.c_mul(y)?)?;
        }
    }
    Some(())
}

/// Pivots on unit entries, cheapest by Markowitz cost first. Returns the
/// number of pivots, the leftover rows as a dense matrix, and the global
/// column index of each dense column.
fn eliminate_units<C: Int>(
    input: &[Vec<(usize, i64)>],
    ncols: usize,
    q: &mut [Vec<C>],
    qinv: &mut [Vec<C>],
) -> Option<(usize, Vec<Vec<C>>, Vec<usize>)> {
    let mut rows: Vec<Vec<(usize, C)>> =
        input.iter().map(|r| r.iter().map(|&(j, v)| (j, C::from_i64(v))).collect()).collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for (j, _) in r {
            col_rows[*j].insert(i);
        }
    }
    let entry = |r: &[(usize, C)], j: usize| r.binary_search_by_key(&j, |e| e.0).ok().map(|k| r[k].1.clone());
    let mut rank = 0;
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for j in 0..ncols {
            let cn = col_rows[j].len();
            if cn == 0 || best.is_some_and(|(cost, _, _)| cost == 0) {
                continue;
            }
            for &i in &col_rows[j] {
                let cost = (rows[i].len() - 1) * (cn - 1);
                if best.is_some_and(|(c, _, _)| c <= cost) {
                    continue;
                }
                if entry(&rows[i], j).is_some_and(|v| v.abs().is_one()) {
                    best = Some((cost, j, i));
                }
            }
        }
        let Some((_, j, p)) = best else { break };
        let prow = std::mem::take(&mut rows[p]);
        for (k, _) in &prow {
            col_rows[*k].remove(&p);
        }
        let a = entry(&prow, j).expect("pivot entry");
        let others: Vec<usize> = col_rows[j].iter().copied().collect();
        for i in others {
            let f = entry(&rows[i], j).expect("column index is accurate").c_mul(&a)?;
            let new = sparse_sub(&rows[i], &f, &prow)?;
            for (k, _) in &rows[i] {
                col_rows[*k].remove(&i);
            }
            for (k, _) in &new {
                col_rows[*k].insert(i);
            }
            rows[i] = new;
        }
        for (k, v) in &prow {
            if *k != j {
                transform_col_sub(q, qinv, *k, j, &v.c_mul(&a)?)?;
            }
        }
        rank += 1;
    }
    let cols: Vec<usize> = (0..ncols).filter(|&j| !col_rows[j].is_empty()).collect();
    let pos: std::collections::HashMap<usize, usize> = cols.iter().enumerate().map(|(p, &c)| (c, p)).collect();
    let dense = rows
        .into_iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let mut d = vec![C::zero(); cols.len()];
            for (k, v) in r {
                d[pos[&k]] = v;
            }
            d
        })
        .collect();
    Some((rank, dense, cols))
}

struct Work<C> {
    a: Vec<Vec<C>>,
    /// global column of each dense column
    cols: Vec<usize>,
    /// columns of Q
    q: Vec<Vec<C>>,
    /// rows of Q⁻¹
    qinv: Vec<Vec<C>>,
}

impl<C: Int> Work<C> {
    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.a {
            row.swap(i, j);
        }
        self.cols.swap(i, j);
    }

    /// `col_j -= f * col_k`, mirrored on Q and Q⁻¹.
    fn col_sub(&mut self, j: usize, k: usize, f: &C, from_row: usize) -> Option<()> {
        for row in &mut self.a[from_row..] {
            if !row[k].is_zero() {
                row[j] = row[j].c_sub(&f.c_mul(&row[k])?)?;
            }
        }
        transform_col_sub(&mut self.q, &mut self.qinv, self.cols[j], self.cols[k], f)
    }

    fn row_sub(&mut self, i: usize, k: usize, f: &C, from_col: usize) -> Option<()> {
        let (rk, ri) = pair_mut(&mut self.a, k, i);
        sub_mul(ri, f, rk, from_col)
    }
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Dense Smith form of `w.a`; returns the rank and the diagonal.
fn dense_snf<C: Int>(w: &mut Work<C>) -> Option<(usize, Vec<C>)> {
    let r = w.a.len();
    let ncols = w.cols.len();
    let mut diag = Vec::new();
    for k in 0..r.min(ncols) {
        // smallest nonzero entry in the trailing block, stopping at a unit
        let mut best: Option<(usize, usize)> = None;
        'search: for i in k..r {
            for j in k..ncols {
                let v = &w.a[i][j];
                if v.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| v.abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                    if v.abs().is_one() {
                        break 'search;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.a.swap(k, pi);
        w.swap_cols(k, pj);
        loop {
            let mut clean = true;
            for i in k + 1..r {
                if !w.a[i][k].is_zero() {
                    let f = w.a[i][k].div_floor(&w.a[k][k]);
                    w.row_sub(i, k, &f, k)?;
                    clean &= w.a[i][k].is_zero();
                }
            }
            for j in k + 1..ncols {
                if !w.a[k][j].is_zero() {
                    let f = w.a[k][j].div_floor(&w.a[k][k]);
                    w.col_sub(j, k, &f, k)?;
                    clean &= w.a[k][j].is_zero();
                }
            }
            if !clean {
                let mut best: Option<(bool, usize)> = None;
                let mut best_abs = None::<C>;
                for i in k + 1..r {
                    let v = w.a[i][k].abs();
                    if !v.is_zero() && best_abs.as_ref().is_none_or(|b| v < *b) {
                        best = Some((true, i));
                        best_abs = Some(v);
                    }
                }
                for j in k + 1..ncols {
                    let v = w.a[k][j].abs();
                    if !v.is_zero() && best_abs.as_ref().is_none_or(|b| v < *b) {
                        best = Some((false, j));
                        best_abs = Some(v);
                    }
                }
                match best.expect("dirty pivot row or column has a nonzero entry") {
                    (true, i) => w.a.swap(k, i),
                    (false, j) => w.swap_cols(k, j),
                }
                continue;
            }
            // enforce the divisibility chain with a free row operation
            let d = w.a[k][k].clone();
            let bad = (k + 1..r).find(|&i| w.a[i][k + 1..].iter().any(|x| !x.is_multiple_of(&d)));
            match bad {
                Some(i) => {
                    let (rk, ri) = pair_mut(&mut w.a, k, i);
                    for (x, y) in rk[k..].iter_mut().zip(&ri[k..]) {
                        *x = x.c_add(y)?;
                    }
                }
                None => break,
            }
        }
        if w.a[k][k].is_negative() {
            w.a[k].iter_mut().for_each(|x| *x = -x.clone());
        }
        diag.push(w.a[k][k].clone());
    }
    Some((diag.len(), diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use num_traits::{One, Zero};

    fn dense_to_sparse(m: &[Vec<i64>]) -> Vec<Vec<(usize, i64)>> {
        m.iter()
            .map(|r| r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (j, v)).collect())
            .collect()
    }

    fn check(m: &[Vec<i64>], want_rank: usize, want: &[i64]) {
        let ncols = m[0].len();
        for snf in [run::<i64>(&dense_to_sparse(m), ncols).unwrap(), run::<BigInt>(&dense_to_sparse(m), ncols).unwrap()] {
            assert_eq!(snf.rank, want_rank);
            let ds: Vec<i64> = snf.factors.iter().map(|f| i64::try_from(&f.d).unwrap()).collect();
            assert_eq!(ds, want);
            for f in &snf.factors {
                // M q = d * (primitive integral vector), and w·q = 1
                let mq: Vec<BigInt> = m
                    .iter()
                    .map(|r| r.iter().zip(&f.column).map(|(a, b)| BigInt::from(*a) * b).sum())
                    .collect();
                assert!(mq.iter().all(|x| x.is_multiple_of(&f.d)));
                let g = mq.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                assert_eq!(g, f.d);
                let dot: BigInt = f.row.iter().zip(&f.column).map(|(a, b)| a * b).sum();
                assert!(dot.is_one());
            }
        }
    }

    #[test]
    fn small_matrices() {
        check(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3, &[2, 6, 12]);
        check(&[vec![2, 0], vec![0, 3]], 2, &[6]);
        check(&[vec![1, 1], vec![1, 1]], 1, &[]);
        check(&[vec![4, 6], vec![6, 9]], 1, &[]);
        check(&[vec![0, 0], vec![0, 0]], 0, &[]);
        check(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2], vec![2, 2, 2]], 3, &[2, 2, 2]);
    }

    #[test]
    fn invariant_factor_product_matches_determinant() {
        // det = 3 * 7 * 2 for a triangular matrix with those diagonal entries
        let m = vec![vec![3, 5, 1], vec![0, 7, 4], vec![0, 0, 2]];
        let ncols = 3;
        let snf = run::<i64>(&dense_to_sparse(&m), ncols).unwrap();
        let prod: BigInt = snf.factors.iter().map(|f| f.d.clone()).product();
        assert_eq!(prod, BigInt::from(42));
    }
}
