//! Smith normal form of sparse integer matrices.
//!
//! Unit pivots are eliminated first in machine integers with checked
//! arithmetic; on overflow the whole pass restarts over `BigInt`. Whatever
//! has no unit entry left is finished densely over `BigInt` with a
//! smallest-absolute-value pivot, ties broken by fewest nonzeros.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::scalar::Scalar;
use crate::matrix::SparseMatrix;

type Row<T> = Vec<(u32, T)>;

/// `a - f * b` over sorted sparse rows; reports columns that became nonzero.
fn row_sub_mul<T: Scalar>(a: &Row<T>, f: &T, b: &Row<T>, fresh: &mut Vec<u32>) -> Option<Row<T>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(u32::MAX, |e| e.0);
        let cb = b.get(j).map_or(u32::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            let v = T::from_i64(0).sub_mul(f, &b[j].1)?;
            if !v.is_nil() {
                fresh.push(cb);
                out.push((cb, v));
            }
            j += 1;
        } else {
            let v = a[i].1.sub_mul(f, &b[j].1)?;
            if !v.is_nil() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

fn lookup<T>(row: &Row<T>, c: u32) -> Option<&T> {
    row.binary_search_by_key(&c, |e| e.0)
        .ok()
        .map(|i| &row[i].1)
}

/// Eliminates every unit pivot it can find. Returns the number of pivots
/// and the rows left over, or `None` if arithmetic overflowed.
fn eliminate_units<T: Scalar>(m: &SparseMatrix) -> Option<(usize, Vec<Row<T>>)> {
    let mut rows: Vec<Row<T>> = vec![Vec::new(); m.rows];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.cols];
    for &(r, c, v) in &m.entries {
        rows[r].push((c as u32, T::from_i64(v)));
        col_rows[c].push(r as u32);
    }
    let mut alive = vec![true; m.rows];
    let mut done = vec![false; m.cols];
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> = (0..m.cols)
        .map(|c| Reverse((col_rows[c].len(), c as u32)))
        .collect();
    let mut rank = 0;
    let mut fresh = Vec::new();

    while let Some(Reverse((estimate, c))) = heap.pop() {
        let cu = c as usize;
        if done[cu] {
            continue;
        }
        let mut live = std::mem::take(&mut col_rows[cu]);
        live.sort_unstable();
        live.dedup();
        live.retain(|&r| alive[r as usize] && lookup(&rows[r as usize], c).is_some());
        if live.is_empty() {
            done[cu] = true;
            continue;
        }
        if live.len() != estimate {
            heap.push(Reverse((live.len(), c)));
            col_rows[cu] = live;
            continue;
        }
        let pivot = live
            .iter()
            .copied()
            .filter(|&r| lookup(&rows[r as usize], c).is_some_and(T::is_unit))
            .min_by_key(|&r| (rows[r as usize].len(), r));
        let Some(p) = pivot else {
            // no unit here for now; revisited if the column changes
            col_rows[cu] = live;
            continue;
        };
        let prow = std::mem::take(&mut rows[p as usize]);
        alive[p as usize] = false;
        let pv = lookup(&prow, c).expect("pivot entry").clone();
        for &r in &live {
            if r == p {
                continue;
            }
            let a = lookup(&rows[r as usize], c).expect("live entry");
            // a / pv == a * pv for a unit pv
            let f = a.mul_unit(&pv)?;
            fresh.clear();
            let updated = row_sub_mul(&rows[r as usize], &f, &prow, &mut fresh)?;
            rows[r as usize] = updated;
            for &c2 in &fresh {
                col_rows[c2 as usize].push(r);
            }
        }
        for &(c2, _) in &prow {
            if c2 != c && !done[c2 as usize] {
                heap.push(Reverse((col_rows[c2 as usize].len(), c2)));
            }
        }
        done[cu] = true;
        rank += 1;
    }

    let residual = rows
        .into_iter()
        .zip(alive)
        .filter(|(row, alive)| *alive && !row.is_empty())
        .map(|(row, _)| row)
        .collect();
    Some((rank, residual))
}

/// Diagonal entries of a dense reduction, not yet in divisibility order.
fn dense_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        // pivot: smallest magnitude, then fewest nonzeros in its row and column
        let mut best: Option<(BigInt, usize, usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j].is_zero() {
                    continue;
                }
                let mag = a[i][j].abs();
                if best.as_ref().is_some_and(|b| mag > b.0) {
                    continue;
                }
                let fill = (t..n).filter(|&jj| !a[i][jj].is_zero()).count()
                    + (t..m).filter(|&ii| !a[ii][j].is_zero()).count();
                if best.as_ref().is_none_or(|b| mag < b.0 || fill < b.1) {
                    best = Some((mag, fill, i, j));
                }
            }
        }
        let Some((_, _, pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..n {
                    let d = &q * &a[t][j];
                    a[i][j] -= d;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..m {
                    let d = &q * &a[i][t];
                    a[i][j] -= d;
                }
                dirty |= !a[t][j].is_zero();
            }
            if !dirty {
                break;
            }
            // a remainder is now smaller than the pivot; move it in
            let mut best = (a[t][t].abs(), t, t);
            for i in t + 1..m {
                if !a[i][t].is_zero() && a[i][t].abs() < best.0 {
                    best = (a[i][t].abs(), i, t);
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() && a[t][j].abs() < best.0 {
                    best = (a[t][j].abs(), t, j);
                }
            }
            let (_, bi, bj) = best;
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

/// Puts nonzero diagonal entries into divisibility order by gcd/lcm swaps.
fn divisibility_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of an integer matrix; `r` is
/// its rank.
pub fn smith_normal_form(m: &SparseMatrix) -> Vec<BigInt> {
    let (units, residual) = match eliminate_units::<i64>(m) {
        Some((rank, rows)) => (
            rank,
            rows.into_iter()
                .map(|r| r.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect())
                .collect(),
        ),
        None => eliminate_units::<BigInt>(m).expect("bigint arithmetic does not overflow"),
    };
    let residual: Vec<Row<BigInt>> = residual;
    let mut factors = vec![BigInt::one(); units];
    if !residual.is_empty() {
        let mut cols: Vec<u32> = residual
            .iter()
            .flat_map(|r| r.iter().map(|e| e.0))
            .collect();
        cols.sort_unstable();
        cols.dedup();
        let dense: Vec<Vec<BigInt>> = residual
            .iter()
            .map(|row| {
                let mut d = vec![BigInt::zero(); cols.len()];
                for (c, v) in row {
                    d[cols.binary_search(c).expect("column present")] = v.to_big();
                }
                d
            })
            .collect();
        factors.extend(divisibility_chain(dense_diagonal(dense)));
    }
    factors
}

/// Rank and the invariant factors greater than one.
pub fn rank_and_torsion(m: &SparseMatrix) -> (usize, Vec<BigInt>) {
    let factors = smith_normal_form(m);
    let rank = factors.len();
    (rank, factors.into_iter().filter(|f| !f.is_one()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf(d: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&SparseMatrix::from_dense(d))
            .into_iter()
            .map(|b| i64::try_from(b).unwrap())
            .collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(snf(&[vec![1, 0], vec![0, 1]]), vec![1, 1]);
        assert_eq!(snf(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(snf(&[vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(snf(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(
            snf(&[vec![6, 0, 0], vec![0, 10, 0], vec![0, 0, 15]]),
            vec![1, 30, 30]
        );
    }

    #[test]
    fn empty_shapes() {
        assert!(smith_normal_form(&SparseMatrix::zeros(0, 5)).is_empty());
        assert!(smith_normal_form(&SparseMatrix::zeros(3, 0)).is_empty());
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        // repeated elimination with large multipliers overflows i64
        let big = i64::MAX / 2;
        let d = vec![vec![1, big, big], vec![big, 1, big], vec![big, big, 1]];
        let f = smith_normal_form(&SparseMatrix::from_dense(&d));
        assert_eq!(f.len(), 3);
        let det = {
            let b = |v: i64| BigInt::from(v);
            let (a, c) = (b(1), b(big));
            &a * (&a * &a - &c * &c) - &c * (&c * &a - &c * &c) + &c * (&c * &c - &a * &c)
        };
        let prod: BigInt = f.iter().product();
        assert_eq!(prod, det.abs());
    }
}
