//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use cloven::trees::{Arity, Edge, PlanarTreeCell, Port, RotationSystem};

enum Token {
    Leaf,
    Open(bool),
    Close,
}

/// Every valid cell of `arity`, by brute force: all planar trees hanging
/// off leaf 0 with the leaves in counterclockwise order and at most
/// `N + k - 3` internal vertices, each internal edge in both directions,
/// filtered by `validate`. Vertices are numbered in reverse creation order
/// so canonicalization has work to do.
pub fn brute_force_keys(arity: &Arity) -> BTreeSet<String> {
    let n = arity.n_leaves();
    let max_vertices = n + arity.k() - 3;
    let mut out = BTreeSet::new();
    let mut tokens = Vec::new();
    // depth stack of child counts; the root is always open
    let mut children = vec![0usize];
    grow(
        n,
        max_vertices,
        1,
        1,
        &mut children,
        &mut tokens,
        arity,
        &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn grow(
    n: usize,
    max_vertices: usize,
    next_leaf: usize,
    vertices: usize,
    children: &mut Vec<usize>,
    tokens: &mut Vec<Token>,
    arity: &Arity,
    out: &mut BTreeSet<String>,
) {
    if children.len() == 1 && next_leaf == n {
        if children[0] > 0 {
            if let Some(key) = realize(n, tokens, arity) {
                out.insert(key);
            }
        }
        return;
    }
    if next_leaf < n {
        *children.last_mut().unwrap() += 1;
        tokens.push(Token::Leaf);
        grow(
            n,
            max_vertices,
            next_leaf + 1,
            vertices,
            children,
            tokens,
            arity,
            out,
        );
        tokens.pop();
        *children.last_mut().unwrap() -= 1;
    }
    if vertices < max_vertices && next_leaf < n {
        for away in [true, false] {
            *children.last_mut().unwrap() += 1;
            children.push(0);
            tokens.push(Token::Open(away));
            grow(
                n,
                max_vertices,
                next_leaf,
                vertices + 1,
                children,
                tokens,
                arity,
                out,
            );
            tokens.pop();
            children.pop();
            *children.last_mut().unwrap() -= 1;
        }
    }
    if children.len() > 1 && *children.last().unwrap() > 0 {
        let closed = children.pop().unwrap();
        tokens.push(Token::Close);
        grow(
            n,
            max_vertices,
            next_leaf,
            vertices,
            children,
            tokens,
            arity,
            out,
        );
        tokens.pop();
        children.push(closed);
    }
}

fn realize(n: usize, tokens: &[Token], arity: &Arity) -> Option<String> {
    let total = 1 + tokens
        .iter()
        .filter(|t| matches!(t, Token::Open(_)))
        .count();
    let label = |created: usize| total - 1 - created;
    let mut rotations = vec![Vec::new(); total];
    let mut edges = Vec::new();
    let mut stack = vec![label(0)];
    rotations[label(0)].push(Port::Leaf(0));
    let (mut created, mut leaf) = (1, 1);
    for t in tokens {
        let here = *stack.last().unwrap();
        match t {
            Token::Leaf => {
                rotations[here].push(Port::Leaf(leaf));
                leaf += 1;
            }
            Token::Open(away) => {
                let child = label(created);
                created += 1;
                let e = edges.len();
                edges.push(if *away {
                    Edge {
                        tail: here,
                        head: child,
                    }
                } else {
                    Edge {
                        tail: child,
                        head: here,
                    }
                });
                rotations[here].push(Port::Edge(e));
                rotations[child].push(Port::Edge(e));
                stack.push(child);
            }
            Token::Close => {
                stack.pop();
            }
        }
    }
    let rs = RotationSystem {
        n_leaves: n,
        rotations,
        edges,
    };
    PlanarTreeCell::new(rs, arity)
        .ok()
        .map(|c| c.key().to_string())
}

/// Invariant factors from determinantal divisors: `d_j` is the gcd of all
/// `j x j` minors and the factors are `d_j / d_{j-1}`.
pub fn invariant_factors_by_minors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut factors = Vec::new();
    let mut prev = BigInt::from(1);
    for j in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for r in subsets(rows, j) {
            for c in subsets(cols, j) {
                let minor: Vec<Vec<BigInt>> = r
                    .iter()
                    .map(|&i| c.iter().map(|&l| BigInt::from(m[i][l])).collect())
                    .collect();
                g = g.gcd(&determinant(minor));
            }
        }
        if g.is_zero() {
            break;
        }
        factors.push(&g / &prev);
        prev = g;
    }
    factors
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n {
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
    sign * a[n - 1][n - 1].clone()
}

/// Rank over the rationals by fraction-free elimination.
pub fn rational_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        for i in rank + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let (x, y) = (a[rank][c].clone(), a[i][c].clone());
            for j in 0..cols {
                let v = &a[i][j] * &x - &a[rank][j] * &y;
                a[i][j] = v;
            }
        }
        rank += 1;
    }
    rank
}

pub fn abs_sorted(v: &[BigInt]) -> Vec<BigInt> {
    v.iter().map(|x| x.abs()).collect()
}
