//! Smith forms and the reduction pipeline against slow exact oracles.

mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cloven::homology::{
    columns_of, rank_and_torsion, reduce, reduce_labelled, smith_normal_form, Graded,
};
use cloven::matrix::SparseMatrix;

fn random_matrix(
    rng: &mut StdRng,
    rows: usize,
    cols: usize,
    bound: i64,
    density: f64,
) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.gen_bool(density) {
                        rng.gen_range(-bound..=bound)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn smith_form_matches_determinantal_divisors() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    for trial in 0..1000 {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=8);
        let density = [0.3, 0.6, 1.0][trial % 3];
        let m = random_matrix(&mut rng, rows, cols, 10, density);
        let expected = common::invariant_factors_by_minors(&m);
        let got = common::abs_sorted(&smith_normal_form(&SparseMatrix::from_dense(&m)));
        assert_eq!(got, expected, "trial {trial}: {m:?}");
        assert_eq!(got.len(), common::rational_rank(&m), "trial {trial}");
    }
}

#[test]
fn smith_form_of_low_rank_products() {
    // products of thin factors have rank at most the inner dimension
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for trial in 0..200 {
        let inner = rng.gen_range(1..=3);
        let a = random_matrix(&mut rng, 7, inner, 6, 1.0);
        let b = random_matrix(&mut rng, inner, 7, 6, 1.0);
        let m: Vec<Vec<i64>> = (0..7)
            .map(|i| {
                (0..7)
                    .map(|j| (0..inner).map(|l| a[i][l] * b[l][j]).sum())
                    .collect()
            })
            .collect();
        let expected = common::invariant_factors_by_minors(&m);
        let got = common::abs_sorted(&smith_normal_form(&SparseMatrix::from_dense(&m)));
        assert_eq!(got, expected, "trial {trial}");
        assert!(got.len() <= inner);
    }
}

#[test]
fn large_entries_fall_back_to_bignums() {
    let big = i64::MAX / 3;
    let m = vec![vec![big, big - 1], vec![big - 1, big - 2]];
    let expected = common::invariant_factors_by_minors(&m);
    let got = common::abs_sorted(&smith_normal_form(&SparseMatrix::from_dense(&m)));
    assert_eq!(got, expected);
}

/// Simplicial cochain complex of the downward closure of `facets`.
fn simplicial(facets: &[Vec<usize>]) -> Graded {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for f in facets {
        let n = f.len();
        for mask in 1u32..(1 << n) {
            let s: Vec<usize> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| f[i])
                .collect();
            faces.insert(s);
        }
    }
    let top = faces.iter().map(Vec::len).max().unwrap_or(0);
    let by_dim: Vec<Vec<Vec<usize>>> = (1..=top)
        .map(|d| faces.iter().filter(|f| f.len() == d).cloned().collect())
        .collect();
    let dims: Vec<usize> = by_dim.iter().map(Vec::len).collect();
    let maps = (0..top.saturating_sub(1))
        .map(|d| {
            let mut t = Vec::new();
            for (c, face) in by_dim[d + 1].iter().enumerate() {
                for skip in 0..face.len() {
                    let mut sub = face.clone();
                    sub.remove(skip);
                    let r = by_dim[d].binary_search(&sub).unwrap();
                    t.push((c, r, if skip % 2 == 0 { 1 } else { -1 }));
                }
            }
            // cochain map: transpose of the boundary
            SparseMatrix::from_triplets(dims[d + 1], dims[d], t)
        })
        .collect();
    Graded::new(dims, maps)
}

fn rp2() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2],
        vec![0, 2, 3],
        vec![0, 3, 4],
        vec![0, 4, 5],
        vec![0, 1, 5],
        vec![1, 2, 4],
        vec![2, 3, 5],
        vec![1, 3, 4],
        vec![1, 3, 5],
        vec![2, 4, 5],
    ]
}

#[test]
fn known_spaces() {
    // projective plane: H_1 = Z/2, H^2 = Z/2
    let g = simplicial(&rp2());
    assert!(g.square_defects().is_empty());
    let (co, ho) = g.both();
    assert_eq!(ho.betti(), vec![1, 0, 0]);
    assert_eq!(co.betti(), vec![1, 0, 0]);
    assert_eq!(ho.groups[1].torsion, vec![BigInt::from(2)]);
    assert_eq!(co.groups[2].torsion, vec![BigInt::from(2)]);
    assert_eq!(g.both_reduced(), (co, ho));

    // boundary of a tetrahedron is a 2-sphere
    let sphere: Vec<Vec<usize>> = (0..4)
        .map(|skip| (0..4).filter(|&v| v != skip).collect())
        .collect();
    let (co, _) = simplicial(&sphere).both_reduced();
    assert_eq!(co.betti(), vec![1, 0, 1]);

    // wedge of three circles
    let (_, ho) = simplicial(&[
        vec![0, 1],
        vec![1, 2],
        vec![0, 2],
        vec![0, 3],
        vec![3, 4],
        vec![0, 4],
        vec![0, 5],
        vec![5, 6],
        vec![0, 6],
    ])
    .both();
    assert_eq!(ho.betti(), vec![1, 3]);
}

fn random_complex(rng: &mut StdRng) -> Vec<Vec<usize>> {
    let n = rng.gen_range(4..=8);
    let facets = rng.gen_range(2..=9);
    (0..facets)
        .map(|_| {
            let size = rng.gen_range(2..=4);
            let mut f: Vec<usize> = Vec::new();
            while f.len() < size {
                let v = rng.gen_range(0..n);
                if !f.contains(&v) {
                    f.push(v);
                }
            }
            f.sort_unstable();
            f
        })
        .collect()
}

#[test]
fn reduction_agrees_with_direct_smith_forms() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for trial in 0..300 {
        let g = simplicial(&random_complex(&mut rng));
        let direct = g.both();
        let reduced = reduce(&g.dims, &columns_of(&g)).both();
        assert_eq!(reduced, direct, "trial {trial}");
        for (s, m) in g.maps.iter().enumerate() {
            let (rank, _) = rank_and_torsion(m);
            assert_eq!(
                rank,
                common::rational_rank(&m.to_dense()),
                "trial {trial} map {s}"
            );
        }
    }
}

/// Apply random elementary row and column operations, changing the basis of
/// each degree by a unimodular matrix.
fn conjugate(g: &Graded, rng: &mut StdRng) -> Graded {
    let mut dense: Vec<Vec<Vec<i64>>> = g.maps.iter().map(SparseMatrix::to_dense).collect();
    for s in 0..g.dims.len() {
        for _ in 0..2 * g.dims[s] {
            if g.dims[s] < 2 {
                break;
            }
            let i = rng.gen_range(0..g.dims[s]);
            let mut j = rng.gen_range(0..g.dims[s]);
            while j == i {
                j = rng.gen_range(0..g.dims[s]);
            }
            let c: i64 = rng.gen_range(-2..=2);
            // new basis e_i' = e_i + c e_j in degree s
            // outgoing map: column i += c * column j
            if s < dense.len() {
                for row in dense[s].iter_mut() {
                    row[i] += c * row[j];
                }
            }
            // incoming map: row j -= c * row i
            if s > 0 {
                let m = &mut dense[s - 1];
                let ri = m[i].clone();
                for (x, y) in m[j].iter_mut().zip(ri) {
                    *x -= c * y;
                }
            }
        }
    }
    let maps = dense
        .iter()
        .zip(&g.maps)
        .map(|(d, orig)| {
            // from_dense loses the column count of a matrix with no rows
            let mut m = SparseMatrix::from_dense(d);
            m.cols = orig.cols;
            m
        })
        .collect();
    Graded::new(g.dims.clone(), maps)
}

#[test]
fn homology_is_invariant_under_change_of_basis() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    for trial in 0..150 {
        let facets = if trial == 0 {
            rp2()
        } else {
            random_complex(&mut rng)
        };
        let g = simplicial(&facets);
        let h = conjugate(&g, &mut rng);
        assert!(h.square_defects().is_empty(), "trial {trial}");
        let expected = g.both();
        assert_eq!(h.both(), expected, "trial {trial}");
        assert_eq!(h.both_reduced(), expected, "trial {trial}");
    }
}

#[test]
fn labelled_reduction_only_restricts_pairings() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    for trial in 0..100 {
        let g = simplicial(&random_complex(&mut rng));
        let total: usize = g.dims.iter().sum();
        let labels: Vec<u32> = (0..total).map(|_| rng.gen_range(0..3)).collect();
        let cols = columns_of(&g);
        let (residual, kept) = reduce_labelled(&g.dims, labels, |s, j, out| {
            if let Some(c) = cols.get(s) {
                out.extend_from_slice(&c[j]);
            }
        });
        assert_eq!(residual.both(), g.both(), "trial {trial}");
        for (s, k) in kept.iter().enumerate() {
            assert_eq!(k.len(), residual.dims[s]);
            assert!(k.iter().all(|&i| (i as usize) < g.dims[s]));
        }
    }
}
