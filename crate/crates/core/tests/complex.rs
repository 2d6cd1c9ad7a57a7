//! The cochain complex of an arity: δ² = 0 on every piece, bookkeeping,
//! and invariance of homology under conventions.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cloven::complex::{CellComplex, ComplexTag};
use cloven::cuts::{valid_classes, ClassSet, CutClass};
use cloven::nerve::build_nerve;
use cloven::trees::{
    arities_up_to, enumerate_cells, enumerate_keys, Arity, CellKey, PlanarTreeCell,
    DEFAULT_SIZE_GUARD,
};

fn ar(s: &str) -> Arity {
    s.parse().unwrap()
}

fn full(a: &Arity) -> CellComplex {
    CellComplex::build_full(a, DEFAULT_SIZE_GUARD).unwrap()
}

fn small_arities() -> Vec<Arity> {
    arities_up_to(6, 2, 6)
}

#[test]
fn every_piece_squares_to_zero() {
    for a in small_arities() {
        let f = full(&a);
        assert!(f.graded().square_defects().is_empty(), "{a}");
        let (y, clov) = f.split_y_and_clov().unwrap();
        assert!(y.graded().square_defects().is_empty(), "{a}");
        assert!(clov.graded().square_defects().is_empty(), "{a}");
        for family in build_nerve(&a).unwrap().families() {
            let sub = f.subfamily_complex(&family);
            assert!(sub.graded().square_defects().is_empty(), "{a} {family:?}");
            assert_eq!(sub.square_defect(), None);
        }
        assert_eq!(f.class_growth_witness(), None, "{a}");
    }
}

#[test]
fn differential_entries_and_degrees() {
    for a in small_arities() {
        let f = full(&a);
        assert_eq!(f.n_degrees(), a.max_syzygy() + 1, "{a}");
        for s in 0..f.n_degrees().saturating_sub(1) {
            let d = f.differential(s);
            assert_eq!((d.rows, d.cols), (f.dim(s + 1), f.dim(s)));
            assert!(d.entries.iter().all(|e| e.2 == 1 || e.2 == -1), "{a}");
            // every entry is a contraction, which removes one vertex
            for &(r, c, _) in &d.entries {
                let src = f.cell(s, c).key.n_vertices();
                let dst = f.cell(s + 1, r).key.n_vertices();
                assert_eq!(src, dst + 1);
            }
        }
        for s in 0..f.n_degrees() {
            for c in f.cells(s) {
                let cell = PlanarTreeCell::new(c.key.decode(), &a).unwrap();
                assert_eq!(cell.syzygy_degree(), s);
            }
        }
    }
}

#[test]
fn split_bookkeeping() {
    for a in small_arities() {
        let f = full(&a);
        let (y, clov) = f.split_y_and_clov().unwrap();
        assert_eq!(y.tag(), &ComplexTag::YPart);
        assert_eq!(clov.tag(), &ComplexTag::ClovQuotient);
        let shift = a.k() - 1;
        for s in 0..f.n_degrees() {
            let from_y = s.checked_sub(shift).map_or(0, |t| y.dim(t));
            assert_eq!(f.dim(s), from_y + clov.dim(s), "{a} s={s}");
            assert!(y.cells(s).all(|c| c.classes.is_empty()));
            assert!(clov.cells(s).all(|c| !c.classes.is_empty()));
        }
        assert_eq!(f.total_cells(), y.total_cells() + clov.total_cells());
    }
}

#[test]
fn census_examples() {
    let f = full(&ar("(2;1,0)"));
    assert_eq!(f.census(), vec![2, 1]);
    assert_eq!(cloven::homology::rank_and_torsion(&f.differential(0)).0, 1);

    let f = full(&ar("(2;0,0)"));
    assert_eq!(f.census(), vec![1]);

    let f = full(&ar("(3;0,0,0)"));
    assert_eq!(f.census(), vec![3, 3, 1]);
    assert_eq!(cloven::homology::rank_and_torsion(&f.differential(0)).0, 2);
    assert_eq!(cloven::homology::rank_and_torsion(&f.differential(1)).0, 1);
}

#[test]
fn split_examples() {
    let (y, clov) = full(&ar("(2;0,0)")).split_y_and_clov().unwrap();
    assert!(y.is_empty());
    assert_eq!(clov.census(), vec![1]);

    let (y, clov) = full(&ar("(2;1,0)")).split_y_and_clov().unwrap();
    assert_eq!(y.census(), vec![1]);
    assert_eq!(clov.census()[0], 2);
    assert_eq!(clov.total_cells(), 2);

    let (y, clov) = full(&ar("(3;0,0,0)")).split_y_and_clov().unwrap();
    assert_eq!(y.census(), vec![1]);
    assert_eq!(clov.census()[..2], [3, 3]);
    assert_eq!(clov.total_cells(), 6);
}

#[test]
fn subfamily_examples() {
    let f = full(&ar("(2;1,0)"));
    let sub = f.subfamily_complex(&[CutClass::new(0, 2)]);
    assert_eq!(sub.total_cells(), 1);

    let f = full(&ar("(3;0,0,0)"));
    let sub = f.subfamily_complex(&[CutClass::new(0, 1), CutClass::new(1, 2)]);
    assert_eq!(sub.total_cells(), 1);

    // (2;2,0): gaps 0 and 1 both lie between inputs, so {g0,g1} cuts off
    // only input leaf 1
    let a = ar("(2;2,0)");
    let bad = CutClass::new(0, 1);
    assert!(!valid_classes(&a).contains(&bad));
    assert!(full(&a).subfamily_complex(&[bad]).is_empty());
}

#[test]
fn filtered_reduction_matches_direct_subfamily_homology() {
    for a in small_arities() {
        let f = full(&a);
        let red = f.class_filtered_reduction();
        for family in build_nerve(&a).unwrap().families() {
            let set: ClassSet = family.iter().copied().collect();
            let sub = f.subfamily_complex(&family);
            let (co, ho) = red.subfamily_homology(set);
            assert_eq!(
                co.betti_trimmed(),
                sub.cohomology().betti_trimmed(),
                "{a} {family:?}"
            );
            assert_eq!(
                ho.betti_trimmed(),
                sub.chain_homology().betti_trimmed(),
                "{a} {family:?}"
            );
            assert!(co.is_torsion_free() && ho.is_torsion_free());
        }
    }
}

#[test]
fn known_homology() {
    // contractible full complexes, bouquet shape of the quotient
    let f = full(&ar("(2;1,0)"));
    assert!(f.cohomology().is_point_at(0));
    let (_, clov) = f.split_y_and_clov().unwrap();
    assert_eq!(clov.cohomology().betti_trimmed(), vec![2]);

    let (_, clov) = full(&ar("(2;1,1)")).split_y_and_clov().unwrap();
    assert_eq!(clov.cohomology().betti_trimmed(), vec![4]);

    let (y, clov) = full(&ar("(3;0,0,0)")).split_y_and_clov().unwrap();
    let h = clov.cohomology();
    assert_eq!(h.betti_trimmed(), vec![1, 1]);
    assert!(h.is_torsion_free());
    assert!(y.cohomology().is_point_at(0));

    for i in 0..=3 {
        for j in 0..=3 - i.min(3) {
            if i + j + 2 > 7 {
                continue;
            }
            let a = Arity::new(vec![i, j]).unwrap();
            let (_, clov) = full(&a).split_y_and_clov().unwrap();
            assert_eq!(
                clov.cohomology().betti_trimmed(),
                vec![(i + 1) * (j + 1)],
                "{a}"
            );
        }
    }
}

#[test]
fn universal_coefficients() {
    for a in small_arities() {
        let f = full(&a);
        let (y, clov) = f.split_y_and_clov().unwrap();
        for c in [&f, &y, &clov] {
            let (co, ho) = c.homology_pair();
            assert!(
                co.is_torsion_free() && ho.is_torsion_free(),
                "{a} {}",
                c.tag()
            );
            assert_eq!(co.betti(), ho.betti(), "{a} {}", c.tag());
            let alternating: i64 = co
                .betti()
                .iter()
                .enumerate()
                .map(|(s, &b)| if s % 2 == 0 { b as i64 } else { -(b as i64) })
                .sum();
            assert_eq!(alternating, co.euler_characteristic);
        }
    }
}

#[test]
fn listings_and_digests_are_stable() {
    let a = ar("(3;1,0,0)");
    let one = full(&a);
    let two = full(&a);
    assert_eq!(one.to_listing(), two.to_listing());
    assert_eq!(one.digest(), two.digest());
    assert_ne!(one.digest(), full(&ar("(3;0,1,0)")).digest());
    let listing = one.to_listing();
    let entries = listing.lines().filter(|l| !l.starts_with('%')).count();
    let nnz: usize = (0..one.n_degrees() - 1)
        .map(|s| one.differential(s).nnz())
        .sum();
    assert!(entries >= nnz);
}

fn arity_strategy(max_leaves: usize) -> impl Strategy<Value = Arity> {
    let all = arities_up_to(max_leaves, 2, max_leaves);
    proptest::sample::select(all)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homology_ignores_cell_orientations(a in arity_strategy(5), seed in any::<u64>()) {
        let f = full(&a);
        let mut rng = StdRng::seed_from_u64(seed);
        let flips: Vec<Vec<bool>> = (0..f.n_degrees())
            .map(|s| (0..f.dim(s)).map(|_| rng.gen()).collect())
            .collect();
        let flipped = f.graded_with_flips(&flips);
        prop_assert!(flipped.square_defects().is_empty());
        prop_assert_eq!(flipped.both(), f.graded().both());
    }

    #[test]
    fn homology_is_rotation_invariant(a in arity_strategy(6)) {
        let b = a.rotated();
        let (fa, fb) = (full(&a), full(&b));
        prop_assert_eq!(fa.census(), fb.census());
        let (ya, ca) = fa.split_y_and_clov().unwrap();
        let (yb, cb) = fb.split_y_and_clov().unwrap();
        prop_assert_eq!(ya.cohomology().betti(), yb.cohomology().betti());
        prop_assert_eq!(ca.cohomology().betti(), cb.cohomology().betti());
        prop_assert_eq!(build_nerve(&a).unwrap().f_vector(), build_nerve(&b).unwrap().f_vector());
    }

    #[test]
    fn keys_round_trip(a in arity_strategy(7), pick in any::<prop::sample::Index>()) {
        let keys = enumerate_keys(&a, DEFAULT_SIZE_GUARD).unwrap();
        let key = pick.get(&keys).clone();
        let cell = PlanarTreeCell::new(key.decode(), &a).unwrap();
        prop_assert_eq!(&cell.key(), &key);
        let text = key.to_string();
        prop_assert_eq!(text.parse::<CellKey>().unwrap(), key);
    }
}

#[test]
fn enumerated_cells_are_canonical() {
    for a in arities_up_to(5, 2, 5) {
        for cell in enumerate_cells(&a, DEFAULT_SIZE_GUARD).unwrap() {
            let again = PlanarTreeCell::new(cell.rotation_system().clone(), &a).unwrap();
            assert_eq!(again, cell);
        }
    }
}
