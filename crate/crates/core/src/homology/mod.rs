//! Exact integer (co)homology of graded complexes.

mod les;
mod reduce;
mod scalar;
mod snf;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::SparseMatrix;
pub use les::{les_consistency, LesViolation};
pub use reduce::{columns_of, reduce, reduce_labelled, reduce_with, Columns};
pub use snf::{rank_and_torsion, smith_normal_form};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variance {
    /// `ker d_s / im d_{s-1}` for the degree-raising maps.
    Cohomology,
    /// Homology of the transposed, degree-lowering maps.
    Homology,
}

/// One homology group: free rank and torsion coefficients `t_1 | t_2 | ...`,
/// each greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub degree: usize,
    pub rank: usize,
    #[serde(with = "decimal_list")]
    pub torsion: Vec<BigInt>,
}

/// Betti numbers and torsion of a complex in every degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub variance: Variance,
    pub groups: Vec<Group>,
    pub euler_characteristic: i64,
}

impl HomologySummary {
    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.rank).collect()
    }

    pub fn rank(&self, degree: usize) -> usize {
        self.groups.get(degree).map_or(0, |g| g.rank)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.groups.iter().all(|g| g.torsion.is_empty())
    }

    /// Degrees carrying a nonzero group.
    pub fn support(&self) -> Vec<usize> {
        self.groups
            .iter()
            .filter(|g| g.rank > 0 || !g.torsion.is_empty())
            .map(|g| g.degree)
            .collect()
    }

    /// Betti numbers with trailing zeros removed.
    pub fn betti_trimmed(&self) -> Vec<usize> {
        let mut b = self.betti();
        while b.last() == Some(&0) {
            b.pop();
        }
        b
    }

    /// Free of rank one in `degree`, zero elsewhere.
    pub fn is_point_at(&self, degree: usize) -> bool {
        self.is_torsion_free()
            && self
                .groups
                .iter()
                .all(|g| g.rank == usize::from(g.degree == degree))
    }
}

/// A cochain complex of free abelian groups: `dims[s]` generators in degree
/// `s` and `maps[s]: C^s -> C^{s+1}` as a `dims[s+1] x dims[s]` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graded {
    pub dims: Vec<usize>,
    pub maps: Vec<SparseMatrix>,
}

impl Graded {
    pub fn new(dims: Vec<usize>, maps: Vec<SparseMatrix>) -> Self {
        assert_eq!(
            maps.len() + 1,
            dims.len().max(1),
            "one map between consecutive degrees"
        );
        for (s, m) in maps.iter().enumerate() {
            assert_eq!(
                (m.rows, m.cols),
                (dims[s + 1], dims[s]),
                "map {s} has the wrong shape"
            );
        }
        Graded { dims, maps }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(s, &d)| if s % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Degrees `s` where `maps[s+1] * maps[s]` is nonzero.
    pub fn square_defects(&self) -> Vec<usize> {
        (0..self.maps.len().saturating_sub(1))
            .filter(|&s| !self.maps[s + 1].mul(&self.maps[s]).is_zero())
            .collect()
    }

    /// Rank and torsion of every map, one Smith form each.
    pub fn map_invariants(&self) -> Vec<(usize, Vec<BigInt>)> {
        self.maps.par_iter().map(rank_and_torsion).collect()
    }

    pub fn cohomology(&self) -> HomologySummary {
        summarize(self, &self.map_invariants(), Variance::Cohomology)
    }

    pub fn homology(&self) -> HomologySummary {
        summarize(self, &self.map_invariants(), Variance::Homology)
    }

    /// Both summaries from a single set of Smith forms.
    pub fn both(&self) -> (HomologySummary, HomologySummary) {
        let inv = self.map_invariants();
        (
            summarize(self, &inv, Variance::Cohomology),
            summarize(self, &inv, Variance::Homology),
        )
    }

    /// Same answers as [`Self::both`], computed by first reducing the whole
    /// complex and then taking Smith forms of the small residue.
    pub fn both_reduced(&self) -> (HomologySummary, HomologySummary) {
        reduce(&self.dims, &columns_of(self)).both()
    }
}

fn summarize(g: &Graded, inv: &[(usize, Vec<BigInt>)], variance: Variance) -> HomologySummary {
    let rank_of = |s: Option<usize>| s.and_then(|s| inv.get(s)).map_or(0, |x| x.0);
    let groups = (0..g.dims.len())
        .map(|s| {
            let incoming = s.checked_sub(1);
            let rank = g.dims[s] - rank_of(Some(s)) - rank_of(incoming);
            // H^s picks up torsion from the map into degree s; H_s from the
            // transpose of the map out of degree s
            let torsion = match variance {
                Variance::Cohomology => incoming
                    .and_then(|i| inv.get(i))
                    .map_or(Vec::new(), |x| x.1.clone()),
                Variance::Homology => inv.get(s).map_or(Vec::new(), |x| x.1.clone()),
            };
            Group {
                degree: s,
                rank,
                torsion,
            }
        })
        .collect();
    HomologySummary {
        variance,
        groups,
        euler_characteristic: g.euler_characteristic(),
    }
}

mod decimal_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(d: &[Vec<i64>]) -> SparseMatrix {
        SparseMatrix::from_dense(d)
    }

    #[test]
    fn circle() {
        // two vertices, two edges: C^0 -> C^1
        let g = Graded::new(vec![2, 2], vec![m(&[vec![-1, 1], vec![-1, 1]])]);
        let (co, ho) = g.both();
        assert_eq!(co.betti(), vec![1, 1]);
        assert_eq!(ho.betti(), vec![1, 1]);
        assert_eq!(co.euler_characteristic, 0);
    }

    #[test]
    fn torsion_lands_in_the_right_degree() {
        // C^0 --2--> C^1: cohomology Z/2 in degree 1, homology Z/2 in degree 0
        let g = Graded::new(vec![1, 1], vec![m(&[vec![2]])]);
        let (co, ho) = g.both();
        assert_eq!(co.betti(), vec![0, 0]);
        assert_eq!(co.groups[1].torsion, vec![BigInt::from(2)]);
        assert!(co.groups[0].torsion.is_empty());
        assert_eq!(ho.groups[0].torsion, vec![BigInt::from(2)]);
        assert!(!co.is_torsion_free());
    }

    #[test]
    fn point_detection() {
        let g = Graded::new(vec![1], vec![]);
        assert!(g.cohomology().is_point_at(0));
        let empty = Graded::new(vec![], vec![]);
        assert!(empty.cohomology().groups.is_empty());
    }
}
