//! The nerve of the cover of the cloven subcomplex by single-class pieces:
//! one vertex per valid cut class, one simplex per jointly realizable
//! family.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cuts::{jointly_realizable, valid_classes, CutClass};
use crate::error::Result;
use crate::homology::{Graded, HomologySummary};
use crate::matrix::SparseMatrix;
use crate::trees::Arity;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveComplex {
    pub arity: Arity,
    pub vertices: Vec<CutClass>,
    /// `simplices[d]`: sorted vertex-index lists of length `d + 1`, sorted.
    pub simplices: Vec<Vec<Vec<usize>>>,
}

pub fn build_nerve(arity: &Arity) -> Result<NerveComplex> {
    let vertices = valid_classes(arity);
    let mut simplices: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..vertices.len()).rev().map(|v| vec![v]).collect();
    while let Some(simplex) = stack.pop() {
        let d = simplex.len() - 1;
        if simplices.len() <= d {
            simplices.resize(d + 1, Vec::new());
        }
        let last = *simplex.last().expect("nonempty");
        for next in (last + 1..vertices.len()).rev() {
            let mut bigger = simplex.clone();
            bigger.push(next);
            let family: Vec<CutClass> = bigger.iter().map(|&i| vertices[i]).collect();
            // realizability is inherited by subfamilies, so extending
            // realizable families one class at a time finds them all
            if jointly_realizable(&family, arity)? {
                stack.push(bigger);
            }
        }
        simplices[d].push(simplex);
    }
    for level in &mut simplices {
        level.sort_unstable();
    }
    Ok(NerveComplex {
        arity: arity.clone(),
        vertices,
        simplices,
    })
}

impl NerveComplex {
    /// `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn classes_of(&self, simplex: &[usize]) -> Vec<CutClass> {
        simplex.iter().map(|&i| self.vertices[i]).collect()
    }

    /// Every simplex as a family of classes, lowest dimension first.
    pub fn families(&self) -> impl Iterator<Item = Vec<CutClass>> + '_ {
        self.simplices.iter().flatten().map(|s| self.classes_of(s))
    }

    /// Maximal simplices.
    pub fn facets(&self) -> Vec<Vec<CutClass>> {
        let mut covered: HashSet<&[usize]> = HashSet::new();
        let mut faces: Vec<Vec<usize>> = Vec::new();
        for level in &self.simplices {
            for s in level {
                for skip in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(skip);
                    faces.push(face);
                }
            }
        }
        covered.extend(faces.iter().map(Vec::as_slice));
        self.simplices
            .iter()
            .flatten()
            .filter(|s| !covered.contains(s.as_slice()))
            .map(|s| self.classes_of(s))
            .collect()
    }

    /// Simplicial cochains with the alternating-face coboundary.
    pub fn graded(&self) -> Graded {
        let dims = self.f_vector();
        let maps = (0..self.simplices.len().saturating_sub(1))
            .map(|d| {
                let index: HashMap<&[usize], usize> = self.simplices[d]
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.as_slice(), i))
                    .collect();
                let triplets = self.simplices[d + 1]
                    .iter()
                    .enumerate()
                    .flat_map(|(row, tau)| {
                        let index = &index;
                        (0..tau.len()).map(move |i| {
                            let mut face = tau.clone();
                            face.remove(i);
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            (row, index[face.as_slice()], sign)
                        })
                    });
                SparseMatrix::from_triplets(dims[d + 1], dims[d], triplets)
            })
            .collect();
        Graded::new(dims, maps)
    }

    /// One facet per line, classes separated by spaces.
    pub fn to_facet_list(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "% nerve of {}: {} vertices, f-vector {:?}",
            self.arity,
            self.vertices.len(),
            self.f_vector()
        )
        .unwrap();
        for facet in self.facets() {
            let line: Vec<String> = facet.iter().map(ToString::to_string).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

pub fn nerve_homology(nerve: &NerveComplex) -> HomologySummary {
    nerve.graded().both_reduced().1
}
