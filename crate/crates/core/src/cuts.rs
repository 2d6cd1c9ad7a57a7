//! Saddle-cut classes and their joint realizability as a noncrossing
//! lamination of the boundary disk.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trees::{Arity, LeafRole};

/// An unordered pair of distinct boundary gaps, `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", from = "[usize; 2]")]
pub struct CutClass {
    lo: usize,
    hi: usize,
}

impl CutClass {
    /// # Panics
    /// If `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "a cut class joins two distinct gaps");
        CutClass {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn gaps(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    /// Leaves strictly between the two gaps going counterclockwise from `lo`,
    /// i.e. `lo+1 ..= hi`.
    pub fn inner_arc(&self) -> std::ops::RangeInclusive<usize> {
        self.lo + 1..=self.hi
    }

    pub fn shares_gap(&self, other: &CutClass) -> bool {
        self.lo == other.lo || self.lo == other.hi || self.hi == other.lo || self.hi == other.hi
    }

    /// Whether the two chords must cross: four distinct gaps alternating
    /// around the circle.
    pub fn interleaves(&self, other: &CutClass) -> bool {
        if self.shares_gap(other) {
            return false;
        }
        let inside = |g: usize| self.lo < g && g < self.hi;
        inside(other.lo) != inside(other.hi)
    }

    /// Whether both arcs cut off by the class contain an output.
    pub fn is_valid(&self, arity: &Arity) -> bool {
        let roles = arity.boundary_sequence();
        if self.hi >= roles.len() {
            return false;
        }
        let inner = self.inner_arc().any(|p| roles[p] == LeafRole::Output);
        let outer = (0..roles.len())
            .filter(|p| !self.inner_arc().contains(p))
            .any(|p| roles[p] == LeafRole::Output);
        inner && outer
    }
}

impl From<[usize; 2]> for CutClass {
    fn from([a, b]: [usize; 2]) -> Self {
        CutClass::new(a, b)
    }
}

impl From<CutClass> for [usize; 2] {
    fn from(c: CutClass) -> Self {
        [c.lo, c.hi]
    }
}

impl fmt::Display for CutClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{g{},g{}}}", self.lo, self.hi)
    }
}

impl CutClass {
    /// Position in a [`ClassSet`]: `hi * (hi - 1) / 2 + lo`.
    pub fn index(&self) -> usize {
        self.hi * (self.hi - 1) / 2 + self.lo
    }

    pub fn from_index(index: usize) -> CutClass {
        let mut hi = 1;
        while (hi + 1) * hi / 2 <= index {
            hi += 1;
        }
        CutClass::new(index - hi * (hi - 1) / 2, hi)
    }
}

/// A set of cut classes over at most 16 gaps, as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassSet(u128);

impl ClassSet {
    pub const EMPTY: ClassSet = ClassSet(0);

    pub fn insert(&mut self, c: CutClass) {
        self.0 |= 1 << c.index();
    }

    pub fn contains(&self, c: CutClass) -> bool {
        self.0 >> c.index() & 1 == 1
    }

    pub fn is_superset(&self, other: ClassSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    /// The classes, sorted.
    pub fn to_vec(&self) -> Vec<CutClass> {
        let mut out: Vec<CutClass> = (0..128)
            .filter(|i| self.0 >> i & 1 == 1)
            .map(CutClass::from_index)
            .collect();
        out.sort_unstable();
        out
    }
}

impl FromIterator<CutClass> for ClassSet {
    fn from_iter<I: IntoIterator<Item = CutClass>>(iter: I) -> Self {
        let mut set = ClassSet::EMPTY;
        for c in iter {
            set.insert(c);
        }
        set
    }
}

/// All classes whose two arcs each keep an output, sorted.
pub fn valid_classes(arity: &Arity) -> Vec<CutClass> {
    let n = arity.n_leaves();
    let mut out = Vec::new();
    for lo in 0..n {
        for hi in lo + 1..n {
            let c = CutClass::new(lo, hi);
            if c.is_valid(arity) {
                out.push(c);
            }
        }
    }
    out
}

fn check_family(classes: &[CutClass], arity: &Arity) -> Result<()> {
    for (i, c) in classes.iter().enumerate() {
        if classes[..i].contains(c) {
            return Err(Error::DuplicateClass(*c));
        }
        if !c.is_valid(arity) {
            return Err(Error::InvalidClass(*c));
        }
    }
    Ok(())
}

fn first_interleaving(classes: &[CutClass]) -> Option<(CutClass, CutClass)> {
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if a.interleaves(b) {
                return Some((*a, *b));
            }
        }
    }
    None
}

/// The complementary regions of the lamination drawn by `classes`, as
/// lists of leaves. There are always `r + 1` of them; some may be empty.
///
/// Chord ends sharing a gap are stacked so that the chord reaching its
/// other end sooner (counterclockwise) lies nearer the next leaf, which is
/// the only noncrossing arrangement. Regions are listed by first leaf met
/// scanning counterclockwise from just after the smallest chord gap, leaves
/// in scan order, empty regions last.
pub fn regions(classes: &[CutClass], arity: &Arity) -> Result<Vec<Vec<usize>>> {
    let n = arity.n_leaves();
    if let Some((a, b)) = first_interleaving(classes) {
        return Err(Error::Interleaving(a, b));
    }
    for (i, c) in classes.iter().enumerate() {
        if classes[..i].contains(c) {
            return Err(Error::DuplicateClass(*c));
        }
        if c.hi >= n {
            return Err(Error::InvalidClass(*c));
        }
    }

    // (gap, stacking rank, chord)
    let mut points: Vec<(usize, usize, usize)> = Vec::with_capacity(2 * classes.len());
    for (i, c) in classes.iter().enumerate() {
        points.push((c.lo, n - (c.hi - c.lo), i));
        points.push((c.hi, n - (n + c.lo - c.hi), i));
    }
    points.sort_unstable();
    let mut ends = vec![(usize::MAX, 0usize); classes.len()];
    for (idx, &(_, _, i)) in points.iter().enumerate() {
        if ends[i].0 == usize::MAX {
            ends[i].0 = idx;
        } else {
            ends[i].1 = idx;
        }
    }
    let signature =
        |c: usize| -> Vec<bool> { ends.iter().map(|&(x, y)| x < c && c <= y).collect() };

    let segments = points.len().max(1);
    let mut region_sigs: Vec<Vec<bool>> = Vec::new();
    for c in 0..segments {
        let sig = signature(c);
        if !region_sigs.contains(&sig) {
            region_sigs.push(sig);
        }
    }
    debug_assert_eq!(region_sigs.len(), classes.len() + 1);

    let start = classes.iter().map(|c| c.lo + 1).min().unwrap_or(0) % n;
    let mut order: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); region_sigs.len()];
    for step in 0..n {
        let leaf = (start + step) % n;
        let before = points.iter().filter(|p| p.0 < leaf).count();
        let sig = signature(before);
        let r = region_sigs
            .iter()
            .position(|s| *s == sig)
            .expect("segment region");
        if members[r].is_empty() {
            order.push(r);
        }
        members[r].push(leaf);
    }
    for r in 0..region_sigs.len() {
        if members[r].is_empty() {
            order.push(r);
        }
    }
    Ok(order
        .into_iter()
        .map(|r| std::mem::take(&mut members[r]))
        .collect())
}

/// Whether the classes admit pairwise disjoint representatives whose
/// complementary regions each contain an output.
pub fn jointly_realizable(classes: &[CutClass], arity: &Arity) -> Result<bool> {
    check_family(classes, arity)?;
    if first_interleaving(classes).is_some() {
        return Ok(false);
    }
    let roles = arity.boundary_sequence();
    Ok(regions(classes, arity)?
        .iter()
        .all(|reg| reg.iter().any(|&p| roles[p] == LeafRole::Output)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar(v: &[usize]) -> Arity {
        Arity::new(v.to_vec()).unwrap()
    }

    fn c(a: usize, b: usize) -> CutClass {
        CutClass::new(a, b)
    }

    #[test]
    fn valid_class_lists() {
        assert_eq!(valid_classes(&ar(&[0, 0])), vec![c(0, 1)]);
        assert_eq!(valid_classes(&ar(&[1, 0])), vec![c(0, 2), c(1, 2)]);
        assert_eq!(
            valid_classes(&ar(&[1, 1])),
            vec![c(0, 2), c(0, 3), c(1, 2), c(1, 3)]
        );
    }

    #[test]
    fn k2_class_count_is_product() {
        for i1 in 0..5 {
            for i2 in 0..5 {
                assert_eq!(valid_classes(&ar(&[i1, i2])).len(), (i1 + 1) * (i2 + 1));
            }
        }
    }

    #[test]
    fn region_examples() {
        let a3 = ar(&[0, 0, 0]);
        assert_eq!(regions(&[c(0, 1)], &a3).unwrap(), vec![vec![1], vec![2, 0]]);
        assert_eq!(
            regions(&[c(0, 1), c(1, 2), c(0, 2)], &a3).unwrap(),
            vec![vec![1], vec![2], vec![0], vec![]]
        );
        assert_eq!(
            regions(&[c(0, 2)], &ar(&[1, 1])).unwrap(),
            vec![vec![1, 2], vec![3, 0]]
        );
        assert_eq!(regions(&[], &a3).unwrap(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn shared_gap_stacking() {
        // two chords from gap 0: the shorter one isolates leaf 1
        let a = ar(&[0, 0, 0, 0]);
        let regs = regions(&[c(0, 1), c(0, 2)], &a).unwrap();
        assert_eq!(regs, vec![vec![1], vec![2], vec![3, 0]]);
    }

    #[test]
    fn realizability_examples() {
        let a3 = ar(&[0, 0, 0]);
        assert!(jointly_realizable(&[c(0, 1), c(1, 2)], &a3).unwrap());
        assert!(!jointly_realizable(&[c(0, 1), c(1, 2), c(0, 2)], &a3).unwrap());
        let a = ar(&[2, 1]);
        let classes = valid_classes(&a);
        for (i, x) in classes.iter().enumerate() {
            for y in &classes[i + 1..] {
                assert!(!jointly_realizable(&[*x, *y], &a).unwrap());
            }
        }
    }

    #[test]
    fn interleaving_is_rejected_by_regions() {
        let a = ar(&[0, 0, 0, 0]);
        assert!(c(0, 2).interleaves(&c(1, 3)));
        assert!(!c(0, 2).interleaves(&c(2, 3)));
        assert!(matches!(
            regions(&[c(0, 2), c(1, 3)], &a),
            Err(Error::Interleaving(..))
        ));
        assert!(!jointly_realizable(&[c(0, 2), c(1, 3)], &a).unwrap());
    }

    #[test]
    fn class_index_round_trip() {
        let mut seen = std::collections::HashSet::new();
        for hi in 1..16 {
            for lo in 0..hi {
                let cl = c(lo, hi);
                assert!(cl.index() < 128);
                assert!(seen.insert(cl.index()));
                assert_eq!(CutClass::from_index(cl.index()), cl);
            }
        }
        let set: ClassSet = [c(1, 3), c(0, 2), c(14, 15)].into_iter().collect();
        assert_eq!(set.to_vec(), vec![c(0, 2), c(1, 3), c(14, 15)]);
        assert!(set.is_superset([c(0, 2)].into_iter().collect()));
        assert!(!set.is_superset([c(0, 1)].into_iter().collect()));
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn family_errors() {
        let a = ar(&[1, 0]);
        assert!(matches!(
            jointly_realizable(&[c(0, 2), c(0, 2)], &a),
            Err(Error::DuplicateClass(_))
        ));
        // {g0,g1} isolates the input leaf 1
        assert!(matches!(
            jointly_realizable(&[c(0, 1)], &a),
            Err(Error::InvalidClass(_))
        ));
    }
}
