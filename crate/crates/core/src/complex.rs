//! The syzygy-graded cochain complex of an arity and the pieces it splits
//! into: the bivalent-free subcomplex (shifted by `k - 1`), the quotient
//! spanned by cells with bivalent vertices, and the subfamily complexes.
//!
//! The full complex is built once and shared; the pieces are index views
//! into it.

use std::fmt;
use std::io::{self, Write};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cuts::{ClassSet, CutClass};
use crate::error::{Error, Result};
use crate::homology::{columns_of, reduce_labelled, reduce_with, Graded, HomologySummary};
use crate::matrix::SparseMatrix;
use crate::trees::{enumerate_keys, Arity, CellKey, LeafRole};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexTag {
    Full,
    YPart,
    ClovQuotient,
    SubFamily(Vec<CutClass>),
}

impl fmt::Display for ComplexTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexTag::Full => f.write_str("full"),
            ComplexTag::YPart => f.write_str("y_part"),
            ComplexTag::ClovQuotient => f.write_str("clov_quotient"),
            ComplexTag::SubFamily(classes) => {
                f.write_str("subfamily")?;
                for c in classes {
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// A basis element: one cell, with the cut classes of its bivalent vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisCell {
    pub key: CellKey,
    pub classes: ClassSet,
}

/// One coboundary map in compressed-column form; entries are `±1`.
#[derive(Debug, Default)]
struct Columns {
    start: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<i8>,
}

impl Columns {
    fn col(&self, c: usize) -> impl Iterator<Item = (u32, i64)> + '_ {
        let r = self.start[c]..self.start[c + 1];
        self.rows[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().map(|&v| i64::from(v)))
    }
}

#[derive(Debug)]
struct Store {
    arity: Arity,
    basis: Vec<Vec<BasisCell>>,
    coboundary: Vec<Columns>,
    /// cells grouped by exact class set, built on first use
    groups: OnceLock<Vec<(ClassSet, Vec<Vec<u32>>)>>,
}

impl Store {
    fn groups(&self) -> &[(ClassSet, Vec<Vec<u32>>)] {
        self.groups.get_or_init(|| {
            let mut map: FxHashMap<ClassSet, Vec<Vec<u32>>> = FxHashMap::default();
            for (s, b) in self.basis.iter().enumerate() {
                for (i, cell) in b.iter().enumerate() {
                    map.entry(cell.classes)
                        .or_insert_with(|| vec![Vec::new(); self.basis.len()])[s]
                        .push(i as u32);
                }
            }
            let mut groups: Vec<_> = map.into_iter().collect();
            groups.sort_unstable_by_key(|g| g.0);
            groups
        })
    }
}

/// A cochain complex of cells: the full complex of an arity or a piece of it.
#[derive(Clone, Debug)]
pub struct CellComplex {
    store: Arc<Store>,
    tag: ComplexTag,
    /// Syzygy degree of internal degree 0.
    shift: usize,
    /// Sorted member indices per syzygy degree; `None` keeps every cell.
    members: Option<Arc<Vec<Vec<u32>>>>,
}

impl CellComplex {
    /// The complex of every cell, with `δ(c) = Σ ±(c with one edge contracted)`.
    /// Fails if `δ² != 0`.
    pub fn build_full(arity: &Arity, guard: usize) -> Result<CellComplex> {
        let complex = Self::build_full_unchecked(arity, guard)?;
        complex.check_square_zero()?;
        Ok(complex)
    }

    /// [`build_full`](Self::build_full) without the `δ² = 0` check.
    pub fn build_full_unchecked(arity: &Arity, guard: usize) -> Result<CellComplex> {
        let keys = enumerate_keys(arity, guard)?;
        let outputs: Vec<bool> = arity
            .boundary_sequence()
            .into_iter()
            .map(|r| r == LeafRole::Output)
            .collect();
        let top = arity.n_leaves() + arity.k() - 3;
        let mut basis: Vec<Vec<BasisCell>> = (0..=arity.max_syzygy()).map(|_| Vec::new()).collect();
        let profiled: Vec<(usize, BasisCell)> = keys
            .into_par_iter()
            .map(|key| {
                let p = key.profile(&outputs);
                (
                    top - p.n_vertices,
                    BasisCell {
                        key,
                        classes: p.classes,
                    },
                )
            })
            .collect();
        for (s, cell) in profiled {
            basis[s].push(cell);
        }

        let coboundary = (0..basis.len().saturating_sub(1))
            .map(|s| {
                let index: FxHashMap<&CellKey, u32> = basis[s + 1]
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (&c.key, i as u32))
                    .collect();
                let cols: Vec<Vec<(u32, i8)>> = basis[s]
                    .par_iter()
                    .map(|cell| {
                        let mut col: Vec<(u32, i8)> = cell
                            .key
                            .contractions()
                            .into_iter()
                            .map(|(k, sign)| (index[&k], sign as i8))
                            .collect();
                        col.sort_unstable();
                        col
                    })
                    .collect();
                let mut m = Columns {
                    start: Vec::with_capacity(cols.len() + 1),
                    rows: Vec::with_capacity(cols.iter().map(Vec::len).sum()),
                    vals: Vec::new(),
                };
                m.start.push(0);
                for col in cols {
                    for (r, v) in col {
                        m.rows.push(r);
                        m.vals.push(v);
                    }
                    m.start.push(m.rows.len());
                }
                m
            })
            .collect();

        let complex = CellComplex {
            store: Arc::new(Store {
                arity: arity.clone(),
                basis,
                coboundary,
                groups: OnceLock::new(),
            }),
            tag: ComplexTag::Full,
            shift: 0,
            members: None,
        };
        Ok(complex)
    }

    pub fn arity(&self) -> &Arity {
        &self.store.arity
    }

    pub fn tag(&self) -> &ComplexTag {
        &self.tag
    }

    /// Syzygy degree of this complex's degree 0.
    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn n_degrees(&self) -> usize {
        self.store.basis.len() - self.shift
    }

    pub fn dim(&self, degree: usize) -> usize {
        let s = degree + self.shift;
        match &self.members {
            _ if s >= self.store.basis.len() => 0,
            None => self.store.basis[s].len(),
            Some(m) => m[s].len(),
        }
    }

    /// The `i`-th basis cell of `degree`.
    pub fn cell(&self, degree: usize, i: usize) -> &BasisCell {
        let s = degree + self.shift;
        &self.store.basis[s][self.full_index(s, i)]
    }

    pub fn cells(&self, degree: usize) -> impl Iterator<Item = &BasisCell> + '_ {
        (0..self.dim(degree)).map(move |i| self.cell(degree, i))
    }

    pub fn census(&self) -> Vec<usize> {
        (0..self.n_degrees()).map(|d| self.dim(d)).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.census().iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_cells() == 0
    }

    fn full_index(&self, s: usize, i: usize) -> usize {
        match &self.members {
            None => i,
            Some(m) => m[s][i] as usize,
        }
    }

    fn local_index(&self, s: usize, full: u32) -> Option<u32> {
        match &self.members {
            None => Some(full),
            Some(m) => m[s].binary_search(&full).ok().map(|i| i as u32),
        }
    }

    /// `δ` of basis cell `i` in `degree`, in local indices of `degree + 1`.
    fn column(&self, degree: usize, i: usize, out: &mut Vec<(u32, i64)>) {
        out.clear();
        let s = degree + self.shift;
        if s + 1 >= self.store.basis.len() {
            return;
        }
        let full = self.full_index(s, i);
        for (r, v) in self.store.coboundary[s].col(full) {
            if let Some(j) = self.local_index(s + 1, r) {
                out.push((j, v));
            }
        }
    }

    /// The coboundary out of `degree`, as a `dim(degree+1) x dim(degree)`
    /// matrix.
    pub fn differential(&self, degree: usize) -> SparseMatrix {
        let mut col = Vec::new();
        let mut triplets = Vec::new();
        for i in 0..self.dim(degree) {
            self.column(degree, i, &mut col);
            triplets.extend(col.iter().map(|&(r, v)| (r as usize, i, v)));
        }
        SparseMatrix::from_triplets(self.dim(degree + 1), self.dim(degree), triplets)
    }

    pub fn graded(&self) -> Graded {
        let n = self.n_degrees();
        Graded::new(
            self.census(),
            (0..n.saturating_sub(1))
                .map(|d| self.differential(d))
                .collect(),
        )
    }

    /// Same complex with the basis cells marked in `flips[degree][i]`
    /// negated.
    pub fn graded_with_flips(&self, flips: &[Vec<bool>]) -> Graded {
        let g = self.graded();
        let maps = g
            .maps
            .iter()
            .enumerate()
            .map(|(d, m)| m.flip_signs(&flips[d + 1], &flips[d]))
            .collect();
        Graded::new(g.dims, maps)
    }

    /// A degree `d` and a cell `c` of that degree with `δ δ c != 0`, lowest
    /// degree first, if any.
    pub fn square_defect(&self) -> Option<(usize, CellKey)> {
        let n = self.n_degrees();
        (0..n.saturating_sub(2)).find_map(|d| {
            (0..self.dim(d))
                .into_par_iter()
                .map_init(
                    || (Vec::new(), Vec::new(), Vec::new()),
                    |(first, second, acc): &mut (
                        Vec<(u32, i64)>,
                        Vec<(u32, i64)>,
                        Vec<(u32, i64)>,
                    ),
                     i| {
                        acc.clear();
                        self.column(d, i, first);
                        for &(r, v) in first.iter() {
                            self.column(d + 1, r as usize, second);
                            acc.extend(second.iter().map(|&(t, w)| (t, v * w)));
                        }
                        acc.sort_unstable_by_key(|e| e.0);
                        let bad = acc
                            .chunk_by(|a, b| a.0 == b.0)
                            .any(|run| run.iter().map(|e| e.1).sum::<i64>() != 0);
                        bad.then_some(i)
                    },
                )
                .find_first(Option::is_some)
                .flatten()
                .map(|i| (d, self.cell(d, i).key.clone()))
        })
    }

    pub fn check_square_zero(&self) -> Result<()> {
        match self.square_defect() {
            None => Ok(()),
            Some((degree, cell)) => Err(Error::NotSquareZero {
                complex: self.tag.to_string(),
                arity: self.arity().to_string(),
                degree,
                cell: cell.to_string(),
            }),
        }
    }

    /// A small complex homotopy equivalent to this one.
    pub fn reduced(&self) -> Graded {
        reduce_with(&self.census(), |d, i, out| self.column(d, i, out))
    }

    /// Cohomology and chain homology (homology of the transposed complex,
    /// i.e. cellular chains of the dual complex).
    pub fn homology_pair(&self) -> (HomologySummary, HomologySummary) {
        self.reduced().both()
    }

    pub fn cohomology(&self) -> HomologySummary {
        self.homology_pair().0
    }

    pub fn chain_homology(&self) -> HomologySummary {
        self.homology_pair().1
    }

    fn view(
        &self,
        tag: ComplexTag,
        shift: usize,
        keep: impl Fn(&BasisCell) -> bool + Sync,
    ) -> CellComplex {
        let members = self
            .store
            .basis
            .par_iter()
            .enumerate()
            .map(|(s, b)| {
                if s < self.shift {
                    return Vec::new();
                }
                (0..self.dim(s - self.shift))
                    .map(|i| self.full_index(s, i) as u32)
                    .filter(|&f| keep(&b[f as usize]))
                    .collect()
            })
            .collect();
        CellComplex {
            store: self.store.clone(),
            tag,
            shift,
            members: Some(Arc::new(members)),
        }
    }

    /// A coboundary entry whose target has a class its source lacks, if
    /// any. Without one, class sets only shrink along `δ`.
    pub fn class_growth_witness(&self) -> Option<(CellKey, CellKey)> {
        let st = &self.store;
        (0..st.coboundary.len()).find_map(|s| {
            (0..st.basis[s].len()).into_par_iter().find_map_any(|c| {
                let src = &st.basis[s][c];
                st.coboundary[s]
                    .col(c)
                    .map(|(r, _)| &st.basis[s + 1][r as usize])
                    .find(|dst| !src.classes.is_superset(dst.classes))
                    .map(|dst| (src.key.clone(), dst.key.clone()))
            })
        })
    }

    /// Splits the full complex into the bivalent-free subcomplex, regraded by
    /// `s - (k - 1)`, and the quotient spanned by cells with bivalent
    /// vertices.
    pub fn split_y_and_clov(&self) -> Result<(CellComplex, CellComplex)> {
        assert_eq!(
            self.tag,
            ComplexTag::Full,
            "split applies to the full complex"
        );
        let shift = self.arity().k() - 1;
        for s in 0..shift.min(self.n_degrees()) {
            if let Some(c) = self.cells(s).find(|c| c.classes.is_empty()) {
                return Err(Error::NotSubcomplex {
                    arity: self.arity().to_string(),
                    from: c.key.to_string(),
                    to: format!("bivalent-free cell in degree {s} < k-1"),
                });
            }
        }
        if let Some((from, to)) = self.class_growth_witness() {
            return Err(Error::NotSubcomplex {
                arity: self.arity().to_string(),
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        let y = self.view(ComplexTag::YPart, shift, |c| c.classes.is_empty());
        let clov = self.view(ComplexTag::ClovQuotient, 0, |c| !c.classes.is_empty());
        y.check_square_zero()?;
        clov.check_square_zero()?;
        Ok((y, clov))
    }

    /// Cells cloven by every class in `classes`, with the induced
    /// differential.
    pub fn subfamily_complex(&self, classes: &[CutClass]) -> CellComplex {
        assert_eq!(
            self.tag,
            ComplexTag::Full,
            "subfamilies are taken in the full complex"
        );
        let mut wanted = classes.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        let set: ClassSet = wanted.iter().copied().collect();
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); self.store.basis.len()];
        for (classes, cells) in self.store.groups() {
            if classes.is_superset(set) {
                for (s, idx) in cells.iter().enumerate() {
                    members[s].extend_from_slice(idx);
                }
            }
        }
        for m in &mut members {
            m.sort_unstable();
        }
        CellComplex {
            store: self.store.clone(),
            tag: ComplexTag::SubFamily(wanted),
            shift: 0,
            members: Some(Arc::new(members)),
        }
    }

    /// Reduces the full complex pairing only cells with equal class sets.
    ///
    /// Needs class sets to shrink along `δ` (no
    /// [`class_growth_witness`](Self::class_growth_witness)); then the
    /// reduction is filtered and every subfamily complex is homotopy
    /// equivalent to the matching piece of the residual.
    pub fn class_filtered_reduction(&self) -> ClassReduction {
        assert_eq!(
            self.tag,
            ComplexTag::Full,
            "filtered reduction applies to the full complex"
        );
        let groups = self.store.groups();
        let id: FxHashMap<ClassSet, u32> = groups
            .iter()
            .enumerate()
            .map(|(i, g)| (g.0, i as u32))
            .collect();
        let labels: Vec<u32> = self
            .store
            .basis
            .iter()
            .flatten()
            .map(|c| id[&c.classes])
            .collect();
        let (graded, kept) =
            reduce_labelled(&self.census(), labels, |d, i, out| self.column(d, i, out));
        let classes = kept
            .iter()
            .enumerate()
            .map(|(s, idx)| {
                idx.iter()
                    .map(|&i| self.store.basis[s][i as usize].classes)
                    .collect()
            })
            .collect();
        let bottoms = groups
            .iter()
            .map(|(set, cells)| {
                (
                    *set,
                    cells
                        .iter()
                        .position(|c| !c.is_empty())
                        .expect("group has a cell"),
                )
            })
            .collect();
        ClassReduction::new(graded, classes, bottoms)
    }

    /// Distinct class sets carried by cells, sorted.
    pub fn class_sets(&self) -> Vec<ClassSet> {
        self.store.groups().iter().map(|g| g.0).collect()
    }

    /// Plain-text listing: `%` header lines, then one nonzero per line as
    /// `degree row_key col_key entry`, where `degree` is the column's
    /// degree, columns in basis order.
    pub fn write_listing(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(
            w,
            "% {} complex of {}, syzygy shift {}",
            self.tag,
            self.arity(),
            self.shift
        )?;
        writeln!(w, "% census {:?}", self.census())?;
        let mut col = Vec::new();
        for d in 0..self.n_degrees().saturating_sub(1) {
            for i in 0..self.dim(d) {
                self.column(d, i, &mut col);
                let src = &self.cell(d, i).key;
                for &(r, v) in &col {
                    writeln!(
                        w,
                        "{} {} {} {}",
                        d,
                        self.cell(d + 1, r as usize).key,
                        src,
                        v
                    )?;
                }
            }
        }
        Ok(())
    }

    pub fn to_listing(&self) -> String {
        let mut out = Vec::new();
        self.write_listing(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("listing is ascii")
    }

    /// SHA-256 of a binary form of the complex, hex encoded: tag, arity,
    /// shift and census as text, then every basis key (length-prefixed key
    /// bytes) degree by degree, then every column as its entry count
    /// followed by `(row: u32 LE, entry: i8)` pairs. Integers are little
    /// endian `u32` unless stated.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!(
            "{}|{}|{}|{:?}\n",
            self.tag,
            self.arity(),
            self.shift,
            self.census()
        ));
        for d in 0..self.n_degrees() {
            for cell in self.cells(d) {
                let bytes = cell.key.as_bytes();
                h.update((bytes.len() as u32).to_le_bytes());
                h.update(bytes);
            }
        }
        let mut col = Vec::new();
        let mut buf = Vec::new();
        for d in 0..self.n_degrees().saturating_sub(1) {
            for i in 0..self.dim(d) {
                self.column(d, i, &mut col);
                buf.clear();
                buf.extend_from_slice(&(col.len() as u32).to_le_bytes());
                for &(r, v) in &col {
                    buf.extend_from_slice(&r.to_le_bytes());
                    buf.push(v as i8 as u8);
                }
                h.update(&buf);
            }
        }
        hex::encode(h.finalize())
    }

    /// SHA-256 of the listing, hex encoded.
    pub fn listing_hash(&self) -> String {
        struct HashWriter(Sha256);
        impl Write for HashWriter {
            fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
                self.0.update(buf);
                Ok(buf.len())
            }
            fn flush(&mut self) -> io::Result<()> {
                Ok(())
            }
        }
        let mut w = io::BufWriter::with_capacity(1 << 16, HashWriter(Sha256::new()));
        self.write_listing(&mut w).expect("hashing never fails");
        let hasher = w.into_inner().map_err(|_| ()).expect("flush into hasher").0;
        hex::encode(hasher.finalize())
    }
}

/// Residual of [`CellComplex::class_filtered_reduction`]: a small complex
/// whose cells keep the class sets of the cells they stand for.
#[derive(Clone, Debug)]
pub struct ClassReduction {
    pub classes: Vec<Vec<ClassSet>>,
    columns: ResidualColumns,
    /// residual cells grouped by class set, per degree
    groups: Vec<(ClassSet, Vec<Vec<u32>>)>,
    /// lowest degree of each class set among the original cells
    bottoms: Vec<(ClassSet, usize)>,
}

type ResidualColumns = crate::homology::Columns;

impl ClassReduction {
    fn new(graded: Graded, classes: Vec<Vec<ClassSet>>, bottoms: Vec<(ClassSet, usize)>) -> Self {
        let mut map: FxHashMap<ClassSet, Vec<Vec<u32>>> = FxHashMap::default();
        for (s, cs) in classes.iter().enumerate() {
            for (i, c) in cs.iter().enumerate() {
                map.entry(*c)
                    .or_insert_with(|| vec![Vec::new(); classes.len()])[s]
                    .push(i as u32);
            }
        }
        let mut groups: Vec<_> = map.into_iter().collect();
        groups.sort_unstable_by_key(|g| g.0);
        ClassReduction {
            columns: columns_of(&graded),
            classes,
            groups,
            bottoms,
        }
    }

    /// Lowest degree of the subfamily complex of `set`, `None` when it has
    /// no cells.
    pub fn bottom_degree(&self, set: ClassSet) -> Option<usize> {
        self.bottoms
            .iter()
            .filter(|(c, _)| c.is_superset(set))
            .map(|b| b.1)
            .min()
    }

    pub fn census(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// Cohomology and chain homology of the subfamily complex of `set`,
    /// computed from the residual cells whose class sets contain it.
    pub fn subfamily_homology(&self, set: ClassSet) -> (HomologySummary, HomologySummary) {
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); self.classes.len()];
        for (classes, cells) in &self.groups {
            if classes.is_superset(set) {
                for (s, idx) in cells.iter().enumerate() {
                    members[s].extend_from_slice(idx);
                }
            }
        }
        for m in &mut members {
            m.sort_unstable();
        }
        let dims: Vec<usize> = members.iter().map(Vec::len).collect();
        reduce_with(&dims, |s, i, out| {
            out.clear();
            if let Some(cols) = self.columns.get(s) {
                let next = &members[s + 1];
                for &(r, v) in &cols[members[s][i] as usize] {
                    if let Ok(j) = next.binary_search(&r) {
                        out.push((j as u32, v));
                    }
                }
            }
        })
        .both()
    }
}
