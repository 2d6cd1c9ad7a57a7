//! Homotopy-preserving reduction of a whole cochain complex.
//!
//! A pair of cells `(a, b)` with `b` in `δa` at a unit coefficient is
//! eliminated by the Schur complement: every other cell `x` hitting `b`
//! becomes `δx - (δx)_b (δa)_b^{-1} δa`, and `a`, `b` leave the complex.
//! The result is chain homotopy equivalent over the integers, so both
//! homology and cohomology survive. Pairs are taken greedily by Markowitz
//! cost, which is zero for the collapses that make up most of the work on
//! cellular complexes. Whatever remains has no unit entries and goes to
//! Smith normal form.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use rustc_hash::FxHashMap;

use super::scalar::Scalar;
use super::Graded;
use crate::matrix::SparseMatrix;

/// Coboundary columns of a complex: `columns[s][i]` lists `(j, v)` with
/// `δ(cell i of degree s) = Σ v · (cell j of degree s + 1)`.
pub type Columns = Vec<Vec<Vec<(u32, i64)>>>;

struct Reducer<T> {
    /// first global id of each degree, plus the total
    offsets: Vec<usize>,
    /// coboundary rows, sorted by target; row `x` is
    /// `arena[start[x]..start[x] + len[x]]`, rewritten rows are appended
    arena: Vec<(u32, T)>,
    /// entries of the arena still in use
    live: usize,
    start: Vec<usize>,
    len: Vec<u32>,
    /// cells whose coboundary may contain a given cell: the initial lists in
    /// compressed form plus later fill-in; stale entries allowed
    down_start: Vec<usize>,
    down: Vec<u32>,
    down_extra: FxHashMap<u32, Vec<u32>>,
    /// exact number of live cells whose coboundary contains this one
    hits: Vec<u32>,
    alive: Vec<bool>,
    /// only cells with equal labels may be paired
    label: Vec<u32>,
    free: Vec<(u32, u32)>,
    heap: BinaryHeap<Reverse<(u64, u32, u32)>>,
}

impl<T: Scalar> Reducer<T> {
    fn new(
        dims: &[usize],
        label: Vec<u32>,
        column: &impl Fn(usize, usize, &mut Vec<(u32, i64)>),
    ) -> Self {
        let mut offsets = vec![0];
        for d in dims {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut arena: Vec<(u32, T)> = Vec::new();
        let mut start = Vec::with_capacity(total);
        let mut len = Vec::with_capacity(total);
        let mut hits = vec![0u32; total];
        let mut col = Vec::new();
        for (s, &dim) in dims.iter().enumerate() {
            for i in 0..dim {
                col.clear();
                column(s, i, &mut col);
                col.retain(|e| e.1 != 0);
                if !col.is_sorted_by_key(|e| e.0) {
                    col.sort_unstable_by_key(|e| e.0);
                }
                start.push(arena.len());
                len.push(col.len() as u32);
                for &(j, v) in &col {
                    let t = (offsets[s + 1] + j as usize) as u32;
                    hits[t as usize] += 1;
                    arena.push((t, T::from_i64(v)));
                }
            }
        }
        let mut down_start = Vec::with_capacity(total + 1);
        down_start.push(0);
        for &h in &hits {
            down_start.push(down_start.last().unwrap() + h as usize);
        }
        let mut fill = down_start.clone();
        let mut down = vec![0u32; arena.len()];
        for x in 0..total {
            for &(t, _) in &arena[start[x]..start[x] + len[x] as usize] {
                down[fill[t as usize]] = x as u32;
                fill[t as usize] += 1;
            }
        }
        let mut r = Reducer {
            offsets,
            live: arena.len(),
            arena,
            start,
            len,
            down_start,
            down,
            down_extra: FxHashMap::default(),
            hits,
            alive: vec![true; total],
            label,
            free: Vec::new(),
            heap: BinaryHeap::new(),
        };
        for x in (0..total).rev() {
            r.offer(x as u32);
        }
        r
    }

    fn row(&self, x: u32) -> &[(u32, T)] {
        let s = self.start[x as usize];
        &self.arena[s..s + self.len[x as usize] as usize]
    }

    fn entry(&self, x: u32, t: u32) -> Option<&T> {
        let row = self.row(x);
        row.binary_search_by_key(&t, |e| e.0)
            .ok()
            .map(|i| &row[i].1)
    }

    fn sources(&self, t: u32) -> Vec<u32> {
        let mut out =
            self.down[self.down_start[t as usize]..self.down_start[t as usize + 1]].to_vec();
        if let Some(extra) = self.down_extra.get(&t) {
            out.extend_from_slice(extra);
        }
        out
    }

    /// Deletes the entry at `t` from row `x` in place.
    fn remove_entry(&mut self, x: u32, t: u32) -> bool {
        let s = self.start[x as usize];
        let l = self.len[x as usize] as usize;
        match self.arena[s..s + l].binary_search_by_key(&t, |e| e.0) {
            Ok(i) => {
                self.arena[s + i..s + l].rotate_left(1);
                self.len[x as usize] -= 1;
                self.live -= 1;
                true
            }
            Err(_) => false,
        }
    }

    fn cost(&self, a: u32, b: u32) -> u64 {
        let width = u64::from(self.len[a as usize]) - 1;
        let height = u64::from(self.hits[b as usize]) - 1;
        width * height
    }

    /// Queues the cheapest unit pair with `a` as its source.
    fn offer(&mut self, a: u32) {
        let best = self
            .row(a)
            .iter()
            .filter(|(b, v)| v.is_unit() && self.label[*b as usize] == self.label[a as usize])
            .map(|&(b, _)| (self.cost(a, b), b))
            .min();
        match best {
            Some((0, b)) => self.free.push((a, b)),
            Some((cost, b)) => self.heap.push(Reverse((cost, a, b))),
            None => {}
        }
    }

    /// Queues the one live source of `b`, if that is all it has left.
    fn offer_sole_source(&mut self, b: u32) {
        if self.hits[b as usize] != 1 {
            return;
        }
        let source = self
            .sources(b)
            .into_iter()
            .find(|&x| self.alive[x as usize] && self.entry(x, b).is_some());
        if let Some(a) = source {
            self.offer(a);
        }
    }

    fn next_pair(&mut self) -> Option<(u64, u32, u32)> {
        match self.free.pop() {
            Some((a, b)) => Some((0, a, b)),
            None => self.heap.pop().map(|Reverse(p)| p),
        }
    }

    fn run(&mut self) -> Option<()> {
        let mut vanished = Vec::new();
        let mut fresh = Vec::new();
        let mut scratch: Vec<(u32, T)> = Vec::new();
        while let Some((cost, a, b)) = self.next_pair() {
            if !self.alive[a as usize] || !self.alive[b as usize] {
                continue;
            }
            let Some(u) = self.entry(a, b).cloned() else {
                continue;
            };
            if !u.is_unit() {
                continue;
            }
            let actual = self.cost(a, b);
            if actual > cost {
                self.heap.push(Reverse((actual, a, b)));
                continue;
            }

            self.alive[a as usize] = false;
            self.alive[b as usize] = false;
            let pivot_row: Vec<(u32, T)> = self.row(a).to_vec();
            self.live -= pivot_row.len();
            self.len[a as usize] = 0;
            for &(t, _) in &pivot_row {
                self.hits[t as usize] -= 1;
            }

            // clear b from every other coboundary that hits it
            for x in self.sources(b) {
                if !self.alive[x as usize] {
                    continue;
                }
                if pivot_row.len() == 1 {
                    if self.remove_entry(x, b) {
                        self.offer(x);
                    }
                    continue;
                }
                let Some(c) = self.entry(x, b) else { continue };
                let f = c.mul_unit(&u)?;
                vanished.clear();
                fresh.clear();
                scratch.clear();
                let s = self.start[x as usize];
                sub_mul(
                    &self.arena[s..s + self.len[x as usize] as usize],
                    &f,
                    &pivot_row,
                    &mut scratch,
                    &mut fresh,
                    &mut vanished,
                )?;
                self.live = self.live + scratch.len() - self.len[x as usize] as usize;
                self.start[x as usize] = self.arena.len();
                self.len[x as usize] = scratch.len() as u32;
                self.arena.append(&mut scratch);
                for &t in &fresh {
                    self.down_extra.entry(t).or_default().push(x);
                    self.hits[t as usize] += 1;
                }
                for &t in &vanished {
                    self.hits[t as usize] -= 1;
                }
                self.offer(x);
                for &t in &vanished {
                    self.offer_sole_source(t);
                }
            }

            // drop a from the coboundaries one degree down
            for y in self.sources(a) {
                if self.alive[y as usize] && self.remove_entry(y, a) {
                    self.offer(y);
                }
            }

            // drop b's own coboundary
            let above: Vec<u32> = self.row(b).iter().map(|e| e.0).collect();
            self.live -= above.len();
            self.len[b as usize] = 0;
            for t in above {
                self.hits[t as usize] -= 1;
                self.offer_sole_source(t);
            }
            for &(t, _) in &pivot_row {
                if t != b {
                    self.offer_sole_source(t);
                }
            }
            if self.arena.len() > 2 * self.live + (1 << 20) {
                self.compact();
            }
        }
        Some(())
    }

    fn compact(&mut self) {
        let mut arena = Vec::with_capacity(self.live + self.live / 2);
        for x in 0..self.start.len() {
            let s = self.start[x];
            let l = self.len[x] as usize;
            self.start[x] = arena.len();
            arena.extend_from_slice(&self.arena[s..s + l]);
        }
        self.arena = arena;
    }

    /// The surviving cells and their coboundaries, renumbered per degree,
    /// with the original index of each survivor.
    fn residual(&self) -> (Graded, Vec<Vec<u32>>) {
        let n_deg = self.offsets.len() - 1;
        let mut local = vec![u32::MAX; self.alive.len()];
        let mut dims = vec![0usize; n_deg];
        let mut kept = vec![Vec::new(); n_deg];
        for s in 0..n_deg {
            for x in self.offsets[s]..self.offsets[s + 1] {
                if self.alive[x] {
                    local[x] = dims[s] as u32;
                    dims[s] += 1;
                    kept[s].push((x - self.offsets[s]) as u32);
                }
            }
        }
        let maps = (0..n_deg.saturating_sub(1))
            .map(|s| {
                let mut entries = Vec::new();
                for x in (self.offsets[s]..self.offsets[s + 1]).filter(|&x| self.alive[x]) {
                    for (t, v) in self.row(x as u32) {
                        let v = i64::try_from(v.to_big()).expect("residual entry fits in i64");
                        entries.push((local[*t as usize] as usize, local[x] as usize, v));
                    }
                }
                SparseMatrix::from_triplets(dims[s + 1], dims[s], entries)
            })
            .collect();
        (Graded::new(dims, maps), kept)
    }
}

/// `a - f * b` over sorted sparse rows into `out`, reporting entries that
/// appear and entries that cancel.
fn sub_mul<T: Scalar>(
    a: &[(u32, T)],
    f: &T,
    b: &[(u32, T)],
    out: &mut Vec<(u32, T)>,
    fresh: &mut Vec<u32>,
    vanished: &mut Vec<u32>,
) -> Option<()> {
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
            if v.is_nil() {
                vanished.push(ca);
            } else {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(())
}

/// A complex with no unit entries left that is chain homotopy equivalent
/// to the input.
pub fn reduce(dims: &[usize], columns: &Columns) -> Graded {
    reduce_with(dims, |s, i, out| {
        out.clear();
        if let Some(c) = columns.get(s) {
            out.extend_from_slice(&c[i]);
        }
    })
}

/// [`reduce`] with the columns supplied on demand: `column(s, i, out)`
/// fills `out` with `δ` of cell `i` in degree `s`.
pub fn reduce_with(dims: &[usize], column: impl Fn(usize, usize, &mut Vec<(u32, i64)>)) -> Graded {
    let total = dims.iter().sum();
    reduce_labelled(dims, vec![0; total], column).0
}

/// [`reduce_with`], pairing only cells that carry the same label
/// (`labels` is indexed by position in the concatenated degrees). Returns
/// the residual and, per degree, the original index of each residual cell.
///
/// When every coboundary only reaches labels that are below the source's
/// label in some partial order, the reduction is filtered: restricting it
/// to an up-closed set of labels reduces the corresponding quotient.
pub fn reduce_labelled(
    dims: &[usize],
    labels: Vec<u32>,
    column: impl Fn(usize, usize, &mut Vec<(u32, i64)>),
) -> (Graded, Vec<Vec<u32>>) {
    let mut small = Reducer::<i64>::new(dims, labels.clone(), &column);
    if small.run().is_some() {
        return small.residual();
    }
    drop(small);
    let mut big = Reducer::<BigInt>::new(dims, labels, &column);
    big.run().expect("bigint arithmetic does not overflow");
    big.residual()
}

/// Column lists of a graded complex given by matrices.
pub fn columns_of(g: &Graded) -> Columns {
    g.maps
        .iter()
        .map(|m| {
            let mut cols = vec![Vec::new(); m.cols];
            for &(r, c, v) in &m.entries {
                cols[c].push((r as u32, v));
            }
            cols
        })
        .collect()
}
