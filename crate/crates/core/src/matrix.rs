//! Sparse integer matrices in triplet form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, value)`, sorted by `(row, col)`, no zeros, no repeats.
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Builds a matrix, summing repeated positions and dropping zeros.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Self {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(
                r < rows && c < cols,
                "entry ({r}, {c}) outside {rows}x{cols}"
            );
            *acc.entry((r, c)).or_insert(0) += v;
        }
        SparseMatrix {
            rows,
            cols,
            entries: acc
                .into_iter()
                .filter(|(_, v)| *v != 0)
                .map(|((r, c), v)| (r, c, v))
                .collect(),
        }
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let triplets = dense
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v)));
        Self::from_triplets(rows, cols, triplets)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] = v;
        }
        d
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        entries.sort_unstable();
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut rhs_rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); rhs.rows];
        for &(r, c, v) in &rhs.entries {
            rhs_rows[r].push((c, v));
        }
        let triplets = self
            .entries
            .iter()
            .flat_map(|&(r, k, a)| rhs_rows[k].iter().map(move |&(c, b)| (r, c, a * b)));
        Self::from_triplets(self.rows, rhs.cols, triplets)
    }

    /// Keeps the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut row_at = vec![usize::MAX; self.rows];
        for (i, &r) in rows.iter().enumerate() {
            row_at[r] = i;
        }
        let mut col_at = vec![usize::MAX; self.cols];
        for (j, &c) in cols.iter().enumerate() {
            col_at[c] = j;
        }
        let triplets = self.entries.iter().filter_map(|&(r, c, v)| {
            let (i, j) = (row_at[r], col_at[c]);
            (i != usize::MAX && j != usize::MAX).then_some((i, j, v))
        });
        Self::from_triplets(rows.len(), cols.len(), triplets)
    }

    /// Negates the given row and column (an orientation flip of one basis
    /// element on each side).
    pub fn flip_signs(&self, flip_rows: &[bool], flip_cols: &[bool]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| {
                    if flip_rows[r] != flip_cols[c] {
                        (r, c, -v)
                    } else {
                        (r, c, v)
                    }
                })
                .collect(),
        }
    }
}
