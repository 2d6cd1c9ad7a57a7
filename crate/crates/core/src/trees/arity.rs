use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on boundary leaves; class sets are stored as 128-bit masks.
pub const MAX_LEAVES: usize = 16;

/// Role of a boundary leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LeafRole {
    Output,
    Input,
}

/// The index `(k; i_1, ..., i_k)` of a moduli space: `k` outputs with a
/// block of `i_a` inputs following output `a` counterclockwise.
///
/// Leaves are numbered `0..N` counterclockwise with leaf 0 the first output.
/// Gap `j` sits between leaf `j` and leaf `j + 1 (mod N)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Arity {
    inputs: Vec<usize>,
}

impl Arity {
    pub fn new(inputs: Vec<usize>) -> Result<Self> {
        if inputs.len() < 2 {
            return Err(Error::InvalidArity(format!(
                "need at least two outputs, got {}",
                inputs.len()
            )));
        }
        Ok(Arity { inputs })
    }

    /// Number of outputs.
    pub fn k(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    /// Total number of boundary leaves `N = k + sum(i_a)`.
    pub fn n_leaves(&self) -> usize {
        self.k() + self.inputs.iter().sum::<usize>()
    }

    /// Dimension of the moduli space, `2k + sum(i_a) - 4`.
    pub fn top_dimension(&self) -> usize {
        self.n_leaves() + self.k() - 4
    }

    /// Largest possible syzygy degree, attained by the single-vertex cell.
    pub fn max_syzygy(&self) -> usize {
        self.n_leaves() + self.k() - 4
    }

    pub fn boundary_sequence(&self) -> Vec<LeafRole> {
        let mut roles = Vec::with_capacity(self.n_leaves());
        for &i in &self.inputs {
            roles.push(LeafRole::Output);
            roles.extend(std::iter::repeat_n(LeafRole::Input, i));
        }
        roles
    }

    /// Leaf positions of the outputs, in order.
    pub fn output_positions(&self) -> Vec<usize> {
        let mut pos = Vec::with_capacity(self.k());
        let mut at = 0;
        for &i in &self.inputs {
            pos.push(at);
            at += 1 + i;
        }
        pos
    }

    /// The arity `(k; i_2, ..., i_k, i_1)`: the disk rotated so that output 2
    /// becomes output 1.
    pub fn rotated(&self) -> Arity {
        let mut inputs = self.inputs.clone();
        inputs.rotate_left(1);
        Arity { inputs }
    }

    /// All distinct cyclic rotations, starting with `self`.
    pub fn rotations(&self) -> Vec<Arity> {
        let mut out = vec![self.clone()];
        let mut next = self.rotated();
        while next != *self {
            out.push(next.clone());
            next = next.rotated();
        }
        out
    }

    /// The rotation with lexicographically largest input list; equal for
    /// all rotations of one arity.
    pub fn rotation_representative(&self) -> Arity {
        self.rotations()
            .into_iter()
            .max_by(|a, b| a.inputs.cmp(&b.inputs))
            .expect("nonempty")
    }

    /// Refuses arities with more than `guard` leaves, or more than
    /// [`MAX_LEAVES`] whatever the guard.
    pub fn check_guard(&self, guard: usize) -> Result<()> {
        let guard = guard.min(MAX_LEAVES);
        if self.n_leaves() > guard {
            return Err(Error::SizeGuard {
                arity: self.to_string(),
                n_leaves: self.n_leaves(),
                guard,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Arity {
    type Error = Error;

    fn try_from(inputs: Vec<usize>) -> Result<Self> {
        Arity::new(inputs)
    }
}

impl From<Arity> for Vec<usize> {
    fn from(a: Arity) -> Self {
        a.inputs
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.k())?;
        for (n, i) in self.inputs.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

/// Parses `"(k;i1,...,ik)"` or a bare input list `"i1,...,ik"`.
impl FromStr for Arity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (k, body) = match s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            Some(inner) => {
                let (k, rest) = inner
                    .split_once(';')
                    .ok_or_else(|| Error::InvalidArity(format!("missing ';' in {s:?}")))?;
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArity(format!("bad output count in {s:?}")))?;
                (Some(k), rest)
            }
            None => (None, s),
        };
        let inputs = parse_inputs(body)?;
        if let Some(k) = k {
            if k != inputs.len() {
                return Err(Error::InvalidArity(format!(
                    "{s:?} declares {k} outputs but lists {} input blocks",
                    inputs.len()
                )));
            }
        }
        Arity::new(inputs)
    }
}

/// Parses a comma-separated list of non-negative input counts.
pub fn parse_inputs(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if t.starts_with('-') {
                return Err(Error::InvalidArity(format!("negative input count {t}")));
            }
            t.parse::<usize>()
                .map_err(|_| Error::InvalidArity(format!("bad input count {t:?}")))
        })
        .collect()
}

/// Every arity with `k_min <= k <= k_max` and `N <= max_leaves`, ordered by
/// `N`, then `k`, then inputs in decreasing lexicographic order.
pub fn arities_up_to(max_leaves: usize, k_min: usize, k_max: usize) -> Vec<Arity> {
    fn compositions(
        total: usize,
        parts: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            compositions(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }

    let mut out = Vec::new();
    for n in 2..=max_leaves {
        for k in k_min.max(2)..=k_max.min(n) {
            let mut comps = Vec::new();
            compositions(n - k, k, &mut Vec::new(), &mut comps);
            out.extend(comps.into_iter().map(|inputs| Arity { inputs }));
        }
    }
    out
}
