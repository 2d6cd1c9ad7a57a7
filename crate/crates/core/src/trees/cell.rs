use std::fmt;

use serde::{Deserialize, Serialize};

use super::arity::{Arity, LeafRole};
use super::key::CellKey;
use crate::cuts::CutClass;
use crate::error::{Error, Result};

/// A half-edge at an internal vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    /// The leaf edge ending at the given boundary position.
    Leaf(usize),
    /// One end of the internal edge with the given index.
    Edge(usize),
}

/// A directed internal edge, pointing from `tail` to `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
}

/// Unchecked candidate data for a cell: counterclockwise rotations of
/// half-edges at each internal vertex plus directed internal edges.
///
/// Leaf edges carry no stored direction; an output leaf points away from its
/// vertex and an input leaf points into it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RotationSystem {
    pub n_leaves: usize,
    pub rotations: Vec<Vec<Port>>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subject {
    Cell,
    Vertex(usize),
    Edge(usize),
    Leaf(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    LeafCount { expected: usize, found: usize },
    MissingLeaf,
    RepeatedLeaf,
    UnknownEdge,
    BadEndpoints,
    NotATree,
    NotPlanar { order: Vec<usize> },
    Dangling,
    Sink,
    RegularPoint,
}

/// One failed rule of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Violation {
    pub subject: Subject,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.subject {
            Subject::Cell => f.write_str("cell: ")?,
            Subject::Vertex(v) => write!(f, "vertex {v}: ")?,
            Subject::Edge(e) => write!(f, "edge {e}: ")?,
            Subject::Leaf(l) => write!(f, "leaf {l}: ")?,
        }
        match &self.rule {
            Rule::LeafCount { expected, found } => {
                write!(f, "expected {expected} boundary leaves, found {found}")
            }
            Rule::MissingLeaf => f.write_str("leaf not attached to any vertex"),
            Rule::RepeatedLeaf => f.write_str("leaf attached more than once"),
            Rule::UnknownEdge => f.write_str("port refers to a missing edge"),
            Rule::BadEndpoints => f.write_str("edge ports do not match its endpoints"),
            Rule::NotATree => f.write_str("underlying graph is not a tree"),
            Rule::NotPlanar { order } => {
                write!(
                    f,
                    "rotations put the leaves in order {order:?}, not counterclockwise"
                )
            }
            Rule::Dangling => f.write_str("internal vertex of valence below 2"),
            Rule::Sink => f.write_str("sink"),
            Rule::RegularPoint => f.write_str("regular point, not a cell label"),
        }
    }
}

fn violation(subject: Subject, rule: Rule) -> Violation {
    Violation { subject, rule }
}

fn output_mask(arity: &Arity) -> Vec<bool> {
    arity
        .boundary_sequence()
        .into_iter()
        .map(|r| r == LeafRole::Output)
        .collect()
}

/// Checks every cell rule against the boundary of `arity`.
pub fn validate(rs: &RotationSystem, arity: &Arity) -> Result<(), Vec<Violation>> {
    let n = arity.n_leaves();
    let mut out = Vec::new();
    if rs.n_leaves != n {
        out.push(violation(
            Subject::Cell,
            Rule::LeafCount {
                expected: n,
                found: rs.n_leaves,
            },
        ));
        return Err(out);
    }

    // incidence
    let nv = rs.rotations.len();
    let mut leaf_seen = vec![0usize; n];
    let mut edge_ends = vec![Vec::new(); rs.edges.len()];
    for (v, rot) in rs.rotations.iter().enumerate() {
        for port in rot {
            match *port {
                Port::Leaf(p) if p < n => leaf_seen[p] += 1,
                Port::Leaf(p) => out.push(violation(
                    Subject::Leaf(p),
                    Rule::LeafCount {
                        expected: n,
                        found: p + 1,
                    },
                )),
                Port::Edge(e) if e < rs.edges.len() => edge_ends[e].push(v),
                Port::Edge(e) => out.push(violation(Subject::Edge(e), Rule::UnknownEdge)),
            }
        }
    }
    for (p, &seen) in leaf_seen.iter().enumerate() {
        match seen {
            0 => out.push(violation(Subject::Leaf(p), Rule::MissingLeaf)),
            1 => {}
            _ => out.push(violation(Subject::Leaf(p), Rule::RepeatedLeaf)),
        }
    }
    for (e, edge) in rs.edges.iter().enumerate() {
        let mut ends = edge_ends[e].clone();
        ends.sort_unstable();
        let mut want = vec![edge.tail, edge.head];
        want.sort_unstable();
        if edge.tail == edge.head || edge.tail >= nv || edge.head >= nv || ends != want {
            out.push(violation(Subject::Edge(e), Rule::BadEndpoints));
        }
    }
    if !out.is_empty() {
        return Err(out);
    }

    if nv == 0 || rs.edges.len() + 1 != nv || !connected(rs) {
        out.push(violation(Subject::Cell, Rule::NotATree));
        return Err(out);
    }

    let order = boundary_walk(rs);
    if order.iter().copied().ne(0..n) {
        out.push(violation(Subject::Cell, Rule::NotPlanar { order }));
    }

    let outputs = output_mask(arity);
    for (v, rot) in rs.rotations.iter().enumerate() {
        if rot.len() < 2 {
            out.push(violation(Subject::Vertex(v), Rule::Dangling));
            continue;
        }
        let outgoing = rot
            .iter()
            .filter(|p| is_outgoing(rs, &outputs, v, **p))
            .count();
        if outgoing == 0 {
            out.push(violation(Subject::Vertex(v), Rule::Sink));
        } else if rot.len() == 2 && outgoing != 2 {
            out.push(violation(Subject::Vertex(v), Rule::RegularPoint));
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn is_outgoing(rs: &RotationSystem, outputs: &[bool], v: usize, port: Port) -> bool {
    match port {
        Port::Leaf(p) => outputs[p],
        Port::Edge(e) => rs.edges[e].tail == v,
    }
}

fn other_end(rs: &RotationSystem, e: usize, v: usize) -> usize {
    let edge = rs.edges[e];
    if edge.tail == v {
        edge.head
    } else {
        edge.tail
    }
}

fn connected(rs: &RotationSystem) -> bool {
    let mut seen = vec![false; rs.rotations.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for port in &rs.rotations[v] {
            if let Port::Edge(e) = *port {
                let w = other_end(rs, e, v);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn anchor(rs: &RotationSystem) -> Option<(usize, usize)> {
    rs.rotations
        .iter()
        .enumerate()
        .find_map(|(v, rot)| rot.iter().position(|p| *p == Port::Leaf(0)).map(|i| (v, i)))
}

/// Leaves in the order met by walking around the tree counterclockwise,
/// starting at leaf 0. Assumes a tree.
fn boundary_walk(rs: &RotationSystem) -> Vec<usize> {
    let mut order = Vec::new();
    let Some((a, start)) = anchor(rs) else {
        return order;
    };
    // (vertex, entry index, offset)
    let mut stack = vec![(a, start, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (v, entry, offset) = *top;
        let rot = &rs.rotations[v];
        if offset == rot.len() {
            stack.pop();
            continue;
        }
        top.2 += 1;
        let port = rot[(entry + offset) % rot.len()];
        match port {
            Port::Leaf(p) => order.push(p),
            Port::Edge(e) if offset > 0 => {
                let w = other_end(rs, e, v);
                let back = rs.rotations[w]
                    .iter()
                    .position(|q| *q == Port::Edge(e))
                    .expect("edge present at both ends");
                stack.push((w, back, 1));
            }
            Port::Edge(_) => {}
        }
    }
    order
}

/// Relabels a planar tree into canonical form: vertices in anchored
/// depth-first preorder, edges in the order they are first crossed, each
/// rotation starting at its entry half-edge. Returns the old-to-new edge map.
fn canonicalize(rs: &RotationSystem) -> (RotationSystem, Vec<usize>) {
    let (a, start) = anchor(rs).expect("cell has leaf 0");
    let mut vertex_id = vec![usize::MAX; rs.rotations.len()];
    let mut edge_map = vec![usize::MAX; rs.edges.len()];
    let mut rotations: Vec<Vec<Port>> = Vec::with_capacity(rs.rotations.len());
    let mut edges: Vec<Edge> = Vec::with_capacity(rs.edges.len());

    vertex_id[a] = 0;
    rotations.push(Vec::new());
    let mut stack = vec![(a, start, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (v, entry, offset) = *top;
        let rot = &rs.rotations[v];
        if offset == rot.len() {
            stack.pop();
            continue;
        }
        top.2 += 1;
        let port = rot[(entry + offset) % rot.len()];
        let nv = vertex_id[v];
        match port {
            Port::Leaf(p) => rotations[nv].push(Port::Leaf(p)),
            Port::Edge(e) if offset == 0 => rotations[nv].push(Port::Edge(edge_map[e])),
            Port::Edge(e) => {
                let w = other_end(rs, e, v);
                let ne = edges.len();
                edge_map[e] = ne;
                let nw = rotations.len();
                vertex_id[w] = nw;
                rotations.push(Vec::new());
                let old = rs.edges[e];
                edges.push(if old.tail == v {
                    Edge { tail: nv, head: nw }
                } else {
                    Edge { tail: nw, head: nv }
                });
                rotations[nv].push(Port::Edge(ne));
                let back = rs.rotations[w]
                    .iter()
                    .position(|q| *q == Port::Edge(e))
                    .expect("edge present at both ends");
                stack.push((w, back, 0));
            }
        }
    }
    (
        RotationSystem {
            n_leaves: rs.n_leaves,
            rotations,
            edges,
        },
        edge_map,
    )
}

/// A valid directed planar tree labeling one open cell of the regularized
/// moduli space, held in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanarTreeCell {
    rs: RotationSystem,
    outputs: Vec<bool>,
}

/// The result of contracting one internal edge.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub edge: usize,
    pub cell: PlanarTreeCell,
    pub sign: i32,
}

impl PlanarTreeCell {
    /// Validates `rs` against `arity` and brings it to canonical form.
    pub fn new(rs: RotationSystem, arity: &Arity) -> Result<Self> {
        validate(&rs, arity).map_err(Error::InvalidCell)?;
        Ok(Self::from_valid(&rs, output_mask(arity)))
    }

    pub(crate) fn from_valid(rs: &RotationSystem, outputs: Vec<bool>) -> Self {
        let (rs, _) = canonicalize(rs);
        PlanarTreeCell { rs, outputs }
    }

    /// Wraps data already in canonical form.
    pub(crate) fn from_canonical(rs: RotationSystem, outputs: Vec<bool>) -> Self {
        debug_assert_eq!(canonicalize(&rs).0, rs);
        PlanarTreeCell { rs, outputs }
    }

    pub fn rotation_system(&self) -> &RotationSystem {
        &self.rs
    }

    pub fn n_leaves(&self) -> usize {
        self.rs.n_leaves
    }

    pub fn n_vertices(&self) -> usize {
        self.rs.rotations.len()
    }

    pub fn n_edges(&self) -> usize {
        self.rs.edges.len()
    }

    pub fn rotation(&self, v: usize) -> &[Port] {
        &self.rs.rotations[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.rs.edges
    }

    pub fn is_output(&self, leaf: usize) -> bool {
        self.outputs[leaf]
    }

    pub fn validate(&self, arity: &Arity) -> Result<(), Vec<Violation>> {
        validate(&self.rs, arity)
    }

    pub fn key(&self) -> CellKey {
        CellKey::encode(self)
    }

    /// Dimension of the open cell in the moduli space: one coordinate per
    /// internal vertex, modulo a common shift.
    pub fn dimension(&self) -> usize {
        self.n_vertices() - 1
    }

    /// Bar-complex degree `(N + k - 3) - V`.
    pub fn syzygy_degree(&self) -> usize {
        let k = self.outputs.iter().filter(|o| **o).count();
        self.n_leaves() + k - 3 - self.n_vertices()
    }

    fn out_degree(&self, v: usize) -> usize {
        self.rs.rotations[v]
            .iter()
            .filter(|p| is_outgoing(&self.rs, &self.outputs, v, **p))
            .count()
    }

    pub fn is_bivalent(&self, v: usize) -> bool {
        v < self.n_vertices() && self.rs.rotations[v].len() == 2 && self.out_degree(v) == 2
    }

    /// Vertices of valence two, both edges outgoing: the local maxima of the
    /// distance to the cutoff set.
    pub fn bivalent_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices())
            .filter(|&v| self.is_bivalent(v))
            .collect()
    }

    /// Leaves reachable from `v` through `port` without passing `v` again.
    fn leaves_behind(&self, v: usize, port: Port) -> Vec<bool> {
        let mut side = vec![false; self.n_leaves()];
        let mut stack = vec![(v, port)];
        while let Some((from, port)) = stack.pop() {
            match port {
                Port::Leaf(p) => side[p] = true,
                Port::Edge(e) => {
                    let w = other_end(&self.rs, e, from);
                    for &q in &self.rs.rotations[w] {
                        if q != port {
                            stack.push((w, q));
                        }
                    }
                }
            }
        }
        side
    }

    /// The saddle-cut class through a bivalent vertex: the two gaps bounding
    /// the leaf arcs on either side of it.
    pub fn cut_class_of(&self, v: usize) -> Result<CutClass> {
        if !self.is_bivalent(v) {
            return Err(Error::NotBivalent(v));
        }
        let n = self.n_leaves();
        let side = self.leaves_behind(v, self.rs.rotations[v][0]);
        let first = (0..n)
            .find(|&a| side[a] && !side[(a + n - 1) % n])
            .expect("arc has a start");
        let last = (0..n)
            .find(|&b| side[b] && !side[(b + 1) % n])
            .expect("arc has an end");
        debug_assert!((0..n).any(|p| side[p] && self.outputs[p]));
        debug_assert!((0..n).any(|p| !side[p] && self.outputs[p]));
        Ok(CutClass::new((first + n - 1) % n, last))
    }

    /// Cut classes of all bivalent vertices, sorted.
    pub fn cut_classes(&self) -> Vec<CutClass> {
        let mut classes: Vec<CutClass> = self
            .bivalent_vertices()
            .into_iter()
            .map(|v| self.cut_class_of(v).expect("bivalent"))
            .collect();
        classes.sort_unstable();
        classes
    }

    /// Contracts internal edge `e`, merging its endpoints.
    ///
    /// The sign orients each cell by the wedge of its internal edges in
    /// canonical order; contracting is interior multiplication by `e`, so the
    /// sign is `(-1)^e` times the parity of the induced relabeling.
    pub fn contract(&self, e: usize) -> Result<Contraction> {
        if e >= self.n_edges() {
            return Err(Error::NoSuchEdge(e));
        }
        let Edge { tail, head } = self.rs.edges[e];
        let (u, v) = if tail < head {
            (tail, head)
        } else {
            (head, tail)
        };
        let vrot = &self.rs.rotations[v];
        let at = vrot
            .iter()
            .position(|p| *p == Port::Edge(e))
            .expect("edge at head");

        let vid = |w: usize| {
            if w == v {
                u
            } else if w > v {
                w - 1
            } else {
                w
            }
        };
        let eid = |j: usize| if j > e { j - 1 } else { j };
        let remap = |p: Port| match p {
            Port::Leaf(l) => Port::Leaf(l),
            Port::Edge(j) => Port::Edge(eid(j)),
        };

        let mut rotations = Vec::with_capacity(self.n_vertices() - 1);
        for (w, rot) in self.rs.rotations.iter().enumerate() {
            if w == v {
                continue;
            }
            if w == u {
                let mut merged = Vec::with_capacity(rot.len() + vrot.len() - 2);
                for &p in rot {
                    if p == Port::Edge(e) {
                        merged.extend((1..vrot.len()).map(|i| remap(vrot[(at + i) % vrot.len()])));
                    } else {
                        merged.push(remap(p));
                    }
                }
                rotations.push(merged);
            } else {
                rotations.push(rot.iter().map(|&p| remap(p)).collect());
            }
        }
        let edges = self
            .rs
            .edges
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != e)
            .map(|(_, ed)| Edge {
                tail: vid(ed.tail),
                head: vid(ed.head),
            })
            .collect();
        let merged = RotationSystem {
            n_leaves: self.n_leaves(),
            rotations,
            edges,
        };
        let (rs, edge_map) = canonicalize(&merged);
        let relabeled: Vec<usize> = (0..self.n_edges())
            .filter(|&j| j != e)
            .map(|j| edge_map[eid(j)])
            .collect();
        let sign = if (e + inversions(&relabeled)).is_multiple_of(2) {
            1
        } else {
            -1
        };
        Ok(Contraction {
            edge: e,
            cell: PlanarTreeCell {
                rs,
                outputs: self.outputs.clone(),
            },
            sign,
        })
    }

    /// One entry per internal edge, in canonical edge order.
    pub fn contractions(&self) -> Vec<Contraction> {
        (0..self.n_edges())
            .map(|e| self.contract(e).expect("edge in range"))
            .collect()
    }

    /// Incidence sign of the face obtained by contracting `e`.
    pub fn sign_of(&self, e: usize) -> Result<i32> {
        self.contract(e).map(|c| c.sign)
    }
}

fn inversions(seq: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                count += 1;
            }
        }
    }
    count
}
