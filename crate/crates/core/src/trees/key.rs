use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cell::{Edge, PlanarTreeCell, Port, RotationSystem};
use crate::cuts::{ClassSet, CutClass};
use crate::error::{Error, Result};

pub(crate) const AWAY: u8 = 0xF0;
pub(crate) const TOWARD: u8 = 0xF1;
pub(crate) const END: u8 = 0xF2;

/// Canonical form of a cell.
///
/// The text form is
///
/// ```text
/// KEY  := VERT
/// VERT := '(' ITEM* ')'
/// ITEM := 'L' digits | ('>' | '<') VERT
/// ```
///
/// Traversal starts at the vertex holding leaf 0 and lists each vertex's
/// half-edges in rotation order from its entry half-edge. `>` marks an edge
/// directed away from the current vertex, `<` one directed toward it.
///
/// Internally the key is one byte per token, so ordering follows the byte
/// form rather than the text.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey(Box<[u8]>);

/// What a key alone says about its cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyProfile {
    pub n_vertices: usize,
    pub classes: ClassSet,
}

impl CellKey {
    pub(crate) fn from_bytes(bytes: Vec<u8>) -> CellKey {
        CellKey(bytes.into_boxed_slice())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub(crate) fn encode(cell: &PlanarTreeCell) -> CellKey {
        fn walk(cell: &PlanarTreeCell, v: usize, out: &mut Vec<u8>) {
            let skip = usize::from(v != 0);
            for &port in &cell.rotation(v)[skip..] {
                match port {
                    Port::Leaf(p) => out.push(p as u8),
                    Port::Edge(e) => {
                        let Edge { tail, head } = cell.edges()[e];
                        let (marker, child) = if tail == v {
                            (AWAY, head)
                        } else {
                            (TOWARD, tail)
                        };
                        out.push(marker);
                        walk(cell, child, out);
                    }
                }
            }
            out.push(END);
        }
        let mut out = Vec::with_capacity(cell.n_leaves() + 2 * cell.n_edges() + 1);
        walk(cell, 0, &mut out);
        CellKey::from_bytes(out)
    }

    pub fn n_vertices(&self) -> usize {
        1 + self.0.iter().filter(|&&b| b == AWAY || b == TOWARD).count()
    }

    /// Vertex count and cut classes, read off the key. `outputs` marks the
    /// output leaves.
    pub fn profile(&self, outputs: &[bool]) -> KeyProfile {
        struct Frame {
            entry_out: Option<bool>,
            items: usize,
            out: usize,
            lo: usize,
            hi: usize,
        }
        let n = outputs.len();
        let fresh = |entry_out| Frame {
            entry_out,
            items: 0,
            out: 0,
            lo: usize::MAX,
            hi: 0,
        };
        let mut stack = vec![fresh(None)];
        let mut classes = ClassSet::EMPTY;
        let mut n_vertices = 1;
        for &b in self.0.iter() {
            match b {
                AWAY | TOWARD => {
                    let top = stack.last_mut().expect("open vertex");
                    top.items += 1;
                    top.out += usize::from(b == AWAY);
                    stack.push(fresh(Some(b == TOWARD)));
                    n_vertices += 1;
                }
                END => {
                    let f = stack.pop().expect("open vertex");
                    let valence = f.items + usize::from(f.entry_out.is_some());
                    let out_degree = f.out + usize::from(f.entry_out == Some(true));
                    if valence == 2 && out_degree == 2 {
                        classes.insert(match f.entry_out {
                            None => CutClass::new(0, n - 1),
                            Some(_) => CutClass::new(f.lo - 1, f.hi),
                        });
                    }
                    if let Some(parent) = stack.last_mut() {
                        parent.lo = parent.lo.min(f.lo);
                        parent.hi = parent.hi.max(f.hi);
                    }
                }
                p => {
                    let top = stack.last_mut().expect("open vertex");
                    top.items += 1;
                    top.out += usize::from(outputs[p as usize]);
                    top.lo = top.lo.min(p as usize);
                    top.hi = top.hi.max(p as usize);
                }
            }
        }
        KeyProfile {
            n_vertices,
            classes,
        }
    }

    /// Keys and incidence signs of every edge contraction, in canonical edge
    /// order.
    ///
    /// Contracting edge `e` inlines the child's items in place of the edge,
    /// which leaves the first-crossing order of the other edges intact; with
    /// cells oriented by the wedge of their edges in that order, the sign is
    /// `(-1)^e`.
    pub fn contractions(&self) -> Vec<(CellKey, i32)> {
        let bytes = &self.0;
        let mut out = Vec::new();
        let mut e = 0;
        for (i, &b) in bytes.iter().enumerate() {
            if b != AWAY && b != TOWARD {
                continue;
            }
            let mut depth = 0usize;
            let mut j = i + 1;
            loop {
                match bytes[j] {
                    AWAY | TOWARD => depth += 1,
                    END if depth == 0 => break,
                    END => depth -= 1,
                    _ => {}
                }
                j += 1;
            }
            let mut key = Vec::with_capacity(bytes.len() - 2);
            key.extend_from_slice(&bytes[..i]);
            key.extend_from_slice(&bytes[i + 1..j]);
            key.extend_from_slice(&bytes[j + 1..]);
            out.push((CellKey::from_bytes(key), if e % 2 == 0 { 1 } else { -1 }));
            e += 1;
        }
        out
    }

    /// Canonical rotation-system data of the key. The result still has to
    /// be validated against an arity to become a cell.
    pub fn decode(&self) -> RotationSystem {
        let mut rs = RotationSystem {
            n_leaves: self.0.iter().filter(|&&b| b < AWAY).count(),
            rotations: vec![Vec::new()],
            edges: Vec::new(),
        };
        let mut stack = vec![0usize];
        for &b in self.0.iter() {
            let v = *stack.last().expect("open vertex");
            match b {
                AWAY | TOWARD => {
                    let e = rs.edges.len();
                    let w = rs.rotations.len();
                    rs.edges.push(if b == AWAY {
                        Edge { tail: v, head: w }
                    } else {
                        Edge { tail: w, head: v }
                    });
                    rs.rotations[v].push(Port::Edge(e));
                    rs.rotations.push(vec![Port::Edge(e)]);
                    stack.push(w);
                }
                END => {
                    stack.pop();
                }
                p => rs.rotations[v].push(Port::Leaf(p as usize)),
            }
        }
        rs
    }

    fn parse_text(s: &str) -> Result<CellKey> {
        let src = s.as_bytes();
        let err = |pos: usize, msg: &str| Error::KeyParse {
            key: s.to_owned(),
            pos,
            msg: msg.into(),
        };
        if src.first() != Some(&b'(') {
            return Err(err(0, "expected '('"));
        }
        let mut out = Vec::with_capacity(src.len());
        let mut depth = 1usize;
        let mut pos = 1;
        while depth > 0 {
            match src.get(pos) {
                Some(b'L') => {
                    let start = pos + 1;
                    pos = start;
                    while src.get(pos).is_some_and(u8::is_ascii_digit) {
                        pos += 1;
                    }
                    let leaf: usize = s[start..pos]
                        .parse()
                        .map_err(|_| err(start, "expected leaf position"))?;
                    if leaf >= usize::from(AWAY) {
                        return Err(err(start, "leaf position out of range"));
                    }
                    out.push(leaf as u8);
                }
                Some(&c @ (b'>' | b'<')) => {
                    if src.get(pos + 1) != Some(&b'(') {
                        return Err(err(pos + 1, "expected '('"));
                    }
                    out.push(if c == b'>' { AWAY } else { TOWARD });
                    depth += 1;
                    pos += 2;
                }
                Some(b')') => {
                    out.push(END);
                    depth -= 1;
                    pos += 1;
                }
                Some(_) => return Err(err(pos, "unexpected character")),
                None => return Err(err(pos, "unexpected end of key")),
            }
        }
        if pos != src.len() {
            return Err(err(pos, "trailing characters"));
        }
        if out.first() != Some(&0) {
            return Err(err(1, "key must start at leaf 0"));
        }
        let mut leaves: Vec<u8> = out.iter().copied().filter(|&b| b < AWAY).collect();
        leaves.sort_unstable();
        if leaves.iter().map(|&b| usize::from(b)).ne(0..leaves.len()) {
            return Err(err(0, "leaf positions are not 0..N-1"));
        }
        Ok(CellKey::from_bytes(out))
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for &b in self.0.iter() {
            match b {
                AWAY => f.write_str(">(")?,
                TOWARD => f.write_str("<(")?,
                END => f.write_str(")")?,
                p => write!(f, "L{p}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for CellKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CellKey::parse_text(s)
    }
}

impl Serialize for CellKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CellKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
