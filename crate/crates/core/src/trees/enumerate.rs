use std::collections::HashMap;
use std::rc::Rc;

use super::arity::{Arity, LeafRole};
use super::cell::PlanarTreeCell;
use super::key::{CellKey, AWAY, END, TOWARD};
use crate::error::Result;

/// Default cap on the number of boundary leaves.
pub const DEFAULT_SIZE_GUARD: usize = 10;

/// A half-edge listed at a vertex, seen from that vertex.
enum Item {
    Leaf(usize),
    Child { away: bool, node: Rc<Node> },
}

/// Persistent list of the items after a vertex's entry half-edge.
enum Node {
    Nil,
    Cons(Item, Rc<Node>),
}

#[derive(Clone)]
struct Seq {
    node: Rc<Node>,
    len: usize,
    has_out: bool,
}

/// Generates subtrees over contiguous leaf blocks `[a..=b]` of `1..N`.
///
/// A vertex reached through an entry edge is kept only if it has an outgoing
/// half-edge and, when bivalent, two of them. Blocks are processed by
/// increasing length, so a single-item vertex over a block only ever refers
/// to the already finished entry-inward list of the same block.
struct Generator {
    outputs: Vec<bool>,
    /// `(a, b, entry_out)` -> subtrees whose root covers `[a..=b]`
    subtrees: HashMap<(usize, usize, bool), Rc<Vec<Rc<Node>>>>,
    /// `(a, b)` -> item sequences of any length covering `[a..=b]`
    seqs: HashMap<(usize, usize), Rc<Vec<Seq>>>,
}

impl Generator {
    fn item_out(&self, item: &Item) -> bool {
        match item {
            Item::Leaf(p) => self.outputs[*p],
            Item::Child { away, .. } => *away,
        }
    }

    fn single_items(&self, a: usize, b: usize) -> Vec<Item> {
        let mut items = Vec::new();
        if a == b {
            items.push(Item::Leaf(a));
        }
        for &away in &[true, false] {
            // an edge pointing away from us enters the child
            for node in self.subtrees[&(a, b, !away)].iter() {
                items.push(Item::Child {
                    away,
                    node: node.clone(),
                });
            }
        }
        items
    }

    fn multi_seqs(&self, a: usize, b: usize) -> Vec<Seq> {
        let mut out = Vec::new();
        for c in a..b {
            let rest = &self.seqs[&(c + 1, b)];
            for item in self.single_items(a, c) {
                let item_out = self.item_out(&item);
                let item = Rc::new(item);
                for tail in rest.iter() {
                    out.push(Seq {
                        node: Rc::new(Node::Cons(clone_item(&item), tail.node.clone())),
                        len: tail.len + 1,
                        has_out: tail.has_out || item_out,
                    });
                }
            }
        }
        out
    }

    fn fill_block(&mut self, a: usize, b: usize) {
        let multi = self.multi_seqs(a, b);

        let inward: Vec<Rc<Node>> = multi
            .iter()
            .filter(|s| s.has_out)
            .map(|s| s.node.clone())
            .collect();
        self.subtrees.insert((a, b, false), Rc::new(inward));

        // entry edge outgoing: any multi-item list; a single item must also point out
        let mut outward: Vec<Rc<Node>> = multi.iter().map(|s| s.node.clone()).collect();
        if a == b && self.outputs[a] {
            outward.push(singleton(Item::Leaf(a)));
        }
        for node in self.subtrees[&(a, b, false)].iter() {
            outward.push(singleton(Item::Child {
                away: true,
                node: node.clone(),
            }));
        }
        self.subtrees.insert((a, b, true), Rc::new(outward));

        let mut all = multi;
        for item in self.single_items(a, b) {
            let has_out = self.item_out(&item);
            all.push(Seq {
                node: singleton(item),
                len: 1,
                has_out,
            });
        }
        self.seqs.insert((a, b), Rc::new(all));
    }
}

fn singleton(item: Item) -> Rc<Node> {
    Rc::new(Node::Cons(item, Rc::new(Node::Nil)))
}

fn clone_item(item: &Item) -> Item {
    match item {
        Item::Leaf(p) => Item::Leaf(*p),
        Item::Child { away, node } => Item::Child {
            away: *away,
            node: node.clone(),
        },
    }
}

fn key_bytes(items: &Node, out: &mut Vec<u8>) {
    let mut items = items;
    while let Node::Cons(item, next) = items {
        match item {
            Item::Leaf(p) => out.push(*p as u8),
            Item::Child { away, node } => {
                out.push(if *away { AWAY } else { TOWARD });
                key_bytes(node, out);
            }
        }
        items = next;
    }
    out.push(END);
}

fn output_mask(arity: &Arity) -> Vec<bool> {
    arity
        .boundary_sequence()
        .into_iter()
        .map(|r| r == LeafRole::Output)
        .collect()
}

/// Keys of every cell of the moduli space of `arity`, sorted.
///
/// Fails with a size-guard error when the arity has more than `guard`
/// boundary leaves.
pub fn enumerate_keys(arity: &Arity, guard: usize) -> Result<Vec<CellKey>> {
    arity.check_guard(guard)?;
    let n = arity.n_leaves();
    let mut gen = Generator {
        outputs: output_mask(arity),
        subtrees: HashMap::new(),
        seqs: HashMap::new(),
    };
    for len in 1..n {
        for a in 1..=n - len {
            gen.fill_block(a, a + len - 1);
        }
    }

    // the anchor holds output leaf 0, so it is never a sink; bivalent only
    // with a single outgoing item
    let mut keys: Vec<CellKey> = gen.seqs[&(1, n - 1)]
        .iter()
        .filter(|s| s.len >= 2 || s.has_out)
        .map(|s| {
            let mut bytes = Vec::with_capacity(3 * n);
            bytes.push(0);
            key_bytes(&s.node, &mut bytes);
            CellKey::from_bytes(bytes)
        })
        .collect();
    keys.sort_unstable();
    keys.dedup();
    Ok(keys)
}

/// Every cell of the moduli space of `arity`, sorted by key.
pub fn enumerate_cells(arity: &Arity, guard: usize) -> Result<Vec<PlanarTreeCell>> {
    let outputs = output_mask(arity);
    Ok(enumerate_keys(arity, guard)?
        .iter()
        .map(|k| PlanarTreeCell::from_canonical(k.decode(), outputs.clone()))
        .collect())
}

/// Cells grouped by syzygy degree, index = degree.
pub fn cells_by_degree(arity: &Arity, guard: usize) -> Result<Vec<Vec<PlanarTreeCell>>> {
    let cells = enumerate_cells(arity, guard)?;
    let mut by_degree = vec![Vec::new(); arity.max_syzygy() + 1];
    for cell in cells {
        by_degree[cell.syzygy_degree()].push(cell);
    }
    Ok(by_degree)
}
