//! Directed planar trees labeling the cells of the regularized moduli space.

mod arity;
mod cell;
mod enumerate;
mod key;

pub use arity::{arities_up_to, parse_inputs, Arity, LeafRole, MAX_LEAVES};
pub use cell::{
    validate, Contraction, Edge, PlanarTreeCell, Port, RotationSystem, Rule, Subject, Violation,
};
pub use enumerate::{cells_by_degree, enumerate_cells, enumerate_keys, DEFAULT_SIZE_GUARD};
pub use key::{CellKey, KeyProfile};
