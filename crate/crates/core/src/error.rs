use thiserror::Error;

use crate::cuts::CutClass;
use crate::trees::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid arity: {0}")]
    InvalidArity(String),

    #[error("arity {arity} has {n_leaves} boundary leaves, above the size guard of {guard}")]
    SizeGuard {
        arity: String,
        n_leaves: usize,
        guard: usize,
    },

    #[error("invalid cell: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidCell(Vec<Violation>),

    #[error("malformed cell key {key:?} at byte {pos}: {msg}")]
    KeyParse {
        key: String,
        pos: usize,
        msg: String,
    },

    #[error("vertex {0} is not a bivalent vertex with two outgoing edges")]
    NotBivalent(usize),

    #[error("edge {0} is not an internal edge of the cell")]
    NoSuchEdge(usize),

    #[error("duplicate cut class {0}")]
    DuplicateClass(CutClass),

    #[error("cut class {0} does not separate the outputs")]
    InvalidClass(CutClass),

    #[error("cut classes {0} and {1} interleave")]
    Interleaving(CutClass, CutClass),

    #[error(
        "{complex} complex of {arity}: differential does not square to zero at degree {degree}, cell {cell}"
    )]
    NotSquareZero {
        complex: String,
        arity: String,
        degree: usize,
        cell: String,
    },

    #[error("{arity}: contraction of {from} leaves the bivalent-free part ({to})")]
    NotSubcomplex {
        arity: String,
        from: String,
        to: String,
    },

    #[error("{arity}: {stage} failed: {source}")]
    Stage {
        arity: String,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}
