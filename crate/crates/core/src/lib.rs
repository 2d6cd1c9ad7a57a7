//! Cellular models of regularized Strebel moduli spaces, and exact integer
//! certificates for the homological facts behind Koszulity of the
//! dioperads they describe.
//!
//! Cells are directed planar trees ([`trees`]); their contractions form a
//! cochain complex ([`complex`]) whose integer (co)homology is computed by
//! Smith normal form ([`homology`]). Saddle-cut classes and the nerve of
//! jointly realizable families live in [`cuts`] and [`nerve`], and
//! [`report`] runs every check for an arity.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod complex;
pub mod cuts;
pub mod error;
pub mod homology;
pub mod matrix;
pub mod nerve;
pub mod report;
pub mod trees;

pub use error::{Error, Result};
