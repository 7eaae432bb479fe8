//! Unfriendly partitions of finite graphs and of countable rayless
//! graphs given by finite gluing presentations.
//!
//! A partition of a graph's vertex set into two sides is unfriendly when
//! every vertex has at least as many neighbours on the other side as on
//! its own. The crate provides:
//!
//! - local-search and exact max-cut solvers for finite graphs, including
//!   extension of partial pre-partitions ([`finite`]);
//! - a bounded separator-elimination rank relative to pluggable base
//!   families ([`rank`]);
//! - a recursive gluing format describing countable graphs with a finite
//!   amount of data, with symbolic degree analysis and finite
//!   instantiation ([`presentation`]);
//! - a symbolic solver producing default-plus-exceptions partitions of
//!   presented infinite graphs, with an independent checker
//!   ([`symbolic`]);
//! - cross-validation of symbolic solutions against growing finite
//!   instantiations ([`xval`]).

pub mod cardinal;
pub mod corpus;
pub mod error;
pub mod finite;
pub mod graph;
pub mod presentation;
pub mod rank;
pub mod symbolic;
pub mod xval;

pub use cardinal::SymbolicCardinal;
pub use error::{Error, Result};
pub use graph::{FiniteGraph, Partition, Side};
