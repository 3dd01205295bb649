//! Decision procedures for well quasi-order and atomicity of finitely based
//! avoidance sets of finite equivalence relations, under the embedding order
//! and under the consecutive (contiguous) embedding order.
//!
//! The crate is organised around the pipeline a decision takes:
//!
//! * [`relations`] — canonical relations and the pairwise order predicates;
//! * [`avoidance`] — bases, basis minimization and membership/enumeration;
//! * [`factor_graph`] — the overlap digraph on window-length members and the
//!   structure tests (in-out cycles, special vertices, strong connectivity,
//!   bicycles) the decision procedures reduce to;
//! * [`colored`] — the coloured variant of the factor graph, where the
//!   path/relation correspondence is a bijection; verification machinery;
//! * [`decide`] — the four top-level decision procedures with witnesses;
//! * [`oracle`] — independent brute-force implementations used by tests and
//!   by witness verification.

pub mod avoidance;
pub mod colored;
pub mod decide;
pub mod factor_graph;
pub mod oracle;
pub mod relations;

pub use avoidance::{Basis, OrderKind};
pub use decide::{Decision, Property, Witness};
pub use factor_graph::{FactorGraph, Path};
pub use relations::{ClassSizeSeq, EqRel};
