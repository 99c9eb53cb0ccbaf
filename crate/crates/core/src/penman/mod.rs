//! PENMAN notation: parsing, serialization, linearization, and the tree
//! reading of an AMR graph.

mod graph;
mod iso;
mod parse;
mod serialize;
mod tree;

pub use graph::{AmrGraph, Edge, Instance, InvariantViolation, Target};
pub use iso::is_isomorphic;
pub use parse::{parse_penman, parse_penman_bytes, ParseError, ParseErrorKind};
pub use serialize::{join_tokens, linearize, serialize_penman, serialize_penman_pretty};
pub use tree::TreeView;
