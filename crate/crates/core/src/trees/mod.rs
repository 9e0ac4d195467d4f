//! Partially planar decorated trees.
//!
//! - [`MultiIndex`] and [`ParamIndex`] decorate nodes and edges.
//! - [`Tree`] is kept in canonical form: runs of consecutive children
//!   without parameter derivatives are sorted, other children keep their
//!   position.
//! - [`LinComb`] is a finite linear combination of canonical trees.

mod index;
mod parse;
mod sum;
mod tree;

pub use index::{binomial, factorial, MultiIndex, ParamIndex};
pub use parse::parse_tree;
pub use sum::{Coeff, LinComb, TreeSum};
pub use tree::{compare_planted, inner_product, reference_degree, Decomposition, Degree, Edge, Noise, Tree};
