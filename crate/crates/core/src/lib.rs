//! Symbolic toolkit for the decorated-tree expansion of the quasilinear
//! generalised KPZ equation
//!
//! ```text
//! ∂_t u = a(u) ∂_x² u + f(u) (∂_x u)² + g(u) ξ
//! ```
//!
//! - [`trees`]: decorated trees, canonical forms, symmetry factors.
//! - [`rules`]: conformity to the (saturated) rule and enumeration of negative trees.
//! - [`calculus`]: grafting, the star product, abstract derivatives, preparation maps
//!   and covariant derivatives.
//! - [`symexpr`]: exact expressions in `u`, the `v_α` variables and `q = 1 - a'(u) v_c`.
//! - [`upsilon`]: elementary differentials.
//! - [`coherence`]: the tree expansion of the fixed point and its coefficient checks.
//! - [`renorm`]: counterterms, locality checks and the Itô constant.

pub mod calculus;
pub mod coherence;
pub mod error;
pub mod renorm;
pub mod rules;
pub mod symexpr;
pub mod trees;
pub mod upsilon;

pub use error::{Error, Result};
