//! Exact rational expressions in `u`, `∂_x u`, the `v_α` and `q = 1 - a'(u) v_c`.
//!
//! Values are kept as `numerator / q^p` with a polynomial numerator in which
//! `q` has been expanded, reduced by exact division by `q`. The derivatives
//! `∂_{v_α}` act through the chain rule and do not commute; slot partials are
//! the ordinary commuting ones.

mod atom;
mod deriv;
mod expr;
mod parse;
mod poly;

pub use atom::{Atom, FuncBase};
pub use deriv::{derive, param_derivative, slot_partial, v_derivative, v_derivatives, Slot};
pub use expr::{Accumulator, SymExpr};
pub use parse::parse_expr;
pub use poly::{Monomial, Poly};

/// Shorthand for parsing expressions known to be well formed.
pub fn sym(text: &str) -> SymExpr {
    parse_expr(text).unwrap_or_else(|e| panic!("bad expression {text:?}: {e}"))
}
