//! Counterterms, chain-rule constraints, locality checks and the Itô constant.

mod counterterm;
mod ito;
mod locality;
pub mod sector4;

pub use counterterm::{
    assemble_counterterm, chain_rule_constraints, local_from_generators, reduce_to_local, ConstraintTable, CountertermExpr, CountertermTerm, FormalConstant, Mode,
    Relation,
};
pub use ito::{ito_constant, poly_bump_exact, Mollifier, TOLERANCE};
pub use locality::{check_locality, check_null, is_local_tree, LocalityReport, NullKind, NullReport, SlotCheck};
