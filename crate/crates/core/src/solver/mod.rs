//! Satisfiability of path formulas over bounded integers.
//!
//! The decision procedure is exact for the language's theory: polynomial
//! arithmetic modulo `2^W` with signed comparisons. It is a complete search
//! over the finite input space with constraint propagation, so it never
//! answers "unknown"; it can only run out of its node budget.

mod domain;
mod formula;
mod path;
mod poly;
mod search;

pub use domain::Domain;
pub use formula::{cmp_const, Atom, Formula};
pub use path::{
    build_path_formula, decision_vector, Conjunct, IndexedVar, PathFormula, PathModel, PathOutcome, Term,
};
pub use poly::{Monomial, Poly, SymVar};
pub use search::{solve_formulas, Outcome, DEFAULT_NODE_BUDGET};
