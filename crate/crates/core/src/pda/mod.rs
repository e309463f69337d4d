//! Error automata of programs and pushdown automata algorithms.

mod automaton;
mod build;

pub use automaton::{
    pda_accepts, pda_intersect_dfa, pda_is_empty, pda_is_empty_with_cap, PdaTransition, PushdownAutomaton,
    DEFAULT_ITEM_CAP,
};
pub use build::{build_error_fa, build_error_fa_overapprox, build_error_pda};
