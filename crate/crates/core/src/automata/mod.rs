//! Finite automata over the decision alphabet `{0, 1}`.

mod fa;
mod serialize;

pub use fa::{
    dfa_equiv_counterexample, fa_accepts, fa_determinize, fa_is_empty, fa_product_intersect, Dfa, Emptiness,
    FiniteAutomaton, Label,
};
pub use serialize::{
    dfa_from_dot, dfa_from_json, dfa_to_dot, dfa_to_json, fa_from_dot, fa_from_json, fa_to_dot, fa_to_json,
    AutomatonJson, TransitionJson,
};
