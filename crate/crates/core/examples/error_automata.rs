//! Build the error automata of a recursive program and find the shortest
//! decision vector through an error node.

use pacverify::automata::{fa_determinize, dfa_to_dot};
use pacverify::frontend::parse_and_lower;
use pacverify::pda::{build_error_fa_overapprox, build_error_pda, pda_accepts, pda_is_empty};
use pacverify::{BitWidth, DecisionVector};

const SRC: &str = "
fn f(n) { if (n > 0) { f(n - 1); } }
fn main(x) { f(x); assert(false); }";

fn main() {
    let program = parse_and_lower(SRC, BitWidth::DEFAULT).expect("valid program");
    let pda = build_error_pda(&program);
    println!("error PDA: {} states, {} transitions", pda.num_states, pda.transitions.len());
    println!("shortest error vector: {:?}", pda_is_empty(&pda).expect("within cap").witness());
    for w in ["0", "00", "100", "110", "1100"] {
        println!("  {w:<5} accepted: {}", pda_accepts(&pda, &DecisionVector::from(w)).expect("within cap"));
    }
    let over = fa_determinize(&build_error_fa_overapprox(&program)).minimize();
    println!("over-approximation as a minimal DFA:\n{}", dfa_to_dot(&over));
}
