//! Learn a regular language from an exact teacher with L* and KV.

use pacverify::automata::Dfa;
use pacverify::learner::{learn_exact, Algorithm};

fn main() {
    // Words whose third-to-last symbol is 1.
    let delta = (0..8).map(|s| [(s << 1) & 7, ((s << 1) | 1) & 7]).collect();
    let target = Dfa::new(0, (0..8).map(|s| s & 4 != 0).collect(), delta);
    for alg in [Algorithm::LStar, Algorithm::Kv] {
        let run = learn_exact(alg, &target).unwrap();
        println!(
            "{alg:?}: {} states, {} equivalence queries, {} membership queries",
            run.model.num_states(),
            run.equivalence_queries,
            run.membership_queries
        );
    }
}
