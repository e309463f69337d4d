//! Verify every corpus program with both learners and print a stats table.

use pacverify::driver::{corpus, verify, VerifyOptions};
use pacverify::learner::Algorithm;
use pacverify::teacher::PacParams;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    for alg in [Algorithm::LStar, Algorithm::Kv] {
        for p in corpus() {
            let opts = VerifyOptions::new(PacParams::default().with_seed(seed), alg);
            match verify(p.source, &opts) {
                Ok(v) => {
                    let s = v.stats();
                    println!(
                        "{:<20} {:?}: {v}\n  mem {} equ {} batches {} states {} time {:.2}s",
                        p.name,
                        alg,
                        s.teacher.membership_queries,
                        s.teacher.equivalence_queries,
                        s.teacher.batches,
                        s.learner.final_states,
                        s.total_time.as_secs_f64()
                    );
                }
                Err(e) => println!("{:<20} {alg:?}: error {e}", p.name),
            }
        }
    }
}
