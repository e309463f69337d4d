//! Number of batched samples per equivalence query.

use pacverify::teacher::{pac_sample_count, PacParams};

fn main() {
    for (eps, delta) in [(0.1, 0.9), (0.05, 0.99), (0.5, 0.5)] {
        let p = PacParams::new(eps, delta, 10).unwrap();
        let counts: Vec<u64> = (1..=6).map(|i| pac_sample_count(&p, i)).collect();
        println!("eps {eps:<4} delta {delta:<4}: {counts:?}");
    }
}
