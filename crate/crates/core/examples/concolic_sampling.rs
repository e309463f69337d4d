//! Compare random-input and concolic sampling on a rarely taken branch.

use pacverify::frontend::parse_and_lower;
use pacverify::teacher::{PacParams, Strategy, Teacher};
use pacverify::BitWidth;

fn main() {
    let program = parse_and_lower("fn main(x) { if (x == 12345) { assert(false); } }", BitWidth::DEFAULT).unwrap();
    for strategy in [Strategy::RandomInput, Strategy::Concolic] {
        let mut teacher = Teacher::new(&program, PacParams::default().with_strategy(strategy));
        let first = (0..100u64).find(|&i| {
            let batch = teacher.sample_batch_at(i).unwrap();
            batch.vectors().iter().any(|d| d.len() == 2)
        });
        println!("{strategy:?}: rare branch first reached in batch {first:?}");
    }
}
