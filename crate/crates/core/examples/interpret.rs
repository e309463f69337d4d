//! Parse a program, run it on a few inputs and print the decision vectors.

use pacverify::frontend::{execute, parse_and_lower};
use pacverify::frontend::interp::DEFAULT_STEP_BUDGET;
use pacverify::{BitWidth, Valuation};

const SRC: &str = "
fn main(x) {
  if (x > 0) {
    assert(x >= 1);
  }
}";

fn main() {
    let program = parse_and_lower(SRC, BitWidth::DEFAULT).expect("valid program");
    println!("{} nodes, inputs {:?}", program.num_nodes(), program.inputs().iter().map(|i| &i.name).collect::<Vec<_>>());
    for x in [-5, 0, 1, 40] {
        let trace = execute(&program, &Valuation::new(vec![x]), DEFAULT_STEP_BUDGET);
        println!("x = {x:>3}: decisions {:<3} {:?}", trace.decisions.to_string(), trace.status);
    }
}
