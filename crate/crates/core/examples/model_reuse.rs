//! Export a learned model, import it again, and check a second property
//! on the same program shape without any new queries.

use pacverify::driver::{export_model, import_model, reverify, verify_program, ModelFormat, VerifyOptions};
use pacverify::frontend::parse_and_lower;
use pacverify::pda::build_error_pda;
use pacverify::BitWidth;

fn main() {
    let w = BitWidth::DEFAULT;
    let program = parse_and_lower("fn main(x) { if (x > 0) { assert(x >= 1); } }", w).unwrap();
    let verdict = verify_program(&program, &VerifyOptions::default()).unwrap();
    let model = verdict.model().expect("probably correct");
    let json = export_model(model, ModelFormat::Json);
    println!("{json}");
    let model = import_model(&json, ModelFormat::Json).unwrap();

    let other = parse_and_lower("fn main(x) { if (x > 0) { assert(x != 0); } }", w).unwrap();
    println!("second property: {:?}", reverify(&model, &build_error_pda(&other)).unwrap());
}
