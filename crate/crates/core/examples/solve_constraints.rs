//! Solve bit-vector constraints directly and through a path formula.

use pacverify::frontend::{parse_and_lower, CmpOp};
use pacverify::solver::{build_path_formula, solve_formulas, Formula, Poly, DEFAULT_NODE_BUDGET};
use pacverify::teacher::unfold;
use pacverify::{BitWidth, DecisionVector};

fn main() {
    let w = BitWidth::new(8).unwrap();
    // 3x + 5y == 7 and x*y > 10, wrapping at 8 bits.
    let (x, y) = (Poly::var(0), Poly::var(1));
    let lin = x.mul(&Poly::constant(3, w), w).add(&y.mul(&Poly::constant(5, w), w), w);
    let formulas = [
        Formula::atom(lin, CmpOp::Eq, Poly::constant(7, w), w),
        Formula::atom(x.mul(&y, w), CmpOp::Gt, Poly::constant(10, w), w),
    ];
    println!("{:?}", solve_formulas(w, 2, &formulas, DEFAULT_NODE_BUDGET));

    let program = parse_and_lower(
        "fn twice(a) { return a + a; } fn main(x) { let y = twice(x); if (y == 10) { assert(x != 5); } }",
        BitWidth::DEFAULT,
    )
    .unwrap();
    for d in ["1", "10", "11"] {
        let path = unfold(&program, &DecisionVector::from(d), 1000).expect("path exists");
        let f = build_path_formula(&program, &path).unwrap();
        println!("{d}: {:?}", f.solve().unwrap());
    }
}
