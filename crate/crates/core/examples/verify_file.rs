//! Verify a program end to end: `cargo run --example verify_file -- path.imp`.
//! Without an argument a small buggy program is checked.

use pacverify::driver::{verify, Verdict, VerifyOptions};

const DEFAULT: &str = "fn main(x) { if (x > 0) { assert(x > 1); } }";

fn main() {
    let source = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable file"),
        None => DEFAULT.to_string(),
    };
    let verdict = verify(&source, &VerifyOptions::default()).expect("valid program");
    println!("{verdict}");
    if let Verdict::BugFound { trace, .. } = &verdict {
        println!("replay: {:?} along {}", trace.status, trace.decisions);
    }
    print!("{}", verdict.stats().table());
}
