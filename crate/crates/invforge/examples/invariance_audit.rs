//! Seeded numeric audit: normalized invariants evaluated on transformed
//! jets at transformed points agree with their values at the source.

use invforge::exprparse::parse;
use invforge::harness::invariance_test;

fn main() {
    let corpus = [
        "v^3",
        "exp(u)",
        "u + v^2",
        "exp(u) + v^3",
        "u^2 + u*v^3",
        "sin(u) + v^3",
    ];
    for text in corpus {
        let f = parse(text).unwrap();
        let report = invariance_test(&f, 3, 25, 20260822).expect("regular samples exist");
        println!(
            "{text:14} samples {:3}   max rel error {:9.3e}   failures {}",
            report.samples,
            report.max_rel_error,
            report.failures.len()
        );
    }
}
