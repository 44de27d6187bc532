//! Stratification, the cross-section solve, and invariantization.

use invforge::exprparse::{parse, plain};
use invforge::jetspace::{u_expr, v_expr};
use invforge::movingframe::{
    classify, frame_leading_report, normalized_invariant, solve_frame,
};
use num::BigRational;

fn main() {
    // Strata at (u, v) = (1, 1): W != 0 regular, W = 0 != S singular,
    // W = S = 0 ultra-singular.
    let one = BigRational::from_integer(1.into());
    for text in ["u + v^2", "v^2", "v^3"] {
        let f = parse(text).unwrap();
        let class = classify(&f, &one, &one).unwrap();
        println!(
            "{text:8} at (1,1): {:14} W = {:+}, S = {:+}",
            class.tag.as_str(),
            class.w,
            class.s
        );
    }

    // The solved frame: group parameters as functions of (v, f_ij).
    let frame = solve_frame(3).unwrap();
    println!();
    for (s, e) in frame.entries() {
        println!("{:6} = {}", s.name(), plain(e));
    }

    // The cross-section normalizations hold identically...
    println!();
    println!("iota(u) = {}", plain(&frame.invariantize(&u_expr()).unwrap()));
    println!("iota(v) = {}", plain(&frame.invariantize(&v_expr()).unwrap()));
    println!("iota(f_v) = {}", plain(&frame.inv_jet(0, 1).unwrap()));

    // ...and the first non-phantom invariantizations carry the content.
    for (i, j) in [(1u8, 1u8), (0, 3)] {
        let inv = normalized_invariant(i, j);
        println!("I{i}{j} = {}", plain(&inv.expr));
    }

    // Leading-coefficient audit of phi^(i+2): the solve agrees with the
    // pattern the recursion implies, not with the transcribed shorthand.
    let report = frame_leading_report(3).unwrap();
    println!();
    println!(
        "phi^(5) leading coefficients: recursion pattern {}, transcribed shorthand {}",
        report.matches_recursion, report.matches_transcribed
    );
}
