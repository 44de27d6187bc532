//! Signature sampling, the necessary-condition equivalence test, and
//! functional independence by Jacobian rank.

use invforge::exprparse::parse;
use invforge::harness::{equivalence_necessary, independence_rank, signature_samples};
use invforge::invstructure::functional_basis;
use invforge::symkernel::Expr;

fn main() {
    let expo = parse("exp(u)").unwrap();
    let cubic = parse("v^3").unwrap();

    // A few signature points (I11, I03, Du I11, Dv I11) of exp(u); the
    // cubic's signature is a single point.
    for s in signature_samples(&expo, 4, 9).unwrap() {
        println!(
            "exp(u) at ({:+.3}, {:+.3}) -> [{:+.4}, {:+.4}, {:+.4}, {:+.4}]",
            s.point[0], s.point[1], s.values[0], s.values[1], s.values[2], s.values[3]
        );
    }
    for s in signature_samples(&cubic, 2, 9).unwrap() {
        println!(
            "v^3    at ({:+.3}, {:+.3}) -> [{:+.4}, {:+.4}, {:+.4}, {:+.4}]",
            s.point[0], s.point[1], s.values[0], s.values[1], s.values[2], s.values[3]
        );
    }

    // Distinct signature sets witness inequivalence; a shared set is
    // consistent with (but does not prove) equivalence.
    println!();
    for (a, b, fa, fb) in [
        ("exp(u)", "v^3", &expo, &cubic),
        ("exp(u)", "exp(u)", &expo, &expo),
    ] {
        let report = equivalence_necessary(fa, fb, 60, 1e-9, 11).unwrap();
        println!(
            "{a} vs {b}: {} (gap fwd {:.3e}, bwd {:.3e})",
            report.verdict.as_str(),
            report.gap_forward,
            report.gap_backward
        );
    }

    // Basis elements are functionally independent: the Jacobian of their
    // closed forms reaches full rank on a generic right-hand side.
    println!();
    let rhs = parse("exp(u) + v^3").unwrap();
    for k in [3u8, 4] {
        let basis = functional_basis(k).unwrap();
        let forms: Vec<Expr> = basis.iter().map(|b| b.closed_form()).collect();
        let rank = independence_rank(&forms, &rhs, 20, 2).unwrap();
        println!("order {k}: basis size {:2}, Jacobian rank {rank}", forms.len());
    }
}
