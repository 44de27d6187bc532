//! The structure of the invariant algebra: Maurer–Cartan coefficients,
//! recurrence relations, the commutator, generators, and bases.

use invforge::exprparse::plain;
use invforge::invstructure::{
    commutator_coeffs, functional_basis, i03_from_generator, maurer_cartan_forms, phantom_check,
    recurrence, rewrite_in_generators,
};
use invforge::movingframe::normalized_invariant;
use invforge::symkernel::canonical_equal;

fn main() {
    // Normalized Maurer–Cartan coefficients, solved from the phantom
    // recurrence relations.
    for form in maurer_cartan_forms(4) {
        println!(
            "{:8} = ({}) w1 + ({}) w2",
            form.name,
            plain(&form.omega1_coeff),
            plain(&form.omega2_coeff)
        );
    }

    let report = phantom_check(4);
    println!();
    println!(
        "phantom relations hold: {} ({} checked)",
        report.all_hold,
        report.relations.len()
    );

    // Recurrence: each invariant derivative of I^{ij} is the next
    // normalized invariant plus lower terms.
    println!();
    for (i, j) in [(1u8, 1u8), (0, 3)] {
        let (eu, ev) = recurrence(i, j).unwrap();
        println!("Du[I{i}{j}] -> I{}{j} + correction; plain: {}", i + 1, plain(&eu));
        println!("Dv[I{i}{j}] -> I{i}{} + correction; plain: {}", j + 1, plain(&ev));
    }

    // The invariant derivative operators close with structure functions
    // built from I^{03} alone.
    let cc = commutator_coeffs();
    println!();
    println!("[Du, Dv] = ({}) Du + ({}) Dv", plain(&cc.y1), plain(&cc.y2));

    // I^{03} is expressible through invariant derivatives of I^{11}: the
    // algebra is generated by I^{11} alone wherever the combination in the
    // denominator stays nonzero.
    println!();
    let ratio = i03_from_generator();
    let direct = normalized_invariant(0, 3).expr;
    println!(
        "I03 from 2(2 Du[I11] + [Du,Dv] I11)/(Du[I11] + Dv[I11]) equals the direct form: {}",
        canonical_equal(&ratio, &direct)
    );

    // Functional bases by order, and a rewriting in the generators.
    println!();
    for k in [2u8, 3, 4, 5, 6] {
        let basis = functional_basis(k).unwrap();
        let labels: Vec<String> = basis.iter().map(|b| b.label()).collect();
        println!("order {k}: {:2} elements  [{}]", basis.len(), labels.join(", "));
    }
    println!();
    println!("I21 rewritten: {}", plain(&rewrite_in_generators(2, 1).unwrap()));
}
