//! The equivalence group in action: transforming points and jets,
//! composition and inversion, and the second-order expansion cross-check.

use invforge::exprparse::{parse, plain};
use invforge::groupaction::{
    check_class_preservation, compose, inverse, random_element, second_order_display_checks,
    GroupElement, Mode, TaylorPhi,
};
use invforge::jetspace::concrete_jet;
use invforge::symkernel::Expr;
use num::BigRational;

fn main() {
    let g = random_element(42, Mode::Numeric, 4);
    println!("sampled element: {}", g.to_json().unwrap());

    // Push the point (u, v, f) = (1, 2, 5) through the transformation.
    let p = (Expr::int(1), Expr::int(2), Expr::int(5));
    let (ut, vt, ft) = g.act_point(&p).unwrap();
    println!(
        "(1, 2, 5) -> ({}, {}, {})",
        plain(&ut),
        plain(&vt),
        plain(&ft)
    );

    // Transform the full second-order jet of a concrete right-hand side.
    let f = parse("u + v^2").unwrap();
    let jets = concrete_jet(&f, 2);
    let moved = g.transform_jet(&jets, 2).unwrap();
    println!("transformed f    = {}", plain(&moved[&(0, 0)]));
    println!("transformed f_v  = {}", plain(&moved[&(0, 1)]));

    // Composition with the inverse: exact for affine phi (polynomial phi
    // of higher degree only inverts as a truncated series, so its round
    // trip is the identity germ through the stored degree).
    let affine = GroupElement::numeric(
        BigRational::new(1.into(), 4.into()),
        BigRational::new(5.into(), 4.into()),
        BigRational::new(1.into(), 2.into()),
        BigRational::new((-3).into(), 8.into()),
        TaylorPhi::new(
            BigRational::from_integer(0.into()),
            vec![BigRational::new(1.into(), 2.into()), BigRational::new(3.into(), 2.into())],
        )
        .unwrap(),
    )
    .unwrap();
    let round = compose(&affine, &inverse(&affine).unwrap()).unwrap();
    let back = round.act_point(&p).unwrap();
    println!(
        "affine g . g^-1 on (1, 2, 5) -> ({}, {}, {})",
        plain(&back.0),
        plain(&back.1),
        plain(&back.2)
    );
    assert_eq!((back.0, back.1, back.2), p);

    // The degree-4 round trip is still the identity through its degree.
    let truncated = compose(&g, &inverse(&g).unwrap()).unwrap();
    if let GroupElement::Numeric { phi, .. } = &truncated {
        println!(
            "degree-4 g . g^-1: phi(x) = a + (x - a) + O((x - a)^5) at a = {}, coefficients {:?}",
            phi.anchor(),
            phi.coeffs()
                .iter()
                .take(5)
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
        );
    }

    // The transformed right-hand side stays inside the equation class.
    println!(
        "class preserved on exp(u) + v^3: {}",
        check_class_preservation(&g, &parse("exp(u) + v^3").unwrap())
    );

    // Operator-derived second-order expansions against transcribed
    // closed forms; one transcription is known to carry sign slips.
    for c in second_order_display_checks() {
        let verdict = if c.matches {
            "matches"
        } else {
            "DISAGREES with the operator recursion"
        };
        println!("{:24} {}", c.label, verdict);
    }
}
