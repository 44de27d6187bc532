//! Right-hand-side grammar tour: parsing, printing, the JSON wire format,
//! and canonical equality.

use std::collections::BTreeMap;

use invforge::exprparse::{from_json, latex, parse, plain, to_json};
use invforge::symkernel::{canonical_equal, eval_f64, Symbol};

fn main() {
    let f = parse("exp(u) + v^3").expect("grammar accepts this");
    println!("plain: {}", plain(&f));
    println!("latex: {}", latex(&f));
    let wire = to_json(&f);
    println!("json:  {wire}");
    let back = from_json(&wire).expect("wire format round-trips");
    assert!(canonical_equal(&f, &back));

    // Equality is decided on rational normal forms, not tree shapes.
    let a = parse("(u + v)^2").unwrap();
    let b = parse("u^2 + 2*u*v + v^2").unwrap();
    println!("(u+v)^2 == u^2 + 2uv + v^2: {}", canonical_equal(&a, &b));
    let c = parse("u^2 + u*v + v^2").unwrap();
    println!("(u+v)^2 == u^2 +  uv + v^2: {}", canonical_equal(&a, &c));

    let mut at = BTreeMap::new();
    at.insert(Symbol::U, 0.5);
    at.insert(Symbol::V, 2.0);
    println!("f(1/2, 2) = {}", eval_f64(&f, &at).unwrap());
}
