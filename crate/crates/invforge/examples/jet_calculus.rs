//! Jet coordinates `f_ij`, total-derivative operators, and the prolonged
//! infinitesimal generator of the equivalence group.

use invforge::exprparse::plain;
use invforge::jetspace::{apply_prolonged, jet, total_derivative, LinearDiffOp, VectorField};
use invforge::movingframe::{normalized_invariant, w_expr};
use invforge::symkernel::{canonical_equal, Dir, Expr};

fn main() {
    println!("D_u f     = {}", plain(&total_derivative(&jet(0, 0), Dir::U)));
    println!("D_v f_v   = {}", plain(&total_derivative(&jet(0, 1), Dir::V)));
    println!("D_u f_uv  = {}", plain(&total_derivative(&jet(1, 1), Dir::U)));

    // Plain total derivatives commute; the invariant ones later will not.
    let du = LinearDiffOp::d_u();
    let dv = LinearDiffOp::d_v();
    let comm = du.commutator(&dv).apply(&w_expr());
    println!("[D_u, D_v] W = {}", plain(&comm));

    // The prolonged general generator annihilates the first normalized
    // invariant identically — with all generator coefficients left free.
    let field = VectorField::general();
    let i11 = normalized_invariant(1, 1).expr;
    let moved = apply_prolonged(&field, &i11);
    println!("pr(Q) I11 == 0: {}", canonical_equal(&moved, &Expr::zero()));
}
