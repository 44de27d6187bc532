//! Deterministic rendering of expressions.
//!
//! The plain style is the parseable one: reading its output back yields a
//! structurally identical expression.  Negative powers are rendered as
//! divisions, so denominators look like denominators.

use std::fmt;

use num::{BigRational, One, Signed, Zero};

use crate::symkernel::{Expr, Node};

/// Output styles of [`print`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PrintStyle {
    Plain,
    Latex,
    Json,
}

/// Render in the requested style (JSON is the compact wire form).
pub fn print(e: &Expr, style: PrintStyle) -> String {
    match style {
        PrintStyle::Plain => plain(e),
        PrintStyle::Latex => latex(e),
        PrintStyle::Json => super::json::to_json(e).to_string(),
    }
}

const PREC_SUM: u8 = 0;
const PREC_PROD: u8 = 1;
const PREC_POW: u8 = 2;
const PREC_ATOM: u8 = 3;

fn prec_of(e: &Expr) -> u8 {
    match e.node() {
        Node::Rat(r) => {
            if r.is_integer() && !r.is_negative() {
                PREC_ATOM
            } else {
                // Fractions print as divisions, negatives carry a sign.
                PREC_PROD
            }
        }
        Node::Sym(_) | Node::Fun(..) => PREC_ATOM,
        Node::Pow(_, k) => {
            if *k > 0 {
                PREC_POW
            } else {
                PREC_PROD
            }
        }
        Node::Prod(_) => PREC_PROD,
        Node::Sum(_) => PREC_SUM,
    }
}

/// Split a canonical sum term into its sign and absolute part.
fn sign_split(t: &Expr) -> (bool, Expr) {
    match t.node() {
        Node::Rat(r) if r.is_negative() => (true, Expr::rat(-r.clone())),
        Node::Prod(fs) => {
            if let Node::Rat(c) = fs[0].node() {
                if c.is_negative() {
                    let mut v = vec![Expr::rat(-c.clone())];
                    v.extend(fs[1..].iter().cloned());
                    return (true, Expr::prod(v));
                }
            }
            (false, t.clone())
        }
        _ => (false, t.clone()),
    }
}

/// Factor decomposition of a product-like expression: rational coefficient,
/// positive-power factors, negative-power factors (with positive exponents).
fn split_product(e: &Expr) -> (BigRational, Vec<(Expr, i32)>, Vec<(Expr, i32)>) {
    let mut coeff = BigRational::one();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut push = |f: &Expr| match f.node() {
        Node::Rat(r) => coeff *= r,
        Node::Pow(b, k) => {
            if *k > 0 {
                pos.push((b.clone(), *k));
            } else {
                neg.push((b.clone(), -*k));
            }
        }
        _ => pos.push((f.clone(), 1)),
    };
    match e.node() {
        Node::Prod(fs) => {
            for f in fs {
                push(f);
            }
        }
        _ => push(e),
    }
    (coeff, pos, neg)
}

fn rat_plain(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn write_plain(e: &Expr, min_prec: u8, out: &mut String) {
    let parens = prec_of(e) < min_prec;
    if parens {
        out.push('(');
    }
    match e.node() {
        Node::Rat(r) => out.push_str(&rat_plain(r)),
        Node::Sym(s) => out.push_str(&s.name()),
        Node::Fun(g, a) => {
            out.push_str(g.name());
            out.push('(');
            write_plain(a, PREC_SUM, out);
            out.push(')');
        }
        Node::Sum(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (negative, abs) = sign_split(t);
                if i == 0 {
                    if negative {
                        out.push('-');
                    }
                } else {
                    out.push_str(if negative { " - " } else { " + " });
                }
                write_plain(&abs, PREC_PROD, out);
            }
        }
        Node::Prod(_) | Node::Pow(..) => write_product_plain(e, out),
    }
    if parens {
        out.push(')');
    }
}

fn write_product_plain(e: &Expr, out: &mut String) {
    let (coeff, pos, neg) = split_product(e);
    debug_assert!(!coeff.is_zero(), "canonical products have nonzero coefficients");
    if coeff.is_negative() {
        out.push('-');
    }
    let cabs = coeff.abs();
    let mut pieces: Vec<String> = Vec::new();
    if !cabs.is_one() || pos.is_empty() {
        pieces.push(rat_plain(&cabs));
    }
    for (base, k) in &pos {
        let mut s = String::new();
        if *k == 1 {
            write_plain(base, PREC_POW, &mut s);
        } else {
            write_plain(base, PREC_ATOM, &mut s);
            s.push('^');
            s.push_str(&k.to_string());
        }
        pieces.push(s);
    }
    out.push_str(&pieces.join("*"));
    for (base, k) in &neg {
        out.push('/');
        let mut s = String::new();
        write_plain(base, PREC_ATOM, &mut s);
        out.push_str(&s);
        if *k != 1 {
            out.push('^');
            out.push_str(&k.to_string());
        }
    }
}

/// The canonical parseable rendering.
pub fn plain(e: &Expr) -> String {
    let mut out = String::new();
    write_plain(e, PREC_SUM, &mut out);
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&plain(self))
    }
}

// ----- LaTeX ---------------------------------------------------------------

fn rat_latex(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-\\frac{{{}}}{{{}}}", -r.numer(), r.denom())
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn write_latex(e: &Expr, min_prec: u8, out: &mut String) {
    let parens = prec_of(e) < min_prec;
    if parens {
        out.push_str("\\left(");
    }
    match e.node() {
        Node::Rat(r) => out.push_str(&rat_latex(r)),
        Node::Sym(s) => out.push_str(&s.latex()),
        Node::Fun(g, a) => {
            out.push('\\');
            out.push_str(g.name());
            out.push_str("\\left(");
            write_latex(a, PREC_SUM, out);
            out.push_str("\\right)");
        }
        Node::Sum(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (negative, abs) = sign_split(t);
                if i == 0 {
                    if negative {
                        out.push('-');
                    }
                } else {
                    out.push_str(if negative { " - " } else { " + " });
                }
                write_latex(&abs, PREC_PROD, out);
            }
        }
        Node::Prod(_) | Node::Pow(..) => write_product_latex(e, out),
    }
    if parens {
        out.push_str("\\right)");
    }
}

fn latex_factor_seq(coeff: &BigRational, factors: &[(Expr, i32)]) -> String {
    let mut pieces: Vec<String> = Vec::new();
    if !coeff.is_one() || factors.is_empty() {
        pieces.push(rat_latex(coeff));
    }
    for (base, k) in factors {
        let mut s = String::new();
        if *k == 1 {
            write_latex(base, PREC_POW, &mut s);
        } else {
            write_latex(base, PREC_ATOM, &mut s);
            s.push_str(&format!("^{{{k}}}"));
        }
        pieces.push(s);
    }
    pieces.join("\\,")
}

fn write_product_latex(e: &Expr, out: &mut String) {
    let (coeff, pos, neg) = split_product(e);
    if coeff.is_negative() {
        out.push('-');
    }
    let cabs = coeff.abs();
    if neg.is_empty() {
        out.push_str(&latex_factor_seq(&cabs, &pos));
    } else {
        let num = latex_factor_seq(&cabs, &pos);
        let den = latex_factor_seq(&BigRational::one(), &neg);
        out.push_str(&format!("\\frac{{{num}}}{{{den}}}"));
    }
}

/// LaTeX rendering (jets as `f_{uv}`-style subscripts, quotients as
/// `\frac`).
pub fn latex(e: &Expr) -> String {
    let mut out = String::new();
    write_latex(e, PREC_SUM, &mut out);
    out
}
