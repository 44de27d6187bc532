//! Numeric evaluation of expressions at concrete points, in exact rational
//! arithmetic where possible and in `f64` otherwise.

use std::collections::{BTreeMap, HashMap};

use num::traits::ToPrimitive;
use num::{BigRational, Zero};

use super::expr::{rational_pow, Expr, Fun, Node};
use super::symbol::Symbol;
use super::KernelError;

/// Exact evaluation over the rationals.  Transcendental nodes are rejected;
/// a zero raised to a negative power reports a domain error.
pub fn eval_rat(
    e: &Expr,
    binds: &BTreeMap<Symbol, BigRational>,
) -> Result<BigRational, KernelError> {
    let mut memo: HashMap<usize, BigRational> = HashMap::new();
    eval_rat_inner(e, binds, &mut memo)
}

fn eval_rat_inner(
    e: &Expr,
    binds: &BTreeMap<Symbol, BigRational>,
    memo: &mut HashMap<usize, BigRational>,
) -> Result<BigRational, KernelError> {
    let key = e.node() as *const Node as usize;
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let out = match e.node() {
        Node::Rat(r) => r.clone(),
        Node::Sym(s) => binds
            .get(s)
            .cloned()
            .ok_or(KernelError::UnboundSymbol(*s))?,
        Node::Sum(ts) => {
            let mut acc = BigRational::zero();
            for t in ts {
                acc += eval_rat_inner(t, binds, memo)?;
            }
            acc
        }
        Node::Prod(fs) => {
            let mut acc = BigRational::from_integer(1.into());
            for f in fs {
                acc *= eval_rat_inner(f, binds, memo)?;
            }
            acc
        }
        Node::Pow(b, k) => {
            let bv = eval_rat_inner(b, binds, memo)?;
            if bv.is_zero() && *k < 0 {
                return Err(KernelError::NumericDomain(
                    "zero raised to a negative power".into(),
                ));
            }
            rational_pow(&bv, *k)
        }
        Node::Fun(..) => return Err(KernelError::UnsupportedForm),
    };
    memo.insert(key, out.clone());
    Ok(out)
}

/// Floating-point evaluation.  Any non-finite intermediate is reported as a
/// domain error so callers can resample rather than propagate NaN.
pub fn eval_f64(e: &Expr, binds: &BTreeMap<Symbol, f64>) -> Result<f64, KernelError> {
    let mut memo: HashMap<usize, f64> = HashMap::new();
    eval_f64_inner(e, binds, &mut memo)
}

fn eval_f64_inner(
    e: &Expr,
    binds: &BTreeMap<Symbol, f64>,
    memo: &mut HashMap<usize, f64>,
) -> Result<f64, KernelError> {
    let key = e.node() as *const Node as usize;
    if let Some(hit) = memo.get(&key) {
        return Ok(*hit);
    }
    let out = match e.node() {
        Node::Rat(r) => r
            .to_f64()
            .ok_or_else(|| KernelError::NumericDomain("rational outside f64 range".into()))?,
        Node::Sym(s) => *binds.get(s).ok_or(KernelError::UnboundSymbol(*s))?,
        Node::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_f64_inner(t, binds, memo)?;
            }
            acc
        }
        Node::Prod(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval_f64_inner(f, binds, memo)?;
            }
            acc
        }
        Node::Pow(b, k) => {
            let bv = eval_f64_inner(b, binds, memo)?;
            if bv == 0.0 && *k < 0 {
                return Err(KernelError::NumericDomain("division by zero".into()));
            }
            bv.powi(*k)
        }
        Node::Fun(g, a) => {
            let av = eval_f64_inner(a, binds, memo)?;
            match g {
                Fun::Exp => av.exp(),
                Fun::Log => {
                    if av <= 0.0 {
                        return Err(KernelError::NumericDomain(
                            "logarithm of a non-positive value".into(),
                        ));
                    }
                    av.ln()
                }
                Fun::Sin => av.sin(),
                Fun::Cos => av.cos(),
            }
        }
    };
    if !out.is_finite() {
        return Err(KernelError::NumericDomain("non-finite value".into()));
    }
    memo.insert(key, out);
    Ok(out)
}
