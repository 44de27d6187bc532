//! Rational normal forms.
//!
//! `FactoredRational` keeps denominators as a multiset of primitive
//! polynomial factors instead of one expanded product, which keeps the
//! frequent `W^k`-style denominators compact through sums and lets
//! cancellation proceed by trial division rather than gcd computation.
//! `RationalNormalForm` is the final expanded, reduced, content-normalized
//! `num/den` pair used for canonical output and exact zero tests.

use std::collections::{BTreeMap, HashMap};

use num::One;

use super::expr::{Expr, Node};
use super::poly::Poly;
use super::KernelError;

/// A quotient `num / prod(den_i^{e_i})` with the denominator kept factored.
/// Every stored factor is primitive (coprime integer coefficients, positive
/// leading coefficient) and non-constant.
#[derive(Clone, Debug)]
pub struct FactoredRational {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

impl FactoredRational {
    pub fn from_poly(p: Poly) -> FactoredRational {
        FactoredRational {
            num: p,
            den: BTreeMap::new(),
        }
    }

    /// Flatten an expression in the rational fragment.  Fails with
    /// [`KernelError::UnsupportedForm`] on transcendental nodes and with
    /// [`KernelError::DivisionByZeroPolynomial`] when a denominator
    /// normalizes to zero.
    pub fn from_expr(e: &Expr) -> Result<FactoredRational, KernelError> {
        if e.has_fun() {
            return Err(KernelError::UnsupportedForm);
        }
        let mut memo: HashMap<usize, FactoredRational> = HashMap::new();
        fr_of(e, &mut memo)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    /// Whether the rational function is identically zero.  The denominator is
    /// a nonzero polynomial by construction, so this is just the numerator.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn mul(&self, other: &FactoredRational) -> FactoredRational {
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        FactoredRational {
            num: &self.num * &other.num,
            den,
        }
    }

    fn invert(&self) -> Result<FactoredRational, KernelError> {
        if self.num.is_zero() {
            return Err(KernelError::DivisionByZeroPolynomial);
        }
        let mut new_num = Poly::one();
        for (f, e) in &self.den {
            new_num = &new_num * &f.pow(*e);
        }
        // num = unit * prim; a constant numerator normalizes to prim = 1 and
        // is folded entirely into the unit.
        let (unit, prim) = self.num.normalized();
        let mut den = BTreeMap::new();
        if !prim.is_constant() {
            den.insert(prim, 1);
        }
        Ok(FactoredRational {
            num: new_num.scale(&unit.recip()),
            den,
        })
    }

    fn pow(&self, k: i32) -> Result<FactoredRational, KernelError> {
        if k == 0 {
            return Ok(FactoredRational::from_poly(Poly::one()));
        }
        if k < 0 {
            return self.invert()?.pow(k.checked_neg().expect("exponent overflow"));
        }
        let e = k as u32;
        let mut den = BTreeMap::new();
        for (f, m) in &self.den {
            den.insert(f.clone(), m * e);
        }
        Ok(FactoredRational {
            num: self.num.pow(e),
            den,
        })
    }

    fn add_all(parts: Vec<FactoredRational>) -> FactoredRational {
        // Common denominator = factor-wise maximum multiplicity.
        let mut union: BTreeMap<Poly, u32> = BTreeMap::new();
        for p in &parts {
            for (f, e) in &p.den {
                let slot = union.entry(f.clone()).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
        let mut num = Poly::zero();
        for p in &parts {
            let mut complement = Poly::one();
            for (f, e) in &union {
                let have = p.den.get(f).copied().unwrap_or(0);
                if *e > have {
                    complement = &complement * &f.pow(e - have);
                }
            }
            num = &num + &(&p.num * &complement);
        }
        FactoredRational { num, den: union }
    }

    /// Expand, cancel by trial division and normalize the denominator
    /// content.
    pub fn into_rnf(self) -> RationalNormalForm {
        let mut num = self.num;
        let mut factors: Vec<(Poly, u32)> = self.den.into_iter().collect();
        for (f, mult) in &mut factors {
            while *mult > 0 {
                match num.exact_div(f) {
                    Some(q) => {
                        num = q;
                        *mult -= 1;
                    }
                    None => break,
                }
            }
        }
        let mut den = Poly::one();
        for (f, m) in factors {
            if m > 0 {
                den = &den * &f.pow(m);
            }
        }
        let (unit, den_prim) = den.normalized();
        let num = num.scale(&unit.recip());
        RationalNormalForm {
            num,
            den: den_prim,
        }
    }
}

fn fr_of(
    e: &Expr,
    memo: &mut HashMap<usize, FactoredRational>,
) -> Result<FactoredRational, KernelError> {
    let key = e.node() as *const Node as usize;
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let out = match e.node() {
        Node::Rat(r) => FactoredRational::from_poly(Poly::constant(r.clone())),
        Node::Sym(s) => FactoredRational::from_poly(Poly::var(*s)),
        Node::Sum(ts) => {
            let parts = ts
                .iter()
                .map(|t| fr_of(t, memo))
                .collect::<Result<Vec<_>, _>>()?;
            FactoredRational::add_all(parts)
        }
        Node::Prod(fs) => {
            let mut acc = FactoredRational::from_poly(Poly::one());
            for f in fs {
                acc = acc.mul(&fr_of(f, memo)?);
            }
            acc
        }
        Node::Pow(b, k) => fr_of(b, memo)?.pow(*k)?,
        Node::Fun(..) => return Err(KernelError::UnsupportedForm),
    };
    memo.insert(key, out.clone());
    Ok(out)
}

/// The expanded reduced form `num / den`: the denominator is primitive with
/// positive leading coefficient (and `1` for polynomial input), and every
/// explicitly factored common divisor has been cancelled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalNormalForm {
    pub num: Poly,
    pub den: Poly,
}

impl RationalNormalForm {
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_expr(&self) -> Expr {
        if self.den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            self.num.to_expr()
        } else {
            &self.num.to_expr() / &self.den.to_expr()
        }
    }
}

/// Rewrite an expression in the rational fragment as the canonical quotient
/// of an expanded numerator by a reduced, content-normalized denominator.
pub fn simplify_rational(e: &Expr) -> Result<Expr, KernelError> {
    Ok(FactoredRational::from_expr(e)?.into_rnf().to_expr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::symbol::Symbol;

    fn u() -> Expr {
        Expr::sym(Symbol::U)
    }
    fn v() -> Expr {
        Expr::sym(Symbol::V)
    }

    #[test]
    fn quotient_cancels() {
        // (u^2 - v^2) / (u + v) = u - v.
        let e = &(&(&u() * &u()) - &(&v() * &v())) / &(&u() + &v());
        assert_eq!(simplify_rational(&e).unwrap(), &u() - &v());
    }

    #[test]
    fn common_denominator_addition() {
        // 1/u + 1/v = (u + v)/(u v).
        let e = &u().recip() + &v().recip();
        let rnf = FactoredRational::from_expr(&e).unwrap().into_rnf();
        assert_eq!(rnf.num.to_expr(), &u() + &v());
        assert_eq!(rnf.den.to_expr(), &u() * &v());
    }

    #[test]
    fn difference_of_equal_forms_is_zero() {
        let a = &(&(&u() * &u()) - &(&v() * &v())) / &(&u() + &v());
        let b = &u() - &v();
        let fr = FactoredRational::from_expr(&(&a - &b)).unwrap();
        assert!(fr.is_zero());
    }

    #[test]
    fn nested_fractions() {
        // (1/(1/u)) = u.
        let e = u().recip().recip();
        assert_eq!(simplify_rational(&e).unwrap(), u());
    }

    #[test]
    fn zero_denominator_is_reported() {
        let zero = &u() - &u();
        let e = Expr::pow(zero, -1);
        assert!(matches!(
            FactoredRational::from_expr(&e),
            Err(KernelError::DivisionByZeroPolynomial)
        ));
    }

    #[test]
    fn transcendental_input_is_rejected() {
        let e = Expr::fun(crate::symkernel::expr::Fun::Exp, u());
        assert!(matches!(
            FactoredRational::from_expr(&e),
            Err(KernelError::UnsupportedForm)
        ));
    }

    #[test]
    fn denominator_content_is_normalized() {
        // u / (2v - 2u): the leading monomial of the denominator is the u
        // term (smaller symbol dominates at equal degree) with coefficient
        // -2, so the unit -2 is folded into the numerator.
        let two = Expr::int(2);
        let e = &u() / &(&(&two * &v()) - &(&two * &u()));
        let rnf = FactoredRational::from_expr(&e).unwrap().into_rnf();
        // den = -(u - v) normalized to u - v with unit -2 folded into num.
        let den = rnf.den.to_expr();
        let num = rnf.num.to_expr();
        assert_eq!(den, &u() - &v());
        assert_eq!(num, &Expr::frac(-1, 2) * &u());
    }
}
