//! Immutable expression trees with canonicalizing constructors.
//!
//! Construction already performs the cheap local rewrites (flattening,
//! like-term and like-factor collection, rational folding), so a given
//! mathematical shape has one structural form per arrangement of its
//! parentheses.  Deep normalization — clearing denominators, expansion —
//! lives in [`super::rational`].
//!
//! Expressions are reference-counted DAGs; all recursive algorithms memoize
//! on node identity so shared subtrees are processed once.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num::traits::Pow;
use num::{BigInt, BigRational, One, Zero};

use super::symbol::Symbol;
use super::KernelError;

/// Unary transcendental functions kept symbolic by the kernel.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Fun {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Fun {
    pub fn name(&self) -> &'static str {
        match self {
            Fun::Exp => "exp",
            Fun::Log => "log",
            Fun::Sin => "sin",
            Fun::Cos => "cos",
        }
    }
}

/// Node shape.  Canonical invariants maintained by the smart constructors:
///
/// * `Sum`: two or more terms; at most one is `Rat` and it comes first; the
///   remaining terms have pairwise distinct coefficient-free kernels and are
///   sorted ascending.
/// * `Prod`: two or more factors; at most one is `Rat` (first, never 0 or 1);
///   the rest are non-`Rat`, non-`Prod`, sorted ascending with pairwise
///   distinct bases.
/// * `Pow`: exponent is neither 0 nor 1; the base is not `Rat` (except the
///   formal `0^k` with `k < 0`, kept so evaluation can report the division),
///   not `Pow`, not `Prod`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node {
    Rat(BigRational),
    Sym(Symbol),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Expr, i32),
    Fun(Fun, Expr),
}

struct Inner {
    node: Node,
    /// Largest symbol occurring anywhere below, `None` for constants.
    max_sym: Option<Symbol>,
    /// Whether any `Fun` node occurs below.
    has_fun: bool,
}

/// An immutable symbolic expression.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

fn rank(node: &Node) -> u8 {
    match node {
        Node::Rat(_) => 0,
        Node::Sym(_) => 1,
        Node::Fun(..) => 2,
        Node::Pow(..) => 3,
        Node::Prod(_) => 4,
        Node::Sum(_) => 5,
    }
}

impl Expr {
    fn new(node: Node) -> Expr {
        let (max_sym, has_fun) = match &node {
            Node::Rat(_) => (None, false),
            Node::Sym(s) => (Some(*s), false),
            Node::Sum(es) | Node::Prod(es) => (
                es.iter().filter_map(|e| e.max_sym()).max(),
                es.iter().any(|e| e.has_fun()),
            ),
            Node::Pow(b, _) => (b.max_sym(), b.has_fun()),
            Node::Fun(_, a) => (a.max_sym(), true),
        };
        Expr(Arc::new(Inner {
            node,
            max_sym,
            has_fun,
        }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// The largest symbol occurring in the expression, if any.
    pub fn max_sym(&self) -> Option<Symbol> {
        self.0.max_sym
    }

    /// Whether the expression contains a transcendental function node.
    pub fn has_fun(&self) -> bool {
        self.0.has_fun
    }

    fn key(&self) -> *const Inner {
        Arc::as_ptr(&self.0)
    }

    // ----- constants -------------------------------------------------------

    pub fn zero() -> Expr {
        static Z: OnceLock<Expr> = OnceLock::new();
        Z.get_or_init(|| Expr::new(Node::Rat(BigRational::zero())))
            .clone()
    }

    pub fn one() -> Expr {
        static O: OnceLock<Expr> = OnceLock::new();
        O.get_or_init(|| Expr::new(Node::Rat(BigRational::one())))
            .clone()
    }

    pub fn rat(r: BigRational) -> Expr {
        if r.is_zero() {
            Expr::zero()
        } else if r.is_one() {
            Expr::one()
        } else {
            Expr::new(Node::Rat(r))
        }
    }

    pub fn int(n: i64) -> Expr {
        Expr::rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(num: i64, den: i64) -> Expr {
        assert!(den != 0, "zero denominator in literal");
        Expr::rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::new(Node::Sym(s))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Rat(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// The value as a small integer, if the expression is an integer literal.
    pub fn as_int(&self) -> Option<i32> {
        let r = self.as_rational()?;
        if !r.is_integer() {
            return None;
        }
        let n = r.to_integer();
        i32::try_from(&n).ok()
    }

    // ----- canonicalizing constructors ------------------------------------

    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut constant = BigRational::zero();
        let mut coeffs: BTreeMap<Expr, BigRational> = BTreeMap::new();
        for t in &terms {
            collect_sum(t, &mut constant, &mut coeffs);
        }
        let mut out: Vec<Expr> = Vec::with_capacity(coeffs.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::rat(constant));
        }
        for (kernel, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            out.push(with_coeff(kernel, c));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::new(Node::Sum(out)),
        }
    }

    pub fn add2(a: &Expr, b: &Expr) -> Expr {
        Expr::sum(vec![a.clone(), b.clone()])
    }

    pub fn prod(factors: Vec<Expr>) -> Expr {
        let mut coeff = BigRational::one();
        let mut powers: BTreeMap<Expr, i64> = BTreeMap::new();
        let mut formal: Vec<Expr> = Vec::new();
        for f in &factors {
            collect_prod(f, &mut coeff, &mut powers, &mut formal);
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        let mut out: Vec<Expr> = formal;
        for (base, k) in powers {
            if k == 0 {
                continue;
            }
            let k = i32::try_from(k).expect("exponent overflow");
            out.push(Expr::pow(base, k));
        }
        out.retain(|f| !f.is_one());
        out.sort();
        if out.is_empty() {
            return Expr::rat(coeff);
        }
        if coeff.is_one() {
            return if out.len() == 1 {
                out.pop().unwrap()
            } else {
                Expr::new(Node::Prod(out))
            };
        }
        let mut v = Vec::with_capacity(out.len() + 1);
        v.push(Expr::rat(coeff));
        v.extend(out);
        Expr::new(Node::Prod(v))
    }

    pub fn mul2(a: &Expr, b: &Expr) -> Expr {
        Expr::prod(vec![a.clone(), b.clone()])
    }

    pub fn pow(base: Expr, k: i32) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k == 1 {
            return base;
        }
        enum Plan {
            Rat(BigRational),
            Nested(Expr, i32),
            Spread(Vec<Expr>),
            Keep,
        }
        let plan = match base.node() {
            Node::Rat(r) => {
                if r.is_zero() {
                    if k > 0 {
                        return Expr::zero();
                    }
                    Plan::Keep // formal 0^(k<0); evaluation reports it
                } else {
                    Plan::Rat(rational_pow(r, k))
                }
            }
            Node::Pow(b, k2) => {
                let prod = i64::from(k) * i64::from(*k2);
                Plan::Nested(b.clone(), i32::try_from(prod).expect("exponent overflow"))
            }
            Node::Prod(fs) => Plan::Spread(fs.clone()),
            _ => Plan::Keep,
        };
        match plan {
            Plan::Rat(r) => Expr::rat(r),
            Plan::Nested(b, kk) => Expr::pow(b, kk),
            Plan::Spread(fs) => {
                Expr::prod(fs.into_iter().map(|f| Expr::pow(f, k)).collect())
            }
            Plan::Keep => Expr::new(Node::Pow(base, k)),
        }
    }

    pub fn fun(f: Fun, arg: Expr) -> Expr {
        if let Node::Rat(r) = arg.node() {
            if r.is_zero() {
                match f {
                    Fun::Exp | Fun::Cos => return Expr::one(),
                    Fun::Sin => return Expr::zero(),
                    Fun::Log => {} // formal log 0; evaluation reports it
                }
            } else if r.is_one() && f == Fun::Log {
                return Expr::zero();
            }
        }
        if f == Fun::Log {
            if let Node::Fun(Fun::Exp, inner) = arg.node() {
                return inner.clone();
            }
        }
        Expr::new(Node::Fun(f, arg))
    }

    pub fn negate(&self) -> Expr {
        Expr::prod(vec![Expr::int(-1), self.clone()])
    }

    pub fn recip(&self) -> Expr {
        Expr::pow(self.clone(), -1)
    }

    // ----- structure queries ----------------------------------------------

    /// All symbols occurring in the expression.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut seen: HashSet<*const Inner> = HashSet::new();
        let mut out = BTreeSet::new();
        fn walk(e: &Expr, seen: &mut HashSet<*const Inner>, out: &mut BTreeSet<Symbol>) {
            if e.max_sym().is_none() || !seen.insert(e.key()) {
                return;
            }
            match e.node() {
                Node::Rat(_) => {}
                Node::Sym(s) => {
                    out.insert(*s);
                }
                Node::Sum(es) | Node::Prod(es) => {
                    for c in es {
                        walk(c, seen, out);
                    }
                }
                Node::Pow(b, _) => walk(b, seen, out),
                Node::Fun(_, a) => walk(a, seen, out),
            }
        }
        walk(self, &mut seen, &mut out);
        out
    }

    /// Whether `s` occurs in the expression.
    pub fn contains(&self, s: Symbol) -> bool {
        match self.max_sym() {
            None => false,
            Some(m) if m < s => false,
            Some(m) if m == s => true,
            _ => self.free_symbols().contains(&s),
        }
    }

    // ----- rewriting -------------------------------------------------------

    /// Replace symbols by expressions, all replacements read simultaneously
    /// from the original: occurrences of bound symbols inside replacement
    /// expressions are left alone.
    pub fn substitute_simultaneous(&self, binds: &BTreeMap<Symbol, Expr>) -> Expr {
        if binds.is_empty() {
            return self.clone();
        }
        self.map_symbols(&mut |s| binds.get(&s).cloned())
    }

    /// Replace symbols by expressions.  Errors if a bound symbol occurs in a
    /// replacement, so that sequential and simultaneous reading agree and the
    /// result is unambiguous.
    pub fn substitute(&self, binds: &BTreeMap<Symbol, Expr>) -> Result<Expr, KernelError> {
        for r in binds.values() {
            for s in binds.keys() {
                if r.contains(*s) {
                    return Err(KernelError::CyclicSubstitution(*s));
                }
            }
        }
        Ok(self.substitute_simultaneous(binds))
    }

    /// Rebuild the tree, replacing each symbol `s` by `f(s)` when that is
    /// `Some`.  Shared via memoization on node identity.
    pub fn map_symbols(&self, f: &mut dyn FnMut(Symbol) -> Option<Expr>) -> Expr {
        let mut memo: HashMap<*const Inner, Expr> = HashMap::new();
        fn walk(
            e: &Expr,
            f: &mut dyn FnMut(Symbol) -> Option<Expr>,
            memo: &mut HashMap<*const Inner, Expr>,
        ) -> Expr {
            if e.max_sym().is_none() {
                return e.clone();
            }
            if let Some(hit) = memo.get(&e.key()) {
                return hit.clone();
            }
            let out = match e.node() {
                Node::Rat(_) => e.clone(),
                Node::Sym(s) => f(*s).unwrap_or_else(|| e.clone()),
                Node::Sum(es) => {
                    Expr::sum(es.iter().map(|c| walk(c, f, memo)).collect())
                }
                Node::Prod(es) => {
                    Expr::prod(es.iter().map(|c| walk(c, f, memo)).collect())
                }
                Node::Pow(b, k) => Expr::pow(walk(b, f, memo), *k),
                Node::Fun(g, a) => Expr::fun(*g, walk(a, f, memo)),
            };
            memo.insert(e.key(), out.clone());
            out
        }
        walk(self, f, &mut memo)
    }

    /// Generic derivation: `rule(s)` is the derivative of the symbol `s`.
    /// Linearity, the product rule and the chain rule do the rest.
    pub fn derive_with(&self, rule: &dyn Fn(Symbol) -> Expr) -> Expr {
        let mut memo: HashMap<*const Inner, Expr> = HashMap::new();
        fn walk(
            e: &Expr,
            rule: &dyn Fn(Symbol) -> Expr,
            memo: &mut HashMap<*const Inner, Expr>,
        ) -> Expr {
            if e.max_sym().is_none() {
                return Expr::zero();
            }
            if let Some(hit) = memo.get(&e.key()) {
                return hit.clone();
            }
            let out = match e.node() {
                Node::Rat(_) => Expr::zero(),
                Node::Sym(s) => rule(*s),
                Node::Sum(es) => {
                    Expr::sum(es.iter().map(|c| walk(c, rule, memo)).collect())
                }
                Node::Prod(es) => {
                    let mut terms = Vec::with_capacity(es.len());
                    for (i, c) in es.iter().enumerate() {
                        let dc = walk(c, rule, memo);
                        if dc.is_zero() {
                            continue;
                        }
                        let mut fs: Vec<Expr> =
                            es.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()).collect();
                        fs.push(dc);
                        terms.push(Expr::prod(fs));
                    }
                    Expr::sum(terms)
                }
                Node::Pow(b, k) => {
                    let db = walk(b, rule, memo);
                    Expr::prod(vec![
                        Expr::int(i64::from(*k)),
                        Expr::pow(b.clone(), *k - 1),
                        db,
                    ])
                }
                Node::Fun(g, a) => {
                    let da = walk(a, rule, memo);
                    let outer = match g {
                        Fun::Exp => Expr::fun(Fun::Exp, a.clone()),
                        Fun::Log => Expr::pow(a.clone(), -1),
                        Fun::Sin => Expr::fun(Fun::Cos, a.clone()),
                        Fun::Cos => Expr::fun(Fun::Sin, a.clone()).negate(),
                    };
                    Expr::mul2(&outer, &da)
                }
            };
            memo.insert(e.key(), out.clone());
            out
        }
        walk(self, rule, &mut memo)
    }

    /// Partial derivative with respect to a single symbol.
    pub fn differentiate(&self, s: Symbol) -> Expr {
        if !self.contains(s) {
            return Expr::zero();
        }
        self.derive_with(&|t| if t == s { Expr::one() } else { Expr::zero() })
    }
}

fn collect_sum(e: &Expr, constant: &mut BigRational, coeffs: &mut BTreeMap<Expr, BigRational>) {
    match e.node() {
        Node::Rat(r) => *constant += r,
        Node::Sum(ts) => {
            for t in ts {
                collect_sum(t, constant, coeffs);
            }
        }
        Node::Prod(fs) => {
            if let Node::Rat(c) = fs[0].node() {
                let kernel = if fs.len() == 2 {
                    fs[1].clone()
                } else {
                    Expr::new(Node::Prod(fs[1..].to_vec()))
                };
                *coeffs.entry(kernel).or_insert_with(BigRational::zero) += c;
            } else {
                *coeffs.entry(e.clone()).or_insert_with(BigRational::zero) += BigRational::one();
            }
        }
        _ => {
            *coeffs.entry(e.clone()).or_insert_with(BigRational::zero) += BigRational::one();
        }
    }
}

fn with_coeff(kernel: Expr, c: BigRational) -> Expr {
    if c.is_one() {
        return kernel;
    }
    match kernel.node() {
        Node::Prod(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::rat(c));
            v.extend(fs.iter().cloned());
            Expr::new(Node::Prod(v))
        }
        _ => Expr::new(Node::Prod(vec![Expr::rat(c), kernel])),
    }
}

fn collect_prod(
    e: &Expr,
    coeff: &mut BigRational,
    powers: &mut BTreeMap<Expr, i64>,
    formal: &mut Vec<Expr>,
) {
    match e.node() {
        Node::Rat(r) => *coeff *= r,
        Node::Prod(fs) => {
            for f in fs {
                collect_prod(f, coeff, powers, formal);
            }
        }
        Node::Pow(b, k) => {
            if matches!(b.node(), Node::Rat(r) if r.is_zero()) {
                formal.push(e.clone());
            } else {
                *powers.entry(b.clone()).or_insert(0) += i64::from(*k);
            }
        }
        _ => {
            *powers.entry(e.clone()).or_insert(0) += 1;
        }
    }
}

pub(crate) fn rational_pow(r: &BigRational, k: i32) -> BigRational {
    debug_assert!(!r.is_zero() || k > 0);
    let e = k.unsigned_abs();
    let num = Pow::pow(r.numer(), e);
    let den = Pow::pow(r.denom(), e);
    if k >= 0 {
        BigRational::new(num, den)
    } else {
        BigRational::new(den, num)
    }
}

// ----- equality, order, hashing -------------------------------------------

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.node() == other.node()
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.node().hash(state)
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.max_sym()
            .cmp(&other.max_sym())
            .then_with(|| rank(self.node()).cmp(&rank(other.node())))
            .then_with(|| match (self.node(), other.node()) {
                (Node::Rat(a), Node::Rat(b)) => a.cmp(b),
                (Node::Sym(a), Node::Sym(b)) => a.cmp(b),
                (Node::Fun(f, a), Node::Fun(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
                (Node::Pow(a, m), Node::Pow(b, n)) => a.cmp(b).then_with(|| m.cmp(n)),
                (Node::Prod(xs), Node::Prod(ys)) | (Node::Sum(xs), Node::Sum(ys)) => {
                    xs.iter().cmp(ys.iter())
                }
                _ => unreachable!("rank already separated the kinds"),
            })
    }
}

// Debug prints a fully parenthesized raw form, independent of the pretty
// printer, so kernel test failures stay readable on their own.
impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Rat(r) => write!(f, "{r}"),
            Node::Sym(s) => write!(f, "{}", s.name()),
            Node::Sum(ts) => {
                write!(f, "(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t:?}")?;
                }
                write!(f, ")")
            }
            Node::Prod(fs) => {
                write!(f, "(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x:?}")?;
                }
                write!(f, ")")
            }
            Node::Pow(b, k) => write!(f, "{b:?}^{k}"),
            Node::Fun(g, a) => write!(f, "{}({a:?})", g.name()),
        }
    }
}

// ----- operators ----------------------------------------------------------

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add2(self, rhs)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sum(vec![self.clone(), rhs.negate()])
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul2(self, rhs)
    }
}

impl Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        Expr::prod(vec![self.clone(), rhs.recip()])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.negate()
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        &self + &rhs
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self - &rhs
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        &self / &rhs
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.negate()
    }
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
    fn like_terms_collapse() {
        let e = &(&u() + &v()) + &(&u() - &v());
        assert_eq!(e, &Expr::int(2) * &u());
    }

    #[test]
    fn like_factors_merge_exponents() {
        let e = &(&v() * &v()) * &Expr::pow(v(), 3);
        assert_eq!(e, Expr::pow(v(), 5));
        let f = &e / &Expr::pow(v(), 5);
        assert_eq!(f, Expr::one());
    }

    #[test]
    fn rationals_fold() {
        let e = &(&Expr::frac(1, 2) + &Expr::frac(1, 3)) * &Expr::int(6);
        assert_eq!(e, Expr::int(5));
        assert_eq!(Expr::pow(Expr::frac(2, 3), -2), Expr::frac(9, 4));
    }

    #[test]
    fn zero_annihilates_products() {
        let e = &Expr::zero() * &u();
        assert!(e.is_zero());
    }

    #[test]
    fn formal_zero_denominator_survives() {
        let e = Expr::pow(Expr::zero(), -1);
        assert!(matches!(e.node(), Node::Pow(b, -1) if b.is_zero()));
    }

    #[test]
    fn power_of_product_spreads() {
        let e = Expr::pow(&u() * &v(), 2);
        assert_eq!(e, &Expr::pow(u(), 2) * &Expr::pow(v(), 2));
    }

    #[test]
    fn product_rule() {
        let e = &u() * &v();
        assert_eq!(e.differentiate(Symbol::U), v());
        let w = &Expr::pow(u(), 3) * &v();
        let expect = &(&Expr::int(3) * &Expr::pow(u(), 2)) * &v();
        assert_eq!(w.differentiate(Symbol::U), expect);
    }

    #[test]
    fn chain_rule_through_functions() {
        let e = Expr::fun(Fun::Exp, &Expr::int(2) * &u());
        let d = e.differentiate(Symbol::U);
        assert_eq!(d, &Expr::int(2) * &e);

        let l = Expr::fun(Fun::Log, u());
        assert_eq!(l.differentiate(Symbol::U), Expr::pow(u(), -1));

        let s = Expr::fun(Fun::Sin, u());
        assert_eq!(s.differentiate(Symbol::U), Expr::fun(Fun::Cos, u()));
        let c = Expr::fun(Fun::Cos, u());
        assert_eq!(
            c.differentiate(Symbol::U),
            Expr::fun(Fun::Sin, u()).negate()
        );
    }

    #[test]
    fn substitute_rejects_bound_symbol_in_replacement() {
        let mut binds = BTreeMap::new();
        binds.insert(Symbol::U, &u() + &v());
        let e = &u() * &u();
        assert!(matches!(
            e.substitute(&binds),
            Err(KernelError::CyclicSubstitution(Symbol::U))
        ));
        // The simultaneous reading is fine with it.
        let got = e.substitute_simultaneous(&binds);
        assert_eq!(got, Expr::pow(&u() + &v(), 2));
    }

    #[test]
    fn simultaneous_swap() {
        let mut binds = BTreeMap::new();
        binds.insert(Symbol::U, v());
        binds.insert(Symbol::V, u());
        let e = &u() - &v();
        let got = e.substitute_simultaneous(&binds);
        assert_eq!(got, &v() - &u());
    }

    #[test]
    fn free_symbols_and_contains() {
        let e = &(&u() * &Expr::sym(Symbol::jet(1, 1))) + &Expr::int(7);
        let syms = e.free_symbols();
        assert!(syms.contains(&Symbol::U));
        assert!(syms.contains(&Symbol::jet(1, 1)));
        assert_eq!(syms.len(), 2);
        assert!(e.contains(Symbol::U));
        assert!(!e.contains(Symbol::V));
    }

    #[test]
    fn sum_terms_sorted_by_top_symbol() {
        // 2 f - 2 v f_v + v^2 f_vv, entered backwards; the canonical order
        // puts the f term first and the f_vv term last.
        let f = Expr::sym(Symbol::jet(0, 0));
        let fv = Expr::sym(Symbol::jet(0, 1));
        let fvv = Expr::sym(Symbol::jet(0, 2));
        let w = Expr::sum(vec![
            &Expr::pow(v(), 2) * &fvv,
            &(&Expr::int(-2) * &v()) * &fv,
            &Expr::int(2) * &f,
        ]);
        match w.node() {
            Node::Sum(ts) => {
                assert_eq!(ts.len(), 3);
                assert_eq!(ts[0], &Expr::int(2) * &f);
                assert_eq!(ts[1], &(&Expr::int(-2) * &v()) * &fv);
                assert_eq!(ts[2], &Expr::pow(v(), 2) * &fvv);
            }
            _ => panic!("expected a three-term sum"),
        }
    }

    #[test]
    fn log_exp_cancels() {
        let e = Expr::fun(Fun::Log, Expr::fun(Fun::Exp, u()));
        assert_eq!(e, u());
    }

    #[test]
    fn dag_sharing_is_respected() {
        // (u+v)^8 built by repeated squaring shares nodes; derivation must
        // still be linear-time and correct.
        let base = &u() + &v();
        let sq = &base * &base;
        let quad = &sq * &sq;
        let oct = &quad * &quad;
        let d = oct.differentiate(Symbol::U);
        assert_eq!(d, &Expr::int(8) * &Expr::pow(base, 7));
    }
}
