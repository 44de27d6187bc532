//! Exact symbolic kernel: interned symbols, immutable expression trees,
//! rational normal forms and equality decision procedures.
//!
//! Everything downstream (jet calculus, group actions, the moving frame and
//! the invariant-structure layer) is built on the types in this module.

mod equality;
mod eval;
mod expr;
mod poly;
mod rational;
mod symbol;

pub use equality::{canonical_equal, exact_equal, probabilistic_equal, ProbEqConfig};
pub use eval::{eval_f64, eval_rat};
pub use expr::{Expr, Fun, Node};
pub use poly::{Monomial, Poly};
pub use rational::{simplify_rational, FactoredRational, RationalNormalForm};
pub use symbol::{user_symbol, DerivWord, Dir, Symbol};
pub(crate) use symbol::symbol_from_name;

use thiserror::Error;

/// Errors raised by kernel operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    /// A bound symbol occurs free in one of the replacement expressions.
    #[error("cyclic substitution: bound symbol {0} appears in a replacement")]
    CyclicSubstitution(Symbol),
    /// A denominator normalizes to the zero polynomial.
    #[error("division by a polynomial that normalizes to zero")]
    DivisionByZeroPolynomial,
    /// The expression is outside the rational fragment handled exactly.
    #[error("expression contains transcendental subterms that cannot be cleared")]
    UnsupportedForm,
    /// Numeric evaluation hit a symbol without a binding.
    #[error("unbound symbol {0} in numeric evaluation")]
    UnboundSymbol(Symbol),
    /// Numeric evaluation left the domain of a function (log of a
    /// non-positive value, division by zero, ...).
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
}
