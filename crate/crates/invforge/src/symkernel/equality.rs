//! Equality decision procedures.
//!
//! Two tiers: rational-fragment differences are decided exactly through the
//! factored-rational flattening; anything containing transcendental nodes is
//! compared by deterministic random sampling.  The functions here only ever
//! claim equality after the appropriate certificate (zero numerator, or
//! agreement at every sample point), so a `true` from the exact tier is a
//! proof and a `true` from the sampling tier is wrong only with vanishing
//! probability.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::{eval_f64, eval_rat};
use super::expr::Expr;
use super::rational::FactoredRational;
use super::KernelError;

/// Tuning for the sampling-based comparison.
#[derive(Clone, Copy, Debug)]
pub struct ProbEqConfig {
    /// Number of successful sample points required.
    pub samples: usize,
    /// Relative tolerance for the floating-point tier.
    pub rel_tol: f64,
    /// RNG seed; fixed by default so results are reproducible.
    pub seed: u64,
}

impl Default for ProbEqConfig {
    fn default() -> Self {
        ProbEqConfig {
            samples: 40,
            rel_tol: 1e-9,
            seed: 0x1644_0157,
        }
    }
}

/// Exact decision for the rational fragment: flatten the difference and test
/// the numerator for zero.  Errors on transcendental input or a denominator
/// that normalizes to zero.
pub fn exact_equal(a: &Expr, b: &Expr) -> Result<bool, KernelError> {
    let diff = a - b;
    Ok(FactoredRational::from_expr(&diff)?.is_zero())
}

/// Sampling comparison at deterministic pseudo-random points.
///
/// Rational-fragment differences are evaluated in exact arithmetic and must
/// vanish identically at each point; transcendental differences are
/// evaluated in `f64` on the positive orthant (every function in the kernel
/// is analytic, so agreement on an open set already forces agreement on the
/// whole connected domain) within `rel_tol`.  Returns `false` when not
/// enough valid sample points can be found, so failure to evaluate is never
/// read as equality.
pub fn probabilistic_equal(a: &Expr, b: &Expr, cfg: &ProbEqConfig) -> bool {
    let diff = a - b;
    if diff.is_zero() {
        return true;
    }
    let syms: Vec<_> = diff.free_symbols().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let exact = !diff.has_fun();
    let max_attempts = cfg.samples * 25;
    let mut good = 0;
    for _ in 0..max_attempts {
        if good >= cfg.samples {
            break;
        }
        if exact {
            let mut binds: BTreeMap<_, BigRational> = BTreeMap::new();
            for s in &syms {
                let num = rng.gen_range(-40i64..=40);
                let den = rng.gen_range(1i64..=12);
                binds.insert(*s, BigRational::new(BigInt::from(num), BigInt::from(den)));
            }
            match eval_rat(&diff, &binds) {
                Ok(val) => {
                    if !val.is_zero() {
                        return false;
                    }
                    good += 1;
                }
                Err(_) => continue,
            }
        } else {
            let mut fa: BTreeMap<_, f64> = BTreeMap::new();
            let mut fb: BTreeMap<_, f64> = BTreeMap::new();
            for s in &syms {
                let x: f64 = rng.gen_range(0.2..2.2);
                fa.insert(*s, x);
                fb.insert(*s, x);
            }
            let (va, vb) = match (eval_f64(a, &fa), eval_f64(b, &fb)) {
                (Ok(x), Ok(y)) => (x, y),
                _ => continue,
            };
            let scale = 1.0 + va.abs().max(vb.abs());
            if (va - vb).abs() > cfg.rel_tol * scale {
                return false;
            }
            good += 1;
        }
    }
    good >= cfg.samples
}

/// The default equality decision: exact where the expressions allow it,
/// sampling otherwise.
pub fn canonical_equal(a: &Expr, b: &Expr) -> bool {
    if !a.has_fun() && !b.has_fun() {
        match exact_equal(a, b) {
            Ok(r) => return r,
            // A formal zero denominator: the difference is not a
            // well-defined rational function, treat as unequal.
            Err(KernelError::DivisionByZeroPolynomial) => return false,
            Err(_) => {}
        }
    }
    probabilistic_equal(a, b, &ProbEqConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::expr::Fun;
    use crate::symkernel::symbol::Symbol;

    fn u() -> Expr {
        Expr::sym(Symbol::U)
    }
    fn v() -> Expr {
        Expr::sym(Symbol::V)
    }

    #[test]
    fn binomial_identity_exact() {
        let lhs = Expr::pow(&u() + &v(), 2);
        let rhs = Expr::sum(vec![
            Expr::pow(u(), 2),
            &(&Expr::int(2) * &u()) * &v(),
            Expr::pow(v(), 2),
        ]);
        assert!(exact_equal(&lhs, &rhs).unwrap());
        assert!(canonical_equal(&lhs, &rhs));
    }

    #[test]
    fn rational_difference_detected() {
        let a = &u() / &v();
        assert!(!canonical_equal(&a, &u()));
    }

    #[test]
    fn exp_addition_law() {
        let lhs = Expr::fun(Fun::Exp, &u() + &v());
        let rhs = &Expr::fun(Fun::Exp, u()) * &Expr::fun(Fun::Exp, v());
        assert!(canonical_equal(&lhs, &rhs));
    }

    #[test]
    fn pythagorean_identity() {
        let lhs = &Expr::pow(Expr::fun(Fun::Sin, u()), 2) + &Expr::pow(Expr::fun(Fun::Cos, u()), 2);
        assert!(canonical_equal(&lhs, &Expr::one()));
    }

    #[test]
    fn transcendental_difference_detected() {
        assert!(!canonical_equal(
            &Expr::fun(Fun::Exp, u()),
            &Expr::fun(Fun::Exp, v())
        ));
        assert!(!canonical_equal(
            &Expr::fun(Fun::Sin, u()),
            &Expr::fun(Fun::Cos, u())
        ));
    }

    #[test]
    fn exact_tier_rejects_residual_transcendentals() {
        // Structurally identical function nodes cancel at construction, so
        // the exact tier still decides this pair.
        let e = Expr::fun(Fun::Exp, u());
        assert_eq!(exact_equal(&e, &e).unwrap(), true);
        // A difference that retains a function node is out of its reach.
        let other = Expr::fun(Fun::Exp, v());
        assert!(matches!(
            exact_equal(&e, &other),
            Err(KernelError::UnsupportedForm)
        ));
    }

    #[test]
    fn log_quotient_law() {
        // log(u/v) = log u - log v on the positive orthant.
        let lhs = Expr::fun(Fun::Log, &u() / &v());
        let rhs = &Expr::fun(Fun::Log, u()) - &Expr::fun(Fun::Log, v());
        assert!(canonical_equal(&lhs, &rhs));
    }
}
