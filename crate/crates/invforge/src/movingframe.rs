//! Relative invariants `W` and `S`, stratification of right-hand sides,
//! the solved moving frame on the regular stratum (`W ≠ 0`), and the
//! invariantization map producing the normalized invariants `I^{ij}`.
//!
//! The frame is obtained by normalizing `ũ = 0`, `ṽ = 1`, `f̃ = 1`,
//! `f̃₀₁ = f̃₀₂ = 0` and `f̃_{i0} = 0`; each higher `φ^(i+2)` comes from a
//! symbolic linear solve of the corresponding normalization equation, never
//! from a transcribed expansion.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num::{BigRational, ToPrimitive, Zero};
use thiserror::Error;

use crate::groupaction::formal_transformed_jet;
use crate::jetspace::{concrete_jet, jet, v_expr, JetFunction};
use crate::symkernel::{
    eval_f64, eval_rat, simplify_rational, Expr, KernelError, Symbol,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    /// A normalization equation failed to be linear with nonzero pivot in
    /// the next unknown; cannot happen on the regular stratum.
    #[error("frame linear solve degenerated")]
    FrameUnsolvable,
    /// The frame was solved to a lower order than the expression needs.
    #[error("frame supports order {have}, expression needs order {need}")]
    FrameOrderTooLow { need: u32, have: u32 },
}

/// `W = 2f − 2v·f_v + v²·f_vv` over formal jets.
pub fn w_expr() -> Expr {
    let v = v_expr();
    let two = Expr::int(2);
    &(&(&two * &jet(0, 0)) - &(&two * &(&v * &jet(0, 1)))) + &(&(&v * &v) * &jet(0, 2))
}

/// `S = 2f_u − v·f_uv` over formal jets.
pub fn s_expr() -> Expr {
    &(&Expr::int(2) * &jet(1, 0)) - &(&v_expr() * &jet(1, 1))
}

pub(crate) fn substitute_jets(e: &Expr, jets: &BTreeMap<(u8, u8), Expr>) -> Expr {
    let binds: BTreeMap<Symbol, Expr> = jets
        .iter()
        .map(|(&(i, j), v)| (Symbol::jet(i, j), v.clone()))
        .collect();
    e.substitute_simultaneous(&binds)
}

/// `W` on a given jet map (entries up to order 2 required).
pub fn relative_w(jets: &BTreeMap<(u8, u8), Expr>) -> Expr {
    substitute_jets(&w_expr(), jets)
}

/// `S` on a given jet map.
pub fn relative_s(jets: &BTreeMap<(u8, u8), Expr>) -> Expr {
    substitute_jets(&s_expr(), jets)
}

/// `W` of a concrete right-hand side, as a function of `(u, v)`.
pub fn w_of_rhs(f: &Expr) -> Expr {
    relative_w(&concrete_jet(f, 2))
}

/// `S` of a concrete right-hand side.
pub fn s_of_rhs(f: &Expr) -> Expr {
    relative_s(&concrete_jet(f, 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    Regular,
    Singular,
    UltraSingular,
}

impl Stratum {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stratum::Regular => "regular",
            Stratum::Singular => "singular",
            Stratum::UltraSingular => "ultra-singular",
        }
    }
}

/// Outcome of classifying one `(f, point)`: the stratum plus the witness
/// values of `W` and `S` there.  `exact` records whether the zero tests ran
/// on exact rationals or through the scale-aware float threshold.
#[derive(Clone, Debug)]
pub struct RegularityClass {
    pub tag: Stratum,
    pub w: f64,
    pub s: f64,
    pub exact: bool,
}

/// Stratum of `f` at `(u₀, v₀)`: regular iff `W ≠ 0`, singular iff `W = 0 ∧
/// S ≠ 0`, ultra-singular otherwise.  Rational right-hand sides are decided
/// exactly; transcendental ones use `|W| > 1e-8·(1 + |f| + |v f_v| +
/// |v² f_vv|)` (and the analogous scale for `S`).
pub fn classify(
    f: &Expr,
    u0: &BigRational,
    v0: &BigRational,
) -> Result<RegularityClass, KernelError> {
    let jets = concrete_jet(f, 2);
    let w_e = relative_w(&jets);
    let s_e = relative_s(&jets);
    let mut rat_binds = BTreeMap::new();
    rat_binds.insert(Symbol::U, u0.clone());
    rat_binds.insert(Symbol::V, v0.clone());
    match (eval_rat(&w_e, &rat_binds), eval_rat(&s_e, &rat_binds)) {
        (Ok(w), Ok(s)) => {
            let tag = if !w.is_zero() {
                Stratum::Regular
            } else if !s.is_zero() {
                Stratum::Singular
            } else {
                Stratum::UltraSingular
            };
            Ok(RegularityClass {
                tag,
                w: w.to_f64().unwrap_or(f64::NAN),
                s: s.to_f64().unwrap_or(f64::NAN),
                exact: true,
            })
        }
        (Err(KernelError::UnsupportedForm), _) | (_, Err(KernelError::UnsupportedForm)) => {
            let mut binds = BTreeMap::new();
            binds.insert(Symbol::U, u0.to_f64().unwrap_or(f64::NAN));
            binds.insert(Symbol::V, v0.to_f64().unwrap_or(f64::NAN));
            let at = |e: &Expr| eval_f64(e, &binds);
            let vv = binds[&Symbol::V];
            let w = at(&w_e)?;
            let s = at(&s_e)?;
            let w_scale = 1.0
                + at(&jets[&(0, 0)])?.abs()
                + (vv * at(&jets[&(0, 1)])?).abs()
                + (vv * vv * at(&jets[&(0, 2)])?).abs();
            let s_scale = 1.0 + at(&jets[&(1, 0)])?.abs() + (vv * at(&jets[&(1, 1)])?).abs();
            let tag = if w.abs() > 1e-8 * w_scale {
                Stratum::Regular
            } else if s.abs() > 1e-8 * s_scale {
                Stratum::Singular
            } else {
                Stratum::UltraSingular
            };
            Ok(RegularityClass {
                tag,
                w,
                s,
                exact: false,
            })
        }
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// `C₁ = W/(2v)` in frame coordinates.
fn c1_value() -> Expr {
    &w_expr() * &Expr::pow(&Expr::int(2) * &v_expr(), -1)
}

/// `C₂ = f_v − v·f_vv`.
fn c2_value() -> Expr {
    &jet(0, 1) - &(&v_expr() * &jet(0, 2))
}

/// The frame value of `φ^(k)`, solved once and cached process-wide.
/// `φ = 0`, `φ′ = W/(2v²)`, `φ″ = (W/(4v²))·f_vv`; every higher derivative
/// solves its normalization equation `f̃_{i0} = 0` linearly given the
/// lower ones.
fn frame_phi(k: u8) -> Result<Expr, FrameError> {
    static SOLVED: OnceLock<Mutex<BTreeMap<u8, Expr>>> = OnceLock::new();
    let table = SOLVED.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(e) = table.lock().unwrap().get(&k) {
        return Ok(e.clone());
    }
    let v = v_expr();
    let val = match k {
        0 => Expr::zero(),
        1 => &w_expr() * &Expr::pow(&Expr::int(2) * &(&v * &v), -1),
        2 => &(&w_expr() * &Expr::pow(&Expr::int(4) * &(&v * &v), -1)) * &jet(0, 2),
        _ => {
            let mut binds: BTreeMap<Symbol, Expr> = BTreeMap::new();
            binds.insert(Symbol::group_c(1), c1_value());
            binds.insert(Symbol::group_c(2), c2_value());
            for m in 0..k {
                binds.insert(Symbol::phi(m), frame_phi(m)?);
            }
            let eq = formal_transformed_jet(k - 2, 0)
                .substitute(&binds)
                .expect("frame values contain no group parameters");
            let unknown = Symbol::phi(k);
            let a = eq.differentiate(unknown);
            if a.contains(unknown) {
                return Err(FrameError::FrameUnsolvable);
            }
            let a = simplify_rational(&a).map_err(|_| FrameError::FrameUnsolvable)?;
            if a == Expr::zero() {
                return Err(FrameError::FrameUnsolvable);
            }
            let mut zero_bind = BTreeMap::new();
            zero_bind.insert(unknown, Expr::zero());
            let b = eq
                .substitute(&zero_bind)
                .expect("constant substitution cannot cycle");
            simplify_rational(&(&b.negate() * &a.recip())).map_err(|_| FrameError::FrameUnsolvable)?
        }
    };
    Ok(table
        .lock()
        .unwrap()
        .entry(k)
        .or_insert(val)
        .clone())
}

/// A solved moving frame: symbolic values for `C₁`, `C₂`, and `φ^(k)` for
/// `k ≤ order + 2`, all as differential functions of `(v, f_ij)` on the
/// regular stratum.  `order` bounds the jet order of expressions it can
/// invariantize.
#[derive(Debug)]
pub struct Frame {
    order: u8,
    values: BTreeMap<Symbol, Expr>,
    cache: Mutex<BTreeMap<(u8, u8), Expr>>,
}

/// Solves the frame far enough to carry `φ^(k)` for `k ≤ max_order`;
/// `max_order ≥ 2`.
pub fn solve_frame(max_order: u8) -> Result<Frame, FrameError> {
    assert!(max_order >= 2, "the frame starts at second order");
    let mut values = BTreeMap::new();
    values.insert(Symbol::group_c(1), c1_value());
    values.insert(Symbol::group_c(2), c2_value());
    for k in 0..=max_order {
        values.insert(Symbol::phi(k), frame_phi(k)?);
    }
    let frame = Frame {
        order: max_order - 2,
        values,
        cache: Mutex::new(BTreeMap::new()),
    };
    // Cross-check the normalization of v: the frame must send v to exactly 1.
    let vt = &(&frame.values[&Symbol::phi(1)] * &v_expr())
        * &frame.values[&Symbol::group_c(1)].recip();
    if simplify_rational(&vt).map_err(|_| FrameError::FrameUnsolvable)? != Expr::one() {
        return Err(FrameError::FrameUnsolvable);
    }
    Ok(frame)
}

impl Frame {
    /// Highest jet order this frame can invariantize.
    pub fn order(&self) -> u8 {
        self.order
    }

    /// Solved value of a frame parameter, if this frame carries it.
    pub fn value(&self, s: Symbol) -> Option<&Expr> {
        self.values.get(&s)
    }

    /// All `(parameter, value)` pairs in display order.
    pub fn entries(&self) -> impl Iterator<Item = (&Symbol, &Expr)> {
        self.values.iter()
    }

    /// The invariantized jet `ι(f_ij)` as a differential function of
    /// `(v, f_kl)`: the formal transformed jet with this frame substituted.
    /// Only the `u`-index costs frame depth — `f̃_ij` contains `φ^(k)` for
    /// `k ≤ i+2` and no higher.
    pub fn inv_jet(&self, i: u8, j: u8) -> Result<Expr, FrameError> {
        if u32::from(i) > u32::from(self.order) {
            return Err(FrameError::FrameOrderTooLow {
                need: u32::from(i),
                have: u32::from(self.order),
            });
        }
        if let Some(e) = self.cache.lock().unwrap().get(&(i, j)) {
            return Ok(e.clone());
        }
        let raw = formal_transformed_jet(i, j)
            .substitute(&self.values)
            .expect("frame values contain no group parameters");
        let val = simplify_rational(&raw).map_err(|_| FrameError::FrameUnsolvable)?;
        Ok(self
            .cache
            .lock()
            .unwrap()
            .entry((i, j))
            .or_insert(val)
            .clone())
    }

    /// Invariantization: replaces `u ↦ 0`, `v ↦ 1`, and each jet by its
    /// invariantized value.  Exact; idempotent on invariant expressions.
    pub fn invariantize(&self, e: &Expr) -> Result<Expr, FrameError> {
        let need = JetFunction::new(e.clone()).order();
        if need > u32::from(self.order) {
            return Err(FrameError::FrameOrderTooLow {
                need,
                have: u32::from(self.order),
            });
        }
        let mut binds: BTreeMap<Symbol, Expr> = BTreeMap::new();
        binds.insert(Symbol::U, Expr::zero());
        binds.insert(Symbol::V, Expr::one());
        for s in e.free_symbols() {
            if let Symbol::Jet { i, j } = s {
                binds.insert(s, self.inv_jet(i, j)?);
            }
        }
        let out = e.substitute_simultaneous(&binds);
        if out.has_fun() {
            Ok(out)
        } else {
            simplify_rational(&out).map_err(|_| FrameError::FrameUnsolvable)
        }
    }
}

/// Whether `(i, j)` indexes a phantom invariant — one pinned to a constant
/// by the normalization (`I⁰⁰ = 1`, `I⁰¹ = I⁰² = 0`, `I^{i0} = 0`).
pub fn is_phantom(i: u8, j: u8) -> bool {
    j == 0 || (i == 0 && j <= 2)
}

/// A normalized differential invariant `I^{ij} = ι(f_ij)` with its
/// recomputed differential order and phantom flag.
#[derive(Clone, Debug)]
pub struct Invariant {
    pub i: u8,
    pub j: u8,
    pub expr: Expr,
    pub order: u32,
    pub phantom: bool,
}

/// `I^{ij}`, cached process-wide.
pub fn normalized_invariant(i: u8, j: u8) -> Invariant {
    static CACHE: OnceLock<Mutex<BTreeMap<(u8, u8), Invariant>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(inv) = cache.lock().unwrap().get(&(i, j)) {
        return inv.clone();
    }
    let frame = solve_frame((i + 2).max(2)).expect("frame solve is exact on the regular stratum");
    let expr = frame
        .inv_jet(i, j)
        .expect("order bound holds by construction");
    let inv = Invariant {
        i,
        j,
        order: JetFunction::new(expr.clone()).order(),
        phantom: is_phantom(i, j),
        expr,
    };
    cache
        .lock()
        .unwrap()
        .entry((i, j))
        .or_insert(inv)
        .clone()
}

/// `I^{ij}` specialized to a concrete right-hand side: jets substituted and
/// the result simplified, leaving a function of `(u, v)`.
pub fn invariant_on_rhs(i: u8, j: u8, f: &Expr) -> Expr {
    let inv = normalized_invariant(i, j);
    let order = JetFunction::new(inv.expr.clone()).order() as u8;
    let sub = substitute_jets(&inv.expr, &concrete_jet(f, order));
    if sub.has_fun() {
        sub
    } else {
        simplify_rational(&sub).unwrap_or(sub)
    }
}

/// Side-by-side comparison of the leading (order-`i`) coefficients of the
/// solved `φ^(i+2)` against two closed-form candidates: the pattern the
/// recursion itself implies, `(W/(2v⁴))·C(i,i′)·(−v·f_vv/2)^{i−i′}`, and the
/// transcribed shorthand `(W/(2v))·C(i,i′)·(v²/W)^{i−i′}`.  The solve is
/// authoritative; the flags report which candidate survives.
#[derive(Clone, Debug)]
pub struct FrameLeadingReport {
    pub i: u8,
    /// Coefficient of `f_{i′, i−i′}` in the solved `φ^(i+2)`, for `i′ = 0..=i`.
    pub solved: Vec<Expr>,
    pub recursion_pattern: Vec<Expr>,
    pub transcribed_pattern: Vec<Expr>,
    pub matches_recursion: bool,
    pub matches_transcribed: bool,
}

/// Builds the leading-coefficient report for `φ^(i+2)`; needs `i ≥ 3` so the
/// order-`i` jets sit strictly above the frame's own second-order data and
/// the coefficient extraction is unambiguous.
pub fn frame_leading_report(i: u8) -> Result<FrameLeadingReport, FrameError> {
    assert!(i >= 3, "leading extraction needs order-i jets above order 2");
    let val = frame_phi(i + 2)?;
    let v = v_expr();
    let w = w_expr();
    let binom = |n: u8, k: u8| -> i64 {
        let mut acc: i64 = 1;
        for t in 0..k.min(n - k) {
            acc = acc * (i64::from(n) - i64::from(t)) / (i64::from(t) + 1);
        }
        acc
    };
    let mut solved = Vec::new();
    let mut rec = Vec::new();
    let mut tra = Vec::new();
    for ip in 0..=i {
        let coeff = val.differentiate(Symbol::jet(ip, i - ip));
        let coeff = simplify_rational(&coeff).map_err(|_| FrameError::FrameUnsolvable)?;
        solved.push(coeff);
        let b = Expr::int(binom(i, ip));
        let head_rec = &w * &Expr::pow(&Expr::int(2) * &Expr::pow(v.clone(), 4), -1);
        let step_rec = Expr::pow(
            &(&v * &jet(0, 2)).negate() * &Expr::frac(1, 2),
            i32::from(i - ip),
        );
        rec.push(&(&head_rec * &b) * &step_rec);
        let head_tra = &w * &Expr::pow(&Expr::int(2) * &v, -1);
        let step_tra = Expr::pow(&(&v * &v) * &w.recip(), i32::from(i - ip));
        tra.push(&(&head_tra * &b) * &step_tra);
    }
    let matches = |pat: &[Expr]| -> bool {
        solved
            .iter()
            .zip(pat)
            .all(|(a, b)| crate::symkernel::canonical_equal(a, b))
    };
    Ok(FrameLeadingReport {
        i,
        matches_recursion: matches(&rec),
        matches_transcribed: matches(&tra),
        solved,
        recursion_pattern: rec,
        transcribed_pattern: tra,
    })
}
