//! Randomized numeric verification on top of the exact layers: invariance
//! of the normalized invariants under sampled group elements, functional
//! independence by Jacobian rank, and a necessary-condition equivalence
//! test comparing sampled signature sets.
//!
//! Everything is seeded and deterministic: the ChaCha stream is split per
//! sample index, points live on a dyadic grid, and group parameters are
//! exact rationals, so identical seeds reproduce identical reports
//! byte-wise.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, ToPrimitive};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exprparse;
use crate::groupaction::{formal_transformed_jet, random_element, GroupElement, Mode, TaylorPhi};
use crate::invstructure::invariant_op;
use crate::jetspace::JetFunction;
use crate::jetspace::concrete_jet;
use crate::movingframe::{classify, is_phantom, normalized_invariant, RegularityClass};
use crate::symkernel::{eval_f64, eval_rat, simplify_rational, Dir, Expr, Symbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error("no regular point found within the rejection budget")]
    NoRegularPoint,
}

/// Per-sample rejection budget before giving up on a regular point.
const REJECTION_LIMIT: usize = 1000;
/// Relative-error bound above which an invariance sample counts as a failure.
const INVARIANCE_TOL: f64 = 1e-9;
/// Conditioning floor: reject points where `|W|` falls below this fraction
/// of the local jet scale.  Order-4 invariants divide by `W³`, so the
/// floor is what keeps f64 evaluation within the 1e-9 budget.
const W_FLOOR: f64 = 5e-2;
/// Reject group elements whose `φ'` is smaller than this at the sample
/// point; the implicit operators divide by it.
const PHI1_FLOOR: f64 = 0.5;
/// Relative singular-value threshold for numeric rank.
const SVD_RTOL: f64 = 1e-8;

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

struct Point {
    u: BigRational,
    v: BigRational,
    uf: f64,
    vf: f64,
}

/// `u` on the dyadic grid over `[−1, 1]`, `v` over `[1/2, 2]`.
fn draw_point(rng: &mut ChaCha8Rng) -> Point {
    let uk = (rng.next_u64() % 2049) as i64 - 1024;
    let vk = (rng.next_u64() % 1537) as i64 + 512;
    let u = BigRational::new(BigInt::from(uk), BigInt::from(1024));
    let v = BigRational::new(BigInt::from(vk), BigInt::from(1024));
    let (uf, vf) = (rat_f64(&u), rat_f64(&v));
    Point { u, v, uf, vf }
}

/// Evaluates every jet of `f` at the point; `None` on domain errors or
/// non-finite values.  The result binds `u`, `v`, and all `f_ij`.
fn jet_values(
    jets: &BTreeMap<(u8, u8), Expr>,
    p: &Point,
) -> Option<BTreeMap<Symbol, f64>> {
    let mut base = BTreeMap::new();
    base.insert(Symbol::U, p.uf);
    base.insert(Symbol::V, p.vf);
    let mut out = base.clone();
    for (&(i, j), e) in jets {
        let val = eval_f64(e, &base).ok()?;
        if !val.is_finite() {
            return None;
        }
        out.insert(Symbol::jet(i, j), val);
    }
    Some(out)
}

/// Exact counterpart of [`jet_values`] for rational right-hand sides; the
/// grid point is rational, so the jets are too.  `None` when `f` leaves
/// the rational fragment.
fn jet_values_rat(
    jets: &BTreeMap<(u8, u8), Expr>,
    p: &Point,
) -> Option<BTreeMap<Symbol, BigRational>> {
    let mut base = BTreeMap::new();
    base.insert(Symbol::U, p.u.clone());
    base.insert(Symbol::V, p.v.clone());
    let mut out = base.clone();
    for (&(i, j), e) in jets {
        out.insert(Symbol::jet(i, j), eval_rat(e, &base).ok()?);
    }
    Some(out)
}

/// Scale-aware regularity for sampling: `|W|` must clear a fixed fraction
/// of `1 + |f| + |v f_v| + |v² f_vv|`.  Coarser than the stratum
/// classifier on purpose — downstream evaluation divides by `W`.
fn w_scale_ok(binds: &BTreeMap<Symbol, f64>) -> bool {
    let g = |s: Symbol| binds.get(&s).copied().unwrap_or(0.0);
    let v = g(Symbol::V);
    let (f, f01, f02) = (g(Symbol::jet(0, 0)), g(Symbol::jet(0, 1)), g(Symbol::jet(0, 2)));
    let w = 2.0 * f - 2.0 * v * f01 + v * v * f02;
    let scale = 1.0 + f.abs() + (v * f01).abs() + (v * v * f02).abs();
    w.abs() >= W_FLOOR * scale
}

/// `(lhs, rhs, relative error)` per invariant: the invariant evaluated on
/// the transformed jets at the corresponding point against its value on
/// the original jets.  Exact when the sample stays rational, f64 otherwise.
fn evaluate_sample(
    order: u8,
    invariants: &[(u8, u8, Expr)],
    jets: &BTreeMap<(u8, u8), Expr>,
    binds: &BTreeMap<Symbol, f64>,
    p: &Point,
    c: &[BigRational; 4],
    phi: &TaylorPhi,
    d1: f64,
) -> Option<Vec<(f64, f64, f64)>> {
    if let Some(rjets) = jet_values_rat(jets, p) {
        if let Some(out) = evaluate_sample_exact(order, invariants, &rjets, p, c, phi) {
            return Some(out);
        }
    }
    evaluate_sample_f64(order, invariants, binds, p, c, phi, d1)
}

fn evaluate_sample_exact(
    order: u8,
    invariants: &[(u8, u8, Expr)],
    rjets: &BTreeMap<Symbol, BigRational>,
    p: &Point,
    c: &[BigRational; 4],
    phi: &TaylorPhi,
) -> Option<Vec<(f64, f64, f64)>> {
    let mut full = rjets.clone();
    for (k, ck) in c.iter().enumerate() {
        full.insert(Symbol::group_c(k as u8), ck.clone());
    }
    for k in 0..=(order + 2) {
        full.insert(Symbol::phi(k), phi.deriv_at(usize::from(k), &p.u));
    }
    let mut t = BTreeMap::new();
    t.insert(Symbol::V, phi.deriv_at(1, &p.u) * &p.v / &c[1]);
    for i in 0..=order {
        for j in 0..=(order - i) {
            t.insert(
                Symbol::jet(i, j),
                eval_rat(&formal_transformed_jet(i, j), &full).ok()?,
            );
        }
    }
    let mut out = Vec::with_capacity(invariants.len());
    for (_, _, closed) in invariants {
        let lhs = eval_rat(closed, &t).ok()?;
        let rhs = eval_rat(closed, rjets).ok()?;
        let diff = &lhs - &rhs;
        let (lhs_f, rhs_f) = (rat_f64(&lhs), rat_f64(&rhs));
        let rel = rat_f64(&diff).abs() / (1.0 + rhs_f.abs());
        out.push((lhs_f, rhs_f, rel));
    }
    Some(out)
}

fn evaluate_sample_f64(
    order: u8,
    invariants: &[(u8, u8, Expr)],
    binds: &BTreeMap<Symbol, f64>,
    p: &Point,
    c: &[BigRational; 4],
    phi: &TaylorPhi,
    d1: f64,
) -> Option<Vec<(f64, f64, f64)>> {
    let mut full = binds.clone();
    for (k, ck) in c.iter().enumerate() {
        full.insert(Symbol::group_c(k as u8), rat_f64(ck));
    }
    for k in 0..=(order + 2) {
        full.insert(Symbol::phi(k), rat_f64(&phi.deriv_at(usize::from(k), &p.u)));
    }
    let mut t = BTreeMap::new();
    t.insert(Symbol::V, d1 * p.vf / rat_f64(&c[1]));
    for i in 0..=order {
        for j in 0..=(order - i) {
            let val = eval_f64(&formal_transformed_jet(i, j), &full).ok()?;
            if !val.is_finite() {
                return None;
            }
            t.insert(Symbol::jet(i, j), val);
        }
    }
    let mut out = Vec::with_capacity(invariants.len());
    for (_, _, closed) in invariants {
        let lhs = eval_f64(closed, &t).ok()?;
        let rhs = eval_f64(closed, binds).ok()?;
        out.push((lhs, rhs, (lhs - rhs).abs() / (1.0 + rhs.abs())));
    }
    Some(out)
}

/// One invariance mismatch beyond the reporting tolerance.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InvarianceFailure {
    pub f: String,
    pub point: [f64; 2],
    pub group: serde_json::Value,
    pub invariant: [u8; 2],
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InvarianceReport {
    pub samples: u32,
    #[serde(rename = "maxRelError")]
    pub max_rel_error: f64,
    pub failures: Vec<InvarianceFailure>,
}

/// Checks `I(transformed jets at the corresponding point) = I(original
/// jets)` for every non-phantom `I^{ij}` with `i+j ≤ order`, over
/// `n_samples` draws of (regular point, group element).  Relative error is
/// `|lhs − rhs| / (1 + |rhs|)`; the per-sample stream split keeps reports
/// reproducible byte-wise.  `φ` is polynomial of degree `order + 2` — the
/// deepest derivative the transformed jets contain.
pub fn invariance_test(
    f: &Expr,
    order: u8,
    n_samples: u32,
    seed: u64,
) -> Result<InvarianceReport, HarnessError> {
    assert!((2..=4).contains(&order), "invariance orders are 2 through 4");
    assert!(n_samples >= 1);
    let invariants: Vec<(u8, u8, Expr)> = (0..=order)
        .flat_map(|i| (0..=(order - i)).map(move |j| (i, j)))
        .filter(|&(i, j)| !is_phantom(i, j))
        .map(|(i, j)| (i, j, normalized_invariant(i, j).expr))
        .collect();
    let jets = concrete_jet(f, order);
    let f_name = exprparse::plain(f);

    let mut max_rel_error = 0.0_f64;
    let mut failures = Vec::new();
    for sample in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(sample) + 1);
        let mut found = false;
        for _ in 0..REJECTION_LIMIT {
            let p = draw_point(&mut rng);
            let g_seed = rng.next_u64();
            let Some(binds) = jet_values(&jets, &p) else {
                continue;
            };
            if !w_scale_ok(&binds) {
                continue;
            }
            let g = random_element(g_seed, Mode::Numeric, usize::from(order) + 2);
            let GroupElement::Numeric { c, phi } = &g else {
                unreachable!()
            };
            let d1 = rat_f64(&phi.deriv_at(1, &p.u));
            if d1.abs() < PHI1_FLOOR {
                continue;
            }
            // Rational right-hand sides run the whole identity in exact
            // arithmetic — point, group parameters, and the transformed-jet
            // table all live in ℚ, so the relative error is genuinely zero.
            // Transcendental ones fall back to f64.
            let Some(pairs) = evaluate_sample(order, &invariants, &jets, &binds, &p, c, phi, d1)
            else {
                continue;
            };
            for ((i, j, _), (lhs, rhs, rel)) in invariants.iter().zip(pairs.iter()) {
                max_rel_error = max_rel_error.max(*rel);
                if !rel.is_finite() || *rel > INVARIANCE_TOL {
                    failures.push(InvarianceFailure {
                        f: f_name.clone(),
                        point: [p.uf, p.vf],
                        group: g.to_json().unwrap_or(serde_json::Value::Null),
                        invariant: [*i, *j],
                        lhs: *lhs,
                        rhs: *rhs,
                    });
                }
            }
            found = true;
            break;
        }
        if !found {
            return Err(HarnessError::NoRegularPoint);
        }
    }
    Ok(InvarianceReport {
        samples: n_samples,
        max_rel_error,
        failures,
    })
}

/// One signature-space sample: the basis invariants of order ≤ 3 evaluated
/// at a regular point.
#[derive(Clone, Debug)]
pub struct SignatureSample {
    pub point: [f64; 2],
    pub values: [f64; 4],
    pub regularity: RegularityClass,
}

/// Closed forms of `(I^{11}, I^{03}, D_u^i I^{11}, D_v^i I^{11})`.
fn signature_forms() -> &'static [Expr; 4] {
    static FORMS: OnceLock<[Expr; 4]> = OnceLock::new();
    FORMS.get_or_init(|| {
        let i11 = normalized_invariant(1, 1).expr;
        let i03 = normalized_invariant(0, 3).expr;
        let d = |dir: Dir| {
            let raw = invariant_op(dir).apply(&i11);
            simplify_rational(&raw).unwrap_or(raw)
        };
        [i11.clone(), i03, d(Dir::U), d(Dir::V)]
    })
}

fn signature_jet_order() -> u8 {
    signature_forms()
        .iter()
        .map(|e| JetFunction::new(e.clone()).order())
        .max()
        .unwrap_or(0) as u8
}

fn eval_signature(binds: &BTreeMap<Symbol, f64>) -> Option<[f64; 4]> {
    let forms = signature_forms();
    let mut out = [0.0; 4];
    for (slot, form) in out.iter_mut().zip(forms.iter()) {
        let val = eval_f64(form, binds).ok()?;
        if !val.is_finite() {
            return None;
        }
        *slot = val;
    }
    Some(out)
}

/// Samples the signature map of `f` at `n_samples` regular points.
pub fn signature_samples(
    f: &Expr,
    n_samples: u32,
    seed: u64,
) -> Result<Vec<SignatureSample>, HarnessError> {
    assert!(n_samples >= 1);
    let jets = concrete_jet(f, signature_jet_order());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let budget = REJECTION_LIMIT + 40 * n_samples as usize;
    for _ in 0..budget {
        if out.len() == n_samples as usize {
            break;
        }
        let p = draw_point(&mut rng);
        let Some(binds) = jet_values(&jets, &p) else {
            continue;
        };
        if !w_scale_ok(&binds) {
            continue;
        }
        let Some(values) = eval_signature(&binds) else {
            continue;
        };
        let regularity = match classify(f, &p.u, &p.v) {
            Ok(r) => r,
            Err(_) => continue,
        };
        out.push(SignatureSample {
            point: [p.uf, p.vf],
            values,
            regularity,
        });
    }
    if out.is_empty() {
        return Err(HarnessError::NoRegularPoint);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    Consistent,
    Inequivalent,
    Inconclusive,
}

impl EquivVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquivVerdict::Consistent => "consistent",
            EquivVerdict::Inequivalent => "inequivalent",
            EquivVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome of the signature comparison, with the statistics the verdict
/// was judged on.  `gap_forward` is the largest nearest-neighbor distance
/// from an `f1`-signature to the `f2` set; thresholds add three times the
/// target set's own sampling resolution to `tol·(1+scale)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivReport {
    pub verdict: EquivVerdict,
    pub gap_forward: f64,
    pub gap_backward: f64,
    pub threshold_forward: f64,
    pub threshold_backward: f64,
    pub scale: f64,
    pub resolution: [f64; 2],
    pub kept: [usize; 2],
}

fn sup_dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Largest distance from a point of `from` to its nearest neighbor in `to`.
fn directed_gap(from: &[[f64; 4]], to: &[[f64; 4]]) -> f64 {
    from.iter()
        .map(|x| {
            to.iter()
                .map(|y| sup_dist(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Largest nearest-neighbor spacing inside one sample set — the resolution
/// to which that set describes its signature manifold.
fn internal_resolution(set: &[[f64; 4]]) -> f64 {
    if set.len() < 2 {
        return 0.0;
    }
    set.iter()
        .enumerate()
        .map(|(i, x)| {
            set.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, y)| sup_dist(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Necessary-condition equivalence test: equivalent equations have equal
/// signature manifolds, so sampled signature sets that sit far apart
/// witness inequivalence.  Both functions are sampled over the same window
/// from the same proposal stream; a point is anomalous when its distance
/// to the other set exceeds `tol·(1+scale)` plus three times that set's
/// own sampling resolution (gaps the finite sample cannot resolve are not
/// evidence).  The verdict is never "equivalent": a consistent result
/// only means this test found no witness.
pub fn equivalence_necessary(
    f1: &Expr,
    f2: &Expr,
    n_samples: u32,
    tol: f64,
    seed: u64,
) -> Result<EquivReport, HarnessError> {
    assert!(n_samples >= 1);
    assert!(tol >= 0.0);
    let order = signature_jet_order();
    let jets = [concrete_jet(f1, order), concrete_jet(f2, order)];
    let mut sigs: [Vec<[f64; 4]>; 2] = [Vec::new(), Vec::new()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = REJECTION_LIMIT + 40 * n_samples as usize;
    for _ in 0..budget {
        if sigs.iter().all(|s| s.len() == n_samples as usize) {
            break;
        }
        let p = draw_point(&mut rng);
        for side in 0..2 {
            if sigs[side].len() == n_samples as usize {
                continue;
            }
            let Some(binds) = jet_values(&jets[side], &p) else {
                continue;
            };
            if !w_scale_ok(&binds) {
                continue;
            }
            if let Some(values) = eval_signature(&binds) {
                sigs[side].push(values);
            }
        }
    }
    if sigs.iter().any(|s| s.is_empty()) {
        return Err(HarnessError::NoRegularPoint);
    }
    let scale = sigs
        .iter()
        .flatten()
        .flatten()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    let resolution = [internal_resolution(&sigs[0]), internal_resolution(&sigs[1])];
    let gap_forward = directed_gap(&sigs[0], &sigs[1]);
    let gap_backward = directed_gap(&sigs[1], &sigs[0]);
    let threshold_forward = tol * (1.0 + scale) + 3.0 * resolution[1];
    let threshold_backward = tol * (1.0 + scale) + 3.0 * resolution[0];
    let full = sigs.iter().all(|s| s.len() == n_samples as usize);
    let witnessed = gap_forward > threshold_forward || gap_backward > threshold_backward;
    let verdict = if !full {
        EquivVerdict::Inconclusive
    } else if witnessed {
        EquivVerdict::Inequivalent
    } else {
        EquivVerdict::Consistent
    };
    Ok(EquivReport {
        verdict,
        gap_forward,
        gap_backward,
        threshold_forward,
        threshold_backward,
        scale,
        resolution,
        kept: [sigs[0].len(), sigs[1].len()],
    })
}

/// Numeric functional independence: the maximum over sampled regular
/// points of the rank of `∂(invariants)/∂(jet coordinates)`, with
/// singular values kept above `1e-8·max(1, σ_max)`.
pub fn independence_rank(
    invariants: &[Expr],
    f: &Expr,
    n_points: u32,
    seed: u64,
) -> Result<usize, HarnessError> {
    assert!(!invariants.is_empty());
    assert!(n_points >= 1);
    let vars: Vec<Symbol> = {
        let mut set = std::collections::BTreeSet::new();
        for e in invariants {
            for s in e.free_symbols() {
                if matches!(s, Symbol::U | Symbol::V | Symbol::Jet { .. }) {
                    set.insert(s);
                }
            }
        }
        set.into_iter().collect()
    };
    let partials: Vec<Vec<Expr>> = invariants
        .iter()
        .map(|e| vars.iter().map(|&s| e.differentiate(s)).collect())
        .collect();
    let order = invariants
        .iter()
        .map(|e| JetFunction::new(e.clone()).order())
        .max()
        .unwrap_or(0) as u8;
    let jets = concrete_jet(f, order);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0usize;
    let mut kept = 0u32;
    let budget = REJECTION_LIMIT + 40 * n_points as usize;
    for _ in 0..budget {
        if kept == n_points {
            break;
        }
        let p = draw_point(&mut rng);
        let Some(binds) = jet_values(&jets, &p) else {
            continue;
        };
        if !w_scale_ok(&binds) {
            continue;
        }
        let mut entries = Vec::with_capacity(invariants.len() * vars.len());
        let mut ok = true;
        for row in &partials {
            for d in row {
                match eval_f64(d, &binds) {
                    Ok(v) if v.is_finite() => entries.push(v),
                    _ => {
                        ok = false;
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        let m = DMatrix::from_row_slice(invariants.len(), vars.len(), &entries);
        let svd = m.svd(false, false);
        let smax = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > SVD_RTOL * smax.max(1.0))
            .count();
        best = best.max(rank);
        kept += 1;
    }
    if kept == 0 {
        return Err(HarnessError::NoRegularPoint);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprparse::parse;
    use crate::invstructure::functional_basis;
    use crate::movingframe::Stratum;

    fn f(src: &str) -> Expr {
        parse(src).unwrap()
    }

    fn corpus() -> Vec<Expr> {
        ["v^3", "exp(u)", "u+v^2", "exp(u)+v^3", "u^2+u*v^3", "sin(u)+v^3"]
            .iter()
            .map(|s| f(s))
            .collect()
    }

    #[test]
    fn invariance_holds_on_the_exponential_rhs() {
        let report = invariance_test(&f("exp(u)"), 2, 100, 7).unwrap();
        assert_eq!(report.samples, 100);
        assert!(report.max_rel_error <= 1e-9, "{}", report.max_rel_error);
        assert!(report.failures.is_empty());
    }

    #[test]
    fn invariance_holds_at_order_four_across_the_corpus() {
        for rhs in corpus() {
            let report = invariance_test(&rhs, 4, 8, 20260822).unwrap();
            assert!(
                report.max_rel_error <= 1e-9,
                "{}: {}",
                exprparse::plain(&rhs),
                report.max_rel_error
            );
        }
    }

    #[test]
    fn invariance_rejects_the_ultra_singular_rhs() {
        assert_eq!(
            invariance_test(&f("v^2"), 2, 1, 3).unwrap_err(),
            HarnessError::NoRegularPoint
        );
    }

    #[test]
    fn reports_are_reproducible_byte_wise() {
        let a = invariance_test(&f("exp(u)"), 3, 6, 123).unwrap();
        let b = invariance_test(&f("exp(u)"), 3, 6, 123).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = invariance_test(&f("exp(u)"), 3, 6, 124).unwrap();
        assert!(a.max_rel_error != c.max_rel_error || a.failures == c.failures);
    }

    #[test]
    fn report_json_uses_the_documented_keys() {
        let report = invariance_test(&f("v^3"), 2, 2, 5).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        let obj = v.as_object().unwrap();
        assert!(obj.contains_key("samples"));
        assert!(obj.contains_key("maxRelError"));
        assert!(obj.contains_key("failures"));
        assert_eq!(obj.len(), 3);
    }

    #[test]
    fn cubic_signatures_are_constant() {
        let samples = signature_samples(&f("v^3"), 12, 11).unwrap();
        assert_eq!(samples.len(), 12);
        for s in &samples {
            assert!(matches!(s.regularity.tag, Stratum::Regular));
            let want = [-6.0, 6.0, 0.0, 0.0];
            for (got, w) in s.values.iter().zip(want.iter()) {
                assert!((got - w).abs() <= 1e-9, "{:?}", s.values);
            }
        }
    }

    #[test]
    fn distinct_constant_invariants_witness_inequivalence() {
        let r = equivalence_necessary(&f("exp(u)"), &f("v^3"), 64, 1e-9, 42).unwrap();
        assert_eq!(r.verdict, EquivVerdict::Inequivalent);
        let swapped = equivalence_necessary(&f("v^3"), &f("exp(u)"), 64, 1e-9, 42).unwrap();
        assert_eq!(swapped.verdict, EquivVerdict::Inequivalent);
        assert_eq!(r.gap_forward, swapped.gap_backward);
        assert_eq!(r.gap_backward, swapped.gap_forward);
    }

    #[test]
    fn identical_rhs_is_consistent_with_zero_gap() {
        let r = equivalence_necessary(&f("u+v^2"), &f("u+v^2"), 50, 1e-9, 9).unwrap();
        assert_eq!(r.verdict, EquivVerdict::Consistent);
        assert_eq!(r.gap_forward, 0.0);
        assert_eq!(r.gap_backward, 0.0);
    }

    #[test]
    fn group_image_of_the_exponential_rhs_stays_consistent() {
        // Affine-φ element (a₀, a₁, C₁, C₂) = (1/4, 5/4, 5/4, 1/2): its
        // action keeps the image inside the expression grammar,
        //   f₂ = (a₁/C₁²)·exp((u−a₀)/a₁) − (C₂/C₁)·v.
        let f1 = f("exp(u)");
        let f2 = f("4/5*exp((4*u-1)/5) - 2/5*v");
        // Correspondence oracle: the signature of f₂ at the image of a
        // point equals the signature of f₁ at the point itself.
        // (1/2, 1) ↦ (a₀ + a₁/2, a₁·1/C₁) = (7/8, 1).
        let order = signature_jet_order();
        let eval_at = |rhs: &Expr, uf: f64, vf: f64| -> [f64; 4] {
            let jets = concrete_jet(rhs, order);
            let p = Point {
                u: BigRational::new(BigInt::from((uf * 1024.0) as i64), BigInt::from(1024)),
                v: BigRational::new(BigInt::from((vf * 1024.0) as i64), BigInt::from(1024)),
                uf,
                vf,
            };
            eval_signature(&jet_values(&jets, &p).unwrap()).unwrap()
        };
        let s1 = eval_at(&f1, 0.5, 1.0);
        let s2 = eval_at(&f2, 0.875, 1.0);
        for (a, b) in s1.iter().zip(s2.iter()) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{s1:?} vs {s2:?}");
        }
        let r = equivalence_necessary(&f1, &f2, 100, 1e-9, 20260822).unwrap();
        assert_eq!(r.verdict, EquivVerdict::Consistent, "{r:?}");
    }

    #[test]
    fn equivalence_needs_regular_points_on_both_sides() {
        assert_eq!(
            equivalence_necessary(&f("v^2"), &f("v^3"), 10, 1e-9, 1).unwrap_err(),
            HarnessError::NoRegularPoint
        );
    }

    #[test]
    fn jacobian_ranks_match_functional_independence() {
        let rhs = f("exp(u)+v^3");
        let i11 = normalized_invariant(1, 1).expr;
        assert_eq!(independence_rank(&[i11.clone()], &rhs, 20, 2).unwrap(), 1);
        let pair = [i11.clone(), &Expr::int(2) * &i11];
        assert_eq!(independence_rank(&pair, &rhs, 20, 2).unwrap(), 1);
        let basis: Vec<Expr> = functional_basis(3)
            .unwrap()
            .iter()
            .map(|b| b.closed_form())
            .collect();
        assert_eq!(independence_rank(&basis, &rhs, 20, 2).unwrap(), 4);
    }

    #[test]
    fn rank_needs_regular_points() {
        let i11 = normalized_invariant(1, 1).expr;
        assert_eq!(
            independence_rank(&[i11], &f("v^2"), 5, 1).unwrap_err(),
            HarnessError::NoRegularPoint
        );
    }
}
