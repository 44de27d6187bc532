//! The jet space of right-hand sides: coordinates `(u, v, f_ij)` with
//! `f_ij` the formal derivative `∂^{i+j} f / ∂u^i ∂v^j`, total derivative
//! operators, concrete jets of a given `f`, and prolongation of
//! infinitesimal symmetry-algebra elements to all jet levels.

use std::collections::BTreeMap;

use crate::symkernel::{Dir, Expr, Symbol};

/// Shorthand for the jet coordinate `f_ij` as an expression.
pub fn jet(i: u8, j: u8) -> Expr {
    Expr::sym(Symbol::jet(i, j))
}

/// The base variable `u` as an expression.
pub fn u_expr() -> Expr {
    Expr::sym(Symbol::U)
}

/// The base variable `v` as an expression.
pub fn v_expr() -> Expr {
    Expr::sym(Symbol::V)
}

fn phi(k: u8) -> Expr {
    Expr::sym(Symbol::phi(k))
}

fn c(k: u8) -> Expr {
    Expr::sym(Symbol::alg_c(k))
}

fn binom(n: u8, k: u8) -> Expr {
    let mut acc: u128 = 1;
    for t in 0..k.min(n - k) {
        acc = acc * (n as u128 - t as u128) / (t as u128 + 1);
    }
    Expr::int(acc as i64)
}

/// A differential function on the jet space, tagged with its (recomputed)
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetFunction {
    pub expr: Expr,
}

impl JetFunction {
    pub fn new(expr: Expr) -> JetFunction {
        JetFunction { expr }
    }

    /// Maximal `i + j` over the jet symbols present (0 when there are none).
    pub fn order(&self) -> u32 {
        self.expr
            .free_symbols()
            .into_iter()
            .filter_map(|s| match s {
                Symbol::Jet { i, j } => Some(u32::from(i) + u32::from(j)),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn total_derivative(&self, dir: Dir) -> JetFunction {
        JetFunction::new(total_derivative(&self.expr, dir))
    }
}

/// Total derivative on the jet space: `u` and `v` are the independent
/// variables, jets shift by one (`f_ij ↦ f_{i+1,j}` or `f_{i,j+1}`), the
/// group function derivatives follow `u` (`φ^(k) ↦ φ^(k+1)` under the
/// `u`-derivative), and all group/algebra parameters are constant.
pub fn total_derivative(e: &Expr, dir: Dir) -> Expr {
    e.derive_with(&|s| match (dir, s) {
        (Dir::U, Symbol::U) | (Dir::V, Symbol::V) => Expr::one(),
        (Dir::U, Symbol::Jet { i, j }) => jet(i + 1, j),
        (Dir::V, Symbol::Jet { i, j }) => jet(i, j + 1),
        (Dir::U, Symbol::Phi(k)) => phi(k + 1),
        _ => Expr::zero(),
    })
}

/// Iterated total derivative: `i` steps in `u`, then `j` steps in `v` (the
/// operators commute).
pub fn total_derivative_mixed(e: &Expr, i: u8, j: u8) -> Expr {
    let mut acc = e.clone();
    for _ in 0..j {
        acc = total_derivative(&acc, Dir::V);
    }
    for _ in 0..i {
        acc = total_derivative(&acc, Dir::U);
    }
    acc
}

/// A first-order operator `a·D_u + b·D_v` with expression coefficients.
///
/// Covers both the implicit differentiation operators attached to a group
/// element and the operators of invariant differentiation; composition of
/// applications gives higher-order action.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearDiffOp {
    pub u_coeff: Expr,
    pub v_coeff: Expr,
}

impl LinearDiffOp {
    pub fn new(u_coeff: Expr, v_coeff: Expr) -> LinearDiffOp {
        LinearDiffOp { u_coeff, v_coeff }
    }

    /// Plain `D_u`.
    pub fn d_u() -> LinearDiffOp {
        LinearDiffOp::new(Expr::one(), Expr::zero())
    }

    /// Plain `D_v`.
    pub fn d_v() -> LinearDiffOp {
        LinearDiffOp::new(Expr::zero(), Expr::one())
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        &(&self.u_coeff * &total_derivative(e, Dir::U))
            + &(&self.v_coeff * &total_derivative(e, Dir::V))
    }

    /// The commutator `[self, other]` as another first-order operator: the
    /// coefficients are obtained by letting each operator act on the other's
    /// coefficient functions.
    pub fn commutator(&self, other: &LinearDiffOp) -> LinearDiffOp {
        LinearDiffOp::new(
            &self.apply(&other.u_coeff) - &other.apply(&self.u_coeff),
            &self.apply(&other.v_coeff) - &other.apply(&self.v_coeff),
        )
    }
}

/// All jets `∂^{i+j} f / ∂u^i ∂v^j` of a concrete right-hand side, for
/// `i + j ≤ max_order`.
pub fn concrete_jet(f: &Expr, max_order: u8) -> BTreeMap<(u8, u8), Expr> {
    assert!(
        f.free_symbols()
            .iter()
            .all(|s| matches!(s, Symbol::U | Symbol::V)),
        "concrete right-hand sides depend on u and v only"
    );
    let mut out: BTreeMap<(u8, u8), Expr> = BTreeMap::new();
    out.insert((0, 0), f.clone());
    for total in 1..=max_order {
        for i in 0..=total {
            let j = total - i;
            let e = if j > 0 {
                out[&(i, j - 1)].differentiate(Symbol::V)
            } else {
                out[&(i - 1, 0)].differentiate(Symbol::U)
            };
            out.insert((i, j), e);
        }
    }
    out
}

/// An infinitesimal element of the equivalence algebra, written in the full
/// coordinates.  `tau` and `xi` (the `t`- and `x`-components) are carried for
/// completeness; the action on jet space uses only the `(u, v, f)`-components
/// `phi_comp`, `eta_comp`, `theta_comp`.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub tau: Expr,
    pub xi: Expr,
    pub phi_comp: Expr,
    pub eta_comp: Expr,
    pub theta_comp: Expr,
}

impl VectorField {
    /// The general algebra element, with symbolic parameters `c0..c3` and
    /// the formal function `phi` with its derivatives:
    /// `tau = 2 c1 t + c0`, `xi = c1 x + c2 t + c3`, `phi`-component `phi(u)`,
    /// `eta = (phi' - c1) v`, `theta = (phi' - 2 c1) f - c2 v - phi'' v^2`.
    pub fn general() -> VectorField {
        let t = Expr::sym(crate::symkernel::user_symbol("t"));
        let x = Expr::sym(crate::symkernel::user_symbol("x"));
        let v = v_expr();
        let f = jet(0, 0);
        VectorField {
            tau: &(&Expr::int(2) * &(&c(1) * &t)) + &c(0),
            xi: Expr::sum(vec![&c(1) * &x, &c(2) * &t, c(3)]),
            phi_comp: phi(0),
            eta_comp: &(&phi(1) - &c(1)) * &v,
            theta_comp: Expr::sum(vec![
                &(&phi(1) - &(&Expr::int(2) * &c(1))) * &f,
                (&c(2) * &v).negate(),
                (&phi(2) * &Expr::pow(v, 2)).negate(),
            ]),
        }
    }
}

/// The `f_ij`-component of the infinite prolongation, built through the
/// total-derivative operators:
/// `θ^{ij} = D_u^i D_v^j (θ − φ f_10 − η f_01) + φ f_{i+1,j} + η f_{i,j+1}`.
/// Works for any vector field whose components live on the jet space.
pub fn prolong_component_operators(i: u8, j: u8, field: &VectorField) -> Expr {
    let characteristic = Expr::sum(vec![
        field.theta_comp.clone(),
        (&field.phi_comp * &jet(1, 0)).negate(),
        (&field.eta_comp * &jet(0, 1)).negate(),
    ]);
    let q = total_derivative_mixed(&characteristic, i, j);
    Expr::sum(vec![
        q,
        &field.phi_comp * &jet(i + 1, j),
        &field.eta_comp * &jet(i, j + 1),
    ])
}

/// Closed form of the same component for the general algebra element:
///
/// ```text
/// θ^{ij} = −(j−1) Σ_{i'=0..i} C(i,i') φ^{(i'+1)} f_{i−i',j}
///          − Σ_{i'=1..i} C(i,i') ( φ^{(i')} f_{i−i'+1,j} + v φ^{(i'+1)} f_{i−i',j+1} )
///          + (j−2) c1 f_ij
///          − c2 δ_{0i} (δ_{0j} v + δ_{1j})
///          − φ^{(i+2)} (δ_{0j} v² + 2 δ_{1j} v + 2 δ_{2j})
/// ```
pub fn prolong_component(i: u8, j: u8) -> Expr {
    let v = v_expr();
    let mut terms: Vec<Expr> = Vec::new();
    if j != 1 {
        let factor = Expr::int(-(i64::from(j) - 1));
        for ip in 0..=i {
            terms.push(Expr::prod(vec![
                factor.clone(),
                binom(i, ip),
                phi(ip + 1),
                jet(i - ip, j),
            ]));
        }
    }
    for ip in 1..=i {
        let b = binom(i, ip);
        terms.push(Expr::prod(vec![
            Expr::int(-1),
            b.clone(),
            phi(ip),
            jet(i - ip + 1, j),
        ]));
        terms.push(Expr::prod(vec![
            Expr::int(-1),
            b,
            v.clone(),
            phi(ip + 1),
            jet(i - ip, j + 1),
        ]));
    }
    terms.push(Expr::prod(vec![
        Expr::int(i64::from(j) - 2),
        c(1),
        jet(i, j),
    ]));
    if i == 0 {
        if j == 0 {
            terms.push(Expr::prod(vec![Expr::int(-1), c(2), v.clone()]));
        } else if j == 1 {
            terms.push(c(2).negate());
        }
    }
    match j {
        0 => terms.push(Expr::prod(vec![
            Expr::int(-1),
            phi(i + 2),
            Expr::pow(v, 2),
        ])),
        1 => terms.push(Expr::prod(vec![Expr::int(-2), phi(i + 2), v])),
        2 => terms.push(Expr::prod(vec![Expr::int(-2), phi(i + 2)])),
        _ => {}
    }
    Expr::sum(terms)
}

/// Apply the infinite prolongation of `field` to a differential function:
/// `pr Q (e) = φ ∂_u e + η ∂_v e + Σ θ^{ij} ∂_{f_ij} e`.
pub fn apply_prolonged(field: &VectorField, e: &Expr) -> Expr {
    let mut terms = vec![
        &field.phi_comp * &e.differentiate(Symbol::U),
        &field.eta_comp * &e.differentiate(Symbol::V),
    ];
    for s in e.free_symbols() {
        if let Symbol::Jet { i, j } = s {
            let de = e.differentiate(s);
            if !de.is_zero() {
                terms.push(&prolong_component_operators(i, j, field) * &de);
            }
        }
    }
    Expr::sum(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprparse::parse;
    use crate::symkernel::{canonical_equal, exact_equal};
    use proptest::prelude::*;

    fn w_expr() -> Expr {
        // 2 f - 2 v f_v + v^2 f_vv.
        Expr::sum(vec![
            &Expr::int(2) * &jet(0, 0),
            Expr::prod(vec![Expr::int(-2), v_expr(), jet(0, 1)]),
            &Expr::pow(v_expr(), 2) * &jet(0, 2),
        ])
    }

    #[test]
    fn jets_shift_under_total_derivatives() {
        assert_eq!(total_derivative(&jet(0, 0), Dir::V), jet(0, 1));
        let e = &v_expr() * &jet(0, 1);
        assert_eq!(total_derivative(&e, Dir::U), &v_expr() * &jet(1, 1));
    }

    #[test]
    fn v_derivative_of_w_telescopes() {
        let got = total_derivative(&w_expr(), Dir::V);
        let expect = &Expr::pow(v_expr(), 2) * &jet(0, 3);
        assert!(exact_equal(&got, &expect).unwrap());
    }

    #[test]
    fn concrete_jets_of_the_standard_examples() {
        let v3 = parse("v^3").unwrap();
        let jets = concrete_jet(&v3, 3);
        assert_eq!(jets[&(0, 1)], parse("3*v^2").unwrap());
        assert_eq!(jets[&(0, 2)], parse("6*v").unwrap());
        assert_eq!(jets[&(0, 3)], Expr::int(6));
        assert!(jets[&(1, 0)].is_zero());
        assert!(jets[&(1, 1)].is_zero());

        let eu = parse("exp(u)").unwrap();
        let jets = concrete_jet(&eu, 2);
        assert_eq!(jets[&(1, 0)], eu);
        assert_eq!(jets[&(2, 0)], eu);
        assert!(jets[&(0, 1)].is_zero());
        assert!(jets[&(1, 1)].is_zero());

        let mixed = parse("u + v^2").unwrap();
        let jets = concrete_jet(&mixed, 2);
        assert_eq!(jets[&(1, 0)], Expr::one());
        assert_eq!(jets[&(0, 1)], &Expr::int(2) * &v_expr());
        assert_eq!(jets[&(0, 2)], Expr::int(2));
        assert!(jets[&(1, 1)].is_zero());
    }

    #[test]
    fn order_is_recomputed() {
        let e = JetFunction::new(&jet(1, 2) + &jet(3, 0));
        assert_eq!(e.order(), 3);
        assert_eq!(e.total_derivative(Dir::V).order(), 4);
        assert_eq!(JetFunction::new(v_expr()).order(), 0);
    }

    #[test]
    fn lowest_prolongation_components() {
        let field = VectorField::general();
        // (0,0): the theta component itself.
        assert!(exact_equal(&prolong_component(0, 0), &field.theta_comp).unwrap());
        // (0,1): -c1 f_01 - c2 - 2 phi'' v.
        let expect = Expr::sum(vec![
            Expr::prod(vec![
                Expr::int(-1),
                Expr::sym(Symbol::alg_c(1)),
                jet(0, 1),
            ]),
            Expr::sym(Symbol::alg_c(2)).negate(),
            Expr::prod(vec![Expr::int(-2), Expr::sym(Symbol::phi(2)), v_expr()]),
        ]);
        assert!(exact_equal(&prolong_component(0, 1), &expect).unwrap());
        // (0,2): contains -2 phi'' and is free of c2.
        let theta02 = prolong_component(0, 2);
        assert!(theta02.contains(Symbol::phi(2)));
        assert!(!theta02.contains(Symbol::alg_c(2)));
        let expect02 = Expr::sum(vec![
            Expr::prod(vec![Expr::int(-1), Expr::sym(Symbol::phi(1)), jet(0, 2)]),
            &Expr::int(-2) * &Expr::sym(Symbol::phi(2)),
        ]);
        assert!(exact_equal(&theta02, &expect02).unwrap());
    }

    #[test]
    fn closed_form_matches_operator_construction_to_order_four() {
        let field = VectorField::general();
        for i in 0..=4u8 {
            for j in 0..=(4 - i) {
                let closed = prolong_component(i, j);
                let ops = prolong_component_operators(i, j, &field);
                assert!(
                    exact_equal(&closed, &ops).unwrap(),
                    "component ({i},{j}) differs:\n closed = {closed}\n ops    = {ops}"
                );
            }
        }
    }

    // Random differential functions over low-order jets.
    fn arb_jet_fn() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(u_expr()),
            Just(v_expr()),
            Just(jet(0, 0)),
            Just(jet(0, 1)),
            Just(jet(1, 0)),
            Just(jet(1, 1)),
            (-6i64..=6).prop_map(Expr::int),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(Expr::sum),
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(Expr::prod),
                inner.clone().prop_map(|e| Expr::pow(e, 2)),
                inner.prop_map(|e| if e.is_zero() { Expr::one() } else { Expr::pow(e, -1) }),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn mixed_total_derivatives_commute(e in arb_jet_fn()) {
            let uv = total_derivative(&total_derivative(&e, Dir::U), Dir::V);
            let vu = total_derivative(&total_derivative(&e, Dir::V), Dir::U);
            prop_assert!(canonical_equal(&uv, &vu), "on {e}");
        }
    }

    // Polynomial-only strategy, so substituted denominators cannot vanish.
    fn arb_poly_jet_fn() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(u_expr()),
            Just(v_expr()),
            Just(jet(0, 0)),
            Just(jet(0, 1)),
            Just(jet(1, 0)),
            (-6i64..=6).prop_map(Expr::int),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(Expr::sum),
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(Expr::prod),
                inner.prop_map(|e| Expr::pow(e, 2)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn concrete_jets_commute_with_total_derivatives(
            e in arb_poly_jet_fn(),
            dir in prop_oneof![Just(Dir::U), Just(Dir::V)],
        ) {
            // Substituting the jets of f = u + v^2 turns the total
            // derivative into the plain partial derivative.
            let f = parse("u + v^2").unwrap();
            let jets = concrete_jet(&f, 2);
            let binds: std::collections::BTreeMap<_, _> = jets
                .iter()
                .map(|((i, j), e)| (Symbol::jet(*i, *j), e.clone()))
                .collect();
            let lhs = total_derivative(&e, dir).substitute(&binds).unwrap();
            let target = match dir {
                Dir::U => Symbol::U,
                Dir::V => Symbol::V,
            };
            let rhs = e.substitute(&binds).unwrap().differentiate(target);
            prop_assert!(canonical_equal(&lhs, &rhs), "on {e}");
        }
    }

    #[test]
    fn prolonged_field_annihilates_simple_invariant_combination() {
        // pr Q applied to u gives the phi component back.
        let field = VectorField::general();
        assert_eq!(apply_prolonged(&field, &u_expr()), field.phi_comp);
        // pr Q applied to f gives theta.
        assert_eq!(apply_prolonged(&field, &jet(0, 0)), field.theta_comp);
    }
}
