//! Exact symbolic machinery for scalar equations `u_t = u_xx + f(u, u_x)`:
//! the group of contact-preserving equivalence transformations acting on the
//! right-hand side `f`, a normalization-based moving frame on the regular
//! stratum, and the resulting algebra of differential invariants with its
//! recurrence and commutation structure.
//!
//! The crate is organized in layers:
//!
//! * [`symkernel`] — interned symbols, canonical expression trees, rational
//!   normal forms and equality decision procedures;
//! * [`exprparse`] — the right-hand-side grammar, plain/LaTeX printing and
//!   the JSON wire format;
//! * [`jetspace`] — total derivatives, prolongation of infinitesimal
//!   generators, jets of `f`;
//! * [`groupaction`] — finite transformations, their composition/inversion,
//!   and the induced action on jets through implicit differentiation
//!   operators;
//! * [`movingframe`] — the stratification of right-hand sides, the
//!   cross-section solve, and invariantization;
//! * [`invstructure`] — normalized invariants, invariant derivative
//!   operators, recurrence relations, the commutator, and generating sets;
//! * [`harness`] — randomized numeric verification: invariance checks,
//!   functional independence, necessary-condition equivalence tests;
//! * [`cli`] — the command-line front end.

pub mod cli;
pub mod exprparse;
pub mod groupaction;
pub mod harness;
pub mod invstructure;
pub mod jetspace;
pub mod movingframe;
pub mod symkernel;
