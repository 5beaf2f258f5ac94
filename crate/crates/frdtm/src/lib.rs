//! Truncated fractional power-series solutions of Klein-Gordon-type PDEs.
//!
//! The crate solves initial-value problems of the canonical form
//!
//! ```text
//!     D_t^mu u = u_xx + a*u + b*G(u) + f(x, t),      0 < mu <= 2,
//! ```
//!
//! where `D_t^mu` is the Caputo time derivative, by the fractional reduced
//! differential transform: the solution is represented as a series
//! `u(x, t) = sum_k U_k(x) * t^(k*beta)` whose spatial coefficients `U_k` are
//! generated by an algebraic recurrence.  Each `U_k` is carried as a truncated
//! Taylor jet about the evaluation site, so the repeated second derivatives
//! demanded by the recurrence are exact.
//!
//! Modules:
//!
//! - [`fraccalc`] — gamma-function kernel and the fractional-calculus
//!   identities on the monomial family `t^gamma`.
//! - [`jet`] — truncated Taylor-jet arithmetic in the space variable.
//! - [`transform`] — the coefficient-sequence algebra: convolutions for
//!   polynomial nonlinearities, fractional shifts, and the classical
//!   exponential/trigonometric spectra.
//! - [`problem`] — problem descriptions (coefficients, nonlinearity tag,
//!   initial data, source monomials) and the four built-in benchmarks.
//! - [`solver`] — the recurrence engine producing [`solver::SeriesSolution`]
//!   and grid evaluation.
//! - [`closedforms`] — fixed analytic coefficient families for the built-in
//!   problems, kept verbatim as a cross-check oracle of the recurrence at
//!   classical order.
//! - [`reference`] — method-of-lines reference integrator (2-stage
//!   Gauss-Legendre implicit Runge-Kutta) for the integer-order cases.

pub mod closedforms;
pub mod fraccalc;
pub mod jet;
mod linalg;
pub mod problem;
pub mod reference;
pub mod solver;
pub mod transform;
