//! Closed-form coefficient expressions for the built-in problems.
//!
//! This module carries a fixed, hand-transcribed set of coefficient formulas
//! for the four built-in problems — the formulas behind the reference tables
//! these problems reproduce.  They were derived separately from the solver's
//! recurrence, which makes them an independent cross-check: at classical
//! order the two routes must coincide, and [`printed_vs_solver`] measures
//! exactly that.  The transcription is kept verbatim; where the two routes
//! are known to diverge at specific indices, the divergence is frozen in
//! tests rather than reconciled, so neither route silently overwrites the
//! other.
//!
//! At non-classical orders the formula set uses gamma-ratio prefactors of
//! the form `Gamma(a)/Gamma(2a)`, which differ from the recurrence's
//! `1/Gamma(a+1)` family; both behaviors are deliberate and tested.

use std::fmt;

use crate::fraccalc::gamma_fn;
use crate::problem::BuiltinId;
use crate::solver::{solve_frdtm, SolveError};

/// Errors from closed-form evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedFormError {
    /// A coefficient index beyond the transcribed formula range.
    TermOutOfRange {
        name: &'static str,
        k: usize,
        limit: usize,
    },
    /// The solver cross-check failed to produce a series.
    Solve(SolveError),
}

impl fmt::Display for ClosedFormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedFormError::TermOutOfRange { name, k, limit } => write!(
                f,
                "builtin {name} has closed-form coefficients only up to index {limit}, got {k}"
            ),
            ClosedFormError::Solve(e) => write!(f, "solver cross-check failed: {e}"),
        }
    }
}

impl std::error::Error for ClosedFormError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ClosedFormError::Solve(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SolveError> for ClosedFormError {
    fn from(e: SolveError) -> ClosedFormError {
        ClosedFormError::Solve(e)
    }
}

/// The formula symbol `alpha` as a function of the table-header order.
///
/// The two-condition builtin's tables are headed by the PDE order
/// `mu in (1,2]` while its formulas read `alpha = mu/2` (so `alpha = 1` is
/// the classical case in every formula set); the one-condition builtins use
/// the header value directly.
pub fn alpha_sym(id: BuiltinId, alpha_table: f64) -> f64 {
    match id {
        BuiltinId::Ex44 => alpha_table / 2.0,
        _ => alpha_table,
    }
}

/// Highest coefficient index with a transcribed formula, or `None` when the
/// formula family covers every index.
pub fn printed_term_limit(id: BuiltinId) -> Option<usize> {
    match id {
        BuiltinId::Ex41 => None,
        BuiltinId::Ex42 | BuiltinId::Ex43 => Some(3),
        BuiltinId::Ex44 => Some(6),
    }
}

fn g(x: f64) -> f64 {
    gamma_fn(x).expect("gamma arguments here are positive by construction")
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// The transcribed coefficient `U_k(x)` for formula symbol `a = alpha_sym`.
pub fn printed_coefficient(
    id: BuiltinId,
    alpha_sym: f64,
    k: usize,
    x: f64,
) -> Result<f64, ClosedFormError> {
    assert!(alpha_sym > 0.0, "formula symbol must be positive");
    if let Some(limit) = printed_term_limit(id) {
        if k > limit {
            return Err(ClosedFormError::TermOutOfRange {
                name: id.name(),
                k,
                limit,
            });
        }
    }
    let a = alpha_sym;
    let s = x.sin();
    Ok(match id {
        BuiltinId::Ex41 => {
            if k == 0 {
                1.0 + s
            } else {
                1.0 / g(k as f64 * a + 1.0)
            }
        }
        BuiltinId::Ex42 => match k {
            0 => 1.0 + s,
            1 => -g(a) / g(2.0 * a) * (1.0 + 3.0 * s + s * s),
            2 => {
                -g(a) / (2.0 * g(3.0 * a))
                    * (12.0 * (2.0 * x).cos() - 25.0 * s + (3.0 * x).sin() - 12.0)
            }
            _ => {
                -g(a) / (8.0 * g(2.0 * a).powi(2) * g(4.0 * a))
                    * (2.0 * g(a) * g(3.0 * a) * (-3.0 + (2.0 * x).cos() - 6.0 * s * s)
                        + 4.0
                            * g(2.0 * a).powi(2)
                            * (49.0 - 98.0 * (2.0 * x).cos() + (4.0 * x).cos() + 111.0 * s
                                - 23.0 * (3.0 * x).sin()))
            }
        },
        BuiltinId::Ex43 => match k {
            0 => -sech(x),
            1 => g(a) / g(2.0 * a) * sech(x).powi(3),
            2 => g(a) / g(3.0 * a) * sech(x).powi(5) * (4.0 * (2.0 * x).cosh() - 5.0),
            _ => {
                g(a) / (g(2.0 * a).powi(2) * g(4.0 * a))
                    * sech(x).powi(7)
                    * ((123.0 - 112.0 * (2.0 * x).cosh() + 8.0 * (4.0 * x).cosh())
                        * g(2.0 * a).powi(2)
                        - 3.0 * g(a) * g(3.0 * a))
            }
        },
        BuiltinId::Ex44 => match k {
            0 => 1.0 + s,
            2 => -g(a) / g(3.0 * a) * (1.0 + 3.0 * s + s * s),
            4 => {
                -g(a) / (2.0 * g(4.0 * a))
                    * (12.0 * (2.0 * x).cos() - 25.0 * s + (3.0 * x).sin() - 12.0)
            }
            6 => {
                -g(a) / (8.0 * g(2.0 * a).powi(2) * g(5.0 * a))
                    * (2.0 * g(a) * g(3.0 * a) * (-3.0 + (2.0 * x).cos() - 6.0 * s * s)
                        + 4.0
                            * g(2.0 * a).powi(2)
                            * (-12.0 + 12.0 * (2.0 * x).cos() - 25.0 * s + (3.0 * x).sin()))
            }
            _ => 0.0, // odd indices vanish (zero initial velocity)
        },
    })
}

/// The closed-form partial sum
/// `sum_(k=0..n) U_k(x) t^(k*alpha_sym)` at a table-header order.
///
/// `t = 0` contributes only the `k = 0` term (the zeroth power is one).
pub fn printed_eval(
    id: BuiltinId,
    alpha_table: f64,
    x: f64,
    t: f64,
    n: usize,
) -> Result<f64, ClosedFormError> {
    assert!(t >= 0.0, "closed forms are evaluated at nonnegative times");
    let a = alpha_sym(id, alpha_table);
    let mut sum = printed_coefficient(id, a, 0, x)?;
    if t > 0.0 {
        let ln_t = t.ln();
        for k in 1..=n {
            sum += printed_coefficient(id, a, k, x)? * (k as f64 * a * ln_t).exp();
        }
    } else {
        // validate the requested range even when the powers vanish
        if n > 0 {
            printed_coefficient(id, a, n, x)?;
        }
    }
    Ok(sum)
}

/// Largest deviation `max_(k<=kmax) |closed-form U_k(x) - solver U_k(x)|` at
/// classical order (where both routes must describe the same Taylor series).
pub fn printed_vs_solver(id: BuiltinId, x: f64, kmax: usize) -> Result<f64, ClosedFormError> {
    if let Some(limit) = printed_term_limit(id) {
        if kmax > limit {
            return Err(ClosedFormError::TermOutOfRange {
                name: id.name(),
                k: kmax,
                limit,
            });
        }
    }
    let mu = match id {
        BuiltinId::Ex44 => 2.0,
        _ => 1.0,
    };
    let sol = solve_frdtm(&id.spec(mu).expect("classical order is admissible"), x, kmax.max(1))?;
    let mut worst = 0.0f64;
    for k in 0..=kmax {
        let printed = printed_coefficient(id, 1.0, k, x)?;
        worst = worst.max((printed - sol.term_value(k)).abs());
    }
    Ok(worst)
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════
