//! The series recurrence engine.
//!
//! From a [`ProblemSpec`] and a base point `x0`, [`solve_frdtm`] produces the
//! coefficients `U_0..U_N` of the truncated series
//! `u(x0,t) = sum_k U_k(x0) t^(k*beta)` by the transform recurrence
//!
//! ```text
//! U_(k+s) = [Gamma(beta*k + 1) / Gamma(beta*(k+s) + 1)]
//!           * (U_k'' + a*U_k + b*G_k + F_k)
//! ```
//!
//! where `s` is the number of initial conditions, `G_k` is the convolution
//! coefficient of the nonlinearity, and `F_k` reads the source list.  Each
//! step consumes two jet orders through the exact second derivative, so the
//! seed jet is built at order `2N`.

use rayon::prelude::*;
use std::fmt;

use crate::fraccalc::{gamma_fn, ratio_standard};
use crate::jet::Jet;
use crate::problem::{Nonlinearity, ProblemSpec};
use crate::transform::{conv3_terms, conv_pow_terms, conv_terms, monomial_coeff, CoeffSeq, SeqError};

/// Errors from the recurrence and from series evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// A coefficient's jet order is too small to differentiate; the seed
    /// would have needed at least the named order.
    InsufficientJetOrder {
        k: usize,
        order: usize,
        required_seed: usize,
    },
    /// A nonzero second initial condition at non-classical exponent step
    /// `beta < 1` was given without the explicit opt-in flag.
    FractionalSecondSeed { beta: f64 },
    /// Evaluation before the expansion time (fractional powers of negative
    /// arguments are undefined).
    TimeBeforeExpansion { t: f64, t0: f64 },
    /// An underlying sequence operation failed.
    Seq(SeqError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::InsufficientJetOrder {
                k,
                order,
                required_seed,
            } => write!(
                f,
                "coefficient {k} has jet order {order}, too small to differentiate; \
                 seed the series at order {required_seed} or higher"
            ),
            SolveError::FractionalSecondSeed { beta } => write!(
                f,
                "nonzero second initial condition with exponent step beta = {beta} < 1 \
                 requires the allow_fractional_g1 option"
            ),
            SolveError::TimeBeforeExpansion { t, t0 } => {
                write!(f, "evaluation time {t} precedes the expansion time {t0}")
            }
            SolveError::Seq(e) => write!(f, "sequence operation failed: {e}"),
        }
    }
}

impl std::error::Error for SolveError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SolveError::Seq(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SeqError> for SolveError {
    fn from(e: SeqError) -> SolveError {
        SolveError::Seq(e)
    }
}

/// Optional solver behavior.
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Accept a nonzero second initial condition when `beta < 1`, seeding
    /// `U_1 = g1 / Gamma(beta + 1)` (the scaling that reduces to `U_1 = g1`
    /// in the classical limit).  Off by default: that seeding is a
    /// continuation choice, not something the validated integer-order cases
    /// exercise.
    pub allow_fractional_g1: bool,
    /// Extra jet orders on the seed beyond the `2N` the recurrence consumes
    /// (useful when the caller wants spatial derivatives of the result).
    pub extra_jet_order: usize,
}

// ═══════════════════════════════════════════════════════════════════════════
// Recurrence
// ═══════════════════════════════════════════════════════════════════════════

/// The right-hand-side coefficient `U_k'' + a*U_k + b*G_k + F_k`, at jet
/// order two below `U_k`.
pub fn rhs_coefficient(p: &ProblemSpec, terms: &[Jet], k: usize) -> Result<Jet, SolveError> {
    let u_k = &terms[k];
    if u_k.order() < 2 {
        return Err(SolveError::InsufficientJetOrder {
            k,
            order: u_k.order(),
            required_seed: 2 * (k + 1),
        });
    }
    let m = u_k.order() - 2;
    let mut acc = u_k.d2().map_err(SeqError::Jet)?;

    if p.a() != 0.0 {
        acc = acc
            .add(&u_k.truncated(m).scale(p.a()))
            .map_err(SeqError::Jet)?;
    }

    if p.b() != 0.0 {
        let g_k = match p.nonlinearity() {
            Nonlinearity::None => None,
            Nonlinearity::Square => Some(conv_terms(terms, terms, k)?),
            Nonlinearity::Cube => Some(conv3_terms(terms, k)?),
            Nonlinearity::Poly(c) => {
                let mut sum: Option<Jet> = None;
                for (i, &cp) in c.iter().enumerate() {
                    if cp == 0.0 {
                        continue;
                    }
                    let pow = conv_pow_terms(terms, (i + 1) as u32, k)?.scale(cp);
                    sum = Some(match sum {
                        Some(s) => s.add(&pow.truncated(s.order())).map_err(SeqError::Jet)?,
                        None => pow,
                    });
                }
                sum
            }
        };
        if let Some(g) = g_k {
            acc = acc
                .add(&g.truncated(m).scale(p.b()))
                .map_err(SeqError::Jet)?;
        }
    }

    for s in p.source() {
        let f_k = monomial_coeff(s.coeff, s.x_power, s.t_index, k, u_k.base_point(), m);
        acc = acc.add(&f_k).map_err(SeqError::Jet)?;
    }

    Ok(acc)
}

/// Runs the recurrence at `x0` up to truncation order `n` with default
/// options.
pub fn solve_frdtm(p: &ProblemSpec, x0: f64, n: usize) -> Result<SeriesSolution, SolveError> {
    solve_frdtm_with(p, x0, n, &SolveOptions::default())
}

/// Runs the recurrence at `x0` up to truncation order `n`.
pub fn solve_frdtm_with(
    p: &ProblemSpec,
    x0: f64,
    n: usize,
    opts: &SolveOptions,
) -> Result<SeriesSolution, SolveError> {
    assert!(n >= 1, "truncation order must be at least 1");
    let order = p.order();
    let step = order.ic_count();
    let seed_order = 2 * n + opts.extra_jet_order;

    let mut terms: Vec<Jet> = Vec::with_capacity(n + 1);
    terms.push(p.g0().jet(x0, seed_order));

    if step == 2 {
        let g1 = p.g1().expect("two-condition problems carry g1");
        let beta = order.beta();
        if !g1.is_zero() && beta < 1.0 && !opts.allow_fractional_g1 {
            return Err(SolveError::FractionalSecondSeed { beta });
        }
        // u_t(x,0) = U_1 * Gamma(beta+1) for the t^beta term, so the seed
        // divides by Gamma(beta+1); at beta = 1 the factor is exactly 1.
        let scale = 1.0 / gamma_fn(beta + 1.0).expect("beta + 1 > 0");
        terms.push(g1.jet(x0, seed_order - 2).scale(scale));
    }

    let mut underflow = false;
    while terms.len() <= n {
        let k = terms.len() - step;
        let rhs = rhs_coefficient(p, &terms, k)?;
        let ratio = ratio_standard(&order, k, step);
        let next = rhs.scale(ratio).truncated(seed_order - 2 * (k + step));
        if !underflow {
            underflow = rhs
                .coeffs()
                .iter()
                .zip(next.coeffs())
                .any(|(&r, &s)| r != 0.0 && s == 0.0);
        }
        terms.push(next);
    }
    terms.truncate(n + 1);

    Ok(SeriesSolution {
        seq: CoeffSeq::new(terms, order, 0.0),
        problem: p.clone(),
        n,
        underflow,
    })
}

// ═══════════════════════════════════════════════════════════════════════════
// Series solutions
// ═══════════════════════════════════════════════════════════════════════════

/// The truncated series produced by the recurrence at one base point.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    seq: CoeffSeq,
    problem: ProblemSpec,
    n: usize,
    underflow: bool,
}

impl SeriesSolution {
    pub fn seq(&self) -> &CoeffSeq {
        &self.seq
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    /// The truncation order `N` (the series has `N + 1` terms).
    pub fn n(&self) -> usize {
        self.n
    }

    /// True when some coefficient was flushed to zero by floating-point
    /// underflow during the recurrence (very large `N`).
    pub fn underflow_to_zero(&self) -> bool {
        self.underflow
    }

    pub fn base_point(&self) -> f64 {
        self.seq.base_point()
    }

    /// The value `U_k(x0)`.
    pub fn term_value(&self, k: usize) -> f64 {
        self.seq.term(k).value()
    }

    /// The full truncated sum at time `t`.
    pub fn eval(&self, t: f64) -> Result<f64, SolveError> {
        self.eval_partial(t, self.n)
    }

    /// The partial sum `sum_(k=0..n) U_k(x0) (t - t0)^(k*beta)`.
    ///
    /// At `t = t0` only the `k = 0` term survives (the zeroth power is taken
    /// as one); earlier times are rejected.
    pub fn eval_partial(&self, t: f64, n: usize) -> Result<f64, SolveError> {
        assert!(n <= self.n, "partial order {n} exceeds truncation {}", self.n);
        let tau = t - self.seq.t0();
        if tau < 0.0 {
            return Err(SolveError::TimeBeforeExpansion {
                t,
                t0: self.seq.t0(),
            });
        }
        if tau == 0.0 {
            return Ok(self.term_value(0));
        }
        let beta = self.seq.beta();
        let ln_tau = tau.ln();
        let mut sum = self.term_value(0);
        for k in 1..=n {
            sum += self.term_value(k) * (k as f64 * beta * ln_tau).exp();
        }
        Ok(sum)
    }

    /// The largest magnitude ratio between consecutive nonzero series terms
    /// at time `t`, or `None` when fewer than two terms are nonzero.
    ///
    /// Exactly-zero terms (the odd slots of a symmetric two-condition
    /// problem) are skipped rather than treated as ratio zero or infinity.
    pub fn tail_ratio_max(&self, t: f64) -> Option<f64> {
        let tau = t - self.seq.t0();
        if tau <= 0.0 {
            return None;
        }
        let beta = self.seq.beta();
        let ln_tau = tau.ln();
        let magnitudes: Vec<f64> = (0..=self.n)
            .map(|k| {
                let p = if k == 0 {
                    1.0
                } else {
                    (k as f64 * beta * ln_tau).exp()
                };
                (self.term_value(k) * p).abs()
            })
            .filter(|&m| m > 0.0)
            .collect();
        if magnitudes.len() < 2 {
            return None;
        }
        magnitudes
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
    }
}

/// Solves independently at every `x` in `xs` and evaluates at every `t` in
/// `ts`; the result is x-major (`out[i][j]` pairs `xs[i]` with `ts[j]`).
///
/// Sites are distributed across worker threads; results are ordered by
/// input position, so the matrix is identical for any worker count.
pub fn eval_grid(
    p: &ProblemSpec,
    xs: &[f64],
    ts: &[f64],
    n: usize,
) -> Result<Vec<Vec<f64>>, SolveError> {
    xs.par_iter()
        .map(|&x| {
            let sol = solve_frdtm(p, x, n)?;
            ts.iter().map(|&t| sol.eval(t)).collect()
        })
        .collect()
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════
