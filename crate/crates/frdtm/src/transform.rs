//! Coefficient-sequence algebra for truncated fractional power series.
//!
//! A [`CoeffSeq`] holds the spatial jets `U_0..U_N` of a series
//! `u(x,t) = sum_k U_k(x) (t - t0)^(k*beta)`.  Products of series become
//! Cauchy convolutions of their coefficient sequences; the fractional time
//! derivative becomes an index shift weighted by a ratio of gamma functions.
//! The solver's recurrence is assembled from exactly these operations.

use std::fmt;

use crate::fraccalc::{gamma_ratio, FracOrder};
use crate::jet::{Jet, JetError};

/// Errors from structurally invalid sequence combinations.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqError {
    /// Two sequences of different lengths were combined termwise.
    LengthMismatch { left: usize, right: usize },
    /// Two sequences built over different fractional orders were combined.
    FracOrderMismatch { left_mu: f64, right_mu: f64 },
    /// Two sequences expanded about different times were combined.
    ExpansionTimeMismatch { left: f64, right: f64 },
    /// A coefficient index at or beyond the sequence length was requested.
    IndexOutOfRange { k: usize, len: usize },
    /// A derivative shift at least as long as the sequence was requested.
    ShiftOutOfRange { r: usize, len: usize },
    /// An underlying jet operation failed (base-point or order mismatch).
    Jet(JetError),
}

impl fmt::Display for SeqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqError::LengthMismatch { left, right } => {
                write!(f, "sequence lengths differ: {left} vs {right}")
            }
            SeqError::FracOrderMismatch { left_mu, right_mu } => {
                write!(f, "fractional orders differ: {left_mu} vs {right_mu}")
            }
            SeqError::ExpansionTimeMismatch { left, right } => {
                write!(f, "expansion times differ: {left} vs {right}")
            }
            SeqError::IndexOutOfRange { k, len } => {
                write!(f, "coefficient index {k} out of range for length {len}")
            }
            SeqError::ShiftOutOfRange { r, len } => {
                write!(f, "shift by {r} needs a sequence longer than {r}, got {len}")
            }
            SeqError::Jet(e) => write!(f, "jet operation failed: {e}"),
        }
    }
}

impl std::error::Error for SeqError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SeqError::Jet(e) => Some(e),
            _ => None,
        }
    }
}

impl From<JetError> for SeqError {
    fn from(e: JetError) -> SeqError {
        SeqError::Jet(e)
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Slice-level convolution kernels
// ═══════════════════════════════════════════════════════════════════════════

/// Minimum jet order among `a[0..=k]` and `b[0..=k]`.
fn common_order(a: &[Jet], b: &[Jet], k: usize) -> usize {
    a[..=k]
        .iter()
        .chain(&b[..=k])
        .map(Jet::order)
        .min()
        .expect("convolution needs at least one term")
}

/// `sum_(r=0..k) a_r * b_(k-r)`, every participant first truncated to the
/// common (minimum) order so no fabricated high-order coefficients survive.
pub(crate) fn conv_terms(a: &[Jet], b: &[Jet], k: usize) -> Result<Jet, SeqError> {
    let m = common_order(a, b, k);
    let mut acc = Jet::constant(0.0, a[0].base_point(), m);
    for r in 0..=k {
        acc = acc.add(&a[r].truncated(m).mul(&b[k - r].truncated(m))?)?;
    }
    Ok(acc)
}

/// Coefficient `k` of the Cauchy cube of `a`: the double convolution
/// `sum_(r=0..k) [sum_(i=0..r) a_i a_(r-i)] a_(k-r)`.
pub(crate) fn conv3_terms(a: &[Jet], k: usize) -> Result<Jet, SeqError> {
    let m = common_order(a, a, k);
    let trunc: Vec<Jet> = a[..=k].iter().map(|j| j.truncated(m)).collect();
    let mut acc = Jet::constant(0.0, a[0].base_point(), m);
    for r in 0..=k {
        let mut inner = Jet::constant(0.0, a[0].base_point(), m);
        for i in 0..=r {
            inner = inner.add(&trunc[i].mul(&trunc[r - i])?)?;
        }
        acc = acc.add(&inner.mul(&trunc[k - r])?)?;
    }
    Ok(acc)
}

/// Coefficient `k` of the `p`-fold convolution power of `a` (`p >= 1`).
pub(crate) fn conv_pow_terms(a: &[Jet], p: u32, k: usize) -> Result<Jet, SeqError> {
    assert!(p >= 1, "convolution power needs p >= 1");
    let m = common_order(a, a, k);
    let base: Vec<Jet> = a[..=k].iter().map(|j| j.truncated(m)).collect();
    let mut pow = base.clone();
    for _ in 1..p {
        let mut next = Vec::with_capacity(k + 1);
        for t in 0..=k {
            let mut s = Jet::constant(0.0, a[0].base_point(), m);
            for i in 0..=t {
                s = s.add(&pow[i].mul(&base[t - i])?)?;
            }
            next.push(s);
        }
        pow = next;
    }
    Ok(pow.swap_remove(k))
}

// ═══════════════════════════════════════════════════════════════════════════
// Coefficient sequences
// ═══════════════════════════════════════════════════════════════════════════

/// The spatial coefficients `U_0..U_N` of a truncated series in
/// `(t - t0)^(k*beta)`, all expanded about one spatial base point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    terms: Vec<Jet>,
    order: FracOrder,
    t0: f64,
}

impl CoeffSeq {
    /// Wraps a term list; all jets must share one base point.
    pub fn new(terms: Vec<Jet>, order: FracOrder, t0: f64) -> CoeffSeq {
        assert!(!terms.is_empty(), "a sequence needs at least one term");
        let x0 = terms[0].base_point();
        assert!(
            terms.iter().all(|j| j.base_point() == x0),
            "all terms of a sequence must share one base point"
        );
        CoeffSeq { terms, order, t0 }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn term(&self, k: usize) -> &Jet {
        &self.terms[k]
    }

    pub fn terms(&self) -> &[Jet] {
        &self.terms
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    /// The exponent step: term `k` multiplies `(t - t0)^(k*beta)`.
    pub fn beta(&self) -> f64 {
        self.order.beta()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn base_point(&self) -> f64 {
        self.terms[0].base_point()
    }

    fn check_compatible(&self, other: &CoeffSeq) -> Result<(), SeqError> {
        if self.len() != other.len() {
            return Err(SeqError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if self.order != other.order {
            return Err(SeqError::FracOrderMismatch {
                left_mu: self.order.mu(),
                right_mu: other.order.mu(),
            });
        }
        if self.t0 != other.t0 {
            return Err(SeqError::ExpansionTimeMismatch {
                left: self.t0,
                right: other.t0,
            });
        }
        Ok(())
    }

    /// Termwise sum; requires equal length, order, expansion time, base
    /// point, and per-index jet orders.
    pub fn add(&self, other: &CoeffSeq) -> Result<CoeffSeq, SeqError> {
        self.check_compatible(other)?;
        let terms = self
            .terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoeffSeq {
            terms,
            order: self.order,
            t0: self.t0,
        })
    }

    /// Termwise scaling.
    pub fn scale(&self, s: f64) -> CoeffSeq {
        CoeffSeq {
            terms: self.terms.iter().map(|j| j.scale(s)).collect(),
            order: self.order,
            t0: self.t0,
        }
    }

    /// Coefficient `k` of the product series: `sum_(r=0..k) A_r B_(k-r)`.
    pub fn conv(&self, other: &CoeffSeq, k: usize) -> Result<Jet, SeqError> {
        let len = self.len().min(other.len());
        if k >= len {
            return Err(SeqError::IndexOutOfRange { k, len });
        }
        conv_terms(&self.terms, &other.terms, k)
    }

    /// Coefficient `k` of the cubed series.
    pub fn conv3(&self, k: usize) -> Result<Jet, SeqError> {
        if k >= self.len() {
            return Err(SeqError::IndexOutOfRange { k, len: self.len() });
        }
        conv3_terms(&self.terms, k)
    }

    /// The sequence of the order-`r*beta` time derivative:
    /// `W_k = [Gamma(beta*k + beta*r + 1) / Gamma(beta*k + 1)] A_(k+r)`,
    /// `r` terms shorter than the input.
    pub fn shift_fractional(&self, r: usize) -> Result<CoeffSeq, SeqError> {
        assert!(r >= 1, "derivative shift needs r >= 1, got {r}");
        if r >= self.len() {
            return Err(SeqError::ShiftOutOfRange {
                r,
                len: self.len(),
            });
        }
        let beta = self.order.beta();
        let terms = (0..self.len() - r)
            .map(|k| {
                let ratio = gamma_ratio(beta * (k + r) as f64 + 1.0, beta * k as f64 + 1.0);
                self.terms[k + r].scale(ratio)
            })
            .collect();
        Ok(CoeffSeq {
            terms,
            order: self.order,
            t0: self.t0,
        })
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Closed-form sequences and the source-term rule
// ═══════════════════════════════════════════════════════════════════════════

fn classical_order() -> FracOrder {
    FracOrder::new(1.0).expect("1 is a valid order")
}

/// The jet of `x -> exp(mu_x * x)` about `x0`.
fn scaled_exp_jet(mu_x: f64, x0: f64, order: usize) -> Jet {
    let mut coeffs = vec![0.0; order + 1];
    let mut c = (mu_x * x0).exp();
    for (j, slot) in coeffs.iter_mut().enumerate() {
        if j > 0 {
            c *= mu_x / j as f64;
        }
        *slot = c;
    }
    Jet::from_coeffs(coeffs, x0)
}

/// Which quarter-phase trigonometric family a sequence expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Sin,
    Cos,
}

/// The jet of `x -> sin(eta*x + quarter_turns*pi/2)` (or the cosine
/// analogue) about `x0`, with the phase applied through the exact
/// quarter-turn cycle so large phase counts lose no precision.
fn phased_trig_jet(kind: TrigKind, eta: f64, quarter_turns: usize, x0: f64, order: usize) -> Jet {
    let (s, c) = (eta * x0).sin_cos();
    let cycle = match kind {
        TrigKind::Sin => [s, c, -s, -c],
        TrigKind::Cos => [c, -s, -c, s],
    };
    let mut coeffs = vec![0.0; order + 1];
    let mut scale = 1.0;
    for (j, slot) in coeffs.iter_mut().enumerate() {
        if j > 0 {
            scale *= eta / j as f64;
        }
        *slot = cycle[(quarter_turns + j) % 4] * scale;
    }
    Jet::from_coeffs(coeffs, x0)
}

/// The coefficient sequence of `exp(lambda*t + mu_x*x)`:
/// term `k` is `(lambda^k / k!) * exp(mu_x * x)` at jet order `j - 2k`.
pub fn exp_sequence(lambda: f64, mu_x: f64, x0: f64, n: usize, j: usize) -> CoeffSeq {
    assert!(j >= 2 * n, "seed order {j} cannot cover {n} terms");
    let mut terms = Vec::with_capacity(n + 1);
    let mut scale = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            scale *= lambda / k as f64;
        }
        terms.push(scaled_exp_jet(mu_x, x0, j - 2 * k).scale(scale));
    }
    CoeffSeq::new(terms, classical_order(), 0.0)
}

/// The coefficient sequence of `sin(eta*x + omega*t)` (or the cosine
/// analogue): term `k` is `(omega^k / k!) * trig(eta*x + k*pi/2)` at jet
/// order `j - 2k`.
pub fn trig_sequence(
    kind: TrigKind,
    eta: f64,
    omega: f64,
    x0: f64,
    n: usize,
    j: usize,
) -> CoeffSeq {
    assert!(j >= 2 * n, "seed order {j} cannot cover {n} terms");
    let mut terms = Vec::with_capacity(n + 1);
    let mut scale = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            scale *= omega / k as f64;
        }
        terms.push(phased_trig_jet(kind, eta, k, x0, j - 2 * k).scale(scale));
    }
    CoeffSeq::new(terms, classical_order(), 0.0)
}

/// Coefficient `k` of a forcing monomial `c * x^m * t^(n*beta)`: the jet of
/// `c * x^m` when `k = n`, the zero jet otherwise.
pub fn monomial_coeff(
    coeff: f64,
    x_power: u32,
    t_index: usize,
    k: usize,
    x0: f64,
    order: usize,
) -> Jet {
    if k == t_index {
        Jet::monomial(x_power, x0, order).scale(coeff)
    } else {
        Jet::constant(0.0, x0, order)
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════
