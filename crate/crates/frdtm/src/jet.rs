//! Truncated Taylor-jet arithmetic in the space variable.
//!
//! A [`Jet`] stores the coefficients `c_0..c_J` of a degree-`J` Taylor
//! expansion `sum_j c_j (x - x0)^j` about a base point.  The series
//! recurrence differentiates its spatial coefficients twice per step; doing
//! that on jets is exact (a coefficient shift), so no finite-difference error
//! enters the solution.  Binary operations require matching base points and
//! orders — order changes are always explicit.

use std::fmt;

/// Errors from structurally invalid jet combinations.
#[derive(Debug, Clone, PartialEq)]
pub enum JetError {
    /// Two jets about different base points were combined.
    BasePointMismatch { left: f64, right: f64 },
    /// Two jets of different truncation orders were combined.
    OrderMismatch { left: usize, right: usize },
    /// A derivative was requested from a jet of insufficient order.
    InsufficientOrder { order: usize, needed: usize },
}

impl fmt::Display for JetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetError::BasePointMismatch { left, right } => {
                write!(f, "jet base points differ: {left} vs {right}")
            }
            JetError::OrderMismatch { left, right } => {
                write!(f, "jet orders differ: {left} vs {right}")
            }
            JetError::InsufficientOrder { order, needed } => {
                write!(f, "jet order {order} too small, need at least {needed}")
            }
        }
    }
}

impl std::error::Error for JetError {}

/// Elementary functions with built-in jet expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemKind {
    Sin,
    Cos,
    Exp,
    Sech,
    /// The coordinate function `x` itself.
    Identity,
}

/// A truncated Taylor expansion `sum_{j<=J} c_j (x - x0)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base_point: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    /// The constant jet `(c, 0, ..., 0)` of the given order.
    pub fn constant(c: f64, x0: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Jet {
            base_point: x0,
            coeffs,
        }
    }

    /// Builds a jet directly from coefficients (used by tests and helpers).
    pub fn from_coeffs(coeffs: Vec<f64>, x0: f64) -> Jet {
        assert!(!coeffs.is_empty(), "a jet needs at least the constant term");
        Jet {
            base_point: x0,
            coeffs,
        }
    }

    /// The degree-`order` jet of an elementary function about `x0`.
    ///
    /// Sine, cosine and the exponential use their derivative cycles; `sech`
    /// is the reciprocal of the `cosh` jet obtained by series long division.
    pub fn elem(kind: ElemKind, x0: f64, order: usize) -> Jet {
        let n = order + 1;
        let mut coeffs = vec![0.0; n];
        match kind {
            ElemKind::Sin | ElemKind::Cos => {
                let (s, c) = x0.sin_cos();
                let cycle = if kind == ElemKind::Sin {
                    [s, c, -s, -c]
                } else {
                    [c, -s, -c, s]
                };
                let mut inv_fact = 1.0;
                for j in 0..n {
                    if j > 0 {
                        inv_fact /= j as f64;
                    }
                    coeffs[j] = cycle[j % 4] * inv_fact;
                }
            }
            ElemKind::Exp => {
                let e = x0.exp();
                let mut inv_fact = 1.0;
                for j in 0..n {
                    if j > 0 {
                        inv_fact /= j as f64;
                    }
                    coeffs[j] = e * inv_fact;
                }
            }
            ElemKind::Sech => {
                // cosh jet, then reciprocal by forward substitution.
                let ch = x0.cosh();
                let sh = x0.sinh();
                let mut cosh_j = vec![0.0; n];
                let mut inv_fact = 1.0;
                for j in 0..n {
                    if j > 0 {
                        inv_fact /= j as f64;
                    }
                    cosh_j[j] = if j % 2 == 0 { ch } else { sh } * inv_fact;
                }
                coeffs[0] = 1.0 / cosh_j[0];
                for j in 1..n {
                    let mut s = 0.0;
                    for i in 1..=j {
                        s += cosh_j[i] * coeffs[j - i];
                    }
                    coeffs[j] = -s / cosh_j[0];
                }
            }
            ElemKind::Identity => {
                coeffs[0] = x0;
                if order >= 1 {
                    coeffs[1] = 1.0;
                }
            }
        }
        Jet {
            base_point: x0,
            coeffs,
        }
    }

    /// The jet of the monomial `x^power` about `x0` (binomial expansion).
    pub fn monomial(power: u32, x0: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        let p = power as usize;
        // binomial(p, j) * x0^(p-j) for j <= min(p, order)
        let mut binom = 1.0f64;
        for j in 0..=p.min(order) {
            if j > 0 {
                binom *= (p - j + 1) as f64 / j as f64;
            }
            coeffs[j] = binom * x0.powi((p - j) as i32);
        }
        Jet {
            base_point: x0,
            coeffs,
        }
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    /// The truncation order `J` (the jet has `J + 1` coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The value of the represented function at the base point (`c_0`).
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn check_compatible(&self, other: &Jet) -> Result<(), JetError> {
        if self.base_point != other.base_point {
            return Err(JetError::BasePointMismatch {
                left: self.base_point,
                right: other.base_point,
            });
        }
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// Coefficientwise sum; requires equal base point and order.
    pub fn add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    /// Coefficientwise scaling.
    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            base_point: self.base_point,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Cauchy product truncated at the common order; requires equal base
    /// point and order.
    pub fn mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(other)?;
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for (j, slot) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in 0..=j {
                s += self.coeffs[i] * other.coeffs[j - i];
            }
            *slot = s;
        }
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    /// First derivative: order drops by exactly one.
    pub fn d1(&self) -> Result<Jet, JetError> {
        if self.order() < 1 {
            return Err(JetError::InsufficientOrder {
                order: self.order(),
                needed: 1,
            });
        }
        let coeffs = (0..self.order())
            .map(|j| (j as f64 + 1.0) * self.coeffs[j + 1])
            .collect();
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    /// Second derivative: `d_j = (j+2)(j+1) c_(j+2)`, order drops by exactly
    /// two.
    pub fn d2(&self) -> Result<Jet, JetError> {
        if self.order() < 2 {
            return Err(JetError::InsufficientOrder {
                order: self.order(),
                needed: 2,
            });
        }
        let coeffs = (0..self.order() - 1)
            .map(|j| ((j + 2) * (j + 1)) as f64 * self.coeffs[j + 2])
            .collect();
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    /// A copy truncated to `order` (or an unchanged copy if already shorter).
    pub fn truncated(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        Jet {
            base_point: self.base_point,
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════
