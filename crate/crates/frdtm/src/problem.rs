//! Problem descriptions: the canonical PDE family and its built-in
//! instances.
//!
//! Everything here describes `D_t^mu u = u_xx + a*u + b*G(u) + f(x,t)` with
//! initial data `u(x,0) = g0(x)` (and `u_t(x,0) = g1(x)` when `mu > 1`):
//! coefficients, a nonlinearity tag, a monomial source list, and initial
//! data assembled from a small basis of elementary functions.

use std::fmt;

use crate::fraccalc::FracOrder;
use crate::jet::{ElemKind, Jet};

/// Errors from inconsistent problem descriptions.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    /// `mu > 1` demands a second initial condition and none was given.
    MissingSecondInitialCondition { mu: f64 },
    /// `mu <= 1` admits one initial condition but a second was given.
    UnexpectedSecondInitialCondition { mu: f64 },
    /// A polynomial nonlinearity needs at least one coefficient.
    EmptyPolynomial,
    /// A built-in problem was requested at an order it does not admit.
    OrderOutsideBuiltinRange { name: &'static str, mu: f64 },
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::MissingSecondInitialCondition { mu } => {
                write!(f, "order {mu} needs a second initial condition g1")
            }
            ProblemError::UnexpectedSecondInitialCondition { mu } => {
                write!(f, "order {mu} admits only one initial condition")
            }
            ProblemError::EmptyPolynomial => {
                write!(f, "polynomial nonlinearity needs at least one coefficient")
            }
            ProblemError::OrderOutsideBuiltinRange { name, mu } => {
                write!(f, "builtin {name} does not admit order {mu}")
            }
        }
    }
}

impl std::error::Error for ProblemError {}

// ═══════════════════════════════════════════════════════════════════════════
// Nonlinearity
// ═══════════════════════════════════════════════════════════════════════════

/// The nonlinear term `G(u)` of the canonical PDE.
///
/// `Poly` holds the coefficients `c_1..c_P` of `sum_p c_p u^p` (no constant
/// term; a constant forcing belongs in the source list).
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    None,
    Square,
    Cube,
    Poly(Vec<f64>),
}

impl Nonlinearity {
    /// Pointwise value `G(u)` (used by the reference integrator).
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::None => 0.0,
            Nonlinearity::Square => u * u,
            Nonlinearity::Cube => u * u * u,
            Nonlinearity::Poly(c) => {
                let mut acc = 0.0;
                for &cp in c.iter().rev() {
                    acc = (acc + cp) * u;
                }
                acc
            }
        }
    }

    /// Pointwise derivative `G'(u)` (used by the Newton Jacobian).
    pub fn deriv(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::None => 0.0,
            Nonlinearity::Square => 2.0 * u,
            Nonlinearity::Cube => 3.0 * u * u,
            Nonlinearity::Poly(c) => {
                let mut acc = 0.0;
                for (p, &cp) in c.iter().enumerate().rev() {
                    acc = acc * u + (p + 1) as f64 * cp;
                }
                acc
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Nonlinearity::None)
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Initial data
// ═══════════════════════════════════════════════════════════════════════════

/// One basis function available to initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisFn {
    Const,
    Sin,
    Cos,
    Exp,
    Sech,
    XPow(u32),
}

impl BasisFn {
    fn eval(self, x: f64) -> f64 {
        match self {
            BasisFn::Const => 1.0,
            BasisFn::Sin => x.sin(),
            BasisFn::Cos => x.cos(),
            BasisFn::Exp => x.exp(),
            BasisFn::Sech => 1.0 / x.cosh(),
            BasisFn::XPow(p) => x.powi(p as i32),
        }
    }

    fn jet(self, x0: f64, order: usize) -> Jet {
        match self {
            BasisFn::Const => Jet::constant(1.0, x0, order),
            BasisFn::Sin => Jet::elem(ElemKind::Sin, x0, order),
            BasisFn::Cos => Jet::elem(ElemKind::Cos, x0, order),
            BasisFn::Exp => Jet::elem(ElemKind::Exp, x0, order),
            BasisFn::Sech => Jet::elem(ElemKind::Sech, x0, order),
            BasisFn::XPow(p) => Jet::monomial(p, x0, order),
        }
    }
}

/// A scaled basis function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialTerm {
    pub coeff: f64,
    pub basis: BasisFn,
}

/// Initial data as a linear combination of basis functions.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    terms: Vec<InitialTerm>,
}

impl InitialData {
    pub fn new(terms: Vec<InitialTerm>) -> InitialData {
        InitialData { terms }
    }

    /// The identically-zero function.
    pub fn zero() -> InitialData {
        InitialData { terms: Vec::new() }
    }

    /// A single scaled basis function.
    pub fn single(coeff: f64, basis: BasisFn) -> InitialData {
        InitialData {
            terms: vec![InitialTerm { coeff, basis }],
        }
    }

    pub fn terms(&self) -> &[InitialTerm] {
        &self.terms
    }

    /// True when every term has a zero coefficient.
    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.basis.eval(x)).sum()
    }

    /// The degree-`order` jet of the data about `x0`.
    pub fn jet(&self, x0: f64, order: usize) -> Jet {
        let mut acc = Jet::constant(0.0, x0, order);
        for t in &self.terms {
            acc = acc
                .add(&t.basis.jet(x0, order).scale(t.coeff))
                .expect("terms built at one base point and order");
        }
        acc
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Source terms
// ═══════════════════════════════════════════════════════════════════════════

/// One forcing monomial `coeff * x^x_power * t^(t_index * beta)`.
///
/// The time exponent lives on the series lattice: index `n` means the power
/// `t^(n*beta)`, so a source aligns with the series terms it feeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceTerm {
    pub coeff: f64,
    pub x_power: u32,
    pub t_index: usize,
}

impl SourceTerm {
    /// Pointwise value at `(x, t)` for the given exponent step.
    pub fn eval(&self, x: f64, t: f64, beta: f64) -> f64 {
        let tp = if self.t_index == 0 {
            1.0
        } else {
            t.powf(self.t_index as f64 * beta)
        };
        self.coeff * x.powi(self.x_power as i32) * tp
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Problem description
// ═══════════════════════════════════════════════════════════════════════════

/// A full instance of `D_t^mu u = u_xx + a*u + b*G(u) + f(x,t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    order: FracOrder,
    a: f64,
    b: f64,
    nonlinearity: Nonlinearity,
    source: Vec<SourceTerm>,
    g0: InitialData,
    g1: Option<InitialData>,
}

impl ProblemSpec {
    /// Validates and assembles a problem: `g1` must be present exactly when
    /// the order demands two initial conditions, and a polynomial
    /// nonlinearity must be nonempty.
    pub fn new(
        order: FracOrder,
        a: f64,
        b: f64,
        nonlinearity: Nonlinearity,
        source: Vec<SourceTerm>,
        g0: InitialData,
        g1: Option<InitialData>,
    ) -> Result<ProblemSpec, ProblemError> {
        match (order.ic_count(), &g1) {
            (2, None) => {
                return Err(ProblemError::MissingSecondInitialCondition { mu: order.mu() })
            }
            (1, Some(_)) => {
                return Err(ProblemError::UnexpectedSecondInitialCondition { mu: order.mu() })
            }
            _ => {}
        }
        if let Nonlinearity::Poly(c) = &nonlinearity {
            if c.is_empty() {
                return Err(ProblemError::EmptyPolynomial);
            }
        }
        Ok(ProblemSpec {
            order,
            a,
            b,
            nonlinearity,
            source,
            g0,
            g1,
        })
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn source(&self) -> &[SourceTerm] {
        &self.source
    }

    pub fn g0(&self) -> &InitialData {
        &self.g0
    }

    pub fn g1(&self) -> Option<&InitialData> {
        self.g1.as_ref()
    }

    /// The full source value `f(x, t)`.
    pub fn source_eval(&self, x: f64, t: f64) -> f64 {
        let beta = self.order.beta();
        self.source.iter().map(|s| s.eval(x, t, beta)).sum()
    }

    /// A copy of this problem at a different fractional order (the order
    /// must keep the same initial-condition count).
    pub fn with_order(&self, order: FracOrder) -> Result<ProblemSpec, ProblemError> {
        ProblemSpec::new(
            order,
            self.a,
            self.b,
            self.nonlinearity.clone(),
            self.source.clone(),
            self.g0.clone(),
            self.g1.clone(),
        )
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Built-in problems
// ═══════════════════════════════════════════════════════════════════════════

/// The four built-in benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinId {
    /// Linear: `D^mu u = u_xx + u`, `u(x,0) = 1 + sin x`, `mu` in (0,1].
    Ex41,
    /// Quadratic: `D^mu u = u_xx - u^2`, `u(x,0) = 1 + sin x`, `mu` in (0,1].
    Ex42,
    /// Cubic: `D^mu u = u_xx - u + u^3`, `u(x,0) = -sech x`, `mu` in (0,1].
    Ex43,
    /// Quadratic, two initial conditions: `D^mu u = u_xx - u^2`,
    /// `u(x,0) = 1 + sin x`, `u_t(x,0) = 0`, `mu` in (1,2].
    Ex44,
}

impl BuiltinId {
    pub const ALL: [BuiltinId; 4] = [
        BuiltinId::Ex41,
        BuiltinId::Ex42,
        BuiltinId::Ex43,
        BuiltinId::Ex44,
    ];

    pub fn from_name(name: &str) -> Option<BuiltinId> {
        match name {
            "ex41" => Some(BuiltinId::Ex41),
            "ex42" => Some(BuiltinId::Ex42),
            "ex43" => Some(BuiltinId::Ex43),
            "ex44" => Some(BuiltinId::Ex44),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BuiltinId::Ex41 => "ex41",
            BuiltinId::Ex42 => "ex42",
            BuiltinId::Ex43 => "ex43",
            BuiltinId::Ex44 => "ex44",
        }
    }

    /// Whether `mu` lies in this problem's admissible order range.
    pub fn admits_order(self, mu: f64) -> bool {
        match self {
            BuiltinId::Ex41 | BuiltinId::Ex42 | BuiltinId::Ex43 => mu > 0.0 && mu <= 1.0,
            BuiltinId::Ex44 => mu > 1.0 && mu <= 2.0,
        }
    }

    /// The problem instance at fractional order `mu`.
    pub fn spec(self, mu: f64) -> Result<ProblemSpec, ProblemError> {
        if !self.admits_order(mu) {
            return Err(ProblemError::OrderOutsideBuiltinRange {
                name: self.name(),
                mu,
            });
        }
        let order = FracOrder::new(mu).expect("admissible range lies inside (0, 2]");
        let one_plus_sin = InitialData::new(vec![
            InitialTerm {
                coeff: 1.0,
                basis: BasisFn::Const,
            },
            InitialTerm {
                coeff: 1.0,
                basis: BasisFn::Sin,
            },
        ]);
        match self {
            BuiltinId::Ex41 => ProblemSpec::new(
                order,
                1.0,
                0.0,
                Nonlinearity::None,
                Vec::new(),
                one_plus_sin,
                None,
            ),
            BuiltinId::Ex42 => ProblemSpec::new(
                order,
                0.0,
                -1.0,
                Nonlinearity::Square,
                Vec::new(),
                one_plus_sin,
                None,
            ),
            BuiltinId::Ex43 => ProblemSpec::new(
                order,
                -1.0,
                1.0,
                Nonlinearity::Cube,
                Vec::new(),
                InitialData::single(-1.0, BasisFn::Sech),
                None,
            ),
            BuiltinId::Ex44 => ProblemSpec::new(
                order,
                0.0,
                -1.0,
                Nonlinearity::Square,
                Vec::new(),
                one_plus_sin,
                Some(InitialData::zero()),
            ),
        }
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════
