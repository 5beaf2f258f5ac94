//! Method-of-lines reference integrator for the integer-order cases.
//!
//! The PDE is discretized in space by the second-order central Laplacian on
//! a uniform grid and marched in time by the 2-stage Gauss–Legendre implicit
//! Runge–Kutta scheme (classical order 4, A-stable), so the reference
//! out-resolves the truncated series it validates at the horizons of
//! interest.  Order 2 problems are reduced to the first-order system
//! `(u, v = u_t)`; the public state layout is `[u..., v...]`.
//!
//! The nonlinear stage equations are solved by a modified Newton iteration:
//! the stage Jacobian is assembled from the Laplacian stencil plus the
//! nonlinearity's derivative at the initial state, factored once per
//! stepper as a block-tridiagonal LU (with a low-rank correction for the
//! periodic wrap), and reused every step.

use std::fmt;

use crate::linalg::{BlockTridiag, CyclicBlockTridiag, Mat};
use crate::problem::ProblemSpec;

/// Errors from grid construction and time integration.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceError {
    /// Grid extent is empty or reversed.
    BadExtent { x_lo: f64, x_hi: f64 },
    /// Too few cells for the requested boundary handling.
    TooFewCells { n_cells: usize, minimum: usize },
    /// A state vector of the wrong length was supplied.
    LengthMismatch { expected: usize, got: usize },
    /// The integrator only runs at orders 1 and 2 exactly.
    NonIntegerOrder { mu: f64 },
    /// Periodic boundaries demand matching initial data at the two ends.
    PeriodicSeamMismatch { lo: f64, hi: f64 },
    /// A requested output time does not sit on the step lattice.
    TimeOffStepLattice { t: f64, dt: f64 },
    /// Output times must increase strictly.
    TimesNotAscending { index: usize },
    /// The step size must be positive and finite.
    InvalidStep { dt: f64 },
    /// The stage iteration failed to reach tolerance.
    NewtonDivergence { t: f64, residual: f64 },
    /// The frozen stage matrix could not be factored.
    StageMatrixSingular,
}

impl fmt::Display for ReferenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceError::BadExtent { x_lo, x_hi } => {
                write!(f, "grid extent [{x_lo}, {x_hi}] is empty")
            }
            ReferenceError::TooFewCells { n_cells, minimum } => {
                write!(f, "grid needs at least {minimum} cells, got {n_cells}")
            }
            ReferenceError::LengthMismatch { expected, got } => {
                write!(f, "state length {got} does not match the grid ({expected})")
            }
            ReferenceError::NonIntegerOrder { mu } => {
                write!(f, "reference integration requires order 1 or 2 exactly, got {mu}")
            }
            ReferenceError::PeriodicSeamMismatch { lo, hi } => write!(
                f,
                "periodic grid needs equal initial data at both ends, got {lo} vs {hi}"
            ),
            ReferenceError::TimeOffStepLattice { t, dt } => {
                write!(f, "output time {t} is not a multiple of the step {dt}")
            }
            ReferenceError::TimesNotAscending { index } => {
                write!(f, "output times must increase strictly (violated at index {index})")
            }
            ReferenceError::InvalidStep { dt } => write!(f, "invalid step size {dt}"),
            ReferenceError::NewtonDivergence { t, residual } => write!(
                f,
                "stage iteration failed to converge at t = {t} (residual {residual:e})"
            ),
            ReferenceError::StageMatrixSingular => {
                write!(f, "stage matrix factorization failed")
            }
        }
    }
}

impl std::error::Error for ReferenceError {}

// ═══════════════════════════════════════════════════════════════════════════
// Grids
// ═══════════════════════════════════════════════════════════════════════════

/// How the spatial stencil treats the domain ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// The grid wraps: node `n-1` neighbors node `0`; the right endpoint
    /// duplicates the left and carries no node of its own.
    Periodic,
    /// Both endpoint values are held fixed at the initial data for all time
    /// (usable when the solution is flat near the ends over the horizon).
    DirichletFrozen,
}

/// A uniform one-dimensional grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x_lo: f64,
    x_hi: f64,
    n_cells: usize,
    h: f64,
    boundary: Boundary,
}

impl Grid1D {
    pub fn new(
        x_lo: f64,
        x_hi: f64,
        n_cells: usize,
        boundary: Boundary,
    ) -> Result<Grid1D, ReferenceError> {
        if !(x_hi > x_lo) {
            return Err(ReferenceError::BadExtent { x_lo, x_hi });
        }
        let minimum = match boundary {
            Boundary::Periodic => 4,
            Boundary::DirichletFrozen => 2,
        };
        if n_cells < minimum {
            return Err(ReferenceError::TooFewCells { n_cells, minimum });
        }
        Ok(Grid1D {
            x_lo,
            x_hi,
            n_cells,
            h: (x_hi - x_lo) / n_cells as f64,
            boundary,
        })
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of unknown-carrying nodes.
    pub fn n_nodes(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n_cells,
            Boundary::DirichletFrozen => self.n_cells + 1,
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_lo + i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    /// The node index whose coordinate matches `x` to a relative `1e-9`, if
    /// any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let raw = (x - self.x_lo) / self.h;
        let i = raw.round();
        if i < 0.0 || i >= self.n_nodes() as f64 {
            return None;
        }
        let idx = i as usize;
        if (x - self.node(idx)).abs() <= 1e-9 * x.abs().max(1.0) {
            Some(idx)
        } else {
            None
        }
    }
}

/// Central second difference `(u_(i-1) - 2 u_i + u_(i+1)) / h^2`, with the
/// wrap or frozen-boundary treatment of the grid.  Frozen-boundary rows
/// return zero (their values never move).
pub fn laplacian(grid: &Grid1D, u: &[f64]) -> Result<Vec<f64>, ReferenceError> {
    let n = grid.n_nodes();
    if u.len() != n {
        return Err(ReferenceError::LengthMismatch {
            expected: n,
            got: u.len(),
        });
    }
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let mut out = vec![0.0; n];
    match grid.boundary {
        Boundary::Periodic => {
            for i in 0..n {
                let left = u[(i + n - 1) % n];
                let right = u[(i + 1) % n];
                out[i] = (left - 2.0 * u[i] + right) * inv_h2;
            }
        }
        Boundary::DirichletFrozen => {
            for i in 1..n - 1 {
                out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
            }
        }
    }
    Ok(out)
}

// ═══════════════════════════════════════════════════════════════════════════
// Implicit Runge–Kutta stepper
// ═══════════════════════════════════════════════════════════════════════════

const SQRT3: f64 = 1.732050807568877293527446341505872367_f64;
const IRK_C: [f64; 2] = [0.5 - SQRT3 / 6.0, 0.5 + SQRT3 / 6.0];
const IRK_A: [[f64; 2]; 2] = [
    [0.25, 0.25 - SQRT3 / 6.0],
    [0.25 + SQRT3 / 6.0, 0.25],
];
// weights b = [1/2, 1/2] folded through A^{-1}: the step is reconstructed
// from the stage offsets without a final
// derivative evaluation (safe under stiffness).
const IRK_D: [f64; 2] = [-SQRT3, SQRT3];
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 25;

enum FactoredStage {
    Tridiag(BlockTridiag),
    Cyclic(CyclicBlockTridiag),
}

impl FactoredStage {
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        match self {
            FactoredStage::Tridiag(t) => t.solve(rhs),
            FactoredStage::Cyclic(c) => c.solve(rhs),
        }
    }
}

/// One reusable implicit step: the stage matrix is assembled from the
/// problem's Jacobian at a frozen state and factored once, then every call
/// to [`IrkStepper::step`] reuses the factorization.
pub struct IrkStepper {
    problem: ProblemSpec,
    grid: Grid1D,
    dt: f64,
    /// Fields per node: 1 for order 1, 2 (`u` and `v = u_t`) for order 2.
    fields: usize,
    factored: FactoredStage,
}

impl IrkStepper {
    /// Builds and factors the stepper.  `frozen_state` (public layout) is
    /// where the Newton Jacobian is evaluated; pass the initial state.
    pub fn new(
        p: &ProblemSpec,
        grid: &Grid1D,
        dt: f64,
        frozen_state: &[f64],
    ) -> Result<IrkStepper, ReferenceError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(ReferenceError::InvalidStep { dt });
        }
        let mu = p.order().mu();
        let fields: usize = if mu == 1.0 {
            1
        } else if mu == 2.0 {
            2
        } else {
            return Err(ReferenceError::NonIntegerOrder { mu });
        };
        let n = grid.n_nodes();
        if frozen_state.len() != fields * n {
            return Err(ReferenceError::LengthMismatch {
                expected: fields * n,
                got: frozen_state.len(),
            });
        }

        let factored = assemble_and_factor(p, grid, dt, fields, &frozen_state[..n])?;
        Ok(IrkStepper {
            problem: p.clone(),
            grid: grid.clone(),
            dt,
            fields,
            factored,
        })
    }

    pub fn fields(&self) -> usize {
        self.fields
    }

    pub fn state_len(&self) -> usize {
        self.fields * self.grid.n_nodes()
    }

    /// Time derivative of the full state (public layout) at time `t`.
    ///
    /// Frozen-boundary rows are zero in every field, which holds both `u`
    /// and `v` fixed at the ends.
    fn rhs(&self, t: f64, state: &[f64]) -> Vec<f64> {
        let n = self.grid.n_nodes();
        let u = &state[..n];
        let lap = laplacian(&self.grid, u).expect("state length checked at construction");
        let p = &self.problem;
        let mut out = vec![0.0; state.len()];
        let interior = match self.grid.boundary {
            Boundary::Periodic => 0..n,
            Boundary::DirichletFrozen => 1..n - 1,
        };
        for i in interior {
            let x = self.grid.node(i);
            let du = lap[i] + p.a() * u[i] + p.b() * p.nonlinearity().eval(u[i])
                + p.source_eval(x, t);
            if self.fields == 1 {
                out[i] = du;
            } else {
                out[i] = state[n + i]; // u_t = v
                out[n + i] = du; // v_t = the spatial operator
            }
        }
        out
    }

    /// Advances one step from time `t`, returning the new state.
    ///
    /// The unknowns of the modified Newton iteration are the stage offsets
    /// `Z_i = Y_i - y`, so the residual `Z_i - dt sum_j a_ij F(Y_j)` carries
    /// a factor `dt` and an absolute tolerance stays meaningful even when
    /// the Laplacian makes `F` itself large.
    pub fn step(&self, t: f64, state: &[f64]) -> Result<Vec<f64>, ReferenceError> {
        if state.len() != self.state_len() {
            return Err(ReferenceError::LengthMismatch {
                expected: self.state_len(),
                got: state.len(),
            });
        }
        let dt = self.dt;
        let len = state.len();

        let mut z = [vec![0.0; len], vec![0.0; len]];
        let mut stage_state = vec![0.0; len];
        let mut residual = vec![0.0; 2 * len];

        let mut converged = false;
        let mut res_norm = f64::INFINITY;
        for _ in 0..=NEWTON_MAX_ITERS {
            let mut f = [Vec::new(), Vec::new()];
            for i in 0..2 {
                for j in 0..len {
                    stage_state[j] = state[j] + z[i][j];
                }
                f[i] = self.rhs(t + IRK_C[i] * dt, &stage_state);
            }
            // residuals R_i = Z_i - dt (a_i1 F_1 + a_i2 F_2)
            res_norm = 0.0;
            for i in 0..2 {
                for j in 0..len {
                    let r = z[i][j] - dt * (IRK_A[i][0] * f[0][j] + IRK_A[i][1] * f[1][j]);
                    residual[i * len + j] = r;
                    let mag = r.abs();
                    if !(mag <= res_norm) {
                        res_norm = if mag.is_nan() { f64::NAN } else { mag };
                    }
                }
            }
            if res_norm <= NEWTON_TOL {
                converged = true;
                break;
            }
            if !res_norm.is_finite() {
                break;
            }

            // node-major gather, frozen-matrix solve, scatter
            let packed = self.pack_residual(&residual);
            let delta = self.factored.solve(&packed);
            self.unpack_update(&delta, &mut z);
        }
        if !converged {
            return Err(ReferenceError::NewtonDivergence {
                t,
                residual: res_norm,
            });
        }

        let mut next = state.to_vec();
        for j in 0..len {
            next[j] += IRK_D[0] * z[0][j] + IRK_D[1] * z[1][j];
        }
        Ok(next)
    }

    /// Public layout `[stage][field*n + node]` to node-major
    /// `[node][stage][field]`.
    fn pack_residual(&self, residual: &[f64]) -> Vec<f64> {
        let n = self.grid.n_nodes();
        let d = self.fields;
        let b = 2 * d;
        let len = d * n;
        let mut out = vec![0.0; n * b];
        for node in 0..n {
            for stage in 0..2 {
                for field in 0..d {
                    out[node * b + stage * d + field] =
                        residual[stage * len + field * n + node];
                }
            }
        }
        out
    }

    fn unpack_update(&self, delta: &[f64], z: &mut [Vec<f64>; 2]) {
        let n = self.grid.n_nodes();
        let d = self.fields;
        let b = 2 * d;
        for node in 0..n {
            for stage in 0..2 {
                for field in 0..d {
                    z[stage][field * n + node] -= delta[node * b + stage * d + field];
                }
            }
        }
    }
}

/// Builds the stage matrix `I - dt * (A (x) J)` in node-major block form
/// and factors it.  `J` is the spatial Jacobian at the frozen `u` values.
fn assemble_and_factor(
    p: &ProblemSpec,
    grid: &Grid1D,
    dt: f64,
    fields: usize,
    frozen_u: &[f64],
) -> Result<FactoredStage, ReferenceError> {
    let n = grid.n_nodes();
    let d = fields;
    let b = 2 * d;
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());

    // kron(A, M) with stage-major per-node ordering, scaled by -dt, plus
    // optionally the identity.
    let stage_block = |m: &Mat, add_identity: bool| -> Mat {
        let mut out = if add_identity {
            Mat::identity(b)
        } else {
            Mat::zeros(b, b)
        };
        for si in 0..2 {
            for sj in 0..2 {
                for p_ in 0..d {
                    for q in 0..d {
                        *out.at_mut(si * d + p_, sj * d + q) +=
                            -dt * IRK_A[si][sj] * m.at(p_, q);
                    }
                }
            }
        }
        out
    };

    // field-space Jacobian of the spatial operator at one node
    let self_block = |u: f64| -> Mat {
        let diag = -2.0 * inv_h2 + p.a() + p.b() * p.nonlinearity().deriv(u);
        if d == 1 {
            Mat::from_rows(vec![vec![diag]])
        } else {
            Mat::from_rows(vec![vec![0.0, 1.0], vec![diag, 0.0]])
        }
    };
    let coupling = {
        if d == 1 {
            Mat::from_rows(vec![vec![inv_h2]])
        } else {
            Mat::from_rows(vec![vec![0.0, 0.0], vec![inv_h2, 0.0]])
        }
    };
    let neighbor = stage_block(&coupling, false);
    let zero_block = Mat::zeros(b, b);

    let pinned = |node: usize| -> bool {
        grid.boundary() == Boundary::DirichletFrozen && (node == 0 || node == n - 1)
    };

    let mut diag = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n - 1);
    let mut upper = Vec::with_capacity(n - 1);
    for node in 0..n {
        if pinned(node) {
            diag.push(Mat::identity(b));
        } else {
            diag.push(stage_block(&self_block(frozen_u[node]), true));
        }
        if node + 1 < n {
            // lower[node] couples row node+1 to node; upper[node] couples
            // row node to node+1; pinned rows carry no coupling
            lower.push(if pinned(node + 1) {
                zero_block.clone()
            } else {
                neighbor.clone()
            });
            upper.push(if pinned(node) {
                zero_block.clone()
            } else {
                neighbor.clone()
            });
        }
    }

    match grid.boundary() {
        Boundary::Periodic => {
            let cyclic =
                CyclicBlockTridiag::factor(&diag, &lower, &upper, &neighbor, &neighbor)
                    .map_err(|_| ReferenceError::StageMatrixSingular)?;
            Ok(FactoredStage::Cyclic(cyclic))
        }
        Boundary::DirichletFrozen => {
            let tri = BlockTridiag::factor(&diag, &lower, &upper)
                .map_err(|_| ReferenceError::StageMatrixSingular)?;
            Ok(FactoredStage::Tridiag(tri))
        }
    }
}

/// One implicit step from `t = 0` (builds a stepper frozen at `state`).
pub fn irk_step(
    p: &ProblemSpec,
    grid: &Grid1D,
    state: &[f64],
    dt: f64,
) -> Result<Vec<f64>, ReferenceError> {
    IrkStepper::new(p, grid, dt, state)?.step(0.0, state)
}

// ═══════════════════════════════════════════════════════════════════════════
// Integration driver
// ═══════════════════════════════════════════════════════════════════════════

/// The recorded trajectory of a reference run: `values[i]` is the `u` row at
/// `times[i]`.
#[derive(Debug, Clone)]
pub struct GridSolution {
    grid: Grid1D,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl GridSolution {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// The `u` value at output row `i` and the node matching `x`, if `x` is
    /// a grid node.
    pub fn value_at_x(&self, i: usize, x: f64) -> Option<f64> {
        let idx = self.grid.node_index(x)?;
        Some(self.values[i][idx])
    }
}

/// Marches the problem from its initial data and records the `u` row at each
/// requested time.
///
/// The requested times must increase strictly and sit on the `dt` lattice
/// (time is recomputed as `step_index * dt`, so long marches cannot drift).
/// Periodic grids require the initial data to match at both ends.
pub fn integrate(
    p: &ProblemSpec,
    grid: &Grid1D,
    record_times: &[f64],
    dt: f64,
) -> Result<GridSolution, ReferenceError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(ReferenceError::InvalidStep { dt });
    }
    let mu = p.order().mu();
    if mu != 1.0 && mu != 2.0 {
        return Err(ReferenceError::NonIntegerOrder { mu });
    }
    assert!(!record_times.is_empty(), "no output times requested");

    // map each output time onto the step lattice
    let mut record_steps = Vec::with_capacity(record_times.len());
    for (i, &t) in record_times.iter().enumerate() {
        if t < 0.0 {
            return Err(ReferenceError::TimeOffStepLattice { t, dt });
        }
        let k = (t / dt).round();
        if (t - k * dt).abs() > 1e-9 * t.abs().max(1.0) {
            return Err(ReferenceError::TimeOffStepLattice { t, dt });
        }
        let k = k as usize;
        if let Some(&prev) = record_steps.last() {
            if k <= prev {
                return Err(ReferenceError::TimesNotAscending { index: i });
            }
        }
        record_steps.push(k);
    }

    // initial data, with the periodic seam check
    if grid.boundary() == Boundary::Periodic {
        let lo = p.g0().eval(grid.x_lo());
        let hi = p.g0().eval(grid.x_hi());
        if (lo - hi).abs() > 1e-12 {
            return Err(ReferenceError::PeriodicSeamMismatch { lo, hi });
        }
        if let Some(g1) = p.g1() {
            let lo = g1.eval(grid.x_lo());
            let hi = g1.eval(grid.x_hi());
            if (lo - hi).abs() > 1e-12 {
                return Err(ReferenceError::PeriodicSeamMismatch { lo, hi });
            }
        }
    }
    let n = grid.n_nodes();
    let mut state: Vec<f64> = grid.nodes().iter().map(|&x| p.g0().eval(x)).collect();
    if mu == 2.0 {
        let g1 = p.g1().expect("order-2 problems carry g1");
        state.extend(grid.nodes().iter().map(|&x| g1.eval(x)));
    }

    let stepper = IrkStepper::new(p, grid, dt, &state)?;
    let mut times = Vec::with_capacity(record_steps.len());
    let mut values = Vec::with_capacity(record_steps.len());
    let mut record_iter = record_steps.iter().copied().peekable();
    let last = *record_steps.last().expect("nonempty");

    for step_idx in 0..=last {
        if record_iter.peek() == Some(&step_idx) {
            record_iter.next();
            times.push(step_idx as f64 * dt);
            values.push(state[..n].to_vec());
        }
        if step_idx < last {
            let t = step_idx as f64 * dt;
            state = stepper.step(t, &state)?;
        }
    }

    Ok(GridSolution {
        grid: grid.clone(),
        times,
        values,
    })
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════
