//! Command dispatch: turns a validated configuration into CSV text.
//!
//! Four subcommands share one configuration format:
//!
//! * `solve` — one value column at a probe point (series or closed forms),
//! * `table` — error table against the implicit Runge–Kutta reference,
//! * `surface` — `(x, t, u)` triples over a rectangle,
//! * `sweep` — one column per requested order.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use frdtm::closedforms::{printed_eval, ClosedFormError};
use frdtm::problem::{BasisFn, InitialData, ProblemSpec};
use frdtm::reference::{integrate, Boundary, Grid1D, ReferenceError};
use frdtm::solver::{eval_grid, solve_frdtm, SeriesSolution, SolveError};

use crate::config::{AxisSpec, Mode, RangeSpec, RunConfig, SurfaceSource};
use crate::output::{format_g15, render_csv};

/// The CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Table,
    Surface,
    Sweep,
}

impl Command {
    pub fn from_name(name: &str) -> Option<Command> {
        match name {
            "solve" => Some(Command::Solve),
            "table" => Some(Command::Table),
            "surface" => Some(Command::Surface),
            "sweep" => Some(Command::Sweep),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Table => "table",
            Command::Surface => "surface",
            Command::Sweep => "sweep",
        }
    }
}

/// Failure while producing output from a valid configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Solve(SolveError),
    Reference(ReferenceError),
    ClosedForm(ClosedFormError),
    Problem(String),
    Grid(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Solve(e) => write!(f, "series evaluation failed: {e}"),
            RunError::Reference(e) => write!(f, "reference integration failed: {e}"),
            RunError::ClosedForm(e) => write!(f, "closed-form evaluation failed: {e}"),
            RunError::Problem(m) => write!(f, "problem construction failed: {m}"),
            RunError::Grid(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<SolveError> for RunError {
    fn from(e: SolveError) -> RunError {
        RunError::Solve(e)
    }
}

impl From<ReferenceError> for RunError {
    fn from(e: ReferenceError) -> RunError {
        RunError::Reference(e)
    }
}

impl From<ClosedFormError> for RunError {
    fn from(e: ClosedFormError) -> RunError {
        RunError::ClosedForm(e)
    }
}

/// Rejects configurations whose mode does not fit the subcommand.
pub fn check_mode(cmd: Command, cfg: &RunConfig) -> Result<(), String> {
    let ok = match cmd {
        Command::Solve | Command::Sweep => matches!(cfg.mode, Mode::Series | Mode::Printed),
        Command::Table => matches!(cfg.mode, Mode::Table | Mode::Compare),
        Command::Surface => cfg.mode == Mode::Surface,
    };
    if !ok {
        return Err(format!(
            "command '{}' does not accept mode = {}",
            cmd.name(),
            cfg.mode.name()
        ));
    }
    if cmd == Command::Solve && cfg.alphas.len() != 1 {
        return Err("command 'solve' takes a single alpha (use sweep for a list)".to_string());
    }
    Ok(())
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<String, RunError> {
    match cmd {
        Command::Solve => run_solve(cfg),
        Command::Table => run_table(cfg),
        Command::Surface => run_surface(cfg),
        Command::Sweep => run_sweep(cfg),
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Shared pieces
// ═══════════════════════════════════════════════════════════════════════════

fn instantiate(cfg: &RunConfig, alpha: f64) -> Result<ProblemSpec, RunError> {
    cfg.problem_for(alpha).map_err(RunError::Problem)
}

fn solve_at(p: &ProblemSpec, x: f64, n: usize) -> Result<SeriesSolution, RunError> {
    let sol = solve_frdtm(p, x, n)?;
    if sol.underflow_to_zero() {
        eprintln!(
            "warning: series coefficients underflowed to zero at x = {}",
            format_g15(x)
        );
    }
    Ok(sol)
}

/// One value column at the probe point: the truncated series, or the closed
/// forms in the printed modes.
fn column_for(cfg: &RunConfig, alpha: f64, x: f64, ts: &[f64]) -> Result<Vec<f64>, RunError> {
    match cfg.mode {
        Mode::Printed | Mode::Compare => {
            let id = cfg
                .builtin()
                .expect("validated: closed forms exist only for builtins");
            let n = cfg.printed_terms(id);
            ts.iter()
                .map(|&t| printed_eval(id, alpha, x, t, n).map_err(RunError::from))
                .collect()
        }
        _ => {
            let p = instantiate(cfg, alpha)?;
            let sol = solve_at(&p, x, cfg.n)?;
            let terms = cfg.eval_terms.unwrap_or(cfg.n);
            ts.iter()
                .map(|&t| sol.eval_partial(t, terms).map_err(RunError::from))
                .collect()
        }
    }
}

/// True when every initial-data term extends periodically (constants and
/// plain trig); such problems get a periodic window, everything else gets
/// frozen far-field walls.
fn wraps_periodically(p: &ProblemSpec) -> bool {
    let friendly = |d: &InitialData| {
        d.terms()
            .iter()
            .all(|t| matches!(t.basis, BasisFn::Const | BasisFn::Sin | BasisFn::Cos))
    };
    friendly(p.g0()) && p.g1().map_or(true, friendly)
}

/// Chooses the reference window around a probe coordinate.
///
/// Periodic-capable data gets the window `[x - pi, x + pi]`, which puts the
/// probe exactly on the middle node (the cell count is even in reference
/// modes).  Decaying data gets frozen walls, on the fixed window `[-8, 8]`
/// when the probe sits on its lattice and on `[x - 8, x + 8]` otherwise.
fn reference_grid(cfg: &RunConfig, p: &ProblemSpec, x: f64) -> Result<Grid1D, RunError> {
    let grid = if wraps_periodically(p) {
        Grid1D::new(x - PI, x + PI, cfg.cells, Boundary::Periodic)?
    } else {
        let fixed = Grid1D::new(-8.0, 8.0, cfg.cells, Boundary::DirichletFrozen)?;
        if fixed.node_index(x).is_some() {
            fixed
        } else {
            Grid1D::new(x - 8.0, x + 8.0, cfg.cells, Boundary::DirichletFrozen)?
        }
    };
    if grid.node_index(x).is_none() {
        return Err(RunError::Grid(format!(
            "probe x = {} does not land on a reference-grid node (adjust 'cells')",
            format_g15(x)
        )));
    }
    Ok(grid)
}

/// Marches the reference and reads the probe node at each requested time.
fn reference_column(
    p: &ProblemSpec,
    grid: &Grid1D,
    dt: f64,
    x: f64,
    ts: &[f64],
) -> Result<Vec<f64>, RunError> {
    let sol = integrate(p, grid, ts, dt)?;
    (0..ts.len())
        .map(|i| {
            sol.value_at_x(i, x).ok_or_else(|| {
                RunError::Grid(format!(
                    "probe x = {} is not a node of the reference grid",
                    format_g15(x)
                ))
            })
        })
        .collect()
}

// ═══════════════════════════════════════════════════════════════════════════
// Subcommands
// ═══════════════════════════════════════════════════════════════════════════

fn run_solve(cfg: &RunConfig) -> Result<String, RunError> {
    let x = cfg.probe_x();
    let ts = cfg.t.points();
    let values = column_for(cfg, cfg.alphas[0], x, &ts)?;
    let header = vec!["t".to_string(), "u".to_string()];
    let rows = ts
        .iter()
        .zip(&values)
        .map(|(&t, &u)| vec![format_g15(t), format_g15(u)])
        .collect::<Vec<_>>();
    Ok(render_csv(&header, &rows))
}

fn run_table(cfg: &RunConfig) -> Result<String, RunError> {
    let alpha = cfg.alphas[0];
    let x = cfg.probe_x();
    let ts = cfg.t.points();
    let p = instantiate(cfg, alpha)?;

    let series = column_for(cfg, alpha, x, &ts)?;
    let grid = reference_grid(cfg, &p, x)?;
    let irk = reference_column(&p, &grid, cfg.dt, x, &ts)?;

    let header = ["t", "frdtm", "irk", "abs_err", "rel_err"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>();
    let rows = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let (a, b) = (series[i], irk[i]);
            let abs = (a - b).abs();
            let rel = if abs == 0.0 { 0.0 } else { abs / b.abs() };
            vec![
                format_g15(t),
                format_g15(a),
                format_g15(b),
                format_g15(abs),
                format_g15(rel),
            ]
        })
        .collect::<Vec<_>>();
    Ok(render_csv(&header, &rows))
}

fn run_surface(cfg: &RunConfig) -> Result<String, RunError> {
    let r: RangeSpec = match cfg.x {
        AxisSpec::Range(r) => r,
        AxisSpec::Point(_) => unreachable!("validated: surface mode carries an x range"),
    };
    let ts = cfg.t.points();
    let p = instantiate(cfg, cfg.alphas[0])?;

    let header = ["x", "t", "u"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>();
    let mut rows: Vec<Vec<String>> = Vec::new();

    match cfg.surface_source {
        SurfaceSource::Series => {
            let xs = r.points();
            let terms = cfg.eval_terms.unwrap_or(cfg.n);
            let values = eval_grid(&p, &xs, &ts, terms)?;
            for (i, &x) in xs.iter().enumerate() {
                for (j, &t) in ts.iter().enumerate() {
                    rows.push(vec![format_g15(x), format_g15(t), format_g15(values[i][j])]);
                }
            }
        }
        SurfaceSource::Reference => {
            let mid = 0.5 * (r.start + r.end);
            let grid = reference_grid(cfg, &p, mid)?;
            let nodes = grid.nodes();
            let tol = |v: f64| 1e-9 * v.abs().max(1.0);
            let first = nodes[0];
            let last = *nodes.last().expect("grids have nodes");
            if r.start < first - tol(first) || r.end > last + tol(last) {
                return Err(RunError::Grid(format!(
                    "surface x range [{}, {}] exceeds the reference window [{}, {}]",
                    format_g15(r.start),
                    format_g15(r.end),
                    format_g15(first),
                    format_g15(last)
                )));
            }
            let sol = integrate(&p, &grid, &ts, cfg.dt)?;
            for (i, &x) in nodes.iter().enumerate() {
                if x < r.start - tol(x) || x > r.end + tol(x) {
                    continue;
                }
                for (j, &t) in ts.iter().enumerate() {
                    rows.push(vec![
                        format_g15(x),
                        format_g15(t),
                        format_g15(sol.values()[j][i]),
                    ]);
                }
            }
        }
    }
    Ok(render_csv(&header, &rows))
}

fn run_sweep(cfg: &RunConfig) -> Result<String, RunError> {
    let x = cfg.probe_x();
    let ts = cfg.t.points();

    // one column per order; the ordered collect keeps columns aligned with
    // the alpha list for any worker count
    let columns = cfg
        .alphas
        .par_iter()
        .map(|&alpha| column_for(cfg, alpha, x, &ts))
        .collect::<Result<Vec<Vec<f64>>, RunError>>()?;

    let mut header = vec!["t".to_string()];
    for &alpha in &cfg.alphas {
        header.push(format!("alpha={}", format_g15(alpha)));
    }
    let rows = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = vec![format_g15(t)];
            for col in &columns {
                row.push(format_g15(col[i]));
            }
            row
        })
        .collect::<Vec<_>>();
    Ok(render_csv(&header, &rows))
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::output::parse_csv;
    use approx::assert_relative_eq;
    use frdtm::problem::BuiltinId;

    fn cfg(text: &str) -> RunConfig {
        parse_config(text).expect("test config should parse")
    }

    fn floats(row: &[String]) -> Vec<f64> {
        row.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn command_names_round_trip() {
        for cmd in [Command::Solve, Command::Table, Command::Surface, Command::Sweep] {
            assert_eq!(Command::from_name(cmd.name()), Some(cmd));
        }
        assert_eq!(Command::from_name("plot"), None);
    }

    #[test]
    fn mode_and_command_must_agree() {
        let c = cfg("problem = ex41\nalpha = 1\nN = 4\nx = 0\nt = 0.1\nmode = series");
        assert!(check_mode(Command::Solve, &c).is_ok());
        assert!(check_mode(Command::Sweep, &c).is_ok());
        assert!(check_mode(Command::Table, &c).is_err());
        assert!(check_mode(Command::Surface, &c).is_err());

        let c = cfg("problem = ex42\nalpha = 1\nN = 4\nx = 2\nt = 0:0.01:0.001\nmode = table");
        assert!(check_mode(Command::Table, &c).is_ok());
        assert!(check_mode(Command::Solve, &c).is_err());

        let c = cfg("problem = ex44\nalpha = 1.5, 2\nN = 4\nx = 2\nt = 0.1\nmode = series");
        assert!(check_mode(Command::Solve, &c).is_err());
        assert!(check_mode(Command::Sweep, &c).is_ok());
    }

    #[test]
    fn solve_emits_the_series_column() {
        let c = cfg("problem = ex41\nalpha = 1\nN = 14\nx = 0\nt = 0:0.4:0.2\nmode = series");
        let csv = run(Command::Solve, &c).unwrap();
        let (header, rows) = parse_csv(&csv).unwrap();
        assert_eq!(header, vec!["t", "u"]);
        assert_eq!(rows.len(), 3);
        // u(0, t) = sin 0 + e^t
        for row in &rows {
            let v = floats(row);
            assert_relative_eq!(v[1], v[0].exp(), epsilon = 1e-10);
        }
    }

    #[test]
    fn solve_printed_uses_the_closed_forms() {
        let c = cfg(
            "problem = ex42\nalpha = 0.75\nN = 3\nx = 2\nt = 0:0.01:0.005\nmode = printed",
        );
        let csv = run(Command::Solve, &c).unwrap();
        let (_, rows) = parse_csv(&csv).unwrap();
        for row in &rows {
            let v = floats(row);
            let want = printed_eval(BuiltinId::Ex42, 0.75, 2.0, v[0], 3).unwrap();
            assert_relative_eq!(v[1], want, epsilon = 1e-12);
        }
    }

    #[test]
    fn table_columns_are_consistent() {
        let c = cfg(
            "problem = ex41\nalpha = 1\nN = 12\nx = 2\nt = 0:0.01:0.005\nmode = table\ncells = 64\ndt = 0.001",
        );
        let csv = run(Command::Table, &c).unwrap();
        let (header, rows) = parse_csv(&csv).unwrap();
        assert_eq!(header, vec!["t", "frdtm", "irk", "abs_err", "rel_err"]);
        assert_eq!(rows.len(), 3);
        // the error columns are computed before rounding, so re-deriving
        // them from the 15-digit value columns only matches approximately
        for row in &rows {
            let v = floats(row);
            assert_relative_eq!(v[3], (v[1] - v[2]).abs(), epsilon = 1e-13);
            if v[3] == 0.0 {
                assert_eq!(v[4], 0.0);
            } else {
                assert_relative_eq!(v[4], v[3] / v[2].abs(), epsilon = 1e-13, max_relative = 1e-8);
            }
        }
        // the initial row needs no marching and the columns start together
        let first = floats(&rows[0]);
        assert!(first[3] < 1e-12, "initial abs_err = {}", first[3]);
    }

    #[test]
    fn sweep_emits_one_column_per_order() {
        let c = cfg(
            "problem = ex44\nalpha = 1.25, 1.5, 1.75, 2\nN = 6\nx = 2\nt = 0:0.02:0.01\nmode = printed\neval_terms = 2",
        );
        let csv = run(Command::Sweep, &c).unwrap();
        let (header, rows) = parse_csv(&csv).unwrap();
        assert_eq!(
            header,
            vec!["t", "alpha=1.25", "alpha=1.5", "alpha=1.75", "alpha=2"]
        );
        assert_eq!(rows.len(), 3);
        for row in &rows {
            let v = floats(row);
            for (j, &alpha) in c.alphas.iter().enumerate() {
                let want = printed_eval(BuiltinId::Ex44, alpha, 2.0, v[0], 2).unwrap();
                assert_relative_eq!(v[1 + j], want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn surface_is_x_major_over_the_rectangle() {
        let c = cfg(
            "problem = ex41\nalpha = 0.7\nN = 8\nx = 0:1:0.5\nt = 0:0.2:0.1\nmode = surface",
        );
        let csv = run(Command::Surface, &c).unwrap();
        let (header, rows) = parse_csv(&csv).unwrap();
        assert_eq!(header, vec!["x", "t", "u"]);
        assert_eq!(rows.len(), 9);
        let xs: Vec<f64> = rows.iter().map(|r| floats(r)[0]).collect();
        assert_eq!(xs[0..3], [0.0, 0.0, 0.0]);
        assert_eq!(xs[3..6], [0.5, 0.5, 0.5]);
        let ts: Vec<f64> = rows.iter().map(|r| floats(r)[1]).collect();
        assert_eq!(ts[0..3], [0.0, 0.1, 0.2]);
        for row in &rows {
            assert!(floats(row)[2].is_finite());
        }
    }

    #[test]
    fn reference_surface_emits_grid_nodes() {
        let c = cfg(
            "problem = ex41\nalpha = 1\nN = 4\nx = 1:3:0.5\nt = 0:0.002:0.001\nmode = surface\nsource = reference\ncells = 64\ndt = 0.001",
        );
        let csv = run(Command::Surface, &c).unwrap();
        let (_, rows) = parse_csv(&csv).unwrap();
        assert!(!rows.is_empty());
        // nodes are spaced 2*pi/64 around the midpoint x = 2
        let h = 2.0 * PI / 64.0;
        let mut seen_x: Vec<f64> = rows.iter().map(|r| floats(r)[0]).collect();
        seen_x.dedup();
        for w in seen_x.windows(2) {
            assert_relative_eq!(w[1] - w[0], h, epsilon = 1e-12);
        }
        assert!(seen_x.first().unwrap() >= &1.0 && seen_x.last().unwrap() <= &3.0);
        // row 0 of each node is the initial condition 1 + sin x
        for r in &rows {
            let v = floats(r);
            if v[1] == 0.0 {
                assert_relative_eq!(v[2], 1.0 + v[0].sin(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn surface_range_must_fit_the_reference_window() {
        let c = cfg(
            "problem = ex41\nalpha = 1\nN = 4\nx = -4:8:0.5\nt = 0:0.002:0.001\nmode = surface\nsource = reference\ncells = 64\ndt = 0.001",
        );
        match run(Command::Surface, &c) {
            Err(RunError::Grid(m)) => assert!(m.contains("exceeds the reference window")),
            other => panic!("expected a window error, got {other:?}"),
        }
    }

    #[test]
    fn grid_policy_prefers_periodic_windows() {
        // trig data wraps: periodic window centered on the probe
        let c = cfg(
            "problem = ex42\nalpha = 1\nN = 4\nx = 2\nt = 0:0.01:0.001\nmode = table\ncells = 64",
        );
        let p = instantiate(&c, 1.0).unwrap();
        let g = reference_grid(&c, &p, 2.0).unwrap();
        assert_eq!(g.boundary(), Boundary::Periodic);
        assert_eq!(g.node_index(2.0), Some(32));

        // decaying data cannot wrap: frozen walls on the fixed window
        let c = cfg(
            "problem = ex43\nalpha = 1\nN = 4\nx = 2\nt = 0:0.01:0.001\nmode = table\ncells = 64",
        );
        let p = instantiate(&c, 1.0).unwrap();
        let g = reference_grid(&c, &p, 2.0).unwrap();
        assert_eq!(g.boundary(), Boundary::DirichletFrozen);
        assert_eq!((g.x_lo(), g.x_hi()), (-8.0, 8.0));
        assert_eq!(g.node_index(2.0), Some(40));

        // off-lattice probe: recentred walls
        let g = reference_grid(&c, &p, 0.3).unwrap();
        assert_eq!(g.boundary(), Boundary::DirichletFrozen);
        assert_eq!((g.x_lo(), g.x_hi()), (0.3 - 8.0, 0.3 + 8.0));
        assert_eq!(g.node_index(0.3), Some(32));
    }

    #[test]
    fn runtime_failures_surface_as_errors() {
        // an explosive custom problem diverges inside the reference march
        let c = cfg(
            "problem = custom\ng0 = 100000000\nb = 1\nnonlinearity = square\nalpha = 1\nN = 2\nx = 0\nt = 0:0.5:0.5\nmode = table\ncells = 8\ndt = 0.25",
        );
        match run(Command::Table, &c) {
            Err(RunError::Reference(ReferenceError::NewtonDivergence { .. })) => {}
            other => panic!("expected Newton divergence, got {other:?}"),
        }
    }
}
