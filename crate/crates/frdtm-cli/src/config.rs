//! Line-oriented configuration: `key = value` pairs, `#` comments,
//! `start:end:step` ranges, and small expression grammars for initial data
//! and source terms.
//!
//! Parsing is strict: unknown keys, duplicate keys, and invariant
//! violations are rejected with the offending line and column.

use std::fmt;

use frdtm::closedforms::printed_term_limit;
use frdtm::fraccalc::FracOrder;
use frdtm::problem::{
    BasisFn, BuiltinId, InitialData, InitialTerm, Nonlinearity, ProblemSpec, SourceTerm,
};

/// Configuration rejection: either pinned to a line/column or global to the
/// file.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Line {
        line: usize,
        column: usize,
        message: String,
    },
    Global {
        message: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Line {
                line,
                column,
                message,
            } => write!(f, "line {line}, column {column}: {message}"),
            ConfigError::Global { message } => write!(f, "{message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// What the emitted columns contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Truncated-series evaluation.
    Series,
    /// Error table with the closed-form column against the reference.
    Compare,
    /// Error table with the series column against the reference.
    Table,
    /// `(x, t, u)` triples over a rectangle.
    Surface,
    /// Closed-form coefficient evaluation.
    Printed,
}

impl Mode {
    fn from_name(name: &str) -> Option<Mode> {
        match name {
            "series" => Some(Mode::Series),
            "compare" => Some(Mode::Compare),
            "table" => Some(Mode::Table),
            "surface" => Some(Mode::Surface),
            "printed" => Some(Mode::Printed),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Series => "series",
            Mode::Compare => "compare",
            Mode::Table => "table",
            Mode::Surface => "surface",
            Mode::Printed => "printed",
        }
    }
}

/// Which engine fills a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceSource {
    Series,
    Reference,
}

/// An inclusive arithmetic progression `start, start+step, …` with `count+1`
/// points (a single value has `count = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    pub count: usize,
}

impl RangeSpec {
    pub fn single(v: f64) -> RangeSpec {
        RangeSpec {
            start: v,
            end: v,
            step: 0.0,
            count: 0,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

/// Probe point or axis range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisSpec {
    Point(f64),
    Range(RangeSpec),
}

/// The order-free part of a user-defined problem; the order is supplied per
/// alpha at run time.
#[derive(Debug, Clone)]
pub struct CustomProblem {
    pub a: f64,
    pub b: f64,
    pub nonlinearity: Nonlinearity,
    pub source: Vec<SourceTerm>,
    pub g0: InitialData,
    pub g1: Option<InitialData>,
}

#[derive(Debug, Clone)]
pub enum ProblemKind {
    Builtin(BuiltinId),
    Custom(CustomProblem),
}

/// A fully validated run request.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub alphas: Vec<f64>,
    pub n: usize,
    pub x: AxisSpec,
    pub t: RangeSpec,
    pub mode: Mode,
    /// Partial-sum order for evaluation; defaults to the full series (or the
    /// full closed-form range in printed modes).
    pub eval_terms: Option<usize>,
    /// Reference-grid cell count.
    pub cells: usize,
    /// Reference step size.
    pub dt: f64,
    pub surface_source: SurfaceSource,
    pub out: Option<String>,
}

impl RunConfig {
    /// Instantiates the problem at one order.
    pub fn problem_for(&self, alpha: f64) -> Result<ProblemSpec, String> {
        match &self.problem {
            ProblemKind::Builtin(id) => id.spec(alpha).map_err(|e| e.to_string()),
            ProblemKind::Custom(c) => {
                let order = FracOrder::new(alpha).map_err(|e| e.to_string())?;
                ProblemSpec::new(
                    order,
                    c.a,
                    c.b,
                    c.nonlinearity.clone(),
                    c.source.clone(),
                    c.g0.clone(),
                    c.g1.clone(),
                )
                .map_err(|e| e.to_string())
            }
        }
    }

    pub fn builtin(&self) -> Option<BuiltinId> {
        match self.problem {
            ProblemKind::Builtin(id) => Some(id),
            ProblemKind::Custom(_) => None,
        }
    }

    /// Probe coordinate for the point modes.
    pub fn probe_x(&self) -> f64 {
        match self.x {
            AxisSpec::Point(x) => x,
            AxisSpec::Range(r) => r.start,
        }
    }

    /// Closed-form truncation index for printed evaluation.
    pub fn printed_terms(&self, id: BuiltinId) -> usize {
        match (self.eval_terms, printed_term_limit(id)) {
            (Some(n), _) => n,
            (None, Some(limit)) => limit,
            (None, None) => self.n,
        }
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Parsing
// ═══════════════════════════════════════════════════════════════════════════

/// One raw `key = value` occurrence.
struct RawEntry {
    value: String,
    line: usize,
    /// 1-based column where the value starts (for error pinning).
    column: usize,
}

const KNOWN_KEYS: [&str; 15] = [
    "problem", "alpha", "N", "x", "t", "mode", "eval_terms", "cells", "dt", "source", "out",
    "a", "b", "nonlinearity", "g0",
];
const CUSTOM_ONLY_KEYS: [&str; 6] = ["a", "b", "nonlinearity", "g0", "g1", "f"];

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: Vec<(String, RawEntry)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let key_col = content.len() - content.trim_start().len() + 1;
        let eq = content.find('=').ok_or_else(|| ConfigError::Line {
            line: line_no,
            column: key_col,
            message: "expected 'key = value'".to_string(),
        })?;
        let key = content[..eq].trim().to_string();
        let value_raw = &content[eq + 1..];
        let value = value_raw.trim().to_string();
        let value_col = eq + 2 + (value_raw.len() - value_raw.trim_start().len());
        if key.is_empty() {
            return Err(ConfigError::Line {
                line: line_no,
                column: key_col,
                message: "missing key before '='".to_string(),
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Line {
                line: line_no,
                column: value_col,
                message: format!("missing value for '{key}'"),
            });
        }
        if !KNOWN_KEYS.contains(&key.as_str()) && !CUSTOM_ONLY_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::Line {
                line: line_no,
                column: key_col,
                message: format!("unknown key '{key}'"),
            });
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::Line {
                line: line_no,
                column: key_col,
                message: format!("duplicate key '{key}'"),
            });
        }
        entries.push((
            key,
            RawEntry {
                value,
                line: line_no,
                column: value_col,
            },
        ));
    }

    build_config(entries)
}

fn build_config(entries: Vec<(String, RawEntry)>) -> Result<RunConfig, ConfigError> {
    let get = |key: &str| entries.iter().find(|(k, _)| k == key).map(|(_, e)| e);
    let pin = |e: &RawEntry, message: String| ConfigError::Line {
        line: e.line,
        column: e.column,
        message,
    };
    let require = |key: &str| {
        get(key).ok_or_else(|| ConfigError::Global {
            message: format!("missing required key '{key}'"),
        })
    };

    // problem
    let problem_entry = require("problem")?;
    let problem = match problem_entry.value.as_str() {
        "custom" => {
            let g0_entry = require("g0")?;
            let g0 = parse_initial_expr(&g0_entry.value).map_err(|m| pin(g0_entry, m))?;
            let g1 = match get("g1") {
                Some(e) => Some(parse_initial_expr(&e.value).map_err(|m| pin(e, m))?),
                None => None,
            };
            let a = match get("a") {
                Some(e) => parse_number(&e.value).map_err(|m| pin(e, m))?,
                None => 0.0,
            };
            let b = match get("b") {
                Some(e) => parse_number(&e.value).map_err(|m| pin(e, m))?,
                None => 0.0,
            };
            let nonlinearity = match get("nonlinearity") {
                Some(e) => parse_nonlinearity(&e.value).map_err(|m| pin(e, m))?,
                None => Nonlinearity::None,
            };
            let source = match get("f") {
                Some(e) => parse_source_expr(&e.value).map_err(|m| pin(e, m))?,
                None => Vec::new(),
            };
            ProblemKind::Custom(CustomProblem {
                a,
                b,
                nonlinearity,
                source,
                g0,
                g1,
            })
        }
        name => match BuiltinId::from_name(name) {
            Some(id) => {
                for key in CUSTOM_ONLY_KEYS {
                    if let Some(e) = get(key) {
                        return Err(ConfigError::Line {
                            line: e.line,
                            column: e.column,
                            message: format!("key '{key}' only applies to problem = custom"),
                        });
                    }
                }
                ProblemKind::Builtin(id)
            }
            None => {
                return Err(pin(
                    problem_entry,
                    format!("unknown problem '{name}' (builtins: ex41, ex42, ex43, ex44, or custom)"),
                ))
            }
        },
    };

    // alpha list
    let alpha_entry = require("alpha")?;
    let alphas = parse_number_list(&alpha_entry.value).map_err(|m| pin(alpha_entry, m))?;
    if alphas.is_empty() {
        return Err(pin(alpha_entry, "alpha list is empty".to_string()));
    }

    // truncation order
    let n_entry = require("N")?;
    let n = parse_count(&n_entry.value).map_err(|m| pin(n_entry, m))?;
    if n == 0 {
        return Err(pin(n_entry, "N must be at least 1".to_string()));
    }

    // probe / axis
    let x_entry = require("x")?;
    let x = if x_entry.value.contains(':') {
        AxisSpec::Range(parse_range(&x_entry.value).map_err(|m| pin(x_entry, m))?)
    } else {
        AxisSpec::Point(parse_number(&x_entry.value).map_err(|m| pin(x_entry, m))?)
    };

    // time grid
    let t_entry = require("t")?;
    let t = parse_range(&t_entry.value).map_err(|m| pin(t_entry, m))?;
    if t.start < 0.0 {
        return Err(pin(t_entry, "times must be nonnegative".to_string()));
    }

    // mode
    let mode_entry = require("mode")?;
    let mode = Mode::from_name(&mode_entry.value).ok_or_else(|| {
        pin(
            mode_entry,
            format!(
                "unknown mode '{}' (series, compare, table, surface, printed)",
                mode_entry.value
            ),
        )
    })?;

    // options
    let eval_terms = match get("eval_terms") {
        Some(e) => Some(parse_count(&e.value).map_err(|m| pin(e, m))?),
        None => None,
    };
    let cells = match get("cells") {
        Some(e) => parse_count(&e.value).map_err(|m| pin(e, m))?,
        None => 1024,
    };
    let dt = match get("dt") {
        Some(e) => {
            let v = parse_number(&e.value).map_err(|m| pin(e, m))?;
            if v <= 0.0 {
                return Err(pin(e, "dt must be positive".to_string()));
            }
            v
        }
        None => 1e-4,
    };
    let surface_source = match get("source") {
        Some(e) => {
            if mode != Mode::Surface {
                return Err(pin(
                    e,
                    "key 'source' only applies to mode = surface".to_string(),
                ));
            }
            match e.value.as_str() {
                "series" => SurfaceSource::Series,
                "reference" => SurfaceSource::Reference,
                other => {
                    return Err(pin(
                        e,
                        format!("unknown source '{other}' (series or reference)"),
                    ))
                }
            }
        }
        None => SurfaceSource::Series,
    };
    let out = get("out").map(|e| e.value.clone());

    let cfg = RunConfig {
        problem,
        alphas,
        n,
        x,
        t,
        mode,
        eval_terms,
        cells,
        dt,
        surface_source,
        out,
    };
    validate(&cfg, alpha_entry, t_entry, x_entry)?;
    Ok(cfg)
}

/// Cross-field invariants, pinned to the participating keys where possible.
fn validate(
    cfg: &RunConfig,
    alpha_entry: &RawEntry,
    t_entry: &RawEntry,
    x_entry: &RawEntry,
) -> Result<(), ConfigError> {
    let pin = |e: &RawEntry, message: String| ConfigError::Line {
        line: e.line,
        column: e.column,
        message,
    };
    let global = |message: String| ConfigError::Global { message };

    // every alpha must instantiate the problem
    for &alpha in &cfg.alphas {
        if let Err(m) = cfg.problem_for(alpha) {
            return Err(pin(alpha_entry, format!("alpha = {alpha}: {m}")));
        }
    }

    // monotone time grid
    if cfg.t.count >= 1 && cfg.t.step <= 0.0 {
        return Err(pin(
            t_entry,
            "time grid must increase (step > 0)".to_string(),
        ));
    }

    // mode-shape agreement
    match cfg.mode {
        Mode::Surface => {
            if !matches!(cfg.x, AxisSpec::Range(_)) {
                return Err(pin(
                    x_entry,
                    "mode = surface expects an x range (start:end:step)".to_string(),
                ));
            }
            if cfg.alphas.len() != 1 {
                return Err(pin(
                    alpha_entry,
                    "mode = surface takes a single alpha".to_string(),
                ));
            }
        }
        _ => {
            if !matches!(cfg.x, AxisSpec::Point(_)) {
                return Err(pin(
                    x_entry,
                    format!("mode = {} expects a single probe x", cfg.mode.name()),
                ));
            }
        }
    }

    // closed forms only exist for the builtins
    if matches!(cfg.mode, Mode::Printed | Mode::Compare) && cfg.builtin().is_none() {
        return Err(global(format!(
            "mode = {} requires a builtin problem",
            cfg.mode.name()
        )));
    }

    // the reference column runs at integer order on one alpha
    let needs_reference = matches!(cfg.mode, Mode::Table | Mode::Compare)
        || (cfg.mode == Mode::Surface && cfg.surface_source == SurfaceSource::Reference);
    if needs_reference {
        if cfg.alphas.len() != 1 {
            return Err(pin(
                alpha_entry,
                format!("mode = {} takes a single alpha", cfg.mode.name()),
            ));
        }
        let alpha = cfg.alphas[0];
        if alpha != 1.0 && alpha != 2.0 {
            return Err(pin(
                alpha_entry,
                "the reference integrator requires alpha = 1 or alpha = 2".to_string(),
            ));
        }
        if cfg.cells % 2 != 0 {
            return Err(global(
                "reference grids center the probe, so 'cells' must be even".to_string(),
            ));
        }
    }

    // partial sums cannot exceed what is available
    if let Some(terms) = cfg.eval_terms {
        if terms > cfg.n {
            return Err(global(format!(
                "eval_terms = {terms} exceeds the truncation order N = {}",
                cfg.n
            )));
        }
        if matches!(cfg.mode, Mode::Printed | Mode::Compare) {
            let id = cfg.builtin().expect("checked above");
            if let Some(limit) = printed_term_limit(id) {
                if terms > limit {
                    return Err(global(format!(
                        "eval_terms = {terms} exceeds the closed-form range of {} (max {limit})",
                        id.name()
                    )));
                }
            }
        }
    }

    Ok(())
}

// ═══════════════════════════════════════════════════════════════════════════
// Value parsers
// ═══════════════════════════════════════════════════════════════════════════

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("expected a number, got '{s}'"))?;
    if !v.is_finite() {
        return Err(format!("number '{s}' is not finite"));
    }
    Ok(v)
}

fn parse_count(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("expected a nonnegative integer, got '{s}'"))
}

fn parse_number_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_number).collect()
}

/// `start:end:step` (or a single value).
fn parse_range(s: &str) -> Result<RangeSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => Ok(RangeSpec::single(parse_number(parts[0])?)),
        3 => {
            let start = parse_number(parts[0])?;
            let end = parse_number(parts[1])?;
            let step = parse_number(parts[2])?;
            if end == start {
                return Ok(RangeSpec::single(start));
            }
            if step <= 0.0 {
                return Err("range step must be positive".to_string());
            }
            if end < start {
                return Err("range end is below its start".to_string());
            }
            let count = ((end - start) / step + 1e-9).floor() as usize;
            Ok(RangeSpec {
                start,
                end,
                step,
                count,
            })
        }
        _ => Err(format!("expected 'start:end:step', got '{s}'")),
    }
}

fn parse_nonlinearity(s: &str) -> Result<Nonlinearity, String> {
    match s {
        "none" => Ok(Nonlinearity::None),
        "square" => Ok(Nonlinearity::Square),
        "cube" => Ok(Nonlinearity::Cube),
        _ => {
            let inner = s
                .strip_prefix("poly(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| {
                    format!("unknown nonlinearity '{s}' (none, square, cube, poly(c1,...))")
                })?;
            let coeffs = parse_number_list(inner)?;
            if coeffs.is_empty() {
                return Err("poly() needs at least one coefficient".to_string());
            }
            Ok(Nonlinearity::Poly(coeffs))
        }
    }
}

/// Splits an expression into sign-carrying chunks at top-level `+`/`-`
/// (signs inside scientific-notation exponents are kept).
fn split_signed_terms(s: &str) -> Result<Vec<(f64, String)>, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty expression".to_string());
    }
    let mut terms: Vec<(f64, String)> = Vec::new();
    let mut current = String::new();
    let mut sign = 1.0;
    let mut prev: Option<char> = None;
    for c in compact.chars() {
        let splits = (c == '+' || c == '-')
            && !current.is_empty()
            && !matches!(prev, Some('e') | Some('E') | Some('*') | Some('^') | Some('('));
        let leads = (c == '+' || c == '-') && current.is_empty() && prev.is_none();
        if splits {
            terms.push((sign, std::mem::take(&mut current)));
            sign = if c == '-' { -1.0 } else { 1.0 };
        } else if leads {
            sign = if c == '-' { -1.0 } else { 1.0 };
        } else {
            current.push(c);
        }
        prev = Some(c);
    }
    if current.is_empty() {
        return Err("expression ends with a dangling operator".to_string());
    }
    terms.push((sign, current));
    Ok(terms)
}

/// `[sign][coeff*]basis` terms joined by `+`/`-`, with basis one of a
/// number, `sin(x)`, `cos(x)`, `exp(x)`, `sech(x)`, `x`, or `x^p`.
fn parse_initial_expr(s: &str) -> Result<InitialData, String> {
    let mut terms = Vec::new();
    for (sign, chunk) in split_signed_terms(s)? {
        let mut coeff = sign;
        let mut basis: Option<BasisFn> = None;
        for factor in chunk.split('*') {
            let parsed = match factor {
                "sin(x)" => Some(BasisFn::Sin),
                "cos(x)" => Some(BasisFn::Cos),
                "exp(x)" => Some(BasisFn::Exp),
                "sech(x)" => Some(BasisFn::Sech),
                "x" => Some(BasisFn::XPow(1)),
                _ if factor.starts_with("x^") => {
                    let p: u32 = factor[2..]
                        .parse()
                        .map_err(|_| format!("bad power in '{factor}'"))?;
                    Some(if p == 0 { BasisFn::Const } else { BasisFn::XPow(p) })
                }
                _ => None,
            };
            match parsed {
                Some(b) => {
                    if basis.replace(b).is_some() {
                        return Err(format!(
                            "term '{chunk}' multiplies two basis functions; only coeff*basis is supported"
                        ));
                    }
                }
                None => coeff *= parse_number(factor)?,
            }
        }
        terms.push(InitialTerm {
            coeff,
            basis: basis.unwrap_or(BasisFn::Const),
        });
    }
    Ok(InitialData::new(terms))
}

/// Source monomials `c*x^m*t^n` joined by `+`/`-`; the `t` power is the
/// transform index (the physical power is `n*beta`).
fn parse_source_expr(s: &str) -> Result<Vec<SourceTerm>, String> {
    let mut out = Vec::new();
    for (sign, chunk) in split_signed_terms(s)? {
        let mut coeff = sign;
        let mut x_power: u32 = 0;
        let mut t_index: usize = 0;
        for factor in chunk.split('*') {
            if factor == "x" {
                x_power += 1;
            } else if factor == "t" {
                t_index += 1;
            } else if let Some(p) = factor.strip_prefix("x^") {
                x_power += p
                    .parse::<u32>()
                    .map_err(|_| format!("bad power in '{factor}'"))?;
            } else if let Some(p) = factor.strip_prefix("t^") {
                t_index += p
                    .parse::<usize>()
                    .map_err(|_| format!("bad power in '{factor}'"))?;
            } else {
                coeff *= parse_number(factor)?;
            }
        }
        out.push(SourceTerm {
            coeff,
            x_power,
            t_index,
        });
    }
    Ok(out)
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════
