//! Acceptance checks: one test per shipped criterion.  Each prints a single
//! `[criterion N] PASS/FAIL — detail` line (shown with `--nocapture`, and
//! automatically whenever a criterion fails).

use std::f64::consts::PI;
use std::time::Instant;

use frdtm::closedforms::{printed_eval, printed_vs_solver};
use frdtm::fraccalc::{rl_integral_monomial, verify_theorem1, FracOrder};
use frdtm::jet::{ElemKind, Jet};
use frdtm::problem::{BasisFn, BuiltinId, InitialData, Nonlinearity, ProblemSpec};
use frdtm::reference::{laplacian, Boundary, Grid1D, IrkStepper};
use frdtm::solver::solve_frdtm;
use frdtm::transform::{exp_sequence, trig_sequence, TrigKind};

use frdtm_cli::config::parse_config;
use frdtm_cli::output::parse_csv;
use frdtm_cli::run::{run, Command};

fn report(criterion: usize, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[criterion {criterion}] {tag} — {detail}");
    assert!(pass, "[criterion {criterion}] {tag} — {detail}");
}

// ═══════════════════════════════════════════════════════════════════════════
// 1. Two-term series column of the quadratic problem
// ═══════════════════════════════════════════════════════════════════════════

const TWO_TERM_ROWS: [f64; 11] = [
    1.909297426825682,
    1.904742712734773,
    1.900187998643864,
    1.895633284552955,
    1.891078570462046,
    1.886523856371138,
    1.881969142280229,
    1.877414428189319,
    1.872859714098411,
    1.868305000007502,
    1.863750285916593,
];

#[test]
fn criterion_1_quadratic_problem_two_term_column() {
    let clock = Instant::now();
    let p = BuiltinId::Ex42.spec(1.0).unwrap();
    let sol = solve_frdtm(&p, 2.0, 1).unwrap();
    let mut worst = 0.0f64;
    for (i, &want) in TWO_TERM_ROWS.iter().enumerate() {
        let t = i as f64 * 0.001;
        worst = worst.max((sol.eval(t).unwrap() - want).abs());
    }
    let secs = clock.elapsed().as_secs_f64();
    report(
        1,
        worst <= 1e-12 && secs < 1.0,
        &format!(
            "two-term series at x = 2 vs 11 frozen rows: worst |err| = {worst:.3e} \
             (tol 1e-12), {secs:.3} s (limit 1 s)"
        ),
    );
}

// ═══════════════════════════════════════════════════════════════════════════
// 2. Leading even terms of the two-condition problem
// ═══════════════════════════════════════════════════════════════════════════

const EVEN_SERIES_ROWS: [f64; 11] = [
    1.90929742682568,
    1.90838648400750,
    1.90565365555296,
    1.90109894146205,
    1.89472234173477,
    1.88652385637114,
    1.87650348537114,
    1.86466122873478,
    1.85099708646205,
    1.83551105855296,
    1.81820314500750,
];

#[test]
fn criterion_2_two_condition_problem_even_series_column() {
    let clock = Instant::now();
    let p = BuiltinId::Ex44.spec(2.0).unwrap();
    let sol = solve_frdtm(&p, 2.0, 12).unwrap();
    let mut worst = 0.0f64;
    for (i, &want) in EVEN_SERIES_ROWS.iter().enumerate() {
        let t = i as f64 * 0.02;
        // the frozen column is the k <= 2 truncation of the even series
        worst = worst.max((sol.eval_partial(t, 2).unwrap() - want).abs());
    }
    let secs = clock.elapsed().as_secs_f64();
    report(
        2,
        worst <= 1e-6 && secs < 1.0,
        &format!(
            "order-2 series at x = 2, leading even terms vs 11 frozen rows: \
             worst |err| = {worst:.3e} (tol 1e-6), {secs:.3} s (limit 1 s)"
        ),
    );
}

// ═══════════════════════════════════════════════════════════════════════════
// 3. Closed-form order sweep
// ═══════════════════════════════════════════════════════════════════════════

const SWEEP_ALPHAS: [f64; 4] = [1.25, 1.5, 1.75, 2.0];
const SWEEP_ROWS: [[f64; 4]; 11] = [
    [1.9092974268257, 1.9092974268257, 1.9092974268257, 1.9092974268257],
    [1.8577557126584, 1.8953639720340, 1.9056740630824, 1.9083864840075],
    [1.7867098804114, 1.8698876653513, 1.8971099324942, 1.9056536555530],
    [1.7057992950300, 1.8368970719530, 1.8845189771575, 1.9010989414620],
    [1.6177334620125, 1.7978297884919, 1.8683037456485, 1.8947223417348],
    [1.5239332295153, 1.7535166664471, 1.8487201924577, 1.8865238563711],
    [1.4252945743833, 1.7045182992625, 1.8259529888198, 1.8765034853711],
    [1.3224416173263, 1.6512462328457, 1.8001449727689, 1.8646612287348],
    [1.2158375439572, 1.5940193350310, 1.7714116686258, 1.8509970864620],
    [1.1058416180037, 1.5330941474492, 1.7398494741889, 1.8355110585530],
    [0.9927417362082, 1.4686828986574, 1.7055407099216, 1.8182031450075],
];

#[test]
fn criterion_3_closed_form_order_sweep() {
    let mut worst_classical = 0.0f64;
    let mut worst_frac_early = 0.0f64;
    let mut worst_frac_late = 0.0f64;
    for (i, row) in SWEEP_ROWS.iter().enumerate() {
        let t = i as f64 * 0.02;
        for (j, &alpha) in SWEEP_ALPHAS.iter().enumerate() {
            let got = printed_eval(BuiltinId::Ex44, alpha, 2.0, t, 2).unwrap();
            let err = (got - row[j]).abs();
            if alpha == 2.0 {
                worst_classical = worst_classical.max(err);
            } else if t <= 0.02 + 1e-12 {
                worst_frac_early = worst_frac_early.max(err);
            } else {
                worst_frac_late = worst_frac_late.max(err);
            }
        }
    }
    let pass = worst_classical <= 1e-6 && worst_frac_early <= 2e-5 && worst_frac_late <= 5e-3;
    report(
        3,
        pass,
        &format!(
            "closed forms vs frozen 11-row sweep at x = 2: order-2 worst {worst_classical:.1e} \
             (tol 1e-6), fractional worst {worst_frac_early:.1e} at t <= 0.02 (tol 2e-5) and \
             {worst_frac_late:.1e} at t <= 0.2 (tol 5e-3)"
        ),
    );
}

// ═══════════════════════════════════════════════════════════════════════════
// 4. Linear problem against its exact solution
// ═══════════════════════════════════════════════════════════════════════════

#[test]
fn criterion_4_linear_problem_exact_solution() {
    let p = BuiltinId::Ex41.spec(1.0).unwrap();
    let mut worst = 0.0f64;
    for &x in &[0.0, 1.0, 2.0, 4.0] {
        let sol = solve_frdtm(&p, x, 15).unwrap();
        for i in 0..=16 {
            let t = i as f64 * 0.05;
            let want = x.sin() + t.exp();
            worst = worst.max((sol.eval(t).unwrap() - want).abs());
        }
    }
    report(
        4,
        worst <= 1e-10,
        &format!(
            "15-term series vs sin x + e^t over x in {{0,1,2,4}}, t in [0, 0.8]: \
             worst |err| = {worst:.3e} (tol 1e-10)"
        ),
    );
}

// ═══════════════════════════════════════════════════════════════════════════
// 5. Series vs implicit Runge-Kutta reference at integer order
// ═══════════════════════════════════════════════════════════════════════════

#[test]
fn criterion_5_reference_agreement_at_integer_order() {
    let mut pass = true;
    let mut pieces = Vec::new();
    for (name, alpha) in [("ex41", 1.0), ("ex42", 1.0), ("ex43", 1.0), ("ex44", 2.0)] {
        let clock = Instant::now();
        let cfg = parse_config(&format!(
            "problem = {name}\nalpha = {alpha}\nN = 12\nx = 2\nt = 0:0.2:0.02\nmode = table"
        ))
        .unwrap();
        let csv = run(Command::Table, &cfg).unwrap();
        let secs = clock.elapsed().as_secs_f64();
        let (_, rows) = parse_csv(&csv).unwrap();
        let worst = rows
            .iter()
            .map(|r| r[3].parse::<f64>().unwrap())
            .fold(0.0f64, f64::max);
        pass &= worst <= 1e-5 && secs < 30.0;
        pieces.push(format!("{name} {worst:.2e} in {secs:.1} s"));
    }
    report(
        5,
        pass,
        &format!(
            "series (N = 12) vs reference march at x = 2, t <= 0.2, 1024 cells, dt = 1e-4: \
             {} (tol 1e-5, limit 30 s each)",
            pieces.join(", ")
        ),
    );
}

// ═══════════════════════════════════════════════════════════════════════════
// 6. Property suites
// ═══════════════════════════════════════════════════════════════════════════

fn integral_operator_checks() -> (bool, String) {
    // semigroup composition on monomials
    let mut worst = 0.0f64;
    for &alpha in &[0.25, 0.75, 1.5] {
        for &beta in &[0.5, 1.0, 1.75] {
            for &gamma in &[0.0, 0.5, 2.0, 3.5] {
                let inner = rl_integral_monomial(beta, gamma).unwrap();
                let outer = rl_integral_monomial(alpha, inner.exponent).unwrap();
                let direct = rl_integral_monomial(alpha + beta, gamma).unwrap();
                let coeff = outer.coefficient * inner.coefficient;
                worst = worst.max(((coeff - direct.coefficient) / direct.coefficient).abs());
                worst = worst.max((outer.exponent - direct.exponent).abs());
            }
        }
    }
    // derivative-then-integral identity on the series lattice
    let mut lattice_ok = true;
    for mi in 1..=8 {
        let order = FracOrder::new(0.25 * mi as f64).unwrap();
        for k in 0..=6 {
            lattice_ok &= verify_theorem1(&order, k as f64 * order.beta(), 1e-10);
        }
    }
    (
        worst <= 1e-12 && lattice_ok,
        format!("integral semigroup worst rel {worst:.1e}; inversion lattice ok = {lattice_ok}"),
    )
}

fn jet_ring_checks() -> (bool, String) {
    let a = Jet::elem(ElemKind::Sin, 0.3, 8);
    let b = Jet::elem(ElemKind::Exp, 0.3, 8);
    let c = Jet::monomial(2, 0.3, 8);

    let left = a.mul(&b).unwrap().mul(&c).unwrap();
    let right = a.mul(&b.mul(&c).unwrap()).unwrap();
    let assoc = left
        .coeffs()
        .iter()
        .zip(right.coeffs())
        .map(|(l, r)| (l - r).abs())
        .fold(0.0f64, f64::max);

    let dist_l = a.mul(&b.add(&c).unwrap()).unwrap();
    let dist_r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
    let dist = dist_l
        .coeffs()
        .iter()
        .zip(dist_r.coeffs())
        .map(|(l, r)| (l - r).abs())
        .fold(0.0f64, f64::max);

    // second derivative against a central difference
    let sech = |x: f64| 1.0 / x.cosh();
    let h = 1e-4;
    let fd = (sech(0.3 + h) - 2.0 * sech(0.3) + sech(0.3 - h)) / (h * h);
    let jet_d2 = Jet::elem(ElemKind::Sech, 0.3, 8).d2().unwrap().value();
    let fd_err = (fd - jet_d2).abs();

    (
        assoc <= 1e-12 && dist <= 1e-12 && fd_err <= 1e-6,
        format!("jet ring assoc {assoc:.1e}, distrib {dist:.1e}, d2-vs-FD {fd_err:.1e}"),
    )
}

fn convolution_checks() -> (bool, String) {
    let a = trig_sequence(TrigKind::Sin, 1.3, 0.7, 0.4, 5, 12);
    let b = exp_sequence(0.9, 0.5, 0.4, 5, 12);

    let mut sym = 0.0f64;
    let mut bilin = 0.0f64;
    let mut cube = 0.0f64;
    for k in 0..=5 {
        sym = sym.max((a.conv(&b, k).unwrap().value() - b.conv(&a, k).unwrap().value()).abs());

        let lhs = a.add(&b).unwrap().conv(&b, k).unwrap().value();
        let rhs = a.conv(&b, k).unwrap().value() + b.conv(&b, k).unwrap().value();
        bilin = bilin.max((lhs - rhs).abs());

        // brute-force triple product against the nested convolution
        let mut brute = 0.0f64;
        for i in 0..=k {
            for l in 0..=(k - i) {
                let m = k - i - l;
                brute += a.term(i).value() * a.term(l).value() * a.term(m).value();
            }
        }
        cube = cube.max((a.conv3(k).unwrap().value() - brute).abs());
    }
    (
        sym <= 1e-12 && bilin <= 1e-12 && cube <= 1e-12,
        format!("convolution symmetry {sym:.1e}, bilinearity {bilin:.1e}, cube {cube:.1e}"),
    )
}

fn closed_form_agreement_checks() -> (bool, String) {
    let mut ok = true;
    let mut pieces = Vec::new();
    for (id, kmax) in [
        (BuiltinId::Ex42, 3usize),
        (BuiltinId::Ex43, 3),
        (BuiltinId::Ex44, 6),
    ] {
        let dev = printed_vs_solver(id, 2.0, kmax).unwrap();
        ok &= dev <= 1e-11;
        pieces.push(format!("{} {dev:.2e} (k <= {kmax})", id.name()));
    }
    (
        ok,
        format!("closed forms vs recurrence at classical order: {} (tol 1e-11)", pieces.join(", ")),
    )
}

fn vanishing_odd_term_checks() -> (bool, String) {
    let mut ok = true;
    for &mu in &[1.5, 2.0] {
        let p = BuiltinId::Ex44.spec(mu).unwrap();
        let sol = solve_frdtm(&p, 2.0, 9).unwrap();
        for k in (1..=9).step_by(2) {
            ok &= sol.term_value(k) == 0.0;
        }
    }
    (ok, format!("two-condition odd terms vanish exactly = {ok}"))
}

fn irk_order_check() -> (bool, String) {
    // stiff scalar decay posed as a constant-in-x field: u' = -50 u
    let order = FracOrder::new(1.0).unwrap();
    let p = ProblemSpec::new(
        order,
        -50.0,
        0.0,
        Nonlinearity::None,
        Vec::new(),
        InitialData::single(1.0, BasisFn::Const),
        None,
    )
    .unwrap();
    let grid = Grid1D::new(-PI, PI, 4, Boundary::Periodic).unwrap();
    let y0 = vec![1.0; grid.n_nodes()];

    let mut errs = Vec::new();
    for &dt in &[1e-2, 5e-3, 2.5e-3] {
        let stepper = IrkStepper::new(&p, &grid, dt, &y0).unwrap();
        let steps = (0.1 / dt).round() as usize;
        let mut state = y0.clone();
        for k in 0..steps {
            state = stepper.step(k as f64 * dt, &state).unwrap();
        }
        errs.push((state[0] - (-5.0f64).exp()).abs());
    }
    let s1 = (errs[0] / errs[1]).log2();
    let s2 = (errs[1] / errs[2]).log2();
    let slope = 0.5 * (s1 + s2);
    (
        (slope - 4.0).abs() <= 0.3,
        format!("time-stepper observed order {slope:.2} (want 4 +/- 0.3)"),
    )
}

fn laplacian_order_check() -> (bool, String) {
    let mut errs = Vec::new();
    for &cells in &[128usize, 256] {
        let grid = Grid1D::new(-PI, PI, cells, Boundary::Periodic).unwrap();
        let u: Vec<f64> = grid.nodes().iter().map(|&x| x.sin()).collect();
        let lap = laplacian(&grid, &u).unwrap();
        let err = grid
            .nodes()
            .iter()
            .zip(&lap)
            .map(|(&x, &l)| (l + x.sin()).abs())
            .fold(0.0f64, f64::max);
        errs.push(err);
    }
    let slope = (errs[0] / errs[1]).log2() / 1.0;
    (
        (slope - 2.0).abs() <= 0.2,
        format!("Laplacian observed order {slope:.2} (want 2 +/- 0.2)"),
    )
}

#[test]
fn criterion_6_property_suites() {
    let clock = Instant::now();
    let checks = [
        integral_operator_checks(),
        jet_ring_checks(),
        convolution_checks(),
        closed_form_agreement_checks(),
        vanishing_odd_term_checks(),
        irk_order_check(),
        laplacian_order_check(),
    ];
    let secs = clock.elapsed().as_secs_f64();
    let mut pass = secs < 10.0;
    for (ok, detail) in &checks {
        println!("  [criterion 6 sub] {} — {detail}", if *ok { "ok" } else { "FAIL" });
        pass &= ok;
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, d)| d.as_str())
        .collect();
    let detail = if failed.is_empty() {
        format!("all {} property suites hold in {secs:.1} s (limit 10 s)", checks.len())
    } else {
        format!("{} of {} property suites fail: {}", failed.len(), checks.len(), failed.join("; "))
    };
    report(6, pass, &detail);
}

// ═══════════════════════════════════════════════════════════════════════════
// 7. Behavior at fractional orders
// ═══════════════════════════════════════════════════════════════════════════

#[test]
fn criterion_7_fractional_order_behavior() {
    // (a) emitted surfaces stay finite at small fractional orders
    let mut bad_cells = 0usize;
    let mut total_cells = 0usize;
    for &alpha in &[0.1, 0.4, 0.7] {
        for (name, xs, ts) in [
            ("ex41", "0:4:0.2", "0:0.8:0.05"),
            ("ex42", "-2:2:0.2", "0:0.01:0.001"),
            ("ex43", "-2:2:0.2", "0:0.01:0.001"),
        ] {
            let cfg = parse_config(&format!(
                "problem = {name}\nalpha = {alpha}\nN = 12\nx = {xs}\nt = {ts}\nmode = surface"
            ))
            .unwrap();
            let csv = run(Command::Surface, &cfg).unwrap();
            let (_, rows) = parse_csv(&csv).unwrap();
            for row in &rows {
                total_cells += 1;
                if !row[2].parse::<f64>().map_or(false, f64::is_finite) {
                    bad_cells += 1;
                }
            }
        }
    }
    let surfaces_ok = bad_cells == 0;

    // (b) truncation-tail decay at each tabulated probe
    let mut tails = Vec::new();
    let mut tails_ok = true;
    {
        let p = BuiltinId::Ex42.spec(1.0).unwrap();
        let r = solve_frdtm(&p, 2.0, 12).unwrap().tail_ratio_max(0.01).unwrap();
        tails_ok &= r < 1.0;
        tails.push(format!("quadratic at order 1: {r:.3}"));
    }
    for &mu in &[1.25, 1.5, 1.75, 2.0] {
        let p = BuiltinId::Ex44.spec(mu).unwrap();
        let r = solve_frdtm(&p, 2.0, 12).unwrap().tail_ratio_max(0.01).unwrap();
        tails_ok &= r < 1.0;
        tails.push(format!("two-condition at order {mu}: {r:.1e}"));
    }

    // (c) series values vary continuously in the order as alpha -> 1
    let mut continuity_ok = true;
    let mut margins = Vec::new();
    for id in [BuiltinId::Ex41, BuiltinId::Ex42, BuiltinId::Ex43] {
        let classical = solve_frdtm(&id.spec(1.0).unwrap(), 2.0, 12)
            .unwrap()
            .eval(1e-5)
            .unwrap();
        let errs: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&alpha| {
                let v = solve_frdtm(&id.spec(alpha).unwrap(), 2.0, 12)
                    .unwrap()
                    .eval(1e-5)
                    .unwrap();
                (v - classical).abs()
            })
            .collect();
        continuity_ok &= errs[0] > errs[1] && errs[1] > errs[2] && errs[2] <= 1e-6;
        margins.push(format!("{} {:.1e}", id.name(), errs[2]));
    }

    let pass = surfaces_ok && tails_ok && continuity_ok;
    report(
        7,
        pass,
        &format!(
            "surfaces finite: {}/{total_cells} bad cells; tail ratios at t = 0.01 \
             (limit 1): {}; order-continuity margins at alpha = 0.999 (tol 1e-6): {}",
            bad_cells,
            tails.join(", "),
            margins.join(", ")
        ),
    );
}
