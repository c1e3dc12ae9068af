//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dirac_nu::cli::box_selftest;
use dirac_nu::oracle::{converged_epsilon, OracleConfig};
use dirac_nu::potentials::centrifugal_approx;
use dirac_nu::reduction::QuantumNumbers;
use dirac_nu::spectra::{big_n, default_bracket, energy_closed_form, energy_nu, preferred_nu_level, reduced_for_mode, Mode};
use dirac_nu::tables::{evaluate_table, fixture, TableOutcome};
use dirac_nu::wavefunctions::{
    default_grid, factorization, jacobi, jacobi_derivative, z_space_residual, ExponentSource, JacobiParams,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn timed_table(id: u8, mode: Mode) -> (TableOutcome, Duration) {
    let start = Instant::now();
    let t = evaluate_table(id, mode).expect("table fixture");
    (t, start.elapsed())
}

fn anchor_deltas(t: &TableOutcome) -> String {
    t.fixture
        .anchors
        .iter()
        .map(|&(n, k)| {
            let row = t.rows.iter().find(|r| r.n == n && r.kappa == k).unwrap();
            match row.delta() {
                Some(d) => format!("({n},{k}) {d:+.1e}"),
                None => format!("({n},{k}) unbound"),
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn mismatch_list(t: &TableOutcome) -> String {
    let m: Vec<String> = t.mismatches().iter().map(|r| format!("({},{})", r.n, r.kappa)).collect();
    if m.is_empty() {
        "none".into()
    } else {
        m.join(" ")
    }
}

fn criterion_1() -> Verdict {
    let (t, elapsed) = timed_table(1, Mode::TableConsistent);
    let within = t.count_within(1e-6);
    let pass = within == 16 && t.anchors_ok() && elapsed < Duration::from_secs(1);
    verdict(
        pass,
        format!(
            "table 1: {within}/16 within 1e-6, anchors {}, mismatches {}, {elapsed:?}",
            anchor_deltas(&t),
            mismatch_list(&t)
        ),
    )
}

fn gated_table(id: u8, need: usize) -> Verdict {
    let (t, elapsed) = timed_table(id, Mode::TableConsistent);
    let within = t.count_within(1e-5);
    let pass = within >= need && t.anchors_ok() && elapsed < Duration::from_secs(1);
    verdict(
        pass,
        format!(
            "table {id}: {within}/16 within 1e-5 (need {need}), anchors {}, mismatches {}, {elapsed:?}",
            anchor_deltas(&t),
            mismatch_list(&t)
        ),
    )
}

fn criterion_6() -> Verdict {
    let (t, _) = timed_table(3, Mode::TableConsistent);
    let report = t.report();
    let pass = report.rows.len() == 16 && t.gate_passed().is_none();
    verdict(
        pass,
        format!(
            "table 3 report-only: {} rows reported, {}/16 within 1e-5, anchors {}",
            report.rows.len(),
            t.count_within(1e-5),
            anchor_deltas(&t)
        ),
    )
}

const EQUIVALENCE_ROWS: [(u32, i32); 3] = [(0, -2), (0, 1), (1, -2)];

/// `(n, kappa, N, nu eps, oracle eps)` for the Table-1 parameter set.
fn table1_levels() -> Vec<(u32, i32, f64, Option<f64>, Result<f64, String>)> {
    let f = fixture(1).unwrap();
    let config = OracleConfig::for_beta(f.potential.beta());
    EQUIVALENCE_ROWS
        .iter()
        .map(|&(n, k)| {
            let qn = QuantumNumbers::new(n, k).unwrap();
            let reduced = reduced_for_mode(f.potential, f.symmetry, qn, Mode::TableConsistent);
            let big = big_n(f.potential, f.symmetry, qn, Mode::TableConsistent);
            let levels =
                energy_nu(f.potential, f.symmetry, qn, Mode::TableConsistent, default_bracket(&reduced), 1e-10);
            let nu = preferred_nu_level(&levels).map(|l| l.eps);
            let oracle = converged_epsilon(&reduced, n as usize, &config).map(|(e, _)| e).map_err(|e| e.to_string());
            (n, k, big, nu, oracle)
        })
        .collect()
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let rows = table1_levels();
    let elapsed = start.elapsed();
    let mut pass = elapsed < Duration::from_secs(30);
    let mut parts = Vec::new();
    for (n, k, _, nu, oracle) in rows {
        match (nu, oracle) {
            (Some(nu), Ok(o)) => {
                let rel = (nu - o).abs() / o.abs();
                pass &= rel < 1e-6;
                parts.push(format!("({n},{k}) nu {nu:.6e} oracle {o:.6e} rel {rel:.1e}"));
            }
            (nu, oracle) => {
                pass = false;
                parts.push(format!("({n},{k}) nu {nu:?} oracle {oracle:?}"));
            }
        }
    }
    verdict(pass, format!("{}; {elapsed:?}", parts.join("; ")))
}

fn criterion_8() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, k, big, _, oracle) in table1_levels() {
        match oracle {
            Ok(o) => {
                let gap = (big - o).abs();
                pass &= gap < 1e-3 && gap > 0.0;
                parts.push(format!("({n},{k}) |N - eps_oracle| = {gap:.3e}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("({n},{k}) oracle failed: {e}"));
            }
        }
    }
    verdict(pass, parts.join("; "))
}

fn criterion_9() -> Verdict {
    match box_selftest() {
        Ok((rows, ok)) => {
            let parts: Vec<String> =
                rows.iter().enumerate().map(|(k, r)| format!("k={} raw {:.1e} extrap {:.1e}", k + 1, r.1, r.2)).collect();
            verdict(ok, parts.join("; "))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn criterion_10() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for id in [1, 2, 5, 6] {
        let f = fixture(id).unwrap();
        let e = |n, k| {
            energy_closed_form(f.potential, f.symmetry, QuantumNumbers::new(n, k).unwrap(), Mode::TableConsistent)
                .map(|l| l.selected)
        };
        match (e(0, -2), e(0, 1)) {
            (Ok(a), Ok(b)) => {
                let split = (a - b).abs();
                pass &= split < 1e-4;
                parts.push(format!("table {id} params: {split:.2e}"));
            }
            _ => {
                pass = false;
                parts.push(format!("table {id} params: unbound"));
            }
        }
    }
    verdict(pass, parts.join("; "))
}

fn criterion_11() -> Verdict {
    let beta = 0.37;
    let samples = 10_000;
    let mut worst = 0.0f64;
    let mut pass = true;
    for i in 1..=samples {
        let x = 0.5 * i as f64 / samples as f64;
        let r = x / beta;
        let rel = (centrifugal_approx(beta, r) * r * r - 1.0).abs();
        pass &= rel <= 1.5 * x;
        worst = worst.max(rel / x);
    }
    verdict(pass, format!("{samples} points, max relative error / (beta r) = {worst:.4}"))
}

fn criterion_12() -> Verdict {
    let mut worst = 0.0f64;
    let mut levels = 0usize;
    let mut failures = Vec::new();
    for id in 1..=6u8 {
        let f = fixture(id).unwrap();
        let grid = default_grid(f.potential.beta()).unwrap();
        for &(n, k, _) in &f.rows {
            let qn = QuantumNumbers::new(n, k).unwrap();
            let reduced = reduced_for_mode(f.potential, f.symmetry, qn, Mode::TableConsistent);
            for level in energy_nu(f.potential, f.symmetry, qn, Mode::TableConsistent, default_bracket(&reduced), 1e-10)
            {
                levels += 1;
                match factorization(&reduced, level.eps, ExponentSource::Engine, level.branch) {
                    Ok(fz) => {
                        let res = z_space_residual(&reduced, level.eps, &fz, &grid);
                        worst = worst.max(res);
                        if !(res < 1e-8) {
                            failures.push(format!("t{id}({n},{k}) {res:.1e}"));
                        }
                    }
                    Err(e) => failures.push(format!("t{id}({n},{k}) {e}")),
                }
            }
        }
    }
    let pass = failures.is_empty() && levels > 0;
    verdict(
        pass,
        format!("{levels} NU levels over the six parameter sets, worst residual {worst:.1e}, failures {failures:?}"),
    )
}

fn criterion_13() -> Verdict {
    let mut runner = TestRunner::deterministic();
    let strategy = (0u32..=6, -5.0f64..5.0, -5.0f64..5.0, -0.99f64..0.99);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (n, p, q, x) = strategy.new_tree(&mut runner).expect("draw").current();
        let params = JacobiParams::new(n, p, q);
        let exact = jacobi_derivative(params, x);
        // Richardson-extrapolated central differences, O(h^4)
        let central = |h: f64| (jacobi(params, x + h) - jacobi(params, x - h)) / (2.0 * h);
        let h = 1e-3;
        let fd = (4.0 * central(h / 2.0) - central(h)) / 3.0;
        let rel = if exact == 0.0 { fd.abs() } else { (fd - exact).abs() / exact.abs() };
        worst = worst.max(rel);
    }
    verdict(worst < 1e-8, format!("200 draws, worst relative mismatch {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: Vec<(usize, &str, fn() -> Verdict)> = vec![
        (1, "table 1 closed form", criterion_1),
        (2, "table 2 closed form", || gated_table(2, 14)),
        (3, "table 4 closed form", || gated_table(4, 13)),
        (4, "table 5 closed form", || gated_table(5, 13)),
        (5, "table 6 closed form", || gated_table(6, 13)),
        (6, "table 3 report", criterion_6),
        (7, "oracle vs NU equivalence", criterion_7),
        (8, "closed form vs oracle gap", criterion_8),
        (9, "oracle box self-test", criterion_9),
        (10, "doublet splitting", criterion_10),
        (11, "centrifugal approximation", criterion_11),
        (12, "analytic principal component", criterion_12),
        (13, "jacobi derivative", criterion_13),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("criterion {id:>2} {}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
