//! Finite-difference ground truth for the reduced radial equations.
//!
//! `F'' + [eps - U_eff(r)] F = 0` on `[r_min, r_max]` with Dirichlet ends is
//! discretised with the three-point Laplacian, giving a symmetric tridiagonal
//! matrix whose lowest eigenvalues are found by Sturm-count bisection.
//! Successive grid halvings are combined by Richardson extrapolation in `h^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduction::ReducedProblem;
use crate::spectra::EnergyLevel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub r_min: f64,
    pub r_max: f64,
    /// Interior nodes on the coarsest grid.
    pub points: usize,
    pub levels_wanted: usize,
    pub richardson_steps: usize,
}

impl OracleConfig {
    /// `r_min = 1e-6/beta`, `r_max = 30/beta`, 4000 points, two halvings.
    pub fn for_beta(beta: f64) -> Self {
        Self { r_min: 1e-6 / beta, r_max: 30.0 / beta, points: 4000, levels_wanted: 3, richardson_steps: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min >= 0.0 && self.r_max > self.r_min && self.r_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "oracle domain needs 0 <= r_min < r_max, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if self.points < 100 {
            return Err(Error::InvalidConfig(format!("oracle needs >= 100 points, got {}", self.points)));
        }
        if self.richardson_steps < 1 {
            return Err(Error::InvalidConfig("richardson_steps must be >= 1".into()));
        }
        if self.levels_wanted < 1 || self.levels_wanted > self.points {
            return Err(Error::InvalidConfig(format!("cannot extract {} levels", self.levels_wanted)));
        }
        Ok(())
    }

    /// Interior node count after `step` halvings of the spacing.
    pub fn points_at(&self, step: usize) -> usize {
        (self.points + 1) * (1 << step) - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    pub nodes: Vec<f64>,
    pub h: f64,
}

impl TridiagonalSystem {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn sturm_count(&self, shift: f64) -> usize {
        sturm_count(&self.diagonal, &self.off_diagonal, shift)
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }
}

/// Three-point discretisation on the interior nodes of `[r_min, r_max]`.
///
/// Diagonal `2/h^2 + U(r_i)`, off-diagonal `-1/h^2`; the end points carry the
/// Dirichlet condition and are never evaluated.
pub fn discretize<U>(u_eff: U, r_min: f64, r_max: f64, points: usize) -> Result<TridiagonalSystem>
where
    U: Fn(f64) -> f64,
{
    if points == 0 || !(r_max > r_min) {
        return Err(Error::InvalidConfig(format!(
            "cannot discretise [{r_min}, {r_max}] with {points} interior points"
        )));
    }
    let h = (r_max - r_min) / (points + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let nodes: Vec<f64> = (1..=points).map(|i| r_min + h * i as f64).collect();
    let mut diagonal = Vec::with_capacity(points);
    for &r in &nodes {
        let u = u_eff(r);
        if !u.is_finite() {
            return Err(Error::PotentialPole { r });
        }
        diagonal.push(2.0 * inv_h2 + u);
    }
    Ok(TridiagonalSystem { diagonal, off_diagonal: vec![-inv_h2; points - 1], nodes, h })
}

/// Number of eigenvalues strictly below `shift` (negative LDL^T pivots).
pub fn sturm_count(diagonal: &[f64], off_diagonal: &[f64], shift: f64) -> usize {
    let n = diagonal.len();
    if n == 0 {
        return 0;
    }
    let max_e2 = off_diagonal.iter().map(|e| e * e).fold(0.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_e2.max(1.0);
    let mut count = 0;
    let mut q = diagonal[0] - shift;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        q = (diagonal[i] - shift) - off_diagonal[i - 1] * off_diagonal[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Relative bracket width for each bisected eigenvalue.
const BISECTION_RTOL: f64 = 1e-12;

/// The `count` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(system: &TridiagonalSystem, count: usize) -> Vec<f64> {
    let count = count.min(system.dim());
    let (glo, ghi) = system.gershgorin();
    let abs_floor = 4.0 * f64::EPSILON * glo.abs().max(ghi.abs());
    let mut out = Vec::with_capacity(count);
    let mut floor = glo;
    for k in 0..count {
        // smallest x with sturm_count(x) >= k + 1
        let (mut lo, mut hi) = (floor, ghi);
        for _ in 0..2000 {
            let width = hi - lo;
            if width <= BISECTION_RTOL * lo.abs().max(hi.abs()) || width <= abs_floor {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if system.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        out.push(value);
        floor = lo;
    }
    out
}

/// Eigenvector for an isolated eigenvalue by inverse iteration.
pub fn eigenvector(system: &TridiagonalSystem, eigenvalue: f64) -> Vec<f64> {
    let n = system.dim();
    let (glo, ghi) = system.gershgorin();
    let nudge = 1e-10 * glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let shift = eigenvalue - nudge;
    let mut v = vec![1.0; n];
    for _ in 0..4 {
        v = solve_shifted(system, shift, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Solves `(T - shift I) x = rhs` by the Thomas algorithm.
fn solve_shifted(system: &TridiagonalSystem, shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = system.dim();
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    let guard = |x: f64| if x.abs() < tiny { tiny.copysign(x) } else { x };
    let mut denom = guard(system.diagonal[0] - shift);
    if n > 1 {
        c_prime[0] = system.off_diagonal[0] / denom;
    }
    d_prime[0] = rhs[0] / denom;
    for i in 1..n {
        let e = system.off_diagonal[i - 1];
        denom = guard(system.diagonal[i] - shift - e * c_prime[i - 1]);
        if i + 1 < n {
            c_prime[i] = system.off_diagonal[i] / denom;
        }
        d_prime[i] = (rhs[i] - e * d_prime[i - 1]) / denom;
    }
    let mut x = d_prime;
    for i in (0..n - 1).rev() {
        x[i] -= c_prime[i] * x[i + 1];
    }
    x
}

/// Sign changes of a sampled function, ignoring entries below `1e-8 max|v|`.
pub fn sign_changes(values: &[f64]) -> usize {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = 1e-8 * max;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= cutoff {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub points: usize,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Richardson-extrapolated eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// `|eps(h) - eps(h/2)|` on the two finest grids.
    pub convergence_estimates: Vec<f64>,
    /// Extrapolation error estimate per level.
    pub error_estimates: Vec<f64>,
    pub grids_used: Vec<GridInfo>,
}

/// Solves on `richardson_steps + 1` nested grids and extrapolates.
pub fn solve<U>(u_eff: U, config: &OracleConfig) -> Result<OracleResult>
where
    U: Fn(f64) -> f64 + Sync,
{
    config.validate()?;
    let steps = config.richardson_steps;
    let count = config.levels_wanted;
    let mut grids = Vec::with_capacity(steps + 1);
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    let mut matrix_norm = 0.0f64;
    for s in 0..=steps {
        let points = config.points_at(s);
        let system = discretize(&u_eff, config.r_min, config.r_max, points)?;
        let (lo, hi) = system.gershgorin();
        matrix_norm = matrix_norm.max(lo.abs()).max(hi.abs());
        grids.push(GridInfo { points, h: system.h });
        raw.push(lowest_eigenvalues(&system, count));
    }
    // eigenvalues of the finest matrix carry roundoff of order eps * ||T||
    let slack = 64.0 * f64::EPSILON * matrix_norm;

    let mut eigenvalues = Vec::with_capacity(count);
    let mut convergence_estimates = Vec::with_capacity(count);
    let mut error_estimates = Vec::with_capacity(count);
    for level in 0..count {
        let column: Vec<f64> = raw.iter().map(|r| r[level]).collect();
        let diagonal = richardson_diagonal(&column);
        let best = diagonal[steps];
        let err = (best - diagonal[steps - 1]).abs();
        if steps >= 2 {
            let prev = (diagonal[steps - 1] - diagonal[steps - 2]).abs();
            if err > prev + slack {
                return Err(Error::NonConvergence {
                    level,
                    detail: format!(
                        "Richardson corrections grow: {prev:.3e} -> {err:.3e} (raw {column:?})"
                    ),
                });
            }
        }
        eigenvalues.push(best);
        convergence_estimates.push((column[steps] - column[steps - 1]).abs());
        error_estimates.push(err);
    }
    Ok(OracleResult { eigenvalues, convergence_estimates, error_estimates, grids_used: grids })
}

/// Diagonal `R[s][s]` of the Richardson table for a sequence computed at
/// `h, h/2, h/4, ...` with an even-power error expansion.
pub fn richardson_diagonal(values: &[f64]) -> Vec<f64> {
    let mut prev_row: Vec<f64> = Vec::new();
    let mut diagonal = Vec::with_capacity(values.len());
    for (s, &v) in values.iter().enumerate() {
        let mut row = vec![v];
        for j in 1..=s {
            let factor = 4f64.powi(j as i32);
            let r = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (factor - 1.0);
            row.push(r);
        }
        diagonal.push(row[s]);
        prev_row = row;
    }
    diagonal
}

/// Extrapolated `eps` of level `level` (ascending index at fixed kappa) and
/// its error estimate.
pub fn converged_epsilon(reduced: &ReducedProblem, level: usize, config: &OracleConfig) -> Result<(f64, f64)> {
    let config = OracleConfig { levels_wanted: config.levels_wanted.max(level + 1), ..*config };
    let result = solve(|r| reduced.u_eff(r), &config)?;
    Ok((result.eigenvalues[level], result.error_estimates[level]))
}

/// Response of one extrapolated level to moving the box walls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub eps: f64,
    pub error_estimate: f64,
    pub eps_r_max_doubled: f64,
    pub eps_r_min_halved: f64,
}

impl BoundaryCheck {
    /// Largest wall-induced shift.
    pub fn sensitivity(&self) -> f64 {
        (self.eps_r_max_doubled - self.eps).abs().max((self.eps_r_min_halved - self.eps).abs())
    }

    /// Converged when neither wall moves the level by more than
    /// `max(error_estimate, rtol |eps|)`.
    pub fn converged(&self, rtol: f64) -> bool {
        self.sensitivity() <= self.error_estimate.max(rtol * self.eps.abs())
    }
}

/// Re-solves with `r_max` doubled (same spacing) and with `r_min` halved.
pub fn boundary_check(reduced: &ReducedProblem, level: usize, config: &OracleConfig) -> Result<BoundaryCheck> {
    let (eps, error_estimate) = converged_epsilon(reduced, level, config)?;
    let wide = OracleConfig {
        r_max: config.r_min + 2.0 * (config.r_max - config.r_min),
        points: 2 * (config.points + 1) - 1,
        ..*config
    };
    let (eps_r_max_doubled, _) = converged_epsilon(reduced, level, &wide)?;
    let near = OracleConfig { r_min: 0.5 * config.r_min, ..*config };
    let (eps_r_min_halved, _) = converged_epsilon(reduced, level, &near)?;
    Ok(BoundaryCheck { eps, error_estimate, eps_r_max_doubled, eps_r_min_halved })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComparisonFlag {
    Match,
    Discrepant,
    Singular,
    /// The closed form claims a level the oracle does not bind.
    Unbound,
    /// Fewer than two values to compare.
    Unverified,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: u32,
    pub kappa: i32,
    pub closed_form_E: Option<f64>,
    pub nu_E: Option<f64>,
    pub oracle_E: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_E: Option<f64>,
    pub delta_co: Option<f64>,
    pub delta_no: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_ct: Option<f64>,
    pub flag: ComparisonFlag,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn count(&self, flag: ComparisonFlag) -> usize {
        self.rows.iter().filter(|r| r.flag == flag).count()
    }
}

/// Everything known about one `(n, kappa)` row before comparison.
#[derive(Debug, Clone, Default)]
pub struct ComparisonInput {
    pub n: u32,
    pub kappa: i32,
    pub closed_form: Option<EnergyLevel>,
    pub nu: Option<EnergyLevel>,
    pub oracle: Option<EnergyLevel>,
    pub table: Option<f64>,
    /// The oracle found no level below the continuum threshold.
    pub oracle_unbound: bool,
}

/// Per-row deltas of the selected energies and a MATCH/DISCREPANT verdict at
/// absolute tolerance `tolerance`.
pub fn compare(inputs: &[ComparisonInput], tolerance: f64) -> ComparisonReport {
    let rows = inputs
        .iter()
        .map(|input| {
            let cf = input.closed_form.as_ref().map(|l| l.selected);
            let nu = input.nu.as_ref().map(|l| l.selected);
            let oracle = input.oracle.as_ref().map(|l| l.selected);
            let diff = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| a - b);
            let delta_co = diff(cf, oracle);
            let delta_no = diff(nu, oracle);
            let delta_ct = diff(cf, input.table);
            let deltas: Vec<f64> = [delta_co, delta_no, delta_ct].into_iter().flatten().collect();
            let singular = i64::from(input.n) + i64::from(input.kappa) == 0 || input.kappa == 0;
            let flag = if singular {
                ComparisonFlag::Singular
            } else if input.oracle_unbound && cf.is_some() {
                ComparisonFlag::Unbound
            } else if deltas.is_empty() {
                ComparisonFlag::Unverified
            } else if deltas.iter().all(|d| d.abs() < tolerance) {
                ComparisonFlag::Match
            } else {
                ComparisonFlag::Discrepant
            };
            ComparisonRow {
                n: input.n,
                kappa: input.kappa,
                closed_form_E: cf,
                nu_E: nu,
                oracle_E: oracle,
                table_E: input.table,
                delta_co,
                delta_no,
                delta_ct,
                flag,
            }
        })
        .collect();
    ComparisonReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_potential_stencil() {
        let s = discretize(|_| 0.0, 0.0, 4.0, 3).unwrap();
        assert_eq!(s.h, 1.0);
        assert_eq!(s.diagonal, vec![2.0, 2.0, 2.0]);
        assert_eq!(s.off_diagonal, vec![-1.0, -1.0]);
        assert_eq!(s.nodes, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pole_is_reported() {
        let err = discretize(|r| if r > 1.5 && r < 2.5 { f64::INFINITY } else { 0.0 }, 0.0, 4.0, 3)
            .unwrap_err();
        assert_eq!(err, Error::PotentialPole { r: 2.0 });
    }

    #[test]
    fn small_matrix_eigenvalues() {
        // 2 - 2 cos(k pi / 4), k = 1..3
        let s = discretize(|_| 0.0, 0.0, 4.0, 3).unwrap();
        let ev = lowest_eigenvalues(&s, 3);
        for (k, e) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * PI / 4.0).cos();
            assert!((e - want).abs() < 1e-12, "{e} vs {want}");
        }
    }

    #[test]
    fn sturm_count_matches_returned_levels() {
        let s = discretize(|r| (r - 5.0).powi(2), 0.0, 10.0, 400).unwrap();
        let ev = lowest_eigenvalues(&s, 10);
        for (i, e) in ev.iter().enumerate() {
            assert_eq!(s.sturm_count(e - 1e-9), i);
            assert_eq!(s.sturm_count(e + 1e-9), i + 1);
        }
    }

    #[test]
    fn box_spectrum() {
        let l = 1.0;
        let s = discretize(|_| 0.0, 0.0, l, 4000).unwrap();
        let ev = lowest_eigenvalues(&s, 3);
        for (k, e) in ev.iter().enumerate() {
            let want = ((k + 1) as f64 * PI / l).powi(2);
            assert!((e - want).abs() / want < 1e-3);
        }
    }

    #[test]
    fn harmonic_spacing() {
        let s = discretize(|r| (r - 10.0).powi(2), 0.0, 20.0, 4000).unwrap();
        let ev = lowest_eigenvalues(&s, 3);
        let ratio = (ev[2] - ev[1]) / (ev[1] - ev[0]);
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn constant_shift() {
        let u = |r: f64| (r - 5.0).powi(2);
        let a = lowest_eigenvalues(&discretize(u, 0.0, 10.0, 500).unwrap(), 4);
        let b = lowest_eigenvalues(&discretize(|r| u(r) + 3.25, 0.0, 10.0, 500).unwrap(), 4);
        for (x, y) in a.iter().zip(&b) {
            assert!((y - x - 3.25).abs() < 1e-10);
        }
    }

    #[test]
    fn richardson_box() {
        let config = OracleConfig { r_min: 0.0, r_max: 1.0, points: 400, levels_wanted: 2, richardson_steps: 2 };
        let res = solve(|_| 0.0, &config).unwrap();
        let want = PI * PI;
        assert!((res.eigenvalues[0] - want).abs() / want < 1e-6);
        assert_eq!(res.grids_used.len(), 3);
        assert_eq!(res.grids_used[1].points, 801);
        assert!((res.grids_used[0].h - 2.0 * res.grids_used[1].h).abs() < 1e-15);
    }

    #[test]
    fn richardson_exact_on_quadratic_error() {
        // v(h) = 1 + 3 h^2 + 5 h^4 at h = 1, 1/2, 1/4
        let v = |h: f64| 1.0 + 3.0 * h * h + 5.0 * h.powi(4);
        let d = richardson_diagonal(&[v(1.0), v(0.5), v(0.25)]);
        assert!((d[2] - 1.0).abs() < 1e-12, "{d:?}");
    }

    #[test]
    fn eigenvector_nodes() {
        let s = discretize(|r| (r - 10.0).powi(2), 0.0, 20.0, 2000).unwrap();
        let ev = lowest_eigenvalues(&s, 4);
        for (i, &e) in ev.iter().enumerate() {
            assert_eq!(sign_changes(&eigenvector(&s, e)), i);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = OracleConfig::for_beta(0.02);
        assert!(c.validate().is_ok());
        c.points = 50;
        assert!(c.validate().is_err());
        let c = OracleConfig { r_max: 0.0, ..OracleConfig::for_beta(0.02) };
        assert!(c.validate().is_err());
        let c = OracleConfig { richardson_steps: 0, ..OracleConfig::for_beta(0.02) };
        assert!(c.validate().is_err());
    }

    #[test]
    fn compare_flags() {
        let rows = compare(
            &[
                ComparisonInput { n: 1, kappa: -1, ..Default::default() },
                ComparisonInput { n: 0, kappa: -2, ..Default::default() },
            ],
            1e-6,
        );
        assert_eq!(rows.rows[0].flag, ComparisonFlag::Singular);
        assert_eq!(rows.rows[1].flag, ComparisonFlag::Unverified);
        let json = rows.to_json();
        assert!(!json.contains("table_E"));
    }
}
