//! Energy levels: closed-form `N` expressions, NU quantization by root
//! finding, and the finite-difference oracle, behind one level type.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nu_core::{factor_exponents, quantization_residual, select_branch, BranchSelector, FactorExponents};
use crate::oracle::{self, OracleConfig};
use crate::potentials::PotentialSpec;
use crate::reduction::{reduce, QuantumNumbers, ReducedProblem, SymmetryCase};

/// Which version of the closed-form `N` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The printed expressions verbatim.
    AsPrinted,
    /// Corrections that reproduce the published tables:
    /// Wei Hua brackets use `n^2 + kappa^2`, Varshni drops the trailing `+a`
    /// (and the matching `eps` offset), Varshni pseudospin uses `+beta^2 kappa(kappa-1)`.
    #[default]
    TableConsistent,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "as-printed" => Ok(Self::AsPrinted),
            "table-consistent" => Ok(Self::TableConsistent),
            _ => Err(Error::InvalidConfig(format!("unknown mode '{s}' (as-printed | table-consistent)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    ClosedForm,
    #[serde(rename = "nu", alias = "nu_rootfind")]
    NuRootfind,
    Oracle,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "closed-form" => Ok(Self::ClosedForm),
            "nu" | "nu-rootfind" => Ok(Self::NuRootfind),
            "oracle" => Ok(Self::Oracle),
            _ => Err(Error::InvalidConfig(format!("unknown method '{s}' (closed-form | nu | oracle)"))),
        }
    }
}

/// Which root of the quadratic energy map is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Spin symmetry: `E_plus`.
    UpperRoot,
    /// Pseudospin symmetry: `|E_minus|`, the sign is kept in `e_minus`.
    LowerRootMagnitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n: u32,
    pub kappa: i32,
    /// Linear eigenvalue of the reduced equation.
    pub eps: f64,
    pub e_minus: f64,
    pub e_plus: f64,
    pub selected: f64,
    pub selection: Selection,
    pub method: Method,
    pub mode: Mode,
    /// NU branch that produced the level, for `Method::NuRootfind`.
    pub branch: Option<BranchSelector>,
    /// Whether the NU factor `z^alpha (1-z)^gamma` decays at both ends.
    pub normalizable: Option<bool>,
}

impl EnergyLevel {
    /// The signed root behind `selected`.
    pub fn signed_energy(&self) -> f64 {
        match self.selection {
            Selection::UpperRoot => self.e_plus,
            Selection::LowerRootMagnitude => self.e_minus,
        }
    }
}

/// The reduced problem with the `eps <-> E` offset used by `mode`.
pub fn reduced_for_mode(
    potential: PotentialSpec,
    symmetry: SymmetryCase,
    qn: QuantumNumbers,
    mode: Mode,
) -> ReducedProblem {
    let reduced = reduce(potential, symmetry, qn);
    match mode {
        Mode::AsPrinted => reduced,
        Mode::TableConsistent => reduced.with_shift(0.0),
    }
}

/// Closed-form `N`: the value of `(E+M-A1)(E-M)` or `(E-M-A2)(E+M)`.
pub fn big_n(potential: PotentialSpec, symmetry: SymmetryCase, qn: QuantumNumbers, mode: Mode) -> f64 {
    let n = f64::from(qn.n());
    let k = f64::from(qn.kappa());
    let beta = potential.beta();
    let b2 = beta * beta;
    let prefactor = -b2 / (4.0 * (n + k) * (n + k));
    let tc = mode == Mode::TableConsistent;
    match (potential, symmetry) {
        (PotentialSpec::Hellmann { a, b, .. }, SymmetryCase::Spin { .. }) => {
            let bracket = (a - b) / beta - (n * n - k * k) - k * (k + 1.0);
            prefactor * bracket * bracket - a * beta + b2 * k * (k + 1.0)
        }
        (PotentialSpec::Hellmann { a, b, .. }, SymmetryCase::Pseudospin { .. }) => {
            let bracket = -(a - b) / beta + n * n + k * k + k * (k - 3.0);
            prefactor * bracket * bracket - a * beta + b2 * k * (k - 1.0)
        }
        (PotentialSpec::WeiHua { depth, a_shape, .. }, SymmetryCase::Spin { .. }) => {
            let bracket = n * n + k * k + k * (k + 1.0) - 2.0 * depth / b2 * (1.0 / a_shape - 1.0);
            prefactor * bracket * bracket + depth + b2 * k * (k + 1.0)
        }
        (PotentialSpec::WeiHua { depth, a_shape, .. }, SymmetryCase::Pseudospin { .. }) => {
            let squares = if tc { n * n + k * k } else { n * n - k * k };
            let bracket = squares + k * (k - 1.0) - 2.0 * depth / b2 * (1.0 / a_shape - 1.0);
            prefactor * bracket * bracket + depth + b2 * k * (k - 1.0)
        }
        (PotentialSpec::Varshni { a, b, .. }, SymmetryCase::Spin { .. }) => {
            let bracket = -a * b / beta + n * n + k * k + k * (k + 1.0);
            let tail = if tc { 0.0 } else { a };
            prefactor * bracket * bracket + b2 * k * (k + 1.0) + tail
        }
        (PotentialSpec::Varshni { a, b, .. }, SymmetryCase::Pseudospin { .. }) => {
            let bracket = n * n + k * k + k * (k - 3.0) - a * b / beta;
            if tc {
                prefactor * bracket * bracket + b2 * k * (k - 1.0)
            } else {
                prefactor * bracket * bracket - b2 * k * (k - 1.0) + a
            }
        }
    }
}

/// Builds a level from a linear eigenvalue `eps` of `reduced`.
pub fn level_from_epsilon(
    reduced: &ReducedProblem,
    eps: f64,
    method: Method,
    mode: Mode,
) -> Result<EnergyLevel> {
    let (e_minus, e_plus) = reduced.epsilon_to_energy(eps)?;
    let (selected, selection) = if reduced.symmetry.is_spin() {
        (e_plus, Selection::UpperRoot)
    } else {
        (e_minus.abs(), Selection::LowerRootMagnitude)
    };
    Ok(EnergyLevel {
        n: reduced.qn.n(),
        kappa: reduced.qn.kappa(),
        eps,
        e_minus,
        e_plus,
        selected,
        selection,
        method,
        mode,
        branch: None,
        normalizable: None,
    })
}

pub fn energy_closed_form(
    potential: PotentialSpec,
    symmetry: SymmetryCase,
    qn: QuantumNumbers,
    mode: Mode,
) -> Result<EnergyLevel> {
    let reduced = reduced_for_mode(potential, symmetry, qn, mode);
    let eps = big_n(potential, symmetry, qn, mode) + reduced.epsilon_shift;
    level_from_epsilon(&reduced, eps, Method::ClosedForm, mode).map_err(|e| match e {
        Error::ComplexRoots { .. } => Error::NoBoundState { n: qn.n(), kappa: qn.kappa() },
        other => other,
    })
}

/// One zero of the quantization residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuRoot {
    pub eps: f64,
    pub selector: BranchSelector,
    pub exponents: FactorExponents,
    /// `|lambda - lambda_n|` at `eps`.
    pub residual: f64,
}

impl NuRoot {
    /// `z^alpha` decays at `r -> inf`; `(1-z)^gamma` vanishes at `r -> 0`
    /// unless `z = 1` lies outside the physical range (Wei Hua).
    pub fn normalizable(&self, reduced: &ReducedProblem) -> bool {
        let at_origin = match reduced.potential {
            PotentialSpec::WeiHua { .. } => true,
            _ => self.exponents.gamma > 0.0,
        };
        self.exponents.alpha > 0.0 && at_origin
    }
}

/// Sign-change intervals scanned per branch.
const SCAN_INTERVALS: usize = 4000;

/// Zeros of `lambda(eps) - lambda_n` over all admissible branches inside
/// `bracket`, ascending in `eps`.
pub fn nu_roots(reduced: &ReducedProblem, bracket: (f64, f64), tolerance: f64) -> Vec<NuRoot> {
    let (lo, hi) = bracket;
    if !(hi > lo) || !(tolerance > 0.0) {
        return Vec::new();
    }
    let n = reduced.qn.n();
    let mut roots: Vec<NuRoot> = Vec::new();
    for selector in BranchSelector::ALL {
        let residual = quantization_residual(reduced.nu_problem_of(), n, selector);
        let grid: Vec<f64> = (0..=SCAN_INTERVALS)
            .map(|i| lo + (hi - lo) * i as f64 / SCAN_INTERVALS as f64)
            .collect();
        let values: Vec<Option<f64>> = grid.iter().map(|&e| residual(e).ok()).collect();
        for i in 0..SCAN_INTERVALS {
            let (Some(ra), Some(rb)) = (values[i], values[i + 1]) else { continue };
            let (a, b) = (grid[i], grid[i + 1]);
            let found = if ra == 0.0 {
                Some(a)
            } else if ra * rb < 0.0 {
                bisect(&residual, a, b, ra)
            } else {
                None
            };
            let Some(eps) = found else { continue };
            let Ok(r) = residual(eps) else { continue };
            // a sign change across a jump is not a root
            if r.abs() >= tolerance {
                continue;
            }
            let problem = reduced.nu_problem(eps);
            let Some(branch) = select_branch(&problem, selector) else { continue };
            let Ok(exponents) = factor_exponents(&problem, &branch) else { continue };
            let candidate = NuRoot { eps, selector, exponents, residual: r.abs() };
            match roots.iter_mut().find(|o| (o.eps - eps).abs() <= 10.0 * tolerance) {
                Some(existing) => {
                    if candidate.normalizable(reduced) && !existing.normalizable(reduced) {
                        *existing = candidate;
                    }
                }
                None => roots.push(candidate),
            }
        }
    }
    roots.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    roots
}

/// Bisection to floating-point resolution; `None` if the branch vanishes.
fn bisect<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> Option<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid).ok()?;
        if fm == 0.0 {
            return Some(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let (ra, rb) = (f(a).ok()?, f(b).ok()?);
    Some(if ra.abs() <= rb.abs() { a } else { b })
}

/// `[-max|U_eff|, max(0, threshold))` with `|U_eff|` sampled on
/// `r in [0.1/beta, 30/beta]`.
pub fn default_bracket(reduced: &ReducedProblem) -> (f64, f64) {
    let beta = reduced.beta();
    let (r0, r1) = (0.1 / beta, 30.0 / beta);
    let samples = 400;
    let max_abs = (0..=samples)
        .map(|i| {
            let r = r0 * (r1 / r0).powf(i as f64 / samples as f64);
            reduced.u_eff(r).abs()
        })
        .fold(reduced.threshold().abs(), f64::max);
    (-max_abs, reduced.threshold().max(0.0))
}

/// NU levels for `qn` inside `bracket`.
pub fn energy_nu(
    potential: PotentialSpec,
    symmetry: SymmetryCase,
    qn: QuantumNumbers,
    mode: Mode,
    bracket: (f64, f64),
    tolerance: f64,
) -> Vec<EnergyLevel> {
    let reduced = reduced_for_mode(potential, symmetry, qn, mode);
    nu_roots(&reduced, bracket, tolerance)
        .into_iter()
        .filter_map(|root| {
            let mut level = level_from_epsilon(&reduced, root.eps, Method::NuRootfind, mode).ok()?;
            level.branch = Some(root.selector);
            level.normalizable = Some(root.normalizable(&reduced));
            Some(level)
        })
        .collect()
}

/// The NU level reported for a row: the lowest normalizable root, else the
/// lowest root.
pub fn preferred_nu_level(levels: &[EnergyLevel]) -> Option<EnergyLevel> {
    levels
        .iter()
        .find(|l| l.normalizable == Some(true))
        .or_else(|| levels.first())
        .copied()
}

/// Oracle level `n` at fixed `kappa`.
pub fn energy_oracle(
    potential: PotentialSpec,
    symmetry: SymmetryCase,
    qn: QuantumNumbers,
    mode: Mode,
    config: &OracleConfig,
) -> Result<EnergyLevel> {
    let reduced = reduced_for_mode(potential, symmetry, qn, mode);
    let (eps, _) = oracle::converged_epsilon(&reduced, qn.n() as usize, config)?;
    level_from_epsilon(&reduced, eps, Method::Oracle, mode)
}

pub const DEFAULT_NU_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRequest {
    pub potential: PotentialSpec,
    pub symmetry: SymmetryCase,
    pub n_values: Vec<u32>,
    pub kappa_values: Vec<i32>,
    pub mode: Mode,
    pub method: Method,
    /// Defaults to [`OracleConfig::for_beta`].
    pub oracle: Option<OracleConfig>,
}

impl SpectrumRequest {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.kappa_values.is_empty() {
            return Err(Error::InvalidConfig("n and kappa ranges must be nonempty".into()));
        }
        Ok(())
    }

    /// `(n, kappa)` pairs in output order: `n` outer, `kappa` inner.
    pub fn pairs(&self) -> Vec<(u32, i32)> {
        self.n_values
            .iter()
            .flat_map(|&n| self.kappa_values.iter().map(move |&k| (n, k)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub n: u32,
    pub kappa: i32,
    pub outcome: Result<EnergyLevel>,
}

/// Levels for every pair; failures are recorded per row.
pub fn spectrum(request: &SpectrumRequest) -> Result<Vec<SpectrumRow>> {
    request.validate()?;
    let oracle_config = request.oracle.unwrap_or_else(|| OracleConfig::for_beta(request.potential.beta()));
    let rows = request
        .pairs()
        .into_par_iter()
        .map(|(n, kappa)| {
            let outcome = QuantumNumbers::new(n, kappa).and_then(|qn| {
                level_for(request.potential, request.symmetry, qn, request.mode, request.method, &oracle_config)
            });
            SpectrumRow { n, kappa, outcome }
        })
        .collect();
    Ok(rows)
}

pub fn level_for(
    potential: PotentialSpec,
    symmetry: SymmetryCase,
    qn: QuantumNumbers,
    mode: Mode,
    method: Method,
    oracle_config: &OracleConfig,
) -> Result<EnergyLevel> {
    match method {
        Method::ClosedForm => energy_closed_form(potential, symmetry, qn, mode),
        Method::NuRootfind => {
            let reduced = reduced_for_mode(potential, symmetry, qn, mode);
            let levels = energy_nu(potential, symmetry, qn, mode, default_bracket(&reduced), DEFAULT_NU_TOLERANCE);
            preferred_nu_level(&levels).ok_or(Error::NoBoundState { n: qn.n(), kappa: qn.kappa() })
        }
        Method::Oracle => energy_oracle(potential, symmetry, qn, mode, oracle_config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hellmann() -> PotentialSpec {
        PotentialSpec::hellmann(0.25, 0.20, 0.02).unwrap()
    }

    fn qn(n: u32, k: i32) -> QuantumNumbers {
        QuantumNumbers::new(n, k).unwrap()
    }

    #[test]
    fn hellmann_spin_big_n() {
        let sym = SymmetryCase::spin(10.0, 10.0).unwrap();
        for mode in [Mode::AsPrinted, Mode::TableConsistent] {
            let v = big_n(hellmann(), sym, qn(0, -2), mode);
            assert!((v + 4.70625e-3).abs() < 1e-16, "{v}");
        }
    }

    #[test]
    fn varshni_spin_big_n_table_consistent() {
        let v = PotentialSpec::varshni(0.15, 0.15, 0.001).unwrap();
        let sym = SymmetryCase::spin(5.0, 5.0).unwrap();
        let tc = big_n(v, sym, qn(0, -2), Mode::TableConsistent);
        assert!((tc + 1.5015625e-5).abs() < 1e-15, "{tc}");
        let printed = big_n(v, sym, qn(0, -2), Mode::AsPrinted);
        assert!((printed - tc - 0.15).abs() < 1e-15);
    }

    #[test]
    fn wei_hua_pseudospin_big_n_table_consistent() {
        let v = PotentialSpec::wei_hua(0.01, 0.25, 0.10).unwrap();
        let sym = SymmetryCase::pseudospin(10.0, 1.0).unwrap();
        let tc = big_n(v, sym, qn(0, 1), Mode::TableConsistent);
        assert!((tc + 0.0525).abs() < 1e-14, "{tc}");
        let level = energy_closed_form(v, sym, qn(0, 1), Mode::TableConsistent).unwrap();
        assert!((level.selected - 0.9956234).abs() < 1e-7);
    }

    #[test]
    fn closed_form_anchor_levels() {
        let l = energy_closed_form(hellmann(), SymmetryCase::spin(10.0, 10.0).unwrap(), qn(0, -2), Mode::TableConsistent)
            .unwrap();
        assert!((l.selected - 9.9995294).abs() < 5e-8);
        assert_eq!(l.selection, Selection::UpperRoot);
        assert!(l.selected >= l.e_minus);

        let l = energy_closed_form(
            hellmann(),
            SymmetryCase::pseudospin(10.0, 10.0).unwrap(),
            qn(0, -2),
            Mode::TableConsistent,
        )
        .unwrap();
        let want = 0.5 * (10.0 - 899.976375f64.sqrt());
        assert!((l.e_minus - want).abs() < 1e-12);
        assert!((l.selected - 9.9998031).abs() < 5e-8);
        assert_eq!(l.selected, l.e_minus.abs());

        let v = PotentialSpec::varshni(0.15, 0.15, 0.001).unwrap();
        let l = energy_closed_form(v, SymmetryCase::pseudospin(5.0, 5.0).unwrap(), qn(0, 1), Mode::TableConsistent)
            .unwrap();
        assert!((l.selected - 4.9999908).abs() < 5e-8);
    }

    #[test]
    fn modes_agree_for_hellmann() {
        for sym in [SymmetryCase::spin(10.0, 10.0).unwrap(), SymmetryCase::pseudospin(10.0, 10.0).unwrap()] {
            for (n, k) in [(0, -2), (1, 3), (0, 4)] {
                let a = energy_closed_form(hellmann(), sym, qn(n, k), Mode::AsPrinted).unwrap();
                let b = energy_closed_form(hellmann(), sym, qn(n, k), Mode::TableConsistent).unwrap();
                assert_eq!(a.eps, b.eps);
                assert_eq!(a.selected, b.selected);
            }
        }
    }

    #[test]
    fn e_map_round_trip() {
        let v = PotentialSpec::varshni(0.15, 0.15, 0.001).unwrap();
        let sym = SymmetryCase::spin(5.0, 5.0).unwrap();
        for mode in [Mode::AsPrinted, Mode::TableConsistent] {
            let l = energy_closed_form(v, sym, qn(1, -3), mode).unwrap();
            let reduced = reduced_for_mode(v, sym, qn(1, -3), mode);
            let back = reduced.energy_to_epsilon(l.signed_energy());
            // the product cancels terms of size E^2
            let scale = l.signed_energy().powi(2).max(reduced.epsilon_shift.abs());
            assert!((back - l.eps).abs() <= 1e-12 * scale, "{mode:?}: {back} vs {}", l.eps);
        }
    }

    #[test]
    fn no_bound_state_on_complex_roots() {
        let v = PotentialSpec::hellmann(50.0, 0.2, 0.5).unwrap();
        let err = energy_closed_form(v, SymmetryCase::spin(0.1, 0.1).unwrap(), qn(0, -2), Mode::AsPrinted);
        assert!(matches!(err, Err(Error::NoBoundState { .. })));
    }

    #[test]
    fn nu_root_for_table1_hellmann_spin() {
        let sym = SymmetryCase::spin(10.0, 10.0).unwrap();
        let levels = energy_nu(hellmann(), sym, qn(0, -2), Mode::TableConsistent, (-0.02, 0.0), 1e-10);
        assert_eq!(levels.len(), 1, "{levels:?}");
        let eps = levels[0].eps;
        assert!((eps + 4.50625e-3).abs() < 1e-12, "{eps}");
        assert!(((eps - -4.70625e-3).abs() - 2e-4).abs() < 1e-9);
        assert_eq!(levels[0].normalizable, Some(false));
    }

    #[test]
    fn empty_bracket_has_no_roots() {
        let sym = SymmetryCase::spin(10.0, 10.0).unwrap();
        assert!(energy_nu(hellmann(), sym, qn(0, -2), Mode::TableConsistent, (-0.004, -0.001), 1e-10).is_empty());
        assert!(energy_nu(hellmann(), sym, qn(0, -2), Mode::TableConsistent, (0.0, 0.0), 1e-10).is_empty());
    }

    #[test]
    fn spectrum_flags_singular_rows() {
        let req = SpectrumRequest {
            potential: hellmann(),
            symmetry: SymmetryCase::spin(10.0, 10.0).unwrap(),
            n_values: vec![0, 1],
            kappa_values: vec![-2, -1, 1],
            mode: Mode::TableConsistent,
            method: Method::ClosedForm,
            oracle: None,
        };
        let rows = spectrum(&req).unwrap();
        assert_eq!(rows.len(), 6);
        let singular: Vec<_> = rows.iter().filter(|r| r.outcome.is_err()).map(|r| (r.n, r.kappa)).collect();
        assert_eq!(singular, vec![(1, -1)]);
        assert_eq!(rows.iter().map(|r| (r.n, r.kappa)).collect::<Vec<_>>(), req.pairs());
    }
}
