//! Radial spinor components: Jacobi polynomials with arbitrary real
//! parameters, the factorized principal component, and the companion
//! obtained from the first-order Dirac relation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nu_core::{factor_exponents, lambda_n, select_branch, BranchSelector, FactorExponents};
use crate::reduction::ReducedProblem;
use crate::spectra::EnergyLevel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub n: u32,
    pub p: f64,
    pub q: f64,
}

impl JacobiParams {
    pub fn new(n: u32, p: f64, q: f64) -> Self {
        Self { n, p, q }
    }
}

/// `P_n^{(p,q)}(x)` from the terminating hypergeometric sum
/// `sum_m C(n,m) (n+p+q+1)_m (p+m+1)_{n-m} / n! ((x-1)/2)^m`.
///
/// For `x < 0` the reflection `P_n^{(p,q)}(x) = (-1)^n P_n^{(q,p)}(-x)` keeps
/// `|(x-1)/2| <= 1/2`, which limits cancellation.
pub fn jacobi(params: JacobiParams, x: f64) -> f64 {
    let JacobiParams { n, p, q } = params;
    if x < 0.0 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return sign * jacobi_sum(n, q, p, -x);
    }
    jacobi_sum(n, p, q, x)
}

fn jacobi_sum(n: u32, p: f64, q: f64, x: f64) -> f64 {
    let t = 0.5 * (x - 1.0);
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut rising_total = 1.0;
    let mut t_pow = 1.0;
    let mut n_fact = 1.0;
    for k in 1..=n {
        n_fact *= f64::from(k);
    }
    for m in 0..=n {
        let mut rising_p = 1.0;
        for j in 0..(n - m) {
            rising_p *= p + f64::from(m) + 1.0 + f64::from(j);
        }
        sum += binom * rising_total * rising_p * t_pow;
        let mf = f64::from(m);
        binom *= (f64::from(n) - mf) / (mf + 1.0);
        rising_total *= f64::from(n) + p + q + 1.0 + mf;
        t_pow *= t;
    }
    sum / n_fact
}

/// `d/dx P_n^{(p,q)} = (n+p+q+1)/2 P_{n-1}^{(p+1,q+1)}`.
pub fn jacobi_derivative(params: JacobiParams, x: f64) -> f64 {
    let JacobiParams { n, p, q } = params;
    if n == 0 {
        return 0.0;
    }
    0.5 * (f64::from(n) + p + q + 1.0) * jacobi(JacobiParams::new(n - 1, p + 1.0, q + 1.0), x)
}

fn jacobi_second_derivative(params: JacobiParams, x: f64) -> f64 {
    let JacobiParams { n, p, q } = params;
    if n < 2 {
        return 0.0;
    }
    0.5 * (f64::from(n) + p + q + 1.0)
        * jacobi_derivative(JacobiParams::new(n - 1, p + 1.0, q + 1.0), x)
}

/// Where the exponents of `z^alpha (1-z)^gamma P_n^{(p,q)}(1-2z)` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentSource {
    /// Partial fractions of the NU branch that quantizes the level.
    #[default]
    Engine,
    /// `alpha = -a1`, `gamma = 1 - kappa`, `p = -2(1+kappa+a1)`,
    /// `q = -(1+2kappa)` with `a1 = +sqrt(a1^2)`.
    Printed,
}

/// Factorization data of one principal component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub source: ExponentSource,
    pub exponents: FactorExponents,
    /// Signed exponent used: `alpha = -a1`.
    pub a1: f64,
    pub jacobi: JacobiParams,
    /// NU branch for engine exponents.
    pub branch: Option<BranchSelector>,
    pub normalizable: bool,
}

/// `alpha > 0` decays at large `r`; `gamma > 0` vanishes at the origin, which
/// only lies in range (`z -> 1`) for the `e^{-beta r}` substitution.
fn is_normalizable(reduced: &ReducedProblem, exponents: &FactorExponents) -> bool {
    let origin_ok = match reduced.potential {
        crate::potentials::PotentialSpec::WeiHua { .. } => true,
        _ => exponents.gamma > 0.0,
    };
    exponents.alpha > 0.0 && origin_ok
}

/// Relative slack on `lambda - lambda_n` when picking the quantizing branch.
const BRANCH_MATCH_RTOL: f64 = 1e-7;

/// Exponents for `eps` on the branch that quantizes level `n`: `preferred`
/// if given, else the admissible branch with `lambda = lambda_n`, favouring
/// normalizable ones.
pub fn factorization(
    reduced: &ReducedProblem,
    eps: f64,
    source: ExponentSource,
    preferred: Option<BranchSelector>,
) -> Result<Factorization> {
    let n = reduced.qn.n();
    let kappa = f64::from(reduced.qn.kappa());
    match source {
        ExponentSource::Printed => {
            let a1_sq = reduced.coefficients(eps).a1_sq;
            if a1_sq < 0.0 {
                return Err(Error::BranchVanished { eps });
            }
            let a1 = a1_sq.sqrt();
            let exponents = FactorExponents {
                alpha: -a1,
                gamma: 1.0 - kappa,
                rho_alpha: -2.0 * (1.0 + kappa + a1),
                rho_gamma: -(1.0 + 2.0 * kappa),
            };
            Ok(Factorization {
                source,
                exponents,
                a1,
                jacobi: JacobiParams::new(n, exponents.rho_alpha, exponents.rho_gamma),
                branch: None,
                normalizable: is_normalizable(reduced, &exponents),
            })
        }
        ExponentSource::Engine => {
            let problem = reduced.nu_problem(eps);
            let candidates: Vec<BranchSelector> = match preferred {
                Some(s) => vec![s],
                None => BranchSelector::ALL.to_vec(),
            };
            let mut best: Option<(f64, bool, Factorization)> = None;
            for selector in candidates {
                let Some(branch) = select_branch(&problem, selector) else { continue };
                if !branch.admissible {
                    continue;
                }
                let miss = (branch.lambda - lambda_n(n, &branch, &problem.sigma)).abs();
                if miss > BRANCH_MATCH_RTOL * branch.lambda.abs().max(1.0) {
                    continue;
                }
                let exponents = factor_exponents(&problem, &branch)?;
                let normalizable = is_normalizable(reduced, &exponents);
                let f = Factorization {
                    source,
                    exponents,
                    a1: -exponents.alpha,
                    jacobi: JacobiParams::new(n, exponents.rho_alpha, exponents.rho_gamma),
                    branch: Some(selector),
                    normalizable,
                };
                let better = match &best {
                    None => true,
                    Some((m, norm, _)) => (normalizable && !norm) || (normalizable == *norm && miss < *m),
                };
                if better {
                    best = Some((miss, normalizable, f));
                }
            }
            best.map(|(_, _, f)| f).ok_or(Error::BranchVanished { eps })
        }
    }
}

/// Value and first two `z`-derivatives of `z^alpha (1-z)^gamma P_n(1-2z)`.
fn factorized_with_derivatives(f: &Factorization, z: f64) -> (f64, f64, f64) {
    let FactorExponents { alpha, gamma, .. } = f.exponents;
    let phi = z.powf(alpha) * (1.0 - z).powf(gamma);
    let g = alpha / z - gamma / (1.0 - z);
    let dphi = phi * g;
    let d2phi = phi * (g * g - alpha / (z * z) - gamma / ((1.0 - z) * (1.0 - z)));
    let x = 1.0 - 2.0 * z;
    let y = jacobi(f.jacobi, x);
    let dy = -2.0 * jacobi_derivative(f.jacobi, x);
    let d2y = 4.0 * jacobi_second_derivative(f.jacobi, x);
    (phi * y, dphi * y + phi * dy, d2phi * y + 2.0 * dphi * dy + phi * d2y)
}

/// Unnormalized principal component (upper for spin, lower for pseudospin)
/// on `grid`.
pub fn principal_component(reduced: &ReducedProblem, factorization: &Factorization, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&r| factorized_with_derivatives(factorization, reduced.z_of_r(r)).0)
        .collect()
}

/// Max over `grid` of the z-space ODE residual at `eps`, relative to
/// `max |F|`, with analytic derivatives.
pub fn z_space_residual(reduced: &ReducedProblem, eps: f64, factorization: &Factorization, grid: &[f64]) -> f64 {
    let problem = reduced.nu_problem(eps);
    let mut max_f = 0.0f64;
    let mut max_res = 0.0f64;
    for &r in grid {
        let z = reduced.z_of_r(r);
        let (v, d1, d2) = factorized_with_derivatives(factorization, z);
        max_f = max_f.max(v.abs());
        max_res = max_res.max(problem.residual(z, v, d1, d2).abs());
    }
    if max_f == 0.0 {
        max_res
    } else {
        max_res / max_f
    }
}

/// `points` evenly spaced radii on `[r_min, r_max]`.
pub fn uniform_grid(r_min: f64, r_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::BadGrid(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if points < 5 {
        return Err(Error::BadGrid(format!("need at least 5 points, got {points}")));
    }
    let h = (r_max - r_min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i == points - 1 { r_max } else { r_min + h * i as f64 })
        .collect())
}

/// Default sampling for a potential with range parameter `beta`.
pub fn default_grid(beta: f64) -> Result<Vec<f64>> {
    uniform_grid(1e-3 / beta, 30.0 / beta, 2000)
}

fn uniform_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < 5 {
        return Err(Error::BadGrid(format!("need at least 5 points, got {}", grid.len())));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::BadGrid("grid must be increasing".into()));
    }
    let uniform = grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
    if !uniform {
        return Err(Error::BadGrid("five-point differences need a uniform grid".into()));
    }
    Ok(h)
}

/// Fourth-order first derivative: central in the interior, one-sided at the
/// two points nearest each end.
pub fn derivative_5pt(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "five-point stencil needs 5 samples");
    let f = values;
    let mut d = vec![0.0; n];
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
    d[n - 1] =
        (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
    d
}

/// Dividing factor below which the companion is undefined.
pub const SYMMETRY_LIMIT_GUARD: f64 = 1e-12;

/// The factor the companion is divided by: `E + M - A1` (spin) or
/// `M - E + A2` (pseudospin), at the signed energy of `level`.
pub fn companion_factor(reduced: &ReducedProblem, level: &EnergyLevel) -> f64 {
    let e = level.signed_energy();
    let m = reduced.symmetry.mass();
    let c = reduced.symmetry.constant();
    if reduced.symmetry.is_spin() {
        e + m - c
    } else {
        m - e + c
    }
}

/// Spin: `G = (F' + kappa F / r) / (E + M - A1)`.
/// Pseudospin: `F = (G' - kappa G / r) / (M - E + A2)`.
pub fn companion_component(
    reduced: &ReducedProblem,
    level: &EnergyLevel,
    principal: &[f64],
    grid: &[f64],
) -> Result<Vec<f64>> {
    if principal.len() != grid.len() {
        return Err(Error::BadGrid(format!("{} samples on {} nodes", principal.len(), grid.len())));
    }
    let h = uniform_step(grid)?;
    let factor = companion_factor(reduced, level);
    if factor.abs() < SYMMETRY_LIMIT_GUARD {
        return Err(Error::SymmetryLimit { factor });
    }
    let kappa = f64::from(reduced.qn.kappa());
    let sign = if reduced.symmetry.is_spin() { 1.0 } else { -1.0 };
    let d = derivative_5pt(principal, h);
    Ok(principal
        .iter()
        .zip(&d)
        .zip(grid)
        .map(|((&p, &dp), &r)| (dp + sign * kappa * p / r) / factor)
        .collect())
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub level: EnergyLevel,
    pub a1: f64,
    pub jacobi: JacobiParams,
    pub factorization: Factorization,
    pub grid: Vec<f64>,
    pub F: Vec<f64>,
    pub G: Vec<f64>,
    /// Scale removed by the last normalization.
    pub norm: f64,
}

fn trapezoid(grid: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    grid.windows(2)
        .zip(v.windows(2))
        .map(|(r, y)| 0.5 * (r[1] - r[0]) * (y[0] + y[1]))
        .sum()
}

/// Scales `F, G` so that the trapezoidal integral of `F^2 + G^2` is 1.
pub fn normalize(mut solution: RadialSolution) -> Result<RadialSolution> {
    if solution.F.iter().chain(&solution.G).any(|v| !v.is_finite()) {
        return Err(Error::BadGrid("non-finite spinor samples".into()));
    }
    let integral = trapezoid(&solution.grid, solution.F.iter().zip(&solution.G).map(|(f, g)| f * f + g * g));
    if !(integral > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let norm = integral.sqrt();
    solution.F.iter_mut().chain(solution.G.iter_mut()).for_each(|v| *v /= norm);
    solution.norm = norm;
    Ok(solution)
}

/// Principal and companion components of `level` on `grid`, normalized.
pub fn radial_solution(
    reduced: &ReducedProblem,
    level: &EnergyLevel,
    source: ExponentSource,
    grid: &[f64],
) -> Result<RadialSolution> {
    let factorization = factorization(reduced, level.eps, source, level.branch)?;
    let principal = principal_component(reduced, &factorization, grid);
    let companion = companion_component(reduced, level, &principal, grid)?;
    let (f, g) = if reduced.symmetry.is_spin() { (principal, companion) } else { (companion, principal) };
    normalize(RadialSolution {
        level: *level,
        a1: factorization.a1,
        jacobi: factorization.jacobi,
        factorization,
        grid: grid.to_vec(),
        F: f,
        G: g,
        norm: 1.0,
    })
}

/// Spin case: max interior mismatch of
/// `(d/dr - kappa/r)[(E+M-A1) G] = [(U - eps) - kappa(kappa+1)/r^2] F`,
/// relative to the largest right-hand side. `U` is the potential the NU
/// factorization solves exactly.
pub fn spin_consistency_residual(reduced: &ReducedProblem, solution: &RadialSolution) -> Result<f64> {
    if !reduced.symmetry.is_spin() {
        return Err(Error::InvalidProblem("consistency check is for spin symmetry".into()));
    }
    let grid = &solution.grid;
    let h = uniform_step(grid)?;
    let factor = companion_factor(reduced, &solution.level);
    let kappa = f64::from(reduced.qn.kappa());
    let scaled: Vec<f64> = solution.G.iter().map(|g| factor * g).collect();
    let d = derivative_5pt(&scaled, h);
    let eps = solution.level.eps;
    // points whose nested stencil reaches the one-sided end formulas are skipped
    let interior = 4..grid.len() - 4;
    let mut max_rhs = 0.0f64;
    let mut max_diff = 0.0f64;
    for i in interior {
        let r = grid[i];
        let lhs = d[i] - kappa * scaled[i] / r;
        let rhs = (reduced.nu_form_potential(r) - eps - kappa * (kappa + 1.0) / (r * r)) * solution.F[i];
        max_rhs = max_rhs.max(rhs.abs());
        max_diff = max_diff.max((lhs - rhs).abs());
    }
    if max_rhs == 0.0 {
        return Ok(max_diff);
    }
    Ok(max_diff / max_rhs)
}
