//! Nikiforov-Uvarov engine for hypergeometric-type equations
//!
//! ```text
//! sigma(z)^2 Psi'' + sigma(z) tau_tilde(z) Psi' + sigma_tilde(z) Psi = 0
//! ```
//!
//! with `deg sigma <= 2`, `deg tau_tilde <= 1` and `deg sigma_tilde <= 2`.
//! The solution is factorised as `Psi = psi(z) * phi(z)` where
//! `psi'/psi = pi/sigma` and `phi` solves `sigma phi'' + tau phi' + lambda phi = 0`.
//! `pi` is linear only when the quadratic under its square root is a perfect
//! square, which fixes the constant `k`; polynomial `phi` of degree `n` then
//! requires `lambda = lambda_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `c0 + c1 z + c2 z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quadratic {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Quadratic {
    pub const ZERO: Quadratic = Quadratic { c0: 0.0, c1: 0.0, c2: 0.0 };

    pub const fn new(c0: f64, c1: f64, c2: f64) -> Self {
        Self { c0, c1, c2 }
    }

    pub const fn linear(c0: f64, c1: f64) -> Self {
        Self { c0, c1, c2: 0.0 }
    }

    pub fn eval(&self, z: f64) -> f64 {
        (self.c2 * z + self.c1) * z + self.c0
    }

    pub fn derivative(&self) -> Quadratic {
        Quadratic::linear(self.c1, 2.0 * self.c2)
    }

    /// Value of the first derivative at `z`.
    pub fn slope_at(&self, z: f64) -> f64 {
        self.c1 + 2.0 * self.c2 * z
    }

    pub fn second_derivative(&self) -> f64 {
        2.0 * self.c2
    }

    /// Highest index with a nonzero coefficient; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        if self.c2 != 0.0 {
            2
        } else if self.c1 != 0.0 {
            1
        } else {
            0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0.0 && self.c1 == 0.0 && self.c2 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c1.is_finite() && self.c2.is_finite()
    }

    pub fn scale(&self, factor: f64) -> Quadratic {
        Quadratic::new(self.c0 * factor, self.c1 * factor, self.c2 * factor)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.c0.abs().max(self.c1.abs()).max(self.c2.abs())
    }
}

impl std::ops::Add for Quadratic {
    type Output = Quadratic;

    fn add(self, rhs: Quadratic) -> Quadratic {
        Quadratic::new(self.c0 + rhs.c0, self.c1 + rhs.c1, self.c2 + rhs.c2)
    }
}

impl std::ops::Sub for Quadratic {
    type Output = Quadratic;

    fn sub(self, rhs: Quadratic) -> Quadratic {
        Quadratic::new(self.c0 - rhs.c0, self.c1 - rhs.c1, self.c2 - rhs.c2)
    }
}

impl std::fmt::Display for Quadratic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + {} z + {} z^2", self.c0, self.c1, self.c2)
    }
}

/// Polynomial triple `(sigma, tau_tilde, sigma_tilde)` of a hypergeometric-type ODE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuProblem {
    pub sigma: Quadratic,
    pub tau_tilde: Quadratic,
    pub sigma_tilde: Quadratic,
}

impl NuProblem {
    pub fn new(sigma: Quadratic, tau_tilde: Quadratic, sigma_tilde: Quadratic) -> Result<Self> {
        if !(sigma.is_finite() && tau_tilde.is_finite() && sigma_tilde.is_finite()) {
            return Err(Error::InvalidProblem("non-finite coefficient".into()));
        }
        if sigma.is_zero() {
            return Err(Error::InvalidProblem("sigma is identically zero".into()));
        }
        if tau_tilde.degree() > 1 {
            return Err(Error::InvalidProblem(format!(
                "tau_tilde must be at most linear, got {tau_tilde}"
            )));
        }
        Ok(Self { sigma, tau_tilde, sigma_tilde })
    }

    /// `(sigma' - tau_tilde) / 2`, the rational part of `pi`.
    fn half_gap(&self) -> Quadratic {
        (self.sigma.derivative() - self.tau_tilde).scale(0.5)
    }

    /// The quadratic under the square root of `pi` for a given `k`:
    /// `((sigma' - tau_tilde)/2)^2 - sigma_tilde + k sigma`.
    pub fn under_root(&self, k: f64) -> Quadratic {
        let h = self.half_gap();
        let h_sq = Quadratic::new(h.c0 * h.c0, 2.0 * h.c0 * h.c1, h.c1 * h.c1);
        h_sq - self.sigma_tilde + self.sigma.scale(k)
    }

    /// Left-hand side of the ODE at `z` for a trial function given by its
    /// value and first two derivatives.
    pub fn residual(&self, z: f64, value: f64, d1: f64, d2: f64) -> f64 {
        let s = self.sigma.eval(z);
        s * s * d2 + s * self.tau_tilde.eval(z) * d1 + self.sigma_tilde.eval(z) * value
    }
}

/// Which root of the `k` equation a branch uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KRoot {
    Lower,
    Upper,
}

/// Sign in front of the perfect-square root in `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootSign {
    Plus,
    Minus,
}

impl RootSign {
    pub fn factor(self) -> f64 {
        match self {
            RootSign::Plus => 1.0,
            RootSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchSelector {
    pub root: KRoot,
    pub sign: RootSign,
}

impl BranchSelector {
    pub const ALL: [BranchSelector; 4] = [
        BranchSelector { root: KRoot::Lower, sign: RootSign::Plus },
        BranchSelector { root: KRoot::Lower, sign: RootSign::Minus },
        BranchSelector { root: KRoot::Upper, sign: RootSign::Plus },
        BranchSelector { root: KRoot::Upper, sign: RootSign::Minus },
    ];
}

impl std::fmt::Display for BranchSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let root = match self.root {
            KRoot::Lower => "k-",
            KRoot::Upper => "k+",
        };
        let sign = match self.sign {
            RootSign::Plus => '+',
            RootSign::Minus => '-',
        };
        write!(f, "{root}/{sign}")
    }
}

/// One solution branch `(k, pi, tau, lambda)`.
///
/// `pi = (sigma' - tau_tilde)/2 + (sqrt_slope z + sqrt_const)`, i.e. the
/// stored root already carries the chosen sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuBranch {
    pub selector: BranchSelector,
    pub k: f64,
    pub pi: Quadratic,
    pub tau: Quadratic,
    pub lambda: f64,
    pub sqrt_slope: f64,
    pub sqrt_const: f64,
    pub admissible: bool,
}

/// Relative threshold below which a negative `k` discriminant is read as a
/// double root.
const DOUBLE_ROOT_TOLERANCE: f64 = 1e-10;

/// Coefficients `(d2, d1, d0)` of `disc(k) = B(k)^2 - 4 A(k) C(k)` where the
/// under-root quadratic is `A z^2 + B z + C`.
fn discriminant_in_k(problem: &NuProblem) -> (f64, f64, f64) {
    let base = problem.under_root(0.0);
    let s = problem.sigma;
    let (a0, a1) = (base.c2, s.c2);
    let (b0, b1) = (base.c1, s.c1);
    let (c0, c1) = (base.c0, s.c0);
    let d2 = b1 * b1 - 4.0 * a1 * c1;
    let d1 = 2.0 * b0 * b1 - 4.0 * (a0 * c1 + a1 * c0);
    let d0 = b0 * b0 - 4.0 * a0 * c0;
    (d2, d1, d0)
}

/// Real roots of `d2 k^2 + d1 k + d0`, ascending, with near-zero
/// discriminants accepted as double roots.
fn real_roots(d2: f64, d1: f64, d0: f64) -> Vec<f64> {
    let scale = d2.abs().max(d1.abs()).max(d0.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if d2.abs() <= 1e-14 * scale {
        if d1.abs() <= 1e-14 * scale {
            return Vec::new();
        }
        return vec![-d0 / d1];
    }
    let disc = d1 * d1 - 4.0 * d2 * d0;
    let disc_scale = (d1 * d1).max((4.0 * d2 * d0).abs());
    if disc < 0.0 {
        if disc.abs() <= DOUBLE_ROOT_TOLERANCE * disc_scale {
            return vec![-d1 / (2.0 * d2)];
        }
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-d1 / (2.0 * d2)];
    }
    let root = disc.sqrt();
    let q = -0.5 * (d1 + root.copysign(d1));
    let mut ks = if q == 0.0 { vec![0.0] } else { vec![q / d2, d0 / q] };
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    ks
}

/// All real `k` for which the under-root quadratic is the square of a real
/// linear polynomial, ascending.
pub fn k_candidates(problem: &NuProblem) -> Vec<f64> {
    let (d2, d1, d0) = discriminant_in_k(problem);
    real_roots(d2, d1, d0)
        .into_iter()
        .filter(|&k| {
            let u = problem.under_root(k);
            let tol = 1e-12 * u.max_abs_coefficient().max(1.0);
            u.c2 >= -tol && u.c0 >= -tol
        })
        .collect()
}

/// Square root `(p, q)` of a perfect-square quadratic with `q >= 0`.
fn perfect_square_root(u: Quadratic) -> (f64, f64) {
    let q = u.c0.max(0.0).sqrt();
    let p = u.c2.max(0.0).sqrt().copysign(u.c1);
    (p, q)
}

fn build_branch(problem: &NuProblem, k: f64, root: KRoot, sign: RootSign) -> NuBranch {
    let (p, q) = perfect_square_root(problem.under_root(k));
    let s = sign.factor();
    let (sqrt_slope, sqrt_const) = (s * p, s * q);
    let pi = problem.half_gap() + Quadratic::linear(sqrt_const, sqrt_slope);
    let tau = problem.tau_tilde + pi.scale(2.0);
    NuBranch {
        selector: BranchSelector { root, sign },
        k,
        pi,
        tau,
        lambda: k + pi.c1,
        sqrt_slope,
        sqrt_const,
        admissible: tau.c1 < 0.0,
    }
}

/// Every `(k, sign)` combination, deduplicated.
pub fn branches(problem: &NuProblem) -> Vec<NuBranch> {
    let ks = k_candidates(problem);
    let mut out: Vec<NuBranch> = Vec::with_capacity(2 * ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let root = if i == 0 { KRoot::Lower } else { KRoot::Upper };
        for sign in [RootSign::Plus, RootSign::Minus] {
            let b = build_branch(problem, k, root, sign);
            let duplicate = out.iter().any(|o| same_branch(o, &b));
            if !duplicate {
                out.push(b);
            }
        }
    }
    out
}

fn same_branch(a: &NuBranch, b: &NuBranch) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-14 * x.abs().max(y.abs()).max(1.0);
    close(a.k, b.k) && close(a.pi.c0, b.pi.c0) && close(a.pi.c1, b.pi.c1)
}

/// The branch named by `selector`, whether or not it is admissible.
///
/// With a double `k` root both `Lower` and `Upper` resolve to the same `k`.
pub fn select_branch(problem: &NuProblem, selector: BranchSelector) -> Option<NuBranch> {
    let ks = k_candidates(problem);
    let k = match selector.root {
        KRoot::Lower => *ks.first()?,
        KRoot::Upper => *ks.last()?,
    };
    Some(build_branch(problem, k, selector.root, selector.sign))
}

/// `lambda_n = -n tau' - n (n - 1) sigma'' / 2`.
pub fn lambda_n(n: u32, branch: &NuBranch, sigma: &Quadratic) -> f64 {
    let n = f64::from(n);
    -n * branch.tau.c1 - 0.5 * n * (n - 1.0) * sigma.second_derivative()
}

/// Exponents of `psi = z^alpha (1-z)^gamma` and of the weight
/// `rho = z^rho_alpha (1-z)^rho_gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorExponents {
    pub alpha: f64,
    pub gamma: f64,
    pub rho_alpha: f64,
    pub rho_gamma: f64,
}

/// Partial fractions of `pi/sigma` and `(tau - sigma')/sigma` for
/// `sigma = s z (1 - z)`.
pub fn factor_exponents(problem: &NuProblem, branch: &NuBranch) -> Result<FactorExponents> {
    let sigma = problem.sigma;
    let scale = sigma.max_abs_coefficient();
    let two_point = sigma.c2 != 0.0
        && sigma.c0.abs() <= 1e-14 * scale
        && (sigma.c1 + sigma.c2).abs() <= 1e-12 * scale;
    if !two_point {
        return Err(Error::UnsupportedSigma(sigma.to_string()));
    }
    let s = sigma.c1;
    let weight = branch.tau - sigma.derivative();
    Ok(FactorExponents {
        alpha: branch.pi.eval(0.0) / s,
        gamma: -branch.pi.eval(1.0) / s,
        rho_alpha: weight.eval(0.0) / s,
        rho_gamma: -weight.eval(1.0) / s,
    })
}

/// `eps -> lambda(eps) - lambda_n(eps)` on the selected branch. Roots are NU
/// eigenvalues; the closure fails where the branch is missing or has
/// `tau' >= 0`.
pub fn quantization_residual<F>(
    problem_of: F,
    n: u32,
    selector: BranchSelector,
) -> impl Fn(f64) -> Result<f64>
where
    F: Fn(f64) -> NuProblem,
{
    move |eps| {
        let problem = problem_of(eps);
        match select_branch(&problem, selector) {
            Some(b) if b.admissible => Ok(b.lambda - lambda_n(n, &b, &problem.sigma)),
            _ => Err(Error::BranchVanished { eps }),
        }
    }
}
