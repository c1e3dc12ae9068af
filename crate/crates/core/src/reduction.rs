//! Reduction of a (potential, symmetry, kappa) triple to a one-dimensional
//! linear eigenproblem `F'' + [eps - U_eff(r)] F = 0`.
//!
//! The effective potentials are taken exactly as the transformed equations
//! print them: the centrifugal term uses the exponential approximation and
//! the potential enters without the `(E + M - A)` factor of the second-order
//! Dirac form. All dependence on the energy `E` is confined to the quadratic
//! map in [`ReducedProblem::epsilon_to_energy`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nu_core::{NuProblem, Quadratic};
use crate::potentials::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "symmetry", rename_all = "snake_case")]
pub enum SymmetryCase {
    /// `Gamma(r) = V - S = a1` constant; the upper component decouples.
    Spin { a1: f64, mass: f64 },
    /// `Lambda(r) = V + S = a2` constant; the lower component decouples.
    Pseudospin { a2: f64, mass: f64 },
}

impl SymmetryCase {
    pub fn spin(a1: f64, mass: f64) -> Result<Self> {
        Self::Spin { a1, mass }.validated()
    }

    pub fn pseudospin(a2: f64, mass: f64) -> Result<Self> {
        Self::Pseudospin { a2, mass }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.constant().is_finite() && self.mass().is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite symmetry constant in {self:?}")));
        }
        if self.mass() <= 0.0 {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.mass())));
        }
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Self::Spin { mass, .. } | Self::Pseudospin { mass, .. } => mass,
        }
    }

    /// `A1` for spin symmetry, `A2` for pseudospin symmetry.
    pub fn constant(&self) -> f64 {
        match *self {
            Self::Spin { a1, .. } => a1,
            Self::Pseudospin { a2, .. } => a2,
        }
    }

    pub fn is_spin(&self) -> bool {
        matches!(self, Self::Spin { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Spin { .. } => "spin",
            Self::Pseudospin { .. } => "pseudospin",
        }
    }

    /// `kappa (kappa + 1)` for spin, `kappa (kappa - 1)` for pseudospin.
    pub fn kappa_factor(&self, kappa: i32) -> f64 {
        let k = f64::from(kappa);
        match self {
            Self::Spin { .. } => k * (k + 1.0),
            Self::Pseudospin { .. } => k * (k - 1.0),
        }
    }

    /// `(E + M - A1)(E - M)` or `(E - M - A2)(E + M)`.
    pub fn energy_product(&self, energy: f64) -> f64 {
        let m = self.mass();
        match *self {
            Self::Spin { a1, .. } => (energy + m - a1) * (energy - m),
            Self::Pseudospin { a2, .. } => (energy - m - a2) * (energy + m),
        }
    }
}

/// Radial quantum number `n` and spin-orbit number `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    n: u32,
    kappa: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, kappa: i32) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidQuantumNumbers { n, kappa, reason: "kappa must be nonzero" });
        }
        if i64::from(n) + i64::from(kappa) == 0 {
            return Err(Error::InvalidQuantumNumbers { n, kappa, reason: "n + kappa = 0" });
        }
        Ok(Self { n, kappa })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kappa(&self) -> i32 {
        self.kappa
    }

    /// Orbital number: `kappa` for `kappa > 0`, `-(kappa + 1)` for `kappa < 0`.
    pub fn ell(&self) -> u32 {
        if self.kappa > 0 {
            self.kappa.unsigned_abs()
        } else {
            (-(self.kappa + 1)).unsigned_abs()
        }
    }

    /// `j = |kappa| - 1/2`.
    pub fn j(&self) -> f64 {
        f64::from(self.kappa.unsigned_abs()) - 0.5
    }
}

/// `(a1^2, a2^2, a3^2)` such that the z-space equation reads
/// `sigma_tilde = -a1^2 - a2^2 z - a3^2 z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTriple {
    pub a1_sq: f64,
    pub a2_sq: f64,
    pub a3_sq: f64,
}

impl CoefficientTriple {
    pub fn sum(&self) -> f64 {
        self.a1_sq + self.a2_sq + self.a3_sq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedProblem {
    pub potential: PotentialSpec,
    pub symmetry: SymmetryCase,
    pub qn: QuantumNumbers,
    pub kappa_factor: f64,
    /// `eps = energy_product(E) + epsilon_shift`.
    pub epsilon_shift: f64,
}

/// `1 - e^{-beta r}` without cancellation at small `beta r`.
fn one_minus_exp(beta: f64, r: f64) -> f64 {
    -(-beta * r).exp_m1()
}

pub fn reduce(potential: PotentialSpec, symmetry: SymmetryCase, qn: QuantumNumbers) -> ReducedProblem {
    let epsilon_shift = match (potential, symmetry) {
        (PotentialSpec::Varshni { a, .. }, SymmetryCase::Spin { .. }) => -a,
        _ => 0.0,
    };
    ReducedProblem {
        potential,
        symmetry,
        qn,
        kappa_factor: symmetry.kappa_factor(qn.kappa()),
        epsilon_shift,
    }
}

impl ReducedProblem {
    pub fn beta(&self) -> f64 {
        self.potential.beta()
    }

    /// Same problem with a different `eps <-> E` offset.
    pub fn with_shift(mut self, epsilon_shift: f64) -> Self {
        self.epsilon_shift = epsilon_shift;
        self
    }

    /// Effective potential of the printed ODE at `r > 0`.
    pub fn u_eff(&self, r: f64) -> f64 {
        let beta = self.beta();
        let d = one_minus_exp(beta, r);
        let x = (-beta * r).exp();
        let centrifugal = self.kappa_factor * beta * beta / (d * d);
        let term = match self.potential {
            PotentialSpec::Hellmann { a, b, .. } => -beta * (a - b * x) / d,
            PotentialSpec::WeiHua { depth, a_shape, .. } => {
                let ratio = d / (1.0 - a_shape * x);
                depth * ratio * ratio
            }
            PotentialSpec::Varshni { a, b, .. } => -a * b * beta * x / d,
        };
        centrifugal + term
    }

    /// The potential whose z-transform is exactly the NU coefficient triple.
    ///
    /// Identical to [`Self::u_eff`] for Hellmann and Varshni. For Wei Hua the
    /// triple corresponds to a centrifugal term `kf beta^2 / (1 - a_shape e^{-beta r})^2`.
    pub fn nu_form_potential(&self, r: f64) -> f64 {
        match self.potential {
            PotentialSpec::WeiHua { depth, a_shape, beta } => {
                let x = (-beta * r).exp();
                let d = 1.0 - a_shape * x;
                let ratio = one_minus_exp(beta, r) / d;
                self.kappa_factor * beta * beta / (d * d) + depth * ratio * ratio
            }
            _ => self.u_eff(r),
        }
    }

    /// `lim_{r -> inf} U_eff`.
    pub fn threshold(&self) -> f64 {
        let beta = self.beta();
        let centrifugal = self.kappa_factor * beta * beta;
        centrifugal
            + match self.potential {
                PotentialSpec::Hellmann { a, .. } => -a * beta,
                PotentialSpec::WeiHua { depth, .. } => depth,
                PotentialSpec::Varshni { .. } => 0.0,
            }
    }

    /// NU variable: `e^{-beta r}`, or `a_shape e^{-beta r}` for Wei Hua.
    pub fn z_of_r(&self, r: f64) -> f64 {
        let x = (-self.beta() * r).exp();
        match self.potential {
            PotentialSpec::WeiHua { a_shape, .. } => a_shape * x,
            _ => x,
        }
    }

    pub fn r_of_z(&self, z: f64) -> f64 {
        let x = match self.potential {
            PotentialSpec::WeiHua { a_shape, .. } => z / a_shape,
            _ => z,
        };
        -x.ln() / self.beta()
    }

    pub fn coefficients(&self, eps: f64) -> CoefficientTriple {
        let beta = self.beta();
        let b2 = beta * beta;
        let kf = self.kappa_factor;
        match self.potential {
            PotentialSpec::Hellmann { a, b, .. } => CoefficientTriple {
                a1_sq: kf - (a * beta + eps) / b2,
                a2_sq: (beta * (a + b) + 2.0 * eps) / b2,
                a3_sq: -(b * beta + eps) / b2,
            },
            PotentialSpec::WeiHua { depth, a_shape, .. } => CoefficientTriple {
                a1_sq: kf - (eps - depth) / b2,
                a2_sq: -(2.0 * depth / a_shape - 2.0 * eps) / b2,
                a3_sq: -(eps - depth / (a_shape * a_shape)) / b2,
            },
            PotentialSpec::Varshni { a, b, .. } => CoefficientTriple {
                a1_sq: kf - eps / b2,
                a2_sq: -(a * b * beta - 2.0 * eps) / b2,
                a3_sq: -(eps - a * b * beta) / b2,
            },
        }
    }

    /// `a1^2 + a2^2 + a3^2 - kappa_factor`, independent of `eps`.
    pub fn coefficient_sum_offset(&self) -> f64 {
        match self.potential {
            PotentialSpec::WeiHua { depth, a_shape, beta } => {
                let t = 1.0 - 1.0 / a_shape;
                depth / (beta * beta) * t * t
            }
            _ => 0.0,
        }
    }

    /// `sigma = z(1-z)`, `tau_tilde = 1-z`, `sigma_tilde = -a1^2 - a2^2 z - a3^2 z^2`.
    pub fn nu_problem(&self, eps: f64) -> NuProblem {
        let c = self.coefficients(eps);
        NuProblem {
            sigma: Quadratic::new(0.0, 1.0, -1.0),
            tau_tilde: Quadratic::linear(1.0, -1.0),
            sigma_tilde: Quadratic::new(-c.a1_sq, -c.a2_sq, -c.a3_sq),
        }
    }

    /// Closure form of [`Self::nu_problem`] for the quantization residual.
    pub fn nu_problem_of(&self) -> impl Fn(f64) -> NuProblem + '_ {
        move |eps| self.nu_problem(eps)
    }

    /// `eps` produced by energy `E`.
    pub fn energy_to_epsilon(&self, energy: f64) -> f64 {
        self.symmetry.energy_product(energy) + self.epsilon_shift
    }

    /// Both real roots of `energy_product(E) = eps - epsilon_shift`, ascending.
    pub fn epsilon_to_energy(&self, eps: f64) -> Result<(f64, f64)> {
        let product = eps - self.epsilon_shift;
        let m = self.symmetry.mass();
        let c = self.symmetry.constant();
        // E^2 - c E + c0 = 0
        let c0 = if self.symmetry.is_spin() { m * c - m * m - product } else { -m * c - m * m - product };
        let discriminant = c * c - 4.0 * c0;
        if discriminant < 0.0 {
            return Err(Error::ComplexRoots { eps, discriminant });
        }
        let root = discriminant.sqrt();
        let q = 0.5 * (c + root.copysign(c));
        let (x1, x2) = if q == 0.0 { (0.0, 0.0) } else { (q, c0 / q) };
        Ok(if x1 <= x2 { (x1, x2) } else { (x2, x1) })
    }
}
