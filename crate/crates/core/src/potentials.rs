//! Hellmann, Wei Hua and Varshni potentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominators of the Wei Hua form below this magnitude are treated as a pole.
pub const WEI_HUA_POLE_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "potential", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// `V(r) = -a/r + (b/r) e^{-beta r}`
    Hellmann { a: f64, b: f64, beta: f64 },
    /// `V(r) = D [(1 - e^{-beta r}) / (1 - a_shape e^{-beta r})]^2`
    WeiHua { depth: f64, a_shape: f64, beta: f64 },
    /// `V(r) = a [1 - (b/r) e^{-beta r}]`
    Varshni { a: f64, b: f64, beta: f64 },
}

impl PotentialSpec {
    pub fn hellmann(a: f64, b: f64, beta: f64) -> Result<Self> {
        Self::Hellmann { a, b, beta }.validated()
    }

    pub fn wei_hua(depth: f64, a_shape: f64, beta: f64) -> Result<Self> {
        Self::WeiHua { depth, a_shape, beta }.validated()
    }

    pub fn varshni(a: f64, b: f64, beta: f64) -> Result<Self> {
        Self::Varshni { a, b, beta }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let finite = match self {
            Self::Hellmann { a, b, beta } | Self::Varshni { a, b, beta } => {
                a.is_finite() && b.is_finite() && beta.is_finite()
            }
            Self::WeiHua { depth, a_shape, beta } => {
                depth.is_finite() && a_shape.is_finite() && beta.is_finite()
            }
        };
        if !finite {
            return Err(Error::InvalidParameter(format!("non-finite parameter in {self:?}")));
        }
        if self.beta() <= 0.0 {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {}", self.beta())));
        }
        if let Self::WeiHua { depth, a_shape, .. } = self {
            if depth <= 0.0 {
                return Err(Error::InvalidParameter(format!("D must be positive, got {depth}")));
            }
            // a_shape >= 1 puts a pole at r = ln(a_shape)/beta; a_shape = 0
            // collapses the NU variable z = a_shape e^{-beta r}
            if a_shape >= 1.0 || a_shape == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "Wei Hua shape parameter must satisfy a_shape < 1, a_shape != 0; got {a_shape}"
                )));
            }
        }
        Ok(self)
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Self::Hellmann { beta, .. } | Self::WeiHua { beta, .. } | Self::Varshni { beta, .. } => beta,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Hellmann { .. } => "hellmann",
            Self::WeiHua { .. } => "wei_hua",
            Self::Varshni { .. } => "varshni",
        }
    }

    /// Pointwise potential value.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain { r });
        }
        let v = match *self {
            Self::Hellmann { a, b, beta } => {
                if a == b {
                    // a (e^{-beta r} - 1)/r without cancellation
                    a * (-beta * r).exp_m1() / r
                } else {
                    (-a + b * (-beta * r).exp()) / r
                }
            }
            Self::WeiHua { depth, a_shape, beta } => {
                let x = (-beta * r).exp();
                let denominator = 1.0 - a_shape * x;
                if denominator.abs() < WEI_HUA_POLE_GUARD {
                    return Err(Error::Pole { r, denominator });
                }
                let ratio = -(-beta * r).exp_m1() / denominator;
                depth * ratio * ratio
            }
            Self::Varshni { a, b, beta } => a * (1.0 - b / r * (-beta * r).exp()),
        };
        Ok(v)
    }

    /// Uniform samples `(r, V)` on `[r_min, r_max]`, endpoints included.
    pub fn curve(&self, r_min: f64, r_max: f64, samples: usize) -> Result<Vec<(f64, f64)>> {
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::InvalidParameter(format!(
                "curve range needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if samples < 2 {
            return Err(Error::InvalidParameter(format!("curve needs >= 2 samples, got {samples}")));
        }
        let step = (r_max - r_min) / (samples - 1) as f64;
        (0..samples)
            .map(|i| {
                let r = if i == samples - 1 { r_max } else { r_min + step * i as f64 };
                self.evaluate(r).map(|v| (r, v))
            })
            .collect()
    }
}

/// `beta^2 / (1 - e^{-beta r})^2`, the exponential stand-in for `1/r^2`.
pub fn centrifugal_approx(beta: f64, r: f64) -> f64 {
    let d = -(-beta * r).exp_m1();
    beta * beta / (d * d)
}
