use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid NU problem: {0}")]
    InvalidProblem(String),

    #[error("radius must be positive, got r = {r}")]
    Domain { r: f64 },

    #[error("potential pole at r = {r} (denominator {denominator:e})")]
    Pole { r: f64, denominator: f64 },

    #[error("invalid quantum numbers n = {n}, kappa = {kappa}: {reason}")]
    InvalidQuantumNumbers { n: u32, kappa: i32, reason: &'static str },

    #[error("no real energy for eps = {eps:e}: discriminant {discriminant:e} < 0")]
    ComplexRoots { eps: f64, discriminant: f64 },

    #[error("factor exponents need sigma = c*z*(1-z), got {0}")]
    UnsupportedSigma(String),

    #[error("selected NU branch is not admissible at eps = {eps:e}")]
    BranchVanished { eps: f64 },

    #[error("no bound state for n = {n}, kappa = {kappa}")]
    NoBoundState { n: u32, kappa: i32 },

    #[error("symmetry-limit factor {factor:e} is too close to zero")]
    SymmetryLimit { factor: f64 },

    #[error("wavefunction has zero norm")]
    ZeroNorm,

    #[error("non-uniform or too short grid: {0}")]
    BadGrid(String),

    #[error("effective potential is not finite at r = {r}")]
    PotentialPole { r: f64 },

    #[error("eigenvalue {level} did not converge: {detail}")]
    NonConvergence { level: usize, detail: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
