//! Python bindings: potentials, symmetry limits, energies, spinor
//! components and the finite-difference oracle.

use dirac_nu::oracle::OracleConfig;
use dirac_nu::potentials::PotentialSpec;
use dirac_nu::reduction::{QuantumNumbers, SymmetryCase};
use dirac_nu::spectra::{self, EnergyLevel, Method, Mode};
use dirac_nu::tables;
use dirac_nu::wavefunctions::{self, ExponentSource, JacobiParams};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: dirac_nu::Error) -> PyErr {
    use dirac_nu::Error::*;
    match e {
        InvalidParameter(_) | InvalidQuantumNumbers { .. } | InvalidConfig(_) | Domain { .. } | BadGrid(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn mode(name: &str) -> PyResult<Mode> {
    name.parse().map_err(|e: dirac_nu::Error| PyValueError::new_err(e.to_string()))
}

#[pyclass(name = "Potential", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyPotential(PotentialSpec);

#[pymethods]
impl PyPotential {
    #[staticmethod]
    fn hellmann(a: f64, b: f64, beta: f64) -> PyResult<Self> {
        PotentialSpec::hellmann(a, b, beta).map(Self).map_err(err)
    }

    #[staticmethod]
    fn wei_hua(depth: f64, a: f64, beta: f64) -> PyResult<Self> {
        PotentialSpec::wei_hua(depth, a, beta).map(Self).map_err(err)
    }

    #[staticmethod]
    fn varshni(a: f64, b: f64, beta: f64) -> PyResult<Self> {
        PotentialSpec::varshni(a, b, beta).map(Self).map_err(err)
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    fn __call__(&self, r: f64) -> PyResult<f64> {
        self.0.evaluate(r).map_err(err)
    }

    #[pyo3(signature = (r_min, r_max, samples = 500))]
    fn curve(&self, r_min: f64, r_max: f64, samples: usize) -> PyResult<Vec<(f64, f64)>> {
        self.0.curve(r_min, r_max, samples).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "Symmetry", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PySymmetry(SymmetryCase);

#[pymethods]
impl PySymmetry {
    #[staticmethod]
    fn spin(a1: f64, mass: f64) -> PyResult<Self> {
        SymmetryCase::spin(a1, mass).map(Self).map_err(err)
    }

    #[staticmethod]
    fn pseudospin(a2: f64, mass: f64) -> PyResult<Self> {
        SymmetryCase::pseudospin(a2, mass).map(Self).map_err(err)
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass()
    }

    #[getter]
    fn constant(&self) -> f64 {
        self.0.constant()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "Level", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyLevel {
    n: u32,
    kappa: i32,
    eps: f64,
    e_minus: f64,
    e_plus: f64,
    selected: f64,
    method: String,
    normalizable: Option<bool>,
}

impl From<EnergyLevel> for PyLevel {
    fn from(l: EnergyLevel) -> Self {
        let method = match l.method {
            Method::ClosedForm => "closed_form",
            Method::NuRootfind => "nu",
            Method::Oracle => "oracle",
        }
        .to_owned();
        Self {
            n: l.n,
            kappa: l.kappa,
            eps: l.eps,
            e_minus: l.e_minus,
            e_plus: l.e_plus,
            selected: l.selected,
            method,
            normalizable: l.normalizable,
        }
    }
}

#[pymethods]
impl PyLevel {
    fn __repr__(&self) -> String {
        format!(
            "Level(n={}, kappa={}, eps={:e}, selected={}, method={})",
            self.n, self.kappa, self.eps, self.selected, self.method
        )
    }
}

fn qn(n: u32, kappa: i32) -> PyResult<QuantumNumbers> {
    QuantumNumbers::new(n, kappa).map_err(err)
}

/// Closed-form energy of `(n, kappa)`.
#[pyfunction]
#[pyo3(signature = (potential, symmetry, n, kappa, mode = "table-consistent"))]
fn energy_closed_form(potential: PyPotential, symmetry: PySymmetry, n: u32, kappa: i32, mode: &str) -> PyResult<PyLevel> {
    spectra::energy_closed_form(potential.0, symmetry.0, qn(n, kappa)?, self::mode(mode)?).map(Into::into).map_err(err)
}

/// Every root of the NU quantization condition in the default bracket.
#[pyfunction]
#[pyo3(signature = (potential, symmetry, n, kappa, mode = "table-consistent"))]
fn energy_nu(potential: PyPotential, symmetry: PySymmetry, n: u32, kappa: i32, mode: &str) -> PyResult<Vec<PyLevel>> {
    let (qn, mode) = (qn(n, kappa)?, self::mode(mode)?);
    let reduced = spectra::reduced_for_mode(potential.0, symmetry.0, qn, mode);
    let bracket = spectra::default_bracket(&reduced);
    Ok(spectra::energy_nu(potential.0, symmetry.0, qn, mode, bracket, spectra::DEFAULT_NU_TOLERANCE)
        .into_iter()
        .map(Into::into)
        .collect())
}

/// Finite-difference eigenvalue of the same radial equation.
#[pyfunction]
#[pyo3(signature = (potential, symmetry, n, kappa, mode = "table-consistent", r_min = None, r_max = None, points = None))]
#[allow(clippy::too_many_arguments)]
fn energy_oracle(
    potential: PyPotential,
    symmetry: PySymmetry,
    n: u32,
    kappa: i32,
    mode: &str,
    r_min: Option<f64>,
    r_max: Option<f64>,
    points: Option<usize>,
) -> PyResult<PyLevel> {
    let mut config = OracleConfig::for_beta(potential.0.beta());
    config.r_min = r_min.unwrap_or(config.r_min);
    config.r_max = r_max.unwrap_or(config.r_max);
    config.points = points.unwrap_or(config.points);
    config.validate().map_err(err)?;
    spectra::energy_oracle(potential.0, symmetry.0, qn(n, kappa)?, self::mode(mode)?, &config)
        .map(Into::into)
        .map_err(err)
}

/// `(r, F, G)` of the NU level, normalized on a uniform grid.
#[pyfunction]
#[pyo3(signature = (potential, symmetry, n, kappa, r_min, r_max, points = 2000, exponents = "engine", mode = "table-consistent"))]
#[allow(clippy::too_many_arguments)]
fn wavefunction(
    potential: PyPotential,
    symmetry: PySymmetry,
    n: u32,
    kappa: i32,
    r_min: f64,
    r_max: f64,
    points: usize,
    exponents: &str,
    mode: &str,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let source = match exponents {
        "engine" => ExponentSource::Engine,
        "printed" => ExponentSource::Printed,
        other => return Err(PyValueError::new_err(format!("exponents must be engine or printed, got {other}"))),
    };
    let (qn, mode) = (qn(n, kappa)?, self::mode(mode)?);
    let reduced = spectra::reduced_for_mode(potential.0, symmetry.0, qn, mode);
    let levels = spectra::energy_nu(
        potential.0,
        symmetry.0,
        qn,
        mode,
        spectra::default_bracket(&reduced),
        spectra::DEFAULT_NU_TOLERANCE,
    );
    let level = spectra::preferred_nu_level(&levels)
        .ok_or_else(|| err(dirac_nu::Error::NoBoundState { n, kappa }))?;
    let grid = wavefunctions::uniform_grid(r_min, r_max, points).map_err(err)?;
    let s = wavefunctions::radial_solution(&reduced, &level, source, &grid).map_err(err)?;
    Ok((s.grid, s.F, s.G))
}

/// `P_n^{(p, q)}(x)`.
#[pyfunction]
fn jacobi(n: u32, p: f64, q: f64, x: f64) -> f64 {
    wavefunctions::jacobi(JacobiParams::new(n, p, q), x)
}

#[pyfunction]
fn jacobi_derivative(n: u32, p: f64, q: f64, x: f64) -> f64 {
    wavefunctions::jacobi_derivative(JacobiParams::new(n, p, q), x)
}

/// Rows `(l, n, kappa, E, published)` of a built-in reference table.
#[pyfunction]
#[pyo3(signature = (id, mode = "table-consistent"))]
fn table(id: u8, mode: &str) -> PyResult<Vec<(u32, u32, i32, Option<f64>, f64)>> {
    let t = tables::evaluate_table(id, self::mode(mode)?).map_err(err)?;
    Ok(t.rows
        .iter()
        .map(|r| (r.ell, r.n, r.kappa, r.level.as_ref().ok().map(|l| l.selected), r.published))
        .collect())
}

#[pymodule]
fn dirac_nu_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_class::<PySymmetry>()?;
    m.add_class::<PyLevel>()?;
    m.add_function(wrap_pyfunction!(energy_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(energy_nu, m)?)?;
    m.add_function(wrap_pyfunction!(energy_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(wavefunction, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    Ok(())
}
