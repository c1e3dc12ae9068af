//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 usage or validation error, 2 no bound state,
//! 3 verification failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::oracle::{
    self, boundary_check, compare, discretize, lowest_eigenvalues, ComparisonInput, ComparisonReport, OracleConfig,
};
use crate::potentials::PotentialSpec;
use crate::reduction::{QuantumNumbers, SymmetryCase};
use crate::spectra::{
    default_bracket, energy_closed_form, energy_nu, level_from_epsilon, preferred_nu_level, reduced_for_mode, spectrum,
    EnergyLevel, Method, Mode, SpectrumRequest, DEFAULT_NU_TOLERANCE,
};
use crate::tables::evaluate_table;
use crate::wavefunctions::{radial_solution, uniform_grid, ExponentSource, RadialSolution};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NO_BOUND_STATE: u8 = 2;
pub const EXIT_VERIFICATION: u8 = 3;

/// Relative `eps` agreement required between NU roots and the oracle.
pub const VERIFY_RTOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "dirac-nu", version, about = "Dirac spin/pseudospin bound states by the Nikiforov-Uvarov method")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reproduce one of the six reference tables.
    Table(TableArgs),
    /// Energy levels over ranges of n and kappa.
    Spectrum(RunArgs),
    /// Normalized radial spinor of one level.
    Wavefunction(WaveArgs),
    /// Sample a potential.
    Curve(CurveArgs),
    /// Cross-check closed form, NU roots and the finite-difference oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKey {
    Hellmann,
    #[value(alias = "wei_hua")]
    WeiHua,
    Varshni,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryKey {
    Spin,
    Pseudospin,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Table number, 1 to 6.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
    pub id: u8,
    #[arg(long, default_value = "table-consistent")]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write the JSON comparison report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration; flags given alongside override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub potential: Option<PotentialKey>,
    /// Potential parameter, e.g. `--param a=0.25` (repeatable).
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    #[arg(long, value_enum)]
    pub symmetry: Option<SymmetryKey>,
    #[arg(long, allow_hyphen_values = true)]
    pub mass: Option<f64>,
    /// A1 for spin symmetry, A2 for pseudospin symmetry.
    #[arg(long = "sym-const", allow_hyphen_values = true)]
    pub sym_const: Option<f64>,
    /// `a..b` (inclusive) or a single value.
    #[arg(long = "n", value_parser = parse_range::<u32>)]
    pub n_range: Option<[u32; 2]>,
    /// `a..b` (inclusive, zero skipped) or a single value.
    #[arg(long = "kappa", value_parser = parse_range::<i32>, allow_hyphen_values = true)]
    pub kappa_range: Option<[i32; 2]>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the effective configuration as JSON.
    #[arg(long = "emit-config")]
    pub emit_config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExponentChoice {
    Engine,
    Printed,
    Both,
}

#[derive(Debug, Args)]
pub struct WaveArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = ExponentChoice::Engine)]
    pub exponents: ExponentChoice,
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
    /// Defaults to 1e-3/beta.
    #[arg(long = "r-min")]
    pub r_min: Option<f64>,
    /// Defaults to 30/beta.
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub potential: PotentialKey,
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    #[arg(long = "r-min", default_value_t = 0.5)]
    pub r_min: f64,
    #[arg(long = "r-max", default_value_t = 50.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Run the particle-in-a-box self-test instead.
    #[arg(long)]
    pub selftest: bool,
    /// Oracle domain, defaults to 1e-6/beta.
    #[arg(long = "r-min")]
    pub r_min: Option<f64>,
    /// Oracle domain, defaults to 30/beta.
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long = "richardson-steps")]
    pub richardson_steps: Option<usize>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value for '{k}': {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_range<T>(s: &str) -> Result<[T; 2], String>
where
    T: std::str::FromStr + PartialOrd + Copy,
    T::Err: std::fmt::Display,
{
    let parse = |t: &str| t.trim().parse::<T>().map_err(|e| format!("bad range bound '{t}': {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range '{s}'"));
    }
    Ok([lo, hi])
}

/// Effective run configuration; its JSON form mirrors these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialKey,
    pub params: BTreeMap<String, f64>,
    pub symmetry: SymmetryKey,
    pub m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    pub n_range: [u32; 2],
    pub kappa_range: [i32; 2],
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// A failed command: message for stderr and its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoBoundState { .. } => EXIT_NO_BOUND_STATE,
            Error::NonConvergence { .. } => EXIT_VERIFICATION,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

fn param(params: &BTreeMap<String, f64>, names: &[&str]) -> Result<f64, Failure> {
    names
        .iter()
        .find_map(|n| params.get(*n).copied())
        .ok_or_else(|| Failure::usage(format!("missing parameter '{}'", names[0])))
}

/// Builds a validated potential from `--param` values.
pub fn build_potential(key: PotentialKey, params: &BTreeMap<String, f64>) -> Result<PotentialSpec, Failure> {
    let allowed: &[&str] = match key {
        PotentialKey::Hellmann | PotentialKey::Varshni => &["a", "b", "beta"],
        PotentialKey::WeiHua => &["a", "D", "d", "depth", "beta"],
    };
    if let Some(unknown) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Failure::usage(format!("parameter '{unknown}' does not apply to {key:?}")));
    }
    let spec = match key {
        PotentialKey::Hellmann => {
            PotentialSpec::hellmann(param(params, &["a"])?, param(params, &["b"])?, param(params, &["beta"])?)
        }
        PotentialKey::WeiHua => PotentialSpec::wei_hua(
            param(params, &["D", "d", "depth"])?,
            param(params, &["a"])?,
            param(params, &["beta"])?,
        ),
        PotentialKey::Varshni => {
            PotentialSpec::varshni(param(params, &["a"])?, param(params, &["b"])?, param(params, &["beta"])?)
        }
    };
    spec.map_err(Failure::from)
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self, Failure> {
        let mut config = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
                Some(
                    serde_json::from_str::<RunConfig>(&text)
                        .map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))?,
                )
            }
            None => None,
        };
        let missing = |what: &str| Failure::usage(format!("--{what} is required without --config"));
        let mut c = match config.take() {
            Some(c) => c,
            None => RunConfig {
                potential: args.potential.ok_or_else(|| missing("potential"))?,
                params: BTreeMap::new(),
                symmetry: args.symmetry.ok_or_else(|| missing("symmetry"))?,
                m: args.mass.ok_or_else(|| missing("mass"))?,
                a1: None,
                a2: None,
                n_range: args.n_range.ok_or_else(|| missing("n"))?,
                kappa_range: args.kappa_range.ok_or_else(|| missing("kappa"))?,
                mode: Mode::default(),
                method: Method::default(),
                out: None,
                format: Format::default(),
            },
        };
        if let Some(p) = args.potential {
            if p != c.potential {
                c.params.clear();
            }
            c.potential = p;
        }
        c.params.extend(args.params.iter().cloned());
        if let Some(s) = args.symmetry {
            if s != c.symmetry {
                let v = c.a1.or(c.a2);
                (c.a1, c.a2) = match s {
                    SymmetryKey::Spin => (v, None),
                    SymmetryKey::Pseudospin => (None, v),
                };
            }
            c.symmetry = s;
        }
        if let Some(m) = args.mass {
            c.m = m;
        }
        if let Some(v) = args.sym_const {
            match c.symmetry {
                SymmetryKey::Spin => (c.a1, c.a2) = (Some(v), None),
                SymmetryKey::Pseudospin => (c.a1, c.a2) = (None, Some(v)),
            }
        }
        if let Some(r) = args.n_range {
            c.n_range = r;
        }
        if let Some(r) = args.kappa_range {
            c.kappa_range = r;
        }
        if let Some(m) = args.mode {
            c.mode = m;
        }
        if let Some(m) = args.method {
            c.method = m;
        }
        if args.out.is_some() {
            c.out.clone_from(&args.out);
        }
        if let Some(f) = args.format {
            c.format = f;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        match (self.symmetry, self.a1, self.a2) {
            (SymmetryKey::Spin, Some(_), None) | (SymmetryKey::Pseudospin, None, Some(_)) => {}
            (SymmetryKey::Spin, _, _) => return Err(Failure::usage("spin symmetry needs A1 (and no A2)")),
            (SymmetryKey::Pseudospin, _, _) => return Err(Failure::usage("pseudospin symmetry needs A2 (and no A1)")),
        }
        if self.n_range[0] > self.n_range[1] || self.kappa_range[0] > self.kappa_range[1] {
            return Err(Failure::usage("empty n or kappa range"));
        }
        if self.kappa_values().is_empty() {
            return Err(Failure::usage("kappa range contains only 0"));
        }
        self.potential_spec()?;
        self.symmetry_case()?;
        Ok(())
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec, Failure> {
        build_potential(self.potential, &self.params)
    }

    pub fn symmetry_case(&self) -> Result<SymmetryCase, Failure> {
        let sym = match self.symmetry {
            SymmetryKey::Spin => SymmetryCase::spin(self.a1.unwrap_or(f64::NAN), self.m),
            SymmetryKey::Pseudospin => SymmetryCase::pseudospin(self.a2.unwrap_or(f64::NAN), self.m),
        };
        sym.map_err(Failure::from)
    }

    pub fn n_values(&self) -> Vec<u32> {
        (self.n_range[0]..=self.n_range[1]).collect()
    }

    pub fn kappa_values(&self) -> Vec<i32> {
        (self.kappa_range[0]..=self.kappa_range[1]).filter(|&k| k != 0).collect()
    }

    pub fn request(&self) -> Result<SpectrumRequest, Failure> {
        Ok(SpectrumRequest {
            potential: self.potential_spec()?,
            symmetry: self.symmetry_case()?,
            n_values: self.n_values(),
            kappa_values: self.kappa_values(),
            mode: self.mode,
            method: self.method,
            oracle: None,
        })
    }
}

/// Twelve significant digits.
pub fn fmt_sig(v: f64) -> String {
    format!("{v:.11e}")
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(content.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Failure::usage(format!("cannot write to stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable output");
    s.push('\n');
    s
}

/// Parses and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: &Cli) -> u8 {
    let outcome = match &cli.command {
        Command::Table(a) => cmd_table(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Wavefunction(a) => cmd_wavefunction(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct TableJsonRow {
    l: u32,
    n: u32,
    kappa: i32,
    #[serde(rename = "E")]
    e: Option<f64>,
    paper_E: f64,
    delta: Option<f64>,
}

pub fn cmd_table(args: &TableArgs) -> Result<u8, Failure> {
    let outcome = evaluate_table(args.id, args.mode)?;
    let report = outcome.report();
    let body = match args.format {
        Format::Csv => {
            let mut s = String::from("l,n,kappa,E,paper_E,delta,flag\n");
            for (row, rep) in outcome.rows.iter().zip(&report.rows) {
                let (e, delta, flag) = match &row.level {
                    Ok(l) => (format!("{:.7}", l.selected), fmt_sig(l.selected - row.published), flag_name(rep.flag)),
                    Err(_) => (String::new(), String::new(), "NO_BOUND_STATE".to_string()),
                };
                let _ = writeln!(s, "{},{},{},{e},{:.7},{delta},{flag}", row.ell, row.n, row.kappa, row.published);
            }
            s
        }
        Format::Json => {
            let rows: Vec<TableJsonRow> = outcome
                .rows
                .iter()
                .map(|r| TableJsonRow {
                    l: r.ell,
                    n: r.n,
                    kappa: r.kappa,
                    e: r.level.as_ref().ok().map(|l| l.selected),
                    paper_E: r.published,
                    delta: r.delta(),
                })
                .collect();
            to_json(&rows)
        }
    };
    write_output(args.out.as_deref(), &body)?;
    if let Some(path) = &args.report {
        fs::write(path, report.to_json() + "\n")
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }

    let tol = outcome.fixture.gate.tolerance();
    eprintln!(
        "table {}: {}/{} rows within {tol:e}, anchors {}",
        args.id,
        outcome.count_within(tol),
        outcome.rows.len(),
        if outcome.anchors_ok() { "ok" } else { "MISSED" }
    );
    for row in outcome.mismatches() {
        match row.delta() {
            Some(d) => eprintln!("  mismatch n={} kappa={}: delta {d:+.3e}", row.n, row.kappa),
            None => eprintln!("  mismatch n={} kappa={}: no bound state", row.n, row.kappa),
        }
    }
    match outcome.gate_passed() {
        Some(false) => {
            eprintln!("table {}: acceptance gate FAILED", args.id);
            Ok(EXIT_VERIFICATION)
        }
        None => {
            eprintln!("table {}: report only", args.id);
            Ok(if outcome.has_unbound_rows() { EXIT_NO_BOUND_STATE } else { EXIT_OK })
        }
        Some(true) => Ok(if outcome.has_unbound_rows() { EXIT_NO_BOUND_STATE } else { EXIT_OK }),
    }
}

fn flag_name(flag: oracle::ComparisonFlag) -> String {
    serde_json::to_value(flag)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn emit_config(args: &RunArgs, config: &RunConfig) -> Result<(), Failure> {
    if let Some(path) = &args.emit_config {
        fs::write(path, to_json(config))
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct SpectrumJsonRow {
    n: u32,
    kappa: i32,
    l: Option<u32>,
    j: Option<f64>,
    eps: Option<f64>,
    E_minus: Option<f64>,
    E_plus: Option<f64>,
    selected: Option<f64>,
    flag: &'static str,
}

fn row_flag(outcome: &Result<EnergyLevel, Error>) -> &'static str {
    match outcome {
        Ok(l) if l.normalizable == Some(false) => "NON_NORMALIZABLE",
        Ok(_) => "OK",
        Err(Error::InvalidQuantumNumbers { .. }) => "SINGULAR",
        Err(Error::NoBoundState { .. } | Error::ComplexRoots { .. }) => "NO_BOUND_STATE",
        Err(_) => "ERROR",
    }
}

pub fn cmd_spectrum(args: &RunArgs) -> Result<u8, Failure> {
    let config = RunConfig::from_args(args)?;
    emit_config(args, &config)?;
    let rows = spectrum(&config.request()?)?;
    let json_rows: Vec<SpectrumJsonRow> = rows
        .iter()
        .map(|row| {
            let qn = QuantumNumbers::new(row.n, row.kappa).ok();
            let level = row.outcome.as_ref().ok();
            SpectrumJsonRow {
                n: row.n,
                kappa: row.kappa,
                l: qn.map(|q| q.ell()),
                j: qn.map(|q| q.j()),
                eps: level.map(|l| l.eps),
                E_minus: level.map(|l| l.e_minus),
                E_plus: level.map(|l| l.e_plus),
                selected: level.map(|l| l.selected),
                flag: row_flag(&row.outcome),
            }
        })
        .collect();
    let body = match config.format {
        Format::Json => to_json(&json_rows),
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
            let mut s = String::from("n,kappa,l,j,eps,E_minus,E_plus,selected,flag\n");
            for r in &json_rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.n,
                    r.kappa,
                    r.l.map(|v| v.to_string()).unwrap_or_default(),
                    r.j.map(|v| v.to_string()).unwrap_or_default(),
                    opt(r.eps),
                    opt(r.E_minus),
                    opt(r.E_plus),
                    opt(r.selected),
                    r.flag
                );
            }
            s
        }
    };
    write_output(config.out.as_deref(), &body)?;
    for row in &rows {
        if let Err(e) = &row.outcome {
            eprintln!("n={} kappa={}: {e}", row.n, row.kappa);
        }
    }
    let absent = json_rows.iter().any(|r| r.flag == "NO_BOUND_STATE");
    Ok(if absent { EXIT_NO_BOUND_STATE } else { EXIT_OK })
}

/// The single `(n, kappa)` a wavefunction run refers to.
fn single_level(config: &RunConfig) -> Result<QuantumNumbers, Failure> {
    let (ns, ks) = (config.n_values(), config.kappa_values());
    if ns.len() != 1 || ks.len() != 1 {
        return Err(Failure::usage("wavefunction needs a single n and a single kappa"));
    }
    QuantumNumbers::new(ns[0], ks[0]).map_err(Failure::from)
}

pub fn cmd_wavefunction(args: &WaveArgs) -> Result<u8, Failure> {
    let config = RunConfig::from_args(&args.run)?;
    emit_config(&args.run, &config)?;
    let qn = single_level(&config)?;
    let (potential, symmetry) = (config.potential_spec()?, config.symmetry_case()?);
    let reduced = reduced_for_mode(potential, symmetry, qn, config.mode);
    let beta = potential.beta();
    let grid = uniform_grid(args.r_min.unwrap_or(1e-3 / beta), args.r_max.unwrap_or(30.0 / beta), args.points)?;

    // exponents are only exact at a quantized eps, so levels come from NU roots
    let levels = energy_nu(potential, symmetry, qn, config.mode, default_bracket(&reduced), DEFAULT_NU_TOLERANCE);
    let level = preferred_nu_level(&levels).ok_or(Error::NoBoundState { n: qn.n(), kappa: qn.kappa() })?;

    let sources: &[ExponentSource] = match args.exponents {
        ExponentChoice::Engine => &[ExponentSource::Engine],
        ExponentChoice::Printed => &[ExponentSource::Printed],
        ExponentChoice::Both => &[ExponentSource::Engine, ExponentSource::Printed],
    };
    let mut solutions: Vec<RadialSolution> = Vec::new();
    let mut code = EXIT_OK;
    for &source in sources {
        let sol = radial_solution(&reduced, &level, source, &grid)?;
        if !sol.factorization.normalizable {
            let e = sol.factorization.exponents;
            let what = match source {
                ExponentSource::Engine => "engine",
                ExponentSource::Printed => "printed",
            };
            let message = format!(
                "{what} exponents are not normalizable: alpha = -a1 = {:.6} (needs > 0), gamma = {:.6}",
                e.alpha, e.gamma
            );
            if args.exponents == ExponentChoice::Both && source == ExponentSource::Printed {
                eprintln!("warning: {message}");
            } else {
                eprintln!("error: {message}");
                code = EXIT_NO_BOUND_STATE;
            }
        }
        solutions.push(sol);
    }
    if args.exponents != ExponentChoice::Both && code != EXIT_OK {
        return Ok(code);
    }

    let body = match config.format {
        Format::Json => to_json(&solutions),
        Format::Csv => {
            let mut s = String::from(if solutions.len() == 1 { "r,F,G\n" } else { "r,F_engine,G_engine,F_printed,G_printed\n" });
            for i in 0..grid.len() {
                s.push_str(&fmt_sig(grid[i]));
                for sol in &solutions {
                    let _ = write!(s, ",{},{}", fmt_sig(sol.F[i]), fmt_sig(sol.G[i]));
                }
                s.push('\n');
            }
            s
        }
    };
    write_output(config.out.as_deref(), &body)?;
    Ok(code)
}

pub fn cmd_curve(args: &CurveArgs) -> Result<u8, Failure> {
    let params: BTreeMap<String, f64> = args.params.iter().cloned().collect();
    let spec = build_potential(args.potential, &params)?;
    let samples = spec.curve(args.r_min, args.r_max, args.samples)?;
    let body = match args.format {
        Format::Json => {
            let rows: Vec<BTreeMap<&str, f64>> =
                samples.iter().map(|&(r, v)| BTreeMap::from([("r", r), ("V", v)])).collect();
            to_json(&rows)
        }
        Format::Csv => {
            let mut s = String::from("r,V\n");
            for (r, v) in samples {
                let _ = writeln!(s, "{},{}", fmt_sig(r), fmt_sig(v));
            }
            s
        }
    };
    write_output(args.out.as_deref(), &body)?;
    Ok(EXIT_OK)
}

/// Outcome of verifying one `(n, kappa)` row.
#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub input: ComparisonInput,
    pub diagnostics: Vec<String>,
    pub failed: bool,
}

/// Closed form, NU root and oracle for one row; `failed` marks a
/// verification failure, `input.oracle_unbound` an absent bound state.
pub fn verify_row(
    potential: PotentialSpec,
    symmetry: SymmetryCase,
    n: u32,
    kappa: i32,
    mode: Mode,
    oracle_config: &OracleConfig,
) -> VerifyRow {
    let mut input = ComparisonInput { n, kappa, ..ComparisonInput::default() };
    let mut diagnostics = Vec::new();
    let Ok(qn) = QuantumNumbers::new(n, kappa) else {
        return VerifyRow { input, diagnostics, failed: false };
    };
    let reduced = reduced_for_mode(potential, symmetry, qn, mode);
    input.closed_form = energy_closed_form(potential, symmetry, qn, mode).ok();
    let nu_levels = energy_nu(potential, symmetry, qn, mode, default_bracket(&reduced), DEFAULT_NU_TOLERANCE);
    input.nu = preferred_nu_level(&nu_levels);

    let mut failed = false;
    match boundary_check(&reduced, n as usize, oracle_config) {
        Err(e) => {
            diagnostics.push(format!("oracle: {e}"));
            failed = true;
        }
        Ok(check) => {
            let threshold = reduced.threshold();
            if !check.converged(VERIFY_RTOL) {
                failed = true;
                diagnostics.push(format!(
                    "oracle not converged in the domain: eps {:.9e}, r_max doubled {:.9e}, r_min halved {:.9e}, error estimate {:.2e}",
                    check.eps, check.eps_r_max_doubled, check.eps_r_min_halved, check.error_estimate
                ));
            }
            if check.eps >= threshold {
                input.oracle_unbound = true;
                diagnostics.push(format!(
                    "oracle level {:.9e} is not below the continuum threshold {threshold:.9e}",
                    check.eps
                ));
            } else {
                input.oracle = level_from_epsilon(&reduced, check.eps, Method::Oracle, mode).ok();
                match &input.nu {
                    Some(nu) => {
                        let rel = (nu.eps - check.eps).abs() / check.eps.abs();
                        if rel > VERIFY_RTOL {
                            failed = true;
                            diagnostics.push(format!(
                                "NU eps {:.12e} vs oracle {:.12e}: relative gap {rel:.2e}",
                                nu.eps, check.eps
                            ));
                        }
                    }
                    None => {
                        failed = true;
                        diagnostics.push("oracle binds a level NU root finding did not find".into());
                    }
                }
            }
        }
    }
    VerifyRow { input, diagnostics, failed }
}

/// Report plus exit code for a batch of rows.
pub fn verify_rows(rows: &[VerifyRow]) -> (ComparisonReport, u8) {
    let inputs: Vec<ComparisonInput> = rows.iter().map(|r| r.input.clone()).collect();
    let report = compare(&inputs, VERIFY_RTOL);
    let code = if rows.iter().any(|r| r.failed) {
        EXIT_VERIFICATION
    } else if rows.iter().any(|r| r.input.oracle_unbound && r.input.closed_form.is_some()) {
        EXIT_NO_BOUND_STATE
    } else {
        EXIT_OK
    };
    (report, code)
}

/// Lowest three box levels on `[0, 1]`: raw at 4000 points and extrapolated.
pub fn box_selftest() -> Result<(Vec<(f64, f64, f64)>, bool), Error> {
    let config = OracleConfig { r_min: 0.0, r_max: 1.0, points: 4000, levels_wanted: 3, richardson_steps: 2 };
    let raw = lowest_eigenvalues(&discretize(|_| 0.0, 0.0, 1.0, config.points)?, 3);
    let extrapolated = oracle::solve(|_| 0.0, &config)?.eigenvalues;
    let mut ok = true;
    let rows = (0..3)
        .map(|k| {
            let exact = ((k + 1) as f64 * std::f64::consts::PI).powi(2);
            let raw_rel = (raw[k] - exact).abs() / exact;
            let ext_rel = (extrapolated[k] - exact).abs() / exact;
            ok &= raw_rel < 1e-3 && ext_rel < 1e-6;
            (exact, raw_rel, ext_rel)
        })
        .collect();
    Ok((rows, ok))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    if args.selftest {
        let (rows, ok) = box_selftest()?;
        for (k, (exact, raw_rel, ext_rel)) in rows.iter().enumerate() {
            println!(
                "box k={}: exact {} raw residual {raw_rel:.3e} extrapolated residual {ext_rel:.3e}",
                k + 1,
                fmt_sig(*exact)
            );
        }
        return Ok(if ok { EXIT_OK } else { EXIT_VERIFICATION });
    }
    let config = RunConfig::from_args(&args.run)?;
    emit_config(&args.run, &config)?;
    let (potential, symmetry) = (config.potential_spec()?, config.symmetry_case()?);
    let beta = potential.beta();
    let defaults = OracleConfig::for_beta(beta);
    let oracle_config = OracleConfig {
        r_min: args.r_min.unwrap_or(defaults.r_min),
        r_max: args.r_max.unwrap_or(defaults.r_max),
        points: args.points.unwrap_or(defaults.points),
        richardson_steps: args.richardson_steps.unwrap_or(defaults.richardson_steps),
        ..defaults
    };
    oracle_config.validate()?;
    let pairs: Vec<(u32, i32)> = config
        .n_values()
        .into_iter()
        .flat_map(|n| config.kappa_values().into_iter().map(move |k| (n, k)))
        .collect();
    let rows: Vec<VerifyRow> = pairs
        .par_iter()
        .map(|&(n, k)| verify_row(potential, symmetry, n, k, config.mode, &oracle_config))
        .collect();
    let (report, code) = verify_rows(&rows);
    write_output(config.out.as_deref(), &(report.to_json() + "\n"))?;
    for row in &rows {
        for d in &row.diagnostics {
            eprintln!("n={} kappa={}: {d}", row.input.n, row.input.kappa);
        }
    }
    Ok(code)
}
