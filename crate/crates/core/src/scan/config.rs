//! JSON run configurations and their validation.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bounds::GConvention;
use crate::entropy::AlphaParam;
use crate::evolution::{Quadrature, DEFAULT_STEPS};
use crate::hamiltonian::{DriveAxis, HamiltonianSpec};
use crate::linalg::ComplexMatrix;
use crate::state::{DensityMatrix, DEFAULT_RANK_TOL};

/// A configuration that cannot be read, parsed or validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, err: impl fmt::Display) -> ConfigError {
    ConfigError(format!("{field}: {err}"))
}

/// Parses JSON, reporting `line:column` on failure.
pub fn parse<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: cannot read: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

/// Real and optional imaginary parts, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixConfig {
    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix, ConfigError> {
        let d = self.re.len();
        if d == 0 {
            return Err(invalid(field, "matrix is empty"));
        }
        let im = self.im.clone().unwrap_or_else(|| vec![vec![0.0; d]; d]);
        if im.len() != d {
            return Err(invalid(field, format!("im has {} rows, re has {d}", im.len())));
        }
        for (i, (r, m)) in self.re.iter().zip(&im).enumerate() {
            if r.len() != d || m.len() != d {
                return Err(invalid(&format!("{field}[{i}]"), format!("row length must be {d}")));
            }
        }
        Ok(ComplexMatrix::from_fn(d, d, |i, j| {
            Complex64::new(self.re[i][j], im[i][j])
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateConfig {
    /// Qubit `(I + r r_hat . sigma) / 2` with `r_hat = (sin t cos p, sin t sin p, cos t)`.
    Bloch {
        r: f64,
        theta: f64,
        phi: f64,
    },
    Matrix(MatrixConfig),
}

impl StateConfig {
    pub fn build(&self) -> Result<DensityMatrix, ConfigError> {
        match self {
            StateConfig::Bloch { r, theta, phi } => {
                DensityMatrix::from_bloch(*r, *theta, *phi).map_err(|e| invalid("state.bloch", e))
            }
            StateConfig::Matrix(m) => {
                DensityMatrix::new(m.to_matrix("state.matrix")?).map_err(|e| invalid("state.matrix", e))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianConfig {
    /// `omega I + n_t . sigma` with `n_t = (delta, 0, v t) / sqrt(delta^2 + v^2 t^2)`.
    LandauZener {
        delta: f64,
        velocity: f64,
        #[serde(default)]
        omega: f64,
    },
    /// `omega I + n . sigma` with a fixed unit axis.
    QubitDrive {
        axis: [f64; 3],
        #[serde(default)]
        omega: f64,
    },
    Constant(MatrixConfig),
    /// Linear interpolation between knots.
    Tabulated {
        times: Vec<f64>,
        matrices: Vec<MatrixConfig>,
    },
}

impl HamiltonianConfig {
    pub fn build(&self) -> Result<HamiltonianSpec, ConfigError> {
        let field = "hamiltonian";
        match self {
            HamiltonianConfig::LandauZener { delta, velocity, omega } => HamiltonianSpec::qubit_drive(
                *omega,
                DriveAxis::LandauZener {
                    delta: *delta,
                    velocity: *velocity,
                },
            )
            .map_err(|e| invalid("hamiltonian.landau_zener", e)),
            HamiltonianConfig::QubitDrive { axis, omega } => {
                HamiltonianSpec::qubit_drive(*omega, DriveAxis::Fixed(*axis))
                    .map_err(|e| invalid("hamiltonian.qubit_drive", e))
            }
            HamiltonianConfig::Constant(m) => {
                HamiltonianSpec::constant(m.to_matrix("hamiltonian.constant")?).map_err(|e| invalid(field, e))
            }
            HamiltonianConfig::Tabulated { times, matrices } => {
                let mats = matrices
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.to_matrix(&format!("hamiltonian.tabulated.matrices[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                HamiltonianSpec::tabulated(times.clone(), mats).map_err(|e| invalid("hamiltonian.tabulated", e))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub num: usize,
}

/// Explicit values or `{"linspace": {"start", "stop", "num"}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisConfig {
    List(Vec<f64>),
    Linspace { linspace: Linspace },
}

impl AxisConfig {
    pub fn values(&self, field: &str) -> Result<Vec<f64>, ConfigError> {
        let v = match self {
            AxisConfig::List(v) => v.clone(),
            AxisConfig::Linspace { linspace: l } => {
                if l.num == 0 {
                    return Err(invalid(field, "linspace needs num >= 1"));
                }
                if l.num == 1 {
                    vec![l.start]
                } else {
                    (0..l.num)
                        .map(|k| l.start + (l.stop - l.start) * k as f64 / (l.num - 1) as f64)
                        .collect()
                }
            }
        };
        if v.is_empty() {
            return Err(invalid(field, "grid is empty"));
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(invalid(&format!("{field}[{i}]"), "value is not finite"));
        }
        Ok(v)
    }
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

fn default_quadrature() -> Quadrature {
    Quadrature::Simpson
}

fn default_rank_tol() -> f64 {
    DEFAULT_RANK_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub alpha: AxisConfig,
    pub tau: AxisConfig,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub convention: GConvention,
    #[serde(default = "default_quadrature")]
    pub quadrature: Quadrature,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
}

/// Input for `entropies`, `bounds` and `qsl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub state: StateConfig,
    pub hamiltonian: HamiltonianConfig,
    pub grid: GridConfig,
}

/// Command-line values that replace configuration fields.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub steps: Option<usize>,
    pub convention: Option<GConvention>,
    pub seed: Option<u64>,
}

fn check_steps(steps: usize, rule: Quadrature, field: &str) -> Result<(), ConfigError> {
    if steps < 2 || !rule.accepts(steps) {
        return Err(invalid(
            field,
            format!("{steps} steps is not admissible for {} quadrature", rule.name()),
        ));
    }
    Ok(())
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub rho0: DensityMatrix,
    pub hamiltonian: HamiltonianSpec,
    pub alphas: Vec<AlphaParam>,
    pub taus: Vec<f64>,
    pub steps: usize,
    pub convention: GConvention,
    pub quadrature: Quadrature,
    pub rank_tol: f64,
    /// The configuration as given, echoed into sidecars.
    pub source: serde_json::Value,
}

impl ScenarioConfig {
    pub fn resolve(&self, overrides: &Overrides) -> Result<Scenario, ConfigError> {
        let rho0 = self.state.build()?;
        let hamiltonian = self.hamiltonian.build()?;
        if hamiltonian.dim() != rho0.dim() {
            return Err(invalid(
                "hamiltonian",
                format!(
                    "dimension {} does not match state dimension {}",
                    hamiltonian.dim(),
                    rho0.dim()
                ),
            ));
        }
        let alphas = self
            .grid
            .alpha
            .values("grid.alpha")?
            .into_iter()
            .enumerate()
            .map(|(i, a)| AlphaParam::new(a).map_err(|e| invalid(&format!("grid.alpha[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        let taus = self.grid.tau.values("grid.tau")?;
        if let Some(i) = taus.iter().position(|t| *t < 0.0) {
            return Err(invalid(&format!("grid.tau[{i}]"), "tau must be non-negative"));
        }
        let steps = overrides.steps.unwrap_or(self.grid.steps);
        check_steps(steps, self.grid.quadrature, "grid.steps")?;
        if !(self.grid.rank_tol > 0.0 && self.grid.rank_tol < 1.0) {
            return Err(invalid("grid.rank_tol", "must lie in (0, 1)"));
        }
        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            rho0,
            hamiltonian,
            alphas,
            taus,
            steps,
            convention: overrides.convention.unwrap_or(self.grid.convention),
            quadrature: self.grid.quadrature,
            rank_tol: self.grid.rank_tol,
            source: serde_json::to_value(self).expect("configuration serializes"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureName {
    pub const ALL: [FigureName; 6] = [
        FigureName::Fig1,
        FigureName::Fig2,
        FigureName::Fig3,
        FigureName::Fig4,
        FigureName::Fig5,
        FigureName::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::Fig5 => "fig5",
            FigureName::Fig6 => "fig6",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

fn all_figures() -> Vec<FigureName> {
    FigureName::ALL.to_vec()
}

fn default_grid_points() -> usize {
    100
}

fn default_tau_max() -> f64 {
    10.0
}

/// Input for `figures`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiguresConfig {
    #[serde(default = "all_figures")]
    pub figures: Vec<FigureName>,
    /// Points per grid axis.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_tau_max")]
    pub tau_max: f64,
    /// Minimum propagation steps over `[0, tau_max]`.
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub convention: GConvention,
}

impl Default for FiguresConfig {
    fn default() -> Self {
        parse("{}", "default").expect("defaults parse")
    }
}

impl FiguresConfig {
    pub fn apply(&self, overrides: &Overrides) -> Result<FiguresConfig, ConfigError> {
        let mut out = self.clone();
        if let Some(s) = overrides.steps {
            out.steps = s;
        }
        if let Some(c) = overrides.convention {
            out.convention = c;
        }
        if out.figures.is_empty() {
            return Err(invalid("figures", "no figure selected"));
        }
        if out.grid_points < 3 {
            return Err(invalid("grid_points", "need at least 3"));
        }
        if !(out.tau_max > 0.0 && out.tau_max.is_finite()) {
            return Err(invalid("tau_max", "must be positive"));
        }
        if out.steps < 2 {
            return Err(invalid("steps", "need at least 2"));
        }
        Ok(out)
    }
}

fn default_instances() -> usize {
    1000
}

fn default_dims() -> Vec<usize> {
    vec![2, 3, 4]
}

fn default_seed() -> u64 {
    20_240_501
}

fn default_alphas() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

fn default_taus() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 5.0]
}

fn default_sweep_steps() -> usize {
    520
}

fn default_pairs() -> usize {
    10_000
}

fn default_derivative_instances() -> usize {
    20
}

fn default_hundred() -> usize {
    100
}

/// Input for `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
    /// Propagation steps over `[0, max(taus)]`; every `tau` must land on an even step.
    #[serde(default = "default_sweep_steps")]
    pub steps: usize,
    #[serde(default = "default_pairs")]
    pub commutator_pairs: usize,
    #[serde(default = "default_derivative_instances")]
    pub derivative_instances: usize,
    /// Full-rank pairs for the `alpha -> 1` limit check.
    #[serde(default = "default_hundred")]
    pub limit_pairs: usize,
    /// Full-rank states for the min-entropy degeneracy check.
    #[serde(default = "default_hundred")]
    pub degeneracy_states: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        parse("{}", "default").expect("defaults parse")
    }
}

impl VerifyConfig {
    pub fn apply(&self, overrides: &Overrides) -> Result<VerifyConfig, ConfigError> {
        let mut out = self.clone();
        if let Some(s) = overrides.seed {
            out.seed = s;
        }
        if let Some(s) = overrides.steps {
            out.steps = s;
        }
        if out.instances == 0 {
            return Err(invalid("instances", "need at least 1"));
        }
        if out.dims.is_empty() || out.dims.iter().any(|&d| !(2..=8).contains(&d)) {
            return Err(invalid("dims", "dimensions must lie in 2..=8"));
        }
        for (i, a) in out.alphas.iter().enumerate() {
            AlphaParam::new(*a).map_err(|e| invalid(&format!("alphas[{i}]"), e))?;
        }
        if out.taus.is_empty() || out.taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(invalid("taus", "need positive finite horizons"));
        }
        out.sweep_indices()?;
        Ok(out)
    }

    pub fn horizon(&self) -> f64 {
        self.taus.iter().copied().fold(0.0, f64::max)
    }

    /// Grid index of each `tau` on the shared trajectory.
    pub fn sweep_indices(&self) -> Result<Vec<usize>, ConfigError> {
        check_steps(self.steps, Quadrature::Simpson, "steps")?;
        let horizon = self.horizon();
        self.taus
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let x = t / horizon * self.steps as f64;
                let n = x.round() as usize;
                if (x - n as f64).abs() > 1e-9 || !n.is_multiple_of(2) {
                    Err(invalid(
                        &format!("taus[{i}]"),
                        format!("{t} does not fall on an even step of {} steps", self.steps),
                    ))
                } else {
                    Ok(n)
                }
            })
            .collect()
    }
}
