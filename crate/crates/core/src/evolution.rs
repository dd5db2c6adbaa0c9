//! Time-ordered propagation and time averages on the propagation grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::linalg::{self, exp_minus_i_h_dt, ComplexMatrix};
use crate::state::DensityMatrix;

pub const DEFAULT_STEPS: usize = 512;
pub const DEFAULT_REUNITARIZE_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    Simpson,
    Trapezoid,
}

impl Quadrature {
    pub fn name(self) -> &'static str {
        match self {
            Quadrature::Simpson => "simpson",
            Quadrature::Trapezoid => "trapezoid",
        }
    }

    /// Whether a grid with `n` intervals is admissible.
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Quadrature::Simpson => n >= 2 && n.is_multiple_of(2),
            Quadrature::Trapezoid => n >= 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub steps: usize,
    /// Project back onto the unitary group every this many steps.
    pub reunitarize_every: Option<usize>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            reunitarize_every: None,
        }
    }
}

/// `U_t` and `H_t` sampled on a uniform grid `t_k = k tau / N`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub unitaries: Vec<ComplexMatrix>,
    pub hamiltonians: Vec<ComplexMatrix>,
}

impl Trajectory {
    /// Assembles a trajectory from precomputed samples.
    pub fn from_parts(
        times: Vec<f64>,
        unitaries: Vec<ComplexMatrix>,
        hamiltonians: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if times.len() < 2 || unitaries.len() != times.len() || hamiltonians.len() != times.len() {
            return Err(Error::InvalidGrid(
                "trajectory needs matching samples, at least two".into(),
            ));
        }
        Ok(Self {
            times,
            unitaries,
            hamiltonians,
        })
    }

    /// Number of intervals.
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn tau(&self) -> f64 {
        *self.times.last().expect("non-empty grid")
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].nrows()
    }

    pub fn final_unitary(&self) -> &ComplexMatrix {
        self.unitaries.last().expect("non-empty grid")
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.unitaries.iter().map(linalg::unitarity_defect).fold(0.0, f64::max)
    }
}

/// Midpoint exponential product `U_{k+1} = exp(-i H(t_k + dt/2) dt) U_k`.
pub fn propagate(spec: &HamiltonianSpec, tau: f64, steps: usize) -> Result<Trajectory> {
    propagate_with(
        spec,
        tau,
        &PropagationOptions {
            steps,
            ..Default::default()
        },
    )
}

pub fn propagate_with(spec: &HamiltonianSpec, tau: f64, options: &PropagationOptions) -> Result<Trajectory> {
    let n = options.steps;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::OutOfRange {
            name: "tau",
            value: tau,
        });
    }
    if n < 2 {
        return Err(Error::InvalidGrid(format!("{n} steps, need at least 2")));
    }
    if options.reunitarize_every == Some(0) {
        return Err(Error::InvalidGrid("re-unitarization period must be positive".into()));
    }
    let d = spec.dim();
    let dt = tau / n as f64;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let mut unitaries = Vec::with_capacity(n + 1);
    let mut hamiltonians = Vec::with_capacity(n + 1);
    let fixed_step = if spec.is_time_independent() {
        Some(exp_minus_i_h_dt(&spec.sample(0.0)?, dt)?)
    } else {
        None
    };
    let mut u = linalg::identity(d);
    for (k, &t) in times.iter().enumerate() {
        hamiltonians.push(spec.sample(t)?);
        unitaries.push(u.clone());
        if k == n {
            break;
        }
        let step = match &fixed_step {
            Some(step) => step.clone(),
            None => exp_minus_i_h_dt(&spec.sample(t + 0.5 * dt)?, dt)?,
        };
        u = step * u;
        if let Some(period) = options.reunitarize_every {
            if (k + 1) % period == 0 {
                u = linalg::reunitarize(&u)?;
            }
        }
    }
    Ok(Trajectory {
        times,
        unitaries,
        hamiltonians,
    })
}

/// `rho_t = U rho0 U^dagger`.
pub fn evolve_state(rho0: &DensityMatrix, u: &ComplexMatrix) -> Result<DensityMatrix> {
    rho0.evolved(u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAverage {
    pub value: f64,
    pub steps: usize,
    pub rule: Quadrature,
}

/// `(1/tau) int_0^tau f dt` from samples on a uniform grid over `[0, tau]`.
pub fn time_average(samples: &[f64], tau: f64, rule: Quadrature) -> Result<TimeAverage> {
    if !(tau > 0.0) {
        return Err(Error::ZeroHorizon);
    }
    let n = samples.len().saturating_sub(1);
    if samples.len() < 3 || !rule.accepts(n) {
        return Err(Error::InvalidGrid(format!(
            "{} samples for {} quadrature",
            samples.len(),
            rule.name()
        )));
    }
    Ok(TimeAverage {
        value: mean_on_grid(samples, rule),
        steps: n,
        rule,
    })
}

/// Grid mean without validation; the caller guarantees `rule.accepts(samples.len() - 1)`.
pub(crate) fn mean_on_grid(samples: &[f64], rule: Quadrature) -> f64 {
    let n = samples.len() - 1;
    match rule {
        Quadrature::Simpson => {
            let mut acc = samples[0] + samples[n];
            for (k, f) in samples.iter().enumerate().take(n).skip(1) {
                acc += if k % 2 == 1 { 4.0 * f } else { 2.0 * f };
            }
            acc / (3.0 * n as f64)
        }
        Quadrature::Trapezoid => {
            let inner: f64 = samples[1..n].iter().sum();
            (0.5 * (samples[0] + samples[n]) + inner) / n as f64
        }
    }
}
