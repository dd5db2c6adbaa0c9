//! Time-dependent generators `H_t`.

use crate::error::{Error, Result};
use crate::linalg::{self, c, check_hermitian, ComplexMatrix};

const AXIS_TOL: f64 = 1e-12;

/// Direction field `n_t` of a qubit drive `H_t = omega I + n_t . sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveAxis {
    /// `n_t = (delta, 0, v t) / sqrt(delta^2 + v^2 t^2)`.
    LandauZener {
        delta: f64,
        velocity: f64,
    },
    Fixed([f64; 3]),
}

impl DriveAxis {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DriveAxis::LandauZener { delta, velocity } => {
                if !delta.is_finite() {
                    return Err(Error::OutOfRange {
                        name: "delta",
                        value: delta,
                    });
                }
                if velocity == 0.0 || !velocity.is_finite() {
                    return Err(Error::OutOfRange {
                        name: "velocity",
                        value: velocity,
                    });
                }
                Ok(())
            }
            DriveAxis::Fixed(n) => {
                let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                if (norm - 1.0).abs() > AXIS_TOL || !norm.is_finite() {
                    return Err(Error::OutOfRange {
                        name: "axis norm",
                        value: norm,
                    });
                }
                Ok(())
            }
        }
    }

    /// Unit vector `n_t`. For a Landau-Zener drive with zero splitting the value at
    /// `t = 0` is the `t -> 0+` limit.
    pub fn direction(&self, t: f64) -> [f64; 3] {
        match *self {
            DriveAxis::LandauZener { delta, velocity } => {
                let z = velocity * t;
                let gamma = delta.hypot(z);
                if gamma == 0.0 {
                    [0.0, 0.0, velocity.signum()]
                } else {
                    [delta / gamma, 0.0, z / gamma]
                }
            }
            DriveAxis::Fixed(n) => n,
        }
    }
}

#[derive(Debug, Clone)]
pub enum HamiltonianSpec {
    Constant(ComplexMatrix),
    QubitDrive {
        omega: f64,
        axis: DriveAxis,
    },
    /// Piecewise-linear interpolation between knots, held constant outside them.
    Tabulated {
        times: Vec<f64>,
        matrices: Vec<ComplexMatrix>,
    },
}

impl HamiltonianSpec {
    pub fn constant(h: ComplexMatrix) -> Result<Self> {
        check_hermitian(&h).map_err(|e| match e {
            Error::NotHermitian { .. } => Error::NonHermitianSample { t: 0.0 },
            other => other,
        })?;
        Ok(HamiltonianSpec::Constant(h))
    }

    pub fn qubit_drive(omega: f64, axis: DriveAxis) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::OutOfRange {
                name: "omega",
                value: omega,
            });
        }
        axis.validate()?;
        Ok(HamiltonianSpec::QubitDrive { omega, axis })
    }

    pub fn landau_zener(delta: f64, velocity: f64) -> Result<Self> {
        Self::qubit_drive(0.0, DriveAxis::LandauZener { delta, velocity })
    }

    pub fn tabulated(times: Vec<f64>, matrices: Vec<ComplexMatrix>) -> Result<Self> {
        if times.is_empty() || times.len() != matrices.len() {
            return Err(Error::InvalidGrid(format!(
                "{} knot times for {} matrices",
                times.len(),
                matrices.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("knot times must increase strictly".into()));
        }
        let d = matrices[0].nrows();
        for (t, m) in times.iter().zip(&matrices) {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimMismatch(m.nrows(), d));
            }
            check_hermitian(m).map_err(|_| Error::NonHermitianSample { t: *t })?;
        }
        Ok(HamiltonianSpec::Tabulated { times, matrices })
    }

    pub fn dim(&self) -> usize {
        match self {
            HamiltonianSpec::Constant(h) => h.nrows(),
            HamiltonianSpec::QubitDrive { .. } => 2,
            HamiltonianSpec::Tabulated { matrices, .. } => matrices[0].nrows(),
        }
    }

    /// `H_t`, checked for Hermiticity.
    pub fn sample(&self, t: f64) -> Result<ComplexMatrix> {
        let h = self.sample_unchecked(t);
        check_hermitian(&h).map_err(|_| Error::NonHermitianSample { t })?;
        Ok(h)
    }

    fn sample_unchecked(&self, t: f64) -> ComplexMatrix {
        match self {
            HamiltonianSpec::Constant(h) => h.clone(),
            HamiltonianSpec::QubitDrive { omega, axis } => {
                linalg::identity(2) * c(*omega, 0.0) + linalg::pauli_dot(axis.direction(t))
            }
            HamiltonianSpec::Tabulated { times, matrices } => {
                let last = times.len() - 1;
                if t <= times[0] {
                    return matrices[0].clone();
                }
                if t >= times[last] {
                    return matrices[last].clone();
                }
                let k = times.partition_point(|&s| s <= t) - 1;
                let w = (t - times[k]) / (times[k + 1] - times[k]);
                &matrices[k] * c(1.0 - w, 0.0) + &matrices[k + 1] * c(w, 0.0)
            }
        }
    }

    /// True when every sample commutes with every other one.
    pub fn is_time_independent(&self) -> bool {
        match self {
            HamiltonianSpec::Constant(_) => true,
            HamiltonianSpec::QubitDrive { axis, .. } => matches!(axis, DriveAxis::Fixed(_)),
            HamiltonianSpec::Tabulated { matrices, .. } => matrices.len() == 1,
        }
    }
}
