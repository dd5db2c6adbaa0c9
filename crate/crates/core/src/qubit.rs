//! Closed forms for a single qubit `rho_0 = (I + r r_hat . sigma) / 2` driven by
//! `H_t = omega I + n_t . sigma`, used as an independent oracle for the numeric paths.
//!
//! The propagator is taken as `e^(-i t omega) [cos|u_t| I - i sin|u_t| u_hat_t . sigma]`
//! with `u_t = int_0^t n_s ds`. This is exact when `n_t` has a fixed direction; for a
//! rotating drive it differs from the time-ordered exponential.

use std::f64::consts::SQRT_2;

use crate::bounds::{qsl_times, BoundKind, BoundReport, BoundVariant, Flags, GConvention, QslReport, PHI_TOL};
use crate::entropy::AlphaParam;
use crate::error::{Error, Result};
use crate::evolution::{mean_on_grid, Quadrature, Trajectory};
use crate::hamiltonian::{DriveAxis, HamiltonianSpec};
use crate::linalg::{self, c, ComplexMatrix};
use crate::state::{bloch_direction, DensityMatrix};

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// `x^a` with `0^a = 0` for every `a >= 0`, matching spectral powers on the support.
fn support_pow(x: f64, a: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(a)
    }
}

/// `rho_0^alpha = (xi_plus I + xi_minus r_hat . sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiPair {
    pub plus: f64,
    pub minus: f64,
}

/// `xi^(+-)_a = 2^-a [(1 + r)^a +- (1 - r)^a]` for `a in [0, 2]`.
pub fn xi(a: f64, r: f64) -> Result<XiPair> {
    if !(0.0..=2.0).contains(&a) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: a,
        });
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfRange { name: "r", value: r });
    }
    let scale = 2f64.powf(-a);
    let (p, m) = (support_pow(1.0 + r, a), support_pow(1.0 - r, a));
    Ok(XiPair {
        plus: scale * (p + m),
        minus: scale * (p - m),
    })
}

/// Bloch state and drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub omega: f64,
    pub axis: DriveAxis,
}

impl QubitSpec {
    pub fn new(r: f64, theta: f64, phi: f64, omega: f64, axis: DriveAxis) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::OutOfRange { name: "r", value: r });
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
            });
        }
        if !(0.0..=2.0 * std::f64::consts::PI).contains(&phi) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
            });
        }
        if !omega.is_finite() {
            return Err(Error::OutOfRange {
                name: "omega",
                value: omega,
            });
        }
        axis.validate()?;
        Ok(Self {
            r,
            theta,
            phi,
            omega,
            axis,
        })
    }

    /// Landau-Zener drive `n_t = (delta, 0, v t) / sqrt(delta^2 + v^2 t^2)` with `omega = 0`.
    pub fn landau_zener(r: f64, theta: f64, phi: f64, delta: f64, velocity: f64) -> Result<Self> {
        Self::new(r, theta, phi, 0.0, DriveAxis::LandauZener { delta, velocity })
    }

    pub fn r_hat(&self) -> Vec3 {
        bloch_direction(self.theta, self.phi)
    }

    pub fn state(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_bloch(self.r, self.theta, self.phi)
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::qubit_drive(self.omega, self.axis)
    }

    pub fn drive(&self, t: f64) -> Result<DriveVectors> {
        DriveVectors::at(&self.axis, self.r_hat(), t)
    }

    /// `(1 - (u_hat . r_hat)^2) sin^2|u_t|`, zero when `u_t = 0`.
    pub fn transverse(&self, t: f64) -> Result<f64> {
        Ok(self.drive(t)?.transverse(self.r_hat()))
    }
}

/// `u_t = int_0^t n_s ds` in closed form.
pub fn u_vector(axis: &DriveAxis, t: f64) -> Result<Vec3> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange { name: "t", value: t });
    }
    axis.validate()?;
    Ok(match *axis {
        DriveAxis::Fixed(n) => [t * n[0], t * n[1], t * n[2]],
        DriveAxis::LandauZener { delta, velocity } => {
            let ux = if delta == 0.0 {
                0.0
            } else {
                delta / velocity.abs() * (velocity.abs() * t / delta.abs()).asinh()
            };
            let uz = (delta.hypot(velocity * t) - delta.abs()) / velocity;
            [ux, 0.0, uz]
        }
    })
}

/// `u_t` by Simpson quadrature of `n_s` with `steps` (even) intervals.
pub fn u_vector_quadrature(axis: &DriveAxis, t: f64, steps: usize) -> Result<Vec3> {
    if !Quadrature::Simpson.accepts(steps) {
        return Err(Error::InvalidGrid(format!("{steps} Simpson intervals")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange { name: "t", value: t });
    }
    let samples: Vec<Vec3> = (0..=steps)
        .map(|k| axis.direction(t * k as f64 / steps as f64))
        .collect();
    let mut u = [0.0; 3];
    for (i, ui) in u.iter_mut().enumerate() {
        let f: Vec<f64> = samples.iter().map(|n| n[i]).collect();
        *ui = t * mean_on_grid(&f, Quadrature::Simpson);
    }
    Ok(u)
}

/// Drive-derived vectors at one time for a given Bloch direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveVectors {
    pub t: f64,
    pub n_hat: Vec3,
    pub u: Vec3,
    /// `None` where `u_t = 0`.
    pub u_hat: Option<Vec3>,
    /// `U_t r_hat . sigma U_t^dagger = nu_hat . sigma`.
    pub nu_hat: Vec3,
    /// `U_t^dagger n_t . sigma U_t = mu_hat . sigma`.
    pub mu_hat: Vec3,
}

/// `v + s sin(2|u|) (u_hat x v) + 2 sin^2|u| [(u_hat . v) u_hat - v]`.
fn rotate(v: Vec3, u_hat: Option<Vec3>, angle: f64, sign: f64) -> Vec3 {
    let Some(w) = u_hat else { return v };
    let (s2, ss) = ((2.0 * angle).sin(), angle.sin().powi(2));
    let wx = cross(w, v);
    let wv = dot(w, v);
    std::array::from_fn(|i| v[i] + sign * s2 * wx[i] + 2.0 * ss * (wv * w[i] - v[i]))
}

impl DriveVectors {
    pub fn at(axis: &DriveAxis, r_hat: Vec3, t: f64) -> Result<Self> {
        let u = u_vector(axis, t)?;
        let len = norm(u);
        let u_hat = (len > 0.0).then(|| [u[0] / len, u[1] / len, u[2] / len]);
        let n_hat = axis.direction(t);
        Ok(Self {
            t,
            n_hat,
            u,
            u_hat,
            nu_hat: rotate(r_hat, u_hat, len, 1.0),
            mu_hat: rotate(n_hat, u_hat, len, -1.0),
        })
    }

    pub fn u_norm(&self) -> f64 {
        norm(self.u)
    }

    pub fn transverse(&self, r_hat: Vec3) -> f64 {
        match self.u_hat {
            None => 0.0,
            Some(w) => (1.0 - dot(w, r_hat).powi(2)) * self.u_norm().sin().powi(2),
        }
    }
}

/// `e^(-i t omega) [cos|u_t| I - i sin|u_t| u_hat_t . sigma]`.
pub fn propagator_closed(spec: &QubitSpec, t: f64) -> Result<ComplexMatrix> {
    let u = u_vector(&spec.axis, t)?;
    let len = norm(u);
    let sinc = if len == 0.0 { 1.0 } else { len.sin() / len };
    let phase = c((t * spec.omega).cos(), -(t * spec.omega).sin());
    let rot = linalg::identity(2) * c(len.cos(), 0.0) - linalg::pauli_dot(u) * c(0.0, sinc);
    Ok(rot * phase)
}

/// `g_alpha(rho_t, rho_0) = 1 - xi^-_alpha xi^-_(1-alpha) (1 - (u_hat . r_hat)^2) sin^2|u_t|`.
pub fn purity_closed(alpha: AlphaParam, spec: &QubitSpec, t: f64) -> Result<f64> {
    let a = alpha.value();
    let k = xi(a, spec.r)?.minus * xi(1.0 - a, spec.r)?.minus;
    Ok(1.0 - k * spec.transverse(t)?)
}

/// Closed-form norms and entropies for a qubit at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitQuantifiers {
    /// `|[H_t, rho_0^alpha]|_2`.
    pub comm_rho0_alpha: f64,
    /// `|[H_t, rho_0]|_2`.
    pub comm_rho0: f64,
    /// `|[H_t, rho_t]|_2`.
    pub comm_rho_t: f64,
    /// `S(rho_t||rho_0)`; infinite for a pure state moved off itself.
    pub relative_entropy: f64,
    /// `|ln rho_0|_2`; `None` for a pure state.
    pub log_norm: Option<f64>,
    /// `|rho_0^alpha|_2`.
    pub power_norm: f64,
}

pub fn quantifiers(spec: &QubitSpec, alpha: AlphaParam, t: f64) -> Result<QubitQuantifiers> {
    let a = alpha.value();
    let r = spec.r;
    let r_hat = spec.r_hat();
    let d = spec.drive(t)?;
    let perp = |v: Vec3| (2.0 * (1.0 - dot(v, r_hat).powi(2)).max(0.0)).sqrt();
    let transverse = d.transverse(r_hat);
    let (log_norm, relative_entropy) = if r < 1.0 {
        let (lm, lp) = (((1.0 - r) / 2.0).ln(), ((1.0 + r) / 2.0).ln());
        (Some(lm.hypot(lp)), r * ((1.0 + r) / (1.0 - r)).ln() * transverse)
    } else {
        (None, if transverse > 0.0 { f64::INFINITY } else { 0.0 })
    };
    Ok(QubitQuantifiers {
        comm_rho0_alpha: xi(a, r)?.minus * perp(d.n_hat),
        comm_rho0: r * perp(d.n_hat),
        comm_rho_t: r * perp(d.mu_hat),
        relative_entropy,
        log_norm,
        power_norm: xi(2.0 * a, r)?.plus.sqrt(),
    })
}

/// `U_t` from the closed form and `H_t` on the uniform grid over `[0, tau]`.
pub fn closed_trajectory(spec: &QubitSpec, tau: f64, steps: usize) -> Result<Trajectory> {
    if steps < 2 {
        return Err(Error::InvalidGrid(format!("{steps} steps, need at least 2")));
    }
    let h = spec.hamiltonian()?;
    let times: Vec<f64> = (0..=steps).map(|k| tau * k as f64 / steps as f64).collect();
    let unitaries = times
        .iter()
        .map(|&t| propagator_closed(spec, t))
        .collect::<Result<_>>()?;
    let hamiltonians = times.iter().map(|&t| h.sample(t)).collect::<Result<_>>()?;
    Trajectory::from_parts(times, unitaries, hamiltonians)
}

/// Speed-limit family evaluated in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedFamily {
    Tsallis,
    Renyi,
    RelativeEntropy,
    Min,
}

impl ClosedFamily {
    fn kind(self) -> BoundKind {
        match self {
            ClosedFamily::Tsallis => BoundKind::Tsallis,
            ClosedFamily::Renyi => BoundKind::Renyi,
            ClosedFamily::RelativeEntropy => BoundKind::RelativeEntropy,
            ClosedFamily::Min => BoundKind::Min,
        }
    }
}

/// Rényi prefactor from the smaller qubit eigenvalue `(1 - r) / 2`.
fn qubit_phi(family: ClosedFamily, a: f64, r: f64) -> Option<f64> {
    match family {
        ClosedFamily::Renyi => {
            let den = 1.0 + (1.0 - a) * ((1.0 - r) / 2.0).ln();
            (den > PHI_TOL).then(|| 1.0 / den)
        }
        _ => Some(1.0),
    }
}

fn closed_report(
    variant: BoundVariant,
    kind: BoundKind,
    alpha: f64,
    tau: f64,
    lhs: f64,
    g_avg: f64,
    flags: Flags,
) -> BoundReport {
    let scale = match kind {
        BoundKind::Renyi | BoundKind::Tsallis => (1.0 - alpha).abs(),
        _ => 1.0,
    };
    let rhs = if flags.excludes() {
        f64::NAN
    } else {
        tau * g_avg / scale
    };
    BoundReport {
        variant,
        kind,
        alpha,
        tau,
        lhs,
        rhs,
        slack: rhs - lhs,
        phi: f64::NAN,
        g_avg,
        flags,
    }
}

/// Closed-form speed-limit components at horizon `tau`.
pub fn qsl_closed(
    spec: &QubitSpec,
    alpha: f64,
    tau: f64,
    family: ClosedFamily,
    convention: GConvention,
    steps: usize,
) -> Result<QslReport> {
    Ok(qsl_times(&bounds_closed(spec, alpha, tau, family, convention, steps)?))
}

/// Closed-form forward, reverse and symmetric reports at horizon `tau`.
///
/// Drive integrals are Simpson averages of the closed-form integrands over `steps`
/// intervals. Rényi and relative-entropy families need `r < 1`; the min family needs
/// `r = 1`. `alpha` is ignored for the relative-entropy and min families.
pub fn bounds_closed(
    spec: &QubitSpec,
    alpha: f64,
    tau: f64,
    family: ClosedFamily,
    convention: GConvention,
    steps: usize,
) -> Result<[BoundReport; 3]> {
    if !Quadrature::Simpson.accepts(steps) {
        return Err(Error::InvalidGrid(format!("{steps} Simpson intervals")));
    }
    let grid = ClosedGrid::new(spec, tau, steps)?;
    grid.bounds(alpha, steps, family, convention)
}

/// Drive vectors on a uniform grid over `[0, tau]`, evaluated at any even prefix.
#[derive(Debug, Clone)]
pub struct ClosedGrid {
    spec: QubitSpec,
    times: Vec<f64>,
    drives: Vec<DriveVectors>,
}

impl ClosedGrid {
    pub fn new(spec: &QubitSpec, tau: f64, steps: usize) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::OutOfRange {
                name: "tau",
                value: tau,
            });
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("0 steps".into()));
        }
        let times: Vec<f64> = (0..=steps).map(|k| tau * k as f64 / steps as f64).collect();
        let drives = times.iter().map(|&t| spec.drive(t)).collect::<Result<_>>()?;
        Ok(Self {
            spec: *spec,
            times,
            drives,
        })
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn time(&self, n: usize) -> f64 {
        self.times[n]
    }

    pub fn qsl(&self, alpha: f64, n: usize, family: ClosedFamily, convention: GConvention) -> Result<QslReport> {
        Ok(qsl_times(&self.bounds(alpha, n, family, convention)?))
    }

    /// Reports at horizon `t_n`; `n` must be even.
    pub fn bounds(
        &self,
        alpha: f64,
        n: usize,
        family: ClosedFamily,
        convention: GConvention,
    ) -> Result<[BoundReport; 3]> {
        if n >= self.times.len() || !(n == 0 || Quadrature::Simpson.accepts(n)) {
            return Err(Error::InvalidGrid(format!(
                "prefix {n} of {} Simpson intervals",
                self.steps()
            )));
        }
        closed_reports(&self.spec, alpha, self.times[n], &self.drives[..=n], family, convention)
    }
}

fn closed_reports(
    spec: &QubitSpec,
    alpha: f64,
    tau: f64,
    grid: &[DriveVectors],
    family: ClosedFamily,
    convention: GConvention,
) -> Result<[BoundReport; 3]> {
    let steps = grid.len() - 1;
    let r = spec.r;
    match family {
        ClosedFamily::Renyi | ClosedFamily::RelativeEntropy if r >= 1.0 => {
            return Err(Error::RequiresFullRank { lambda_min: 0.0 });
        }
        ClosedFamily::Min if r < 1.0 => return Err(Error::OutOfRange { name: "r", value: r }),
        _ => {}
    }
    let r_hat = spec.r_hat();
    let avg = |f: &dyn Fn(&DriveVectors) -> f64| {
        let samples: Vec<f64> = grid.iter().map(f).collect();
        if tau == 0.0 || steps == 0 {
            samples[0]
        } else {
            mean_on_grid(&samples, Quadrature::Simpson)
        }
    };
    let perp = |v: Vec3| (1.0 - dot(v, r_hat).powi(2)).max(0.0).sqrt();
    let transverse = grid[steps].transverse(r_hat);
    let kind = family.kind();
    let none = Flags::default();

    let reports = match family {
        ClosedFamily::Tsallis | ClosedFamily::Renyi => {
            let alpha = AlphaParam::new(alpha)?;
            let a = alpha.value();
            let k = xi(a, r)?.minus * xi(1.0 - a, r)?.minus;
            let g = 1.0 - k * transverse;
            let lhs = match family {
                ClosedFamily::Tsallis => (1.0 - g) / (1.0 - a),
                _ => g.ln() / (a - 1.0),
            };
            let s_n = avg(&|d| perp(d.n_hat));
            // sqrt(2) |rho_0^x|_2 |[n . sigma, rho_0^y]|_2 / sqrt(1 - (n . r_hat)^2).
            let speed = |x: f64, y: f64| -> Result<f64> { Ok(SQRT_2 * xi(2.0 * x, r)?.plus.sqrt() * xi(y, r)?.minus) };
            let (fwd_norm, fwd_comm) = match convention {
                GConvention::Appendix => (a, 1.0 - a),
                GConvention::MainText => (1.0 - a, a),
            };
            let phi_f = qubit_phi(family, a, r);
            let phi_r = qubit_phi(family, 1.0 - a, r);
            let g_f = phi_f.map(|p| p * s_n).unwrap_or(f64::NAN) * speed(fwd_norm, fwd_comm)?;
            let g_r = phi_r.map(|p| p * s_n).unwrap_or(f64::NAN) * speed(fwd_comm, fwd_norm)?;
            let flag = |ok: bool| Flags {
                singular_phi: !ok,
                ..none
            };
            [
                closed_report(BoundVariant::Forward, kind, a, tau, lhs, g_f, flag(phi_f.is_some())),
                closed_report(BoundVariant::Reverse, kind, a, tau, lhs, g_r, flag(phi_r.is_some())),
                closed_report(
                    BoundVariant::Symmetric,
                    kind,
                    a,
                    tau,
                    2.0 * lhs,
                    g_f + g_r,
                    flag(phi_f.is_some() && phi_r.is_some()),
                ),
            ]
        }
        ClosedFamily::RelativeEntropy => {
            let log_norm = ((1.0 - r) / 2.0).ln().hypot(((1.0 + r) / 2.0).ln());
            let s = r * ((1.0 + r) / (1.0 - r)).ln() * transverse;
            let avg_t = SQRT_2 * r * avg(&|d| perp(d.mu_hat));
            let avg_0 = SQRT_2 * r * avg(&|d| perp(d.n_hat));
            [
                closed_report(BoundVariant::ReLimit, kind, 1.0, tau, s, log_norm * avg_t, none),
                closed_report(BoundVariant::Reverse, kind, 1.0, tau, s, log_norm * avg_0, none),
                closed_report(
                    BoundVariant::Symmetric,
                    kind,
                    1.0,
                    tau,
                    2.0 * s,
                    log_norm * (avg_t + avg_0),
                    none,
                ),
            ]
        }
        ClosedFamily::Min => {
            let overlap = |d: &DriveVectors| 1.0 - d.transverse(r_hat);
            let vanishing = grid.iter().any(|d| overlap(d) <= crate::entropy::OVERLAP_TOL);
            let flags = Flags {
                divergent: vanishing,
                ..none
            };
            let lhs = if vanishing {
                f64::INFINITY
            } else {
                -(1.0 - transverse).ln()
            };
            let q = if vanishing {
                f64::NAN
            } else {
                SQRT_2 * avg(&|d| perp(d.mu_hat) / overlap(d).abs())
            };
            [
                closed_report(BoundVariant::MinLimit, kind, 0.0, tau, lhs, q, flags),
                closed_report(BoundVariant::Reverse, kind, 0.0, tau, lhs, q, flags),
                closed_report(BoundVariant::Symmetric, kind, 0.0, tau, 2.0 * lhs, 2.0 * q, flags),
            ]
        }
    };
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy;
    use crate::evolution::propagate;
    use crate::linalg::{commutator, schatten2};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn a(x: f64) -> AlphaParam {
        AlphaParam::new(x).unwrap()
    }

    fn reference(delta_over_v: f64) -> QubitSpec {
        QubitSpec::landau_zener(0.25, FRAC_PI_4, FRAC_PI_4, delta_over_v, 1.0).unwrap()
    }

    fn fixed(r: f64, n: Vec3) -> QubitSpec {
        QubitSpec::new(r, FRAC_PI_4, FRAC_PI_4, 0.3, DriveAxis::Fixed(n)).unwrap()
    }

    #[test]
    fn xi_cases() {
        let x = xi(0.3, 0.0).unwrap();
        assert_relative_eq!(x.plus, 2f64.powf(0.7), epsilon = 1e-15);
        assert_eq!(x.minus, 0.0);
        let x = xi(0.3, 1.0).unwrap();
        assert_relative_eq!(x.plus, 1.0, epsilon = 1e-15);
        assert_relative_eq!(x.minus, 1.0, epsilon = 1e-15);
        // 40-digit evaluation.
        assert_relative_eq!(xi(0.5, 0.25).unwrap().minus, 0.178_196_979_346_300_3, epsilon = 1e-14);
        assert!(xi(0.5, 1.5).is_err());
        assert!(xi(-0.1, 0.5).is_err());
    }

    #[test]
    fn xi_power_matches_matrix_power() {
        let rho = DensityMatrix::from_bloch(0.4, 1.0, 2.0).unwrap();
        let r_hat = bloch_direction(1.0, 2.0);
        for x in [0.2, 0.5, 0.9, 1.4] {
            let p = xi(x, 0.4).unwrap();
            let expected =
                (linalg::identity(2) * c(p.plus, 0.0) + linalg::pauli_dot(r_hat) * c(p.minus, 0.0)) * c(0.5, 0.0);
            assert!(schatten2(&(rho.power(x).unwrap() - expected)) < 1e-13);
        }
    }

    #[test]
    fn landau_zener_integral_oracle() {
        let axis = DriveAxis::LandauZener {
            delta: 0.5,
            velocity: 1.0,
        };
        let u = u_vector(&axis, 1.0).unwrap();
        assert_relative_eq!(u[0], 0.721_817_737_589_405_2, epsilon = 1e-14);
        assert_eq!(u[1], 0.0);
        assert_relative_eq!(u[2], 0.618_033_988_749_894_9, epsilon = 1e-14);
        let zero = DriveAxis::LandauZener {
            delta: 0.0,
            velocity: -2.0,
        };
        assert_eq!(u_vector(&zero, 1.5).unwrap(), [0.0, 0.0, -1.5]);
    }

    #[test]
    fn closed_integral_matches_quadrature() {
        for (delta, v) in [
            (0.5, 1.0),
            (1.0, 1.0),
            (5.0, 1.0),
            (10.0, 1.0),
            (-0.7, 2.0),
            (0.3, -1.5),
        ] {
            let axis = DriveAxis::LandauZener { delta, velocity: v };
            for t in [0.0, 0.4, 3.0, 10.0] {
                let closed = u_vector(&axis, t).unwrap();
                let quad = u_vector_quadrature(&axis, t, 20_000).unwrap();
                for i in 0..3 {
                    assert!(
                        (closed[i] - quad[i]).abs() < 1e-10,
                        "{delta} {v} {t}: {closed:?} {quad:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn fixed_axis_vectors() {
        let n = [0.0, 0.6, 0.8];
        let spec = fixed(0.5, n);
        let d = spec.drive(1.3).unwrap();
        for (i, &ni) in n.iter().enumerate() {
            assert_relative_eq!(d.u[i], 1.3 * ni, epsilon = 1e-15);
            assert_relative_eq!(d.u_hat.unwrap()[i], ni, epsilon = 1e-15);
            assert_relative_eq!(d.mu_hat[i], ni, epsilon = 1e-15);
        }
        let start = spec.drive(0.0).unwrap();
        assert!(start.u_hat.is_none());
        assert_eq!(start.nu_hat, spec.r_hat());
        assert_eq!(spec.transverse(0.0).unwrap(), 0.0);
    }

    #[test]
    fn rotated_vectors_match_propagator() {
        let spec = reference(0.5);
        let [sx, sy, sz] = linalg::pauli();
        let r_hat = spec.r_hat();
        for t in [0.0, 0.7, 2.2, 9.5] {
            let d = spec.drive(t).unwrap();
            assert_relative_eq!(norm(d.nu_hat), 1.0, epsilon = 1e-12);
            assert_relative_eq!(norm(d.mu_hat), 1.0, epsilon = 1e-12);
            let u = propagator_closed(&spec, t).unwrap();
            let rotated = linalg::conjugate(&u, &linalg::pauli_dot(r_hat));
            let back = linalg::conjugate(&u.adjoint(), &linalg::pauli_dot(d.n_hat));
            for (i, s) in [&sx, &sy, &sz].iter().enumerate() {
                assert_relative_eq!(
                    0.5 * linalg::trace_product(&rotated, s).re,
                    d.nu_hat[i],
                    epsilon = 1e-12
                );
                assert_relative_eq!(0.5 * linalg::trace_product(&back, s).re, d.mu_hat[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn propagator_cases() {
        let spec = fixed(0.5, [1.0, 0.0, 0.0]);
        assert!(schatten2(&(propagator_closed(&spec, 0.0).unwrap() - linalg::identity(2))) < 1e-15);
        let still = QubitSpec::new(0.5, 0.1, 0.2, 0.0, DriveAxis::Fixed([0.0, 0.0, 1.0])).unwrap();
        let u = propagator_closed(&still, PI).unwrap();
        assert!(schatten2(&(u + linalg::identity(2))) < 1e-14);
        assert!(linalg::unitarity_defect(&propagator_closed(&reference(1.0), 4.0).unwrap()) < 1e-14);
    }

    #[test]
    fn fixed_axis_propagator_matches_numeric() {
        let spec = fixed(0.5, [0.6, 0.0, 0.8]);
        let traj = propagate(&spec.hamiltonian().unwrap(), 3.0, 64).unwrap();
        for (t, u) in traj.times.iter().zip(&traj.unitaries) {
            assert!(schatten2(&(propagator_closed(&spec, *t).unwrap() - u)) < 1e-12);
        }
    }

    #[test]
    fn purity_special_geometries() {
        let r_hat = bloch_direction(FRAC_PI_4, FRAC_PI_4);
        let parallel = QubitSpec::new(0.25, FRAC_PI_4, FRAC_PI_4, 0.0, DriveAxis::Fixed(r_hat)).unwrap();
        assert_eq!(purity_closed(a(0.3), &parallel, 2.0).unwrap(), 1.0);

        let n = [-r_hat[1], r_hat[0], 0.0];
        let len = norm(n);
        let orth = QubitSpec::new(
            0.25,
            FRAC_PI_4,
            FRAC_PI_4,
            0.0,
            DriveAxis::Fixed([n[0] / len, n[1] / len, 0.0]),
        )
        .unwrap();
        assert_relative_eq!(purity_closed(a(0.3), &orth, PI).unwrap(), 1.0, epsilon = 1e-15);
        let k = xi(0.3, 0.25).unwrap().minus * xi(0.7, 0.25).unwrap().minus;
        assert_relative_eq!(
            purity_closed(a(0.3), &orth, 0.9).unwrap(),
            1.0 - k * 0.9f64.sin().powi(2),
            epsilon = 1e-15
        );
    }

    #[test]
    fn purity_matches_numeric_for_fixed_axis() {
        let spec = fixed(0.25, [0.0, 0.6, 0.8]);
        let rho0 = spec.state().unwrap();
        let traj = propagate(&spec.hamiltonian().unwrap(), 6.0, 128).unwrap();
        for (t, u) in traj.times.iter().zip(&traj.unitaries).step_by(8) {
            let rho_t = rho0.evolved(u).unwrap();
            for x in [0.1, 0.5, 0.9] {
                let numeric = entropy::relative_purity(&rho_t, &rho0, a(x)).unwrap();
                assert!((numeric - purity_closed(a(x), &spec, *t).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quantifiers_match_dense_on_closed_trajectory() {
        for spec in [reference(0.5), reference(5.0), fixed(0.5, [0.6, 0.0, 0.8])] {
            let rho0 = spec.state().unwrap();
            let traj = closed_trajectory(&spec, 4.0, 16).unwrap();
            for k in 0..=16 {
                let t = traj.times[k];
                let q = quantifiers(&spec, a(0.35), t).unwrap();
                let h = &traj.hamiltonians[k];
                let rho_t = rho0.evolved(&traj.unitaries[k]).unwrap();
                let p = rho0.power(0.35).unwrap();
                assert!((q.comm_rho0_alpha - schatten2(&commutator(h, &p).unwrap())).abs() < 1e-12);
                assert!((q.comm_rho0 - schatten2(&commutator(h, rho0.matrix()).unwrap())).abs() < 1e-12);
                assert!((q.comm_rho_t - schatten2(&commutator(h, rho_t.matrix()).unwrap())).abs() < 1e-12);
                let s = entropy::quantum_relative_entropy(&rho_t, &rho0).unwrap().value();
                assert!((q.relative_entropy - s).abs() < 1e-12);
                assert!((q.log_norm.unwrap() - schatten2(&rho0.log().unwrap())).abs() < 1e-12);
                assert!((q.power_norm - schatten2(&p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn log_norm_oracle() {
        let q = quantifiers(&reference(0.5), a(0.5), 1.0).unwrap();
        // sqrt(ln^2(3/8) + ln^2(5/8)) at 40 digits.
        assert_relative_eq!(q.log_norm.unwrap(), 1.087_625_595_077_508_2, epsilon = 1e-13);
        let pure = QubitSpec::landau_zener(1.0, 0.3, 0.2, 0.5, 1.0).unwrap();
        assert!(quantifiers(&pure, a(0.5), 1.0).unwrap().log_norm.is_none());
        let mixed = QubitSpec::landau_zener(1e-9, 0.3, 0.2, 0.5, 1.0).unwrap();
        assert_relative_eq!(
            quantifiers(&mixed, a(0.2), 0.0).unwrap().power_norm,
            2f64.powf(0.5 - 0.2),
            epsilon = 1e-8
        );
    }

    #[test]
    fn closed_qsl_matches_engine_for_fixed_axis() {
        use crate::bounds::BoundEngine;
        use crate::entropy::EntropyKind;
        let mixed = fixed(0.25, [0.0, 0.6, 0.8]);
        let traj = propagate(&mixed.hamiltonian().unwrap(), 2.5, 64).unwrap();
        let engine = BoundEngine::new(&mixed.state().unwrap(), &traj, Quadrature::Simpson).unwrap();
        let n = engine.steps();
        for conv in GConvention::ALL {
            for (family, kind) in [
                (ClosedFamily::Tsallis, EntropyKind::Tsallis),
                (ClosedFamily::Renyi, EntropyKind::Renyi),
            ] {
                for x in [0.2, 0.5, 0.8] {
                    let closed = qsl_closed(&mixed, x, 2.5, family, conv, 64).unwrap();
                    let numeric = engine.alpha(kind, a(x), conv).qsl(n).unwrap();
                    for i in 0..3 {
                        assert!((closed.components[i] - numeric.components[i]).abs() < 1e-10);
                    }
                }
            }
        }
        let closed = qsl_closed(
            &mixed,
            0.5,
            2.5,
            ClosedFamily::RelativeEntropy,
            GConvention::Appendix,
            64,
        )
        .unwrap();
        let numeric = engine.qsl_re(n).unwrap();
        for i in 0..3 {
            assert!((closed.components[i] - numeric.components[i]).abs() < 1e-10);
        }

        let pure = QubitSpec::new(1.0, FRAC_PI_4, FRAC_PI_4, 0.0, DriveAxis::Fixed([0.0, 0.6, 0.8])).unwrap();
        let traj = propagate(&pure.hamiltonian().unwrap(), 1.2, 64).unwrap();
        let engine = BoundEngine::new(&pure.state().unwrap(), &traj, Quadrature::Simpson).unwrap();
        let closed = qsl_closed(&pure, 0.5, 1.2, ClosedFamily::Min, GConvention::Appendix, 64).unwrap();
        let (_, numeric) = engine.min_bound_and_qsl(engine.steps()).unwrap();
        for i in 0..3 {
            assert!((closed.components[i] - numeric.components[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_qsl_commuting_geometry_vanishes() {
        let r_hat = bloch_direction(FRAC_PI_4, FRAC_PI_4);
        let spec = QubitSpec::new(0.25, FRAC_PI_4, FRAC_PI_4, 0.0, DriveAxis::Fixed(r_hat)).unwrap();
        for family in [
            ClosedFamily::Tsallis,
            ClosedFamily::Renyi,
            ClosedFamily::RelativeEntropy,
        ] {
            let q = qsl_closed(&spec, 0.4, 3.0, family, GConvention::Appendix, 32).unwrap();
            assert_eq!(q.tau_max, 0.0);
        }
    }

    #[test]
    fn closed_qsl_preconditions() {
        let pure = QubitSpec::landau_zener(1.0, 0.3, 0.2, 0.5, 1.0).unwrap();
        assert!(qsl_closed(&pure, 0.5, 1.0, ClosedFamily::Renyi, GConvention::Appendix, 8).is_err());
        assert!(qsl_closed(&pure, 0.5, 1.0, ClosedFamily::RelativeEntropy, GConvention::Appendix, 8).is_err());
        assert!(qsl_closed(&reference(0.5), 0.5, 1.0, ClosedFamily::Min, GConvention::Appendix, 8).is_err());
        assert!(qsl_closed(
            &reference(0.5),
            0.5,
            1.0,
            ClosedFamily::Tsallis,
            GConvention::Appendix,
            7
        )
        .is_err());
        let grid = ClosedGrid::new(&reference(0.5), 2.0, 8).unwrap();
        assert!(grid
            .bounds(0.5, 3, ClosedFamily::Tsallis, GConvention::Appendix)
            .is_err());
        assert!(grid
            .bounds(0.5, 10, ClosedFamily::Tsallis, GConvention::Appendix)
            .is_err());
    }

    #[test]
    fn closed_grid_prefix_matches_direct() {
        let spec = reference(1.0);
        let grid = ClosedGrid::new(&spec, 6.0, 60).unwrap();
        for n in [0, 2, 20, 60] {
            let tau = grid.time(n);
            for family in [
                ClosedFamily::Tsallis,
                ClosedFamily::Renyi,
                ClosedFamily::RelativeEntropy,
            ] {
                let prefix = grid.qsl(0.4, n, family, GConvention::MainText).unwrap();
                let direct = qsl_closed(&spec, 0.4, tau, family, GConvention::MainText, n.max(2)).unwrap();
                for (a, b) in prefix.components.iter().zip(direct.components) {
                    assert!((a - b).abs() < 1e-12, "{family:?} {n}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn closed_qsl_reference_grid_is_valid() {
        for dv in [0.5, 1.0, 5.0, 10.0] {
            let spec = reference(dv);
            for conv in GConvention::ALL {
                for family in [ClosedFamily::Tsallis, ClosedFamily::Renyi] {
                    for x in [0.1, 0.5, 0.9] {
                        for tau in [0.0, 0.3, 2.0, 10.0] {
                            let q = qsl_closed(&spec, x, tau, family, conv, 128).unwrap();
                            assert!(q.is_valid(), "{dv} {conv:?} {family:?} {x} {tau}: {q:?}");
                        }
                    }
                }
            }
        }
    }
}
