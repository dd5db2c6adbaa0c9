//! Upper bounds on divergences between `rho_0` and `rho_tau = U_tau rho_0 U_tau^dagger`,
//! the speed limits they imply, and tightness merits.
//!
//! [`BoundEngine`] evaluates everything for one state and one trajectory. All
//! commutator norms are taken in the eigenbasis `V` of `rho_0`: for a spectral
//! function `f`, `|[M, f(rho_0)]|_2^2 = sum_ij |(V^dagger M V)_ij|^2 (f(l_i) - f(l_j))^2`,
//! so per-sample cost is `O(d^2)` once `V^dagger H_t V` is known. The dense
//! reference implementations at the bottom of this file are kept as oracles.

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entropy::{self, AlphaParam, Divergence, EntropyKind, OVERLAP_TOL};
use crate::error::{Error, Result};
use crate::evolution::{mean_on_grid, Quadrature, Trajectory};
use crate::linalg::{self, commutator, schatten2, ComplexMatrix};
use crate::state::{DensityMatrix, DEFAULT_RANK_TOL};

/// Rényi prefactor denominators at or below this are refused.
pub const PHI_TOL: f64 = 1e-8;
/// Averaged speeds at or below this make a speed-limit component degenerate.
pub const DEGENERATE_DRIVE_TOL: f64 = 1e-14;
/// Slack and speed-limit validity tolerance.
pub const VALIDITY_TOL: f64 = 1e-9;

/// Placement of `alpha` and `1 - alpha` on the two norm factors of `G_alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GConvention {
    /// `Phi_alpha |rho_0^alpha|_2 |[H_t, rho_0^(1-alpha)]|_2`.
    #[default]
    Appendix,
    /// `Phi_alpha |rho_0^(1-alpha)|_2 |[H_t, rho_0^alpha]|_2`.
    MainText,
}

impl GConvention {
    pub const ALL: [GConvention; 2] = [GConvention::Appendix, GConvention::MainText];

    pub fn name(self) -> &'static str {
        match self {
            GConvention::Appendix => "appendix",
            GConvention::MainText => "maintext",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundVariant {
    Forward,
    Reverse,
    Symmetric,
    Loose,
    ReLimit,
    MinLimit,
}

impl BoundVariant {
    pub fn name(self) -> &'static str {
        match self {
            BoundVariant::Forward => "forward",
            BoundVariant::Reverse => "reverse",
            BoundVariant::Symmetric => "symmetric",
            BoundVariant::Loose => "loose",
            BoundVariant::ReLimit => "re_limit",
            BoundVariant::MinLimit => "min_limit",
        }
    }
}

/// Which divergence a report bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Renyi,
    Tsallis,
    RelativeEntropy,
    Min,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Renyi => "renyi",
            BoundKind::Tsallis => "tsallis",
            BoundKind::RelativeEntropy => "re",
            BoundKind::Min => "min",
        }
    }
}

impl From<EntropyKind> for BoundKind {
    fn from(kind: EntropyKind) -> Self {
        match kind {
            EntropyKind::Renyi => BoundKind::Renyi,
            EntropyKind::Tsallis => BoundKind::Tsallis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    /// An entropy or speed is infinite (orthogonal supports, singular logarithm).
    pub divergent: bool,
    /// Averaged speed vanishes; the speed-limit component is set to zero.
    pub degenerate_drive: bool,
    /// The Rényi prefactor is undefined for this state and order.
    pub singular_phi: bool,
}

impl Flags {
    pub fn is_empty(self) -> bool {
        !(self.divergent || self.degenerate_drive || self.singular_phi)
    }

    /// Flags that remove a record from validity statistics.
    pub fn excludes(self) -> bool {
        self.divergent || self.singular_phi
    }

    pub fn union(self, other: Flags) -> Flags {
        Flags {
            divergent: self.divergent || other.divergent,
            degenerate_drive: self.degenerate_drive || other.degenerate_drive,
            singular_phi: self.singular_phi || other.singular_phi,
        }
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.divergent, "divergent"),
            (self.degenerate_drive, "degenerate_drive"),
            (self.singular_phi, "singular_phi"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, name)| *name)
        .collect();
        f.write_str(&names.join("|"))
    }
}

/// One bound evaluated at one `(alpha, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub variant: BoundVariant,
    pub kind: BoundKind,
    /// `1` for the relative-entropy family, `0` for the min family.
    pub alpha: f64,
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub phi: f64,
    /// Time-averaged speed entering `rhs`.
    pub g_avg: f64,
    pub flags: Flags,
}

impl BoundReport {
    /// Divisor between `tau * g_avg` and `rhs`.
    pub fn scale(&self) -> f64 {
        match self.kind {
            BoundKind::Renyi | BoundKind::Tsallis => (1.0 - self.alpha).abs(),
            BoundKind::RelativeEntropy | BoundKind::Min => 1.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.flags.excludes() || self.slack >= -VALIDITY_TOL
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    variant: BoundVariant,
    kind: BoundKind,
    alpha: f64,
    tau: f64,
    lhs: f64,
    g_avg: f64,
    phi: f64,
    flags: Flags,
) -> BoundReport {
    let scale = match kind {
        BoundKind::Renyi | BoundKind::Tsallis => (1.0 - alpha).abs(),
        BoundKind::RelativeEntropy | BoundKind::Min => 1.0,
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
        phi,
        g_avg,
        flags,
    }
}

/// Speed-limit components `(forward, reverse, symmetric)` and their maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslReport {
    pub kind: BoundKind,
    pub alpha: f64,
    pub tau: f64,
    pub components: [f64; 3],
    pub tau_max: f64,
    pub flags: Flags,
}

impl QslReport {
    pub fn is_valid(&self) -> bool {
        self.flags.excludes() || self.tau_max <= self.tau + VALIDITY_TOL
    }
}

/// Components `scale * |lhs| / g_avg` from forward, reverse and symmetric reports.
pub fn qsl_times(reports: &[BoundReport; 3]) -> QslReport {
    let tau = reports[0].tau;
    let mut flags = Flags::default();
    let mut components = [0.0; 3];
    for (c, r) in components.iter_mut().zip(reports) {
        flags = flags.union(Flags {
            degenerate_drive: false,
            ..r.flags
        });
        *c = if r.flags.excludes() {
            f64::NAN
        } else if tau == 0.0 {
            0.0
        } else if r.g_avg <= DEGENERATE_DRIVE_TOL {
            flags.degenerate_drive = true;
            0.0
        } else {
            r.scale() * r.lhs.abs() / r.g_avg
        };
    }
    let tau_max = components
        .iter()
        .copied()
        .filter(|c| !c.is_nan())
        .fold(f64::NAN, f64::max);
    QslReport {
        kind: reports[0].kind,
        alpha: reports[0].alpha,
        tau,
        components,
        tau_max,
        flags,
    }
}

/// Tightness merits `(delta_1, delta_2, delta_3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeritDeltas {
    pub forward: f64,
    pub reverse: f64,
    pub symmetric: f64,
}

/// `delta_1 = tau <<G_alpha>> - |1-alpha| O(rho_tau||rho_0)`, `delta_2` likewise with
/// `G_(1-alpha)` and the reversed divergence, `delta_3 = delta_1 + delta_2`.
pub fn merit_deltas(forward: &BoundReport, reverse: &BoundReport) -> MeritDeltas {
    let d1 = forward.tau * forward.g_avg - forward.scale() * forward.lhs;
    let d2 = reverse.tau * reverse.g_avg - reverse.scale() * reverse.lhs;
    MeritDeltas {
        forward: d1,
        reverse: d2,
        symmetric: d1 + d2,
    }
}

/// `Phi_alpha`: `1 / (1 + (1 - alpha) ln lambda_min)` for Rényi, `1` for Tsallis.
///
/// The Rényi branch needs the denominator to be positive.
pub fn phi_factor(kind: EntropyKind, alpha: AlphaParam, lambda_min: f64) -> Result<f64> {
    match kind {
        EntropyKind::Tsallis => Ok(1.0),
        EntropyKind::Renyi => {
            if !(lambda_min > 0.0) {
                return Err(Error::RequiresFullRank { lambda_min });
            }
            let denominator = 1.0 + (1.0 - alpha.value()) * lambda_min.ln();
            if denominator <= PHI_TOL {
                return Err(Error::SingularPhi { denominator });
            }
            Ok(1.0 / denominator)
        }
    }
}

/// Signature of [`phi_factor`], swappable for mutation checks.
pub type PhiFn = fn(EntropyKind, AlphaParam, f64) -> Result<f64>;

/// `sqrt(sum_ij |m_ij|^2 (f_i - f_j)^2)`, the norm of `[M, diag(f)]`.
fn diag_commutator_norm(m: &ComplexMatrix, f: &[f64]) -> f64 {
    let d = f.len();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let df = f[i] - f[j];
                acc += m[(i, j)].norm_sqr() * df * df;
            }
        }
    }
    acc.sqrt()
}

/// Per-trajectory evaluator for every bound and speed limit.
#[derive(Debug, Clone)]
pub struct BoundEngine {
    rho0: DensityMatrix,
    rule: Quadrature,
    rank_tol: f64,
    times: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
    /// `V^dagger H_t V`.
    h_tilde: Vec<ComplexMatrix>,
    h_norm: Vec<f64>,
    /// `|[H_t, rho_0]|_2`.
    comm_rho0: Vec<f64>,
    /// `|[H_t, rho_t]|_2 = |[U_t^dagger H_t U_t, rho_0]|_2`.
    comm_rho_t: Vec<f64>,
    /// `Q_0^t(rho_0, Pi)` and `Q_0^t(Pi, rho_0)`; `NaN` where the overlap vanishes.
    q0_forward: Vec<f64>,
    q0_reverse: Vec<f64>,
}

impl BoundEngine {
    pub fn new(rho0: &DensityMatrix, trajectory: &Trajectory, rule: Quadrature) -> Result<Self> {
        Self::with_rank_tol(rho0, trajectory, rule, DEFAULT_RANK_TOL)
    }

    pub fn with_rank_tol(
        rho0: &DensityMatrix,
        trajectory: &Trajectory,
        rule: Quadrature,
        rank_tol: f64,
    ) -> Result<Self> {
        if trajectory.dim() != rho0.dim() {
            return Err(Error::DimMismatch(trajectory.dim(), rho0.dim()));
        }
        let v = &rho0.eigen().vectors;
        let vt = v.adjoint();
        let lambda = rho0.eigenvalues();
        let cut = rho0.cutoff(rank_tol);
        let proj: Vec<f64> = lambda.iter().map(|&x| if x > cut { 1.0 } else { 0.0 }).collect();
        let rho_norm = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
        let proj_norm = proj.iter().sum::<f64>().sqrt();
        let full_rank = rho0.is_full_rank(rank_tol);

        let n = trajectory.times.len();
        let mut h_tilde = Vec::with_capacity(n);
        let mut h_norm = Vec::with_capacity(n);
        let mut comm_rho0 = Vec::with_capacity(n);
        let mut comm_rho_t = Vec::with_capacity(n);
        let mut q0_forward = Vec::with_capacity(n);
        let mut q0_reverse = Vec::with_capacity(n);
        for (h, u) in trajectory.hamiltonians.iter().zip(&trajectory.unitaries) {
            let ht = &vt * h * v;
            let w = &vt * u * v;
            let kt = w.adjoint() * &ht * &w;
            let c_t = diag_commutator_norm(&kt, lambda);
            comm_rho0.push(diag_commutator_norm(&ht, lambda));
            comm_rho_t.push(c_t);
            h_norm.push(schatten2(h));
            if full_rank {
                q0_forward.push(0.0);
                q0_reverse.push(proj_norm * c_t);
            } else {
                let (mut fwd, mut rev) = (0.0, 0.0);
                for i in 0..lambda.len() {
                    for j in 0..lambda.len() {
                        let o = w[(i, j)].norm_sqr();
                        fwd += lambda[i] * o * proj[j];
                        rev += proj[i] * o * lambda[j];
                    }
                }
                let speed = |overlap: f64, num: f64| {
                    if overlap <= OVERLAP_TOL {
                        f64::NAN
                    } else {
                        num / overlap
                    }
                };
                q0_forward.push(speed(fwd, rho_norm * diag_commutator_norm(&kt, &proj)));
                q0_reverse.push(speed(rev, proj_norm * c_t));
            }
            h_tilde.push(ht);
        }
        Ok(Self {
            rho0: rho0.clone(),
            rule,
            rank_tol,
            times: trajectory.times.clone(),
            unitaries: trajectory.unitaries.clone(),
            h_tilde,
            h_norm,
            comm_rho0,
            comm_rho_t,
            q0_forward,
            q0_reverse,
        })
    }

    pub fn rho0(&self) -> &DensityMatrix {
        &self.rho0
    }

    pub fn rule(&self) -> Quadrature {
        self.rule
    }

    /// Number of grid intervals.
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn time(&self, n: usize) -> f64 {
        self.times[n]
    }

    /// `rho_{t_n}`.
    pub fn state_at(&self, n: usize) -> Result<DensityMatrix> {
        self.rho0.evolved(&self.unitaries[n])
    }

    /// Mean of `samples[0..=n]` over `[0, t_n]`; at `t_n = 0` the `tau -> 0` limit `samples[0]`.
    fn average(&self, samples: &[f64], n: usize) -> Result<f64> {
        if n >= samples.len() {
            return Err(Error::InvalidGrid(format!(
                "step {n} beyond grid of {}",
                samples.len() - 1
            )));
        }
        if n == 0 || self.times[n] == 0.0 {
            return Ok(samples[0]);
        }
        if !self.rule.accepts(n) {
            return Err(Error::InvalidGrid(format!(
                "{} quadrature cannot end at step {n}",
                self.rule.name()
            )));
        }
        Ok(mean_on_grid(&samples[..=n], self.rule))
    }

    fn powers(&self, x: f64) -> Vec<f64> {
        let cut = self.rho0.cutoff(self.rank_tol);
        self.rho0
            .eigenvalues()
            .iter()
            .map(|&l| if l <= cut { 0.0 } else { l.powf(x) })
            .collect()
    }

    /// `|[H_t, rho_0^x]|_2` on the grid, `x > 0`.
    pub fn commutator_power_samples(&self, x: f64) -> Vec<f64> {
        let p = self.powers(x);
        self.h_tilde.iter().map(|h| diag_commutator_norm(h, &p)).collect()
    }

    /// `|rho_0^x|_2`, `x > 0`.
    pub fn power_norm(&self, x: f64) -> f64 {
        self.powers(x).iter().map(|p| p * p).sum::<f64>().sqrt()
    }

    pub fn hamiltonian_norms(&self) -> &[f64] {
        &self.h_norm
    }

    /// Evaluator for one entropy kind, order and convention.
    pub fn alpha(&self, kind: EntropyKind, alpha: AlphaParam, convention: GConvention) -> AlphaBounds<'_> {
        AlphaBounds::new(self, kind, alpha, convention, phi_factor)
    }

    pub fn alpha_with_phi(
        &self,
        kind: EntropyKind,
        alpha: AlphaParam,
        convention: GConvention,
        phi: PhiFn,
    ) -> AlphaBounds<'_> {
        AlphaBounds::new(self, kind, alpha, convention, phi)
    }

    /// Forward, reverse and symmetric relative-entropy bounds at step `n`.
    pub fn re_family(&self, n: usize) -> Result<[BoundReport; 3]> {
        let tau = self.times[n];
        let rho_t = self.state_at(n)?;
        let fwd = entropy::quantum_relative_entropy(&rho_t, &self.rho0)?;
        let rev = entropy::quantum_relative_entropy(&self.rho0, &rho_t)?;
        let log_norm = if self.rho0.is_full_rank(self.rank_tol) {
            Some(schatten2(&self.rho0.log()?))
        } else {
            None
        };
        let flags_for = |d: &[Divergence]| Flags {
            divergent: log_norm.is_none() || d.iter().any(|x| !x.is_finite()),
            ..Flags::default()
        };
        let ln = log_norm.unwrap_or(f64::INFINITY);
        let avg_t = self.average(&self.comm_rho_t, n)?;
        let avg_0 = self.average(&self.comm_rho0, n)?;
        let kind = BoundKind::RelativeEntropy;
        Ok([
            report(
                BoundVariant::ReLimit,
                kind,
                1.0,
                tau,
                fwd.value(),
                ln * avg_t,
                1.0,
                flags_for(&[fwd]),
            ),
            report(
                BoundVariant::Reverse,
                kind,
                1.0,
                tau,
                rev.value(),
                ln * avg_0,
                1.0,
                flags_for(&[rev]),
            ),
            report(
                BoundVariant::Symmetric,
                kind,
                1.0,
                tau,
                fwd.value() + rev.value(),
                ln * (avg_t + avg_0),
                1.0,
                flags_for(&[fwd, rev]),
            ),
        ])
    }

    /// Forward, reverse and symmetric min-relative-entropy bounds at step `n`.
    pub fn min_family(&self, n: usize) -> Result<[BoundReport; 3]> {
        let tau = self.times[n];
        let rho_t = self.state_at(n)?;
        let fwd = entropy::min_relative_entropy(&rho_t, &self.rho0, self.rank_tol)?;
        let rev = entropy::min_relative_entropy(&self.rho0, &rho_t, self.rank_tol)?;
        let vanishes = |q: &[f64]| q[..=n].iter().any(|x| x.is_nan());
        let (qf, qr) = (vanishes(&self.q0_forward), vanishes(&self.q0_reverse));
        let flag = |divergent: bool| Flags {
            divergent,
            ..Flags::default()
        };
        let avg = |q: &[f64], bad: bool| if bad { Ok(f64::NAN) } else { self.average(q, n) };
        let avg_f = avg(&self.q0_forward, qf)?;
        let avg_r = avg(&self.q0_reverse, qr)?;
        let kind = BoundKind::Min;
        Ok([
            report(
                BoundVariant::MinLimit,
                kind,
                0.0,
                tau,
                fwd.value().abs(),
                avg_f,
                1.0,
                flag(qf || !fwd.is_finite()),
            ),
            report(
                BoundVariant::Reverse,
                kind,
                0.0,
                tau,
                rev.value().abs(),
                avg_r,
                1.0,
                flag(qr || !rev.is_finite()),
            ),
            report(
                BoundVariant::Symmetric,
                kind,
                0.0,
                tau,
                (fwd.value() + rev.value()).abs(),
                avg_f + avg_r,
                1.0,
                flag(qf || qr || !fwd.is_finite() || !rev.is_finite()),
            ),
        ])
    }

    pub fn re_limit(&self, n: usize) -> Result<BoundReport> {
        Ok(self.re_family(n)?[0])
    }

    pub fn qsl_re(&self, n: usize) -> Result<QslReport> {
        Ok(qsl_times(&self.re_family(n)?))
    }

    pub fn min_bound_and_qsl(&self, n: usize) -> Result<(BoundReport, QslReport)> {
        let family = self.min_family(n)?;
        Ok((family[0], qsl_times(&family)))
    }

    /// `O_alpha(rho_{t_k}||rho_0)` on the whole grid.
    pub fn divergence_samples(&self, kind: EntropyKind, alpha: AlphaParam) -> Result<Vec<f64>> {
        (0..self.times.len())
            .map(|k| entropy::divergence(kind, &self.state_at(k)?, &self.rho0, alpha))
            .collect()
    }
}

/// Bounds for a fixed `(kind, alpha, convention)` at any step of the engine's grid.
#[derive(Debug, Clone)]
pub struct AlphaBounds<'e> {
    engine: &'e BoundEngine,
    kind: EntropyKind,
    alpha: AlphaParam,
    convention: GConvention,
    phi_forward: Option<f64>,
    phi_reverse: Option<f64>,
    /// `G_alpha` and `G_(1-alpha)` samples.
    g_forward: Vec<f64>,
    g_reverse: Vec<f64>,
    loose: Vec<f64>,
}

impl<'e> AlphaBounds<'e> {
    fn new(engine: &'e BoundEngine, kind: EntropyKind, alpha: AlphaParam, convention: GConvention, phi: PhiFn) -> Self {
        let a = alpha.value();
        let lambda_min = if engine.rho0.is_full_rank(engine.rank_tol) {
            engine.rho0.lambda_min()
        } else {
            0.0
        };
        let phi_forward = phi(kind, alpha, lambda_min).ok();
        let phi_reverse = phi(kind, alpha.complement(), lambda_min).ok();
        let c_a = engine.commutator_power_samples(a);
        let c_b = engine.commutator_power_samples(1.0 - a);
        let n_a = engine.power_norm(a);
        let n_b = engine.power_norm(1.0 - a);
        let scaled = |phi: Option<f64>, norm: f64, c: &[f64]| -> Vec<f64> {
            match phi {
                Some(p) => c.iter().map(|x| p * norm * x).collect(),
                None => vec![f64::NAN; c.len()],
            }
        };
        let (g_forward, g_reverse) = match convention {
            GConvention::Appendix => (scaled(phi_forward, n_a, &c_b), scaled(phi_reverse, n_b, &c_a)),
            GConvention::MainText => (scaled(phi_forward, n_b, &c_a), scaled(phi_reverse, n_a, &c_b)),
        };
        let loose = scaled(phi_forward, SQRT_2 * n_a * n_b, &engine.h_norm);
        Self {
            engine,
            kind,
            alpha,
            convention,
            phi_forward,
            phi_reverse,
            g_forward,
            g_reverse,
            loose,
        }
    }

    pub fn convention(&self) -> GConvention {
        self.convention
    }

    /// `Phi_alpha`, `None` when singular.
    pub fn phi(&self) -> Option<f64> {
        self.phi_forward
    }

    /// `G_alpha` on the grid (`NaN` when the prefactor is singular).
    pub fn g_forward_samples(&self) -> &[f64] {
        &self.g_forward
    }

    pub fn g_reverse_samples(&self) -> &[f64] {
        &self.g_reverse
    }

    fn lhs(&self, rho: &DensityMatrix, omega: &DensityMatrix) -> Result<(f64, bool)> {
        match entropy::divergence(self.kind, rho, omega, self.alpha) {
            Ok(v) => Ok((v, false)),
            Err(Error::NonPositivePurity { .. }) => Ok((f64::INFINITY, true)),
            Err(e) => Err(e),
        }
    }

    fn build(
        &self,
        variant: BoundVariant,
        n: usize,
        lhs: (f64, bool),
        samples: &[f64],
        phi: Option<f64>,
    ) -> Result<BoundReport> {
        let flags = Flags {
            divergent: lhs.1,
            singular_phi: phi.is_none(),
            degenerate_drive: false,
        };
        let g_avg = if phi.is_some() {
            self.engine.average(samples, n)?
        } else {
            f64::NAN
        };
        Ok(report(
            variant,
            self.kind.into(),
            self.alpha.value(),
            self.engine.times[n],
            lhs.0,
            g_avg,
            phi.unwrap_or(f64::NAN),
            flags,
        ))
    }

    /// `|1-alpha| O(rho_tau||rho_0) <= tau <<G_alpha>>`.
    pub fn forward(&self, n: usize) -> Result<BoundReport> {
        let rho_t = self.engine.state_at(n)?;
        let lhs = self.lhs(&rho_t, &self.engine.rho0)?;
        self.build(BoundVariant::Forward, n, lhs, &self.g_forward, self.phi_forward)
    }

    /// `|1-alpha| O(rho_0||rho_tau) <= tau <<G_(1-alpha)>>`.
    pub fn reverse(&self, n: usize) -> Result<BoundReport> {
        let rho_t = self.engine.state_at(n)?;
        let lhs = self.lhs(&self.engine.rho0, &rho_t)?;
        self.build(BoundVariant::Reverse, n, lhs, &self.g_reverse, self.phi_reverse)
    }

    pub fn symmetric(&self, n: usize) -> Result<BoundReport> {
        let rho_t = self.engine.state_at(n)?;
        let a = self.lhs(&rho_t, &self.engine.rho0)?;
        let b = self.lhs(&self.engine.rho0, &rho_t)?;
        let sum: Vec<f64> = self.g_forward.iter().zip(&self.g_reverse).map(|(x, y)| x + y).collect();
        let phi = self.phi_reverse.and(self.phi_forward);
        self.build(BoundVariant::Symmetric, n, (a.0 + b.0, a.1 || b.1), &sum, phi)
    }

    /// Cauchy-Schwarz relaxation with `sqrt(2) |rho_0^(1-alpha)| |rho_0^alpha| |H_t|`.
    pub fn loose(&self, n: usize) -> Result<BoundReport> {
        let rho_t = self.engine.state_at(n)?;
        let lhs = self.lhs(&rho_t, &self.engine.rho0)?;
        self.build(BoundVariant::Loose, n, lhs, &self.loose, self.phi_forward)
    }

    /// Forward, reverse and symmetric reports in that order.
    pub fn family(&self, n: usize) -> Result<[BoundReport; 3]> {
        Ok([self.forward(n)?, self.reverse(n)?, self.symmetric(n)?])
    }

    pub fn qsl(&self, n: usize) -> Result<QslReport> {
        Ok(qsl_times(&self.family(n)?))
    }

    pub fn deltas(&self, n: usize) -> Result<MeritDeltas> {
        Ok(merit_deltas(&self.forward(n)?, &self.reverse(n)?))
    }
}

fn last_step(trajectory: &Trajectory) -> usize {
    trajectory.steps()
}

pub fn bound_forward(
    kind: EntropyKind,
    alpha: AlphaParam,
    rho0: &DensityMatrix,
    trajectory: &Trajectory,
    convention: GConvention,
) -> Result<BoundReport> {
    BoundEngine::new(rho0, trajectory, Quadrature::Simpson)?
        .alpha(kind, alpha, convention)
        .forward(last_step(trajectory))
}

pub fn bound_reverse(
    kind: EntropyKind,
    alpha: AlphaParam,
    rho0: &DensityMatrix,
    trajectory: &Trajectory,
    convention: GConvention,
) -> Result<BoundReport> {
    BoundEngine::new(rho0, trajectory, Quadrature::Simpson)?
        .alpha(kind, alpha, convention)
        .reverse(last_step(trajectory))
}

pub fn bound_symmetric(
    kind: EntropyKind,
    alpha: AlphaParam,
    rho0: &DensityMatrix,
    trajectory: &Trajectory,
    convention: GConvention,
) -> Result<BoundReport> {
    BoundEngine::new(rho0, trajectory, Quadrature::Simpson)?
        .alpha(kind, alpha, convention)
        .symmetric(last_step(trajectory))
}

pub fn bound_loose(
    kind: EntropyKind,
    alpha: AlphaParam,
    rho0: &DensityMatrix,
    trajectory: &Trajectory,
) -> Result<BoundReport> {
    BoundEngine::new(rho0, trajectory, Quadrature::Simpson)?
        .alpha(kind, alpha, GConvention::default())
        .loose(last_step(trajectory))
}

pub fn re_limit_bound(rho0: &DensityMatrix, trajectory: &Trajectory) -> Result<BoundReport> {
    if !rho0.is_full_rank(DEFAULT_RANK_TOL) {
        return Err(Error::RequiresFullRank {
            lambda_min: rho0.lambda_min(),
        });
    }
    BoundEngine::new(rho0, trajectory, Quadrature::Simpson)?.re_limit(last_step(trajectory))
}

pub fn qsl_re(rho0: &DensityMatrix, trajectory: &Trajectory) -> Result<QslReport> {
    if !rho0.is_full_rank(DEFAULT_RANK_TOL) {
        return Err(Error::RequiresFullRank {
            lambda_min: rho0.lambda_min(),
        });
    }
    BoundEngine::new(rho0, trajectory, Quadrature::Simpson)?.qsl_re(last_step(trajectory))
}

pub fn min_bound_and_qsl(
    rho0: &DensityMatrix,
    trajectory: &Trajectory,
    rank_tol: f64,
) -> Result<(BoundReport, QslReport)> {
    BoundEngine::with_rank_tol(rho0, trajectory, Quadrature::Simpson, rank_tol)?
        .min_bound_and_qsl(last_step(trajectory))
}

/// Dense `G_alpha(t)` for each sampled Hamiltonian.
pub fn g_functional(
    kind: EntropyKind,
    alpha: AlphaParam,
    rho0: &DensityMatrix,
    hamiltonians: &[ComplexMatrix],
    convention: GConvention,
) -> Result<Vec<f64>> {
    let lambda_min = if rho0.is_full_rank(DEFAULT_RANK_TOL) {
        rho0.lambda_min()
    } else {
        0.0
    };
    let phi = phi_factor(kind, alpha, lambda_min)?;
    let a = alpha.value();
    let (norm_exp, comm_exp) = match convention {
        GConvention::Appendix => (a, 1.0 - a),
        GConvention::MainText => (1.0 - a, a),
    };
    let norm = schatten2(&rho0.power(norm_exp)?);
    let p = rho0.power(comm_exp)?;
    hamiltonians
        .iter()
        .map(|h| Ok(phi * norm * schatten2(&commutator(h, &p)?)))
        .collect()
}

/// Dense `Q_0^t(A, B) = |A|_2 |[U_t^dagger H_t U_t, B]|_2 / |Tr(A U_t B U_t^dagger)|`.
pub fn q0_speed(a: &ComplexMatrix, b: &ComplexMatrix, trajectory: &Trajectory) -> Result<Vec<f64>> {
    let a_norm = schatten2(a);
    trajectory
        .times
        .iter()
        .zip(&trajectory.unitaries)
        .zip(&trajectory.hamiltonians)
        .map(|((&t, u), h)| {
            let overlap = linalg::trace_product(a, &linalg::conjugate(u, b)).norm();
            if overlap <= OVERLAP_TOL {
                return Err(Error::VanishingOverlap { t, overlap });
            }
            let k = u.adjoint() * h * u;
            Ok(a_norm * schatten2(&commutator(&k, b)?) / overlap)
        })
        .collect()
}

/// `(I_L, (Delta H)^2)` with `I_L = |[H, rho_0]|_2^2 / 4`.
pub fn skew_information(rho0: &DensityMatrix, h: &ComplexMatrix) -> Result<(f64, f64)> {
    linalg::check_hermitian(h)?;
    let rho = rho0.matrix();
    let c = commutator(h, rho)?;
    let il = 0.25 * c.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mean = linalg::trace_product(rho, h).re;
    let second = linalg::trace_product(rho, &(h * h)).re;
    Ok((il, second - mean * mean))
}
