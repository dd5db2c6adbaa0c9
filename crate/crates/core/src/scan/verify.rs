//! Seeded invariant sweeps over random states and drives.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::bounds::{
    merit_deltas, phi_factor, qsl_times, skew_information, BoundEngine, BoundReport, GConvention, PhiFn, VALIDITY_TOL,
};
use crate::entropy::{self, AlphaParam, EntropyKind};
use crate::evolution::{propagate, Quadrature};
use crate::hamiltonian::HamiltonianSpec;
use crate::linalg::{commutator, schatten2};
use crate::parallel::Execution;
use crate::qubit::QubitSpec;
use crate::scan::config::{self, ScenarioConfig, VerifyConfig};
use crate::scan::ensemble::{self, rng_for};
use crate::scan::figures::{REFERENCE_RATIO, REFERENCE_STATE, VELOCITY};
use crate::scan::output::{fmt_sig, Table};
use crate::state::DensityMatrix;
use crate::{Error, Result};

pub const CHAIN_TOL: f64 = 1e-9;
pub const SKEW_TOL: f64 = 1e-12;
pub const COMMUTATOR_TOL: f64 = 1e-12;
pub const LOOSE_TOL: f64 = 1e-12;
pub const CONVENTION_TOL: f64 = 1e-12;
pub const MERIT_TOL: f64 = 1e-12;
pub const DEGENERACY_TOL: f64 = 1e-12;
pub const LIMIT_TOL: f64 = 1e-3;
/// `alpha = 1 - LIMIT_GAP` in the limit check.
pub const LIMIT_GAP: f64 = 1e-4;
pub const DERIVATIVE_TOL: f64 = 5e-6;
pub const DERIVATIVE_STEPS: usize = 2048;
pub const DERIVATIVE_TAU: f64 = 2.0;
pub const DERIVATIVE_POINTS: usize = 64;
/// Intervals of the constant-drive trajectory in the degeneracy check.
pub const DEGENERACY_STEPS: usize = 64;

const COMMUTATOR_SALT: u64 = 0x636f_6d6d;
const LIMIT_SALT: u64 = 0x6c69_6d69;
const DEGENERACY_SALT: u64 = 0x6465_6765;

/// Worst margin of one invariant; a check fails when its margin is below `-tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl Check {
    pub fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            checks: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            tolerance,
            first_failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Records `margin`; `NaN` counts as a failure.
    pub fn record(&mut self, margin: f64, context: impl FnOnce() -> String) {
        self.checks += 1;
        let ok = margin >= -self.tolerance;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(context());
            }
        }
        if margin < self.worst_margin || margin.is_nan() {
            self.worst_margin = margin;
        }
    }

    pub fn merge(&mut self, other: &Check) {
        self.checks += other.checks;
        self.failures += other.failures;
        if other.worst_margin < self.worst_margin || other.worst_margin.is_nan() {
            self.worst_margin = other.worst_margin;
        }
        if self.first_failure.is_none() {
            self.first_failure.clone_from(&other.first_failure);
        }
    }
}

/// Checks keyed by name, merged in a fixed order.
#[derive(Debug, Clone, Default)]
struct Checks(BTreeMap<&'static str, Check>);

impl Checks {
    fn get(&mut self, name: &'static str, tolerance: f64) -> &mut Check {
        self.0.entry(name).or_insert_with(|| Check::new(name, tolerance))
    }

    fn merge(&mut self, other: &Checks) {
        for (name, c) in &other.0 {
            self.get(name, c.tolerance).merge(c);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub instances: usize,
    pub dims: Vec<usize>,
    pub steps: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "verify",
            &["check", "checks", "failures", "worst_margin", "tolerance", "status"],
        );
        for c in &self.checks {
            t.push(vec![
                c.name.into(),
                c.checks.to_string(),
                c.failures.to_string(),
                fmt_sig(c.worst_margin),
                fmt_sig(c.tolerance),
                if c.passed() { "pass" } else { "fail" }.into(),
            ]);
        }
        t
    }
}

/// Scenario files shipped in `configs/`, swept alongside the random ensemble.
pub const SHIPPED_SCENARIOS: [(&str, &str); 4] = [
    ("reference", include_str!("../../configs/reference.json")),
    ("commuting", include_str!("../../configs/commuting.json")),
    ("qutrit", include_str!("../../configs/qutrit.json")),
    ("singular_phi", include_str!("../../configs/singular_phi.json")),
];

/// State and drive of each shipped scenario.
pub fn shipped_systems() -> Result<Vec<(String, DensityMatrix, HamiltonianSpec)>> {
    SHIPPED_SCENARIOS
        .iter()
        .map(|(name, text)| {
            let cfg: ScenarioConfig = config::parse(text, name).map_err(|e| Error::Config(e.0))?;
            Ok((
                name.to_string(),
                cfg.state.build().map_err(|e| Error::Config(e.0))?,
                cfg.hamiltonian.build().map_err(|e| Error::Config(e.0))?,
            ))
        })
        .collect()
}

/// The driven reference qubit.
pub fn reference_system() -> Result<(DensityMatrix, HamiltonianSpec)> {
    let (r, theta, phi) = REFERENCE_STATE;
    let spec = QubitSpec::landau_zener(r, theta, phi, REFERENCE_RATIO * VELOCITY, VELOCITY)?;
    Ok((spec.state()?, spec.hamiltonian()?))
}

fn lambda_min_or_zero(rho: &DensityMatrix) -> f64 {
    if rho.is_full_rank(crate::state::DEFAULT_RANK_TOL) {
        rho.lambda_min()
    } else {
        0.0
    }
}

fn bound_margin(r: &BoundReport) -> Option<f64> {
    (!r.flags.excludes()).then_some(r.slack)
}

pub struct Verifier<'a> {
    cfg: &'a VerifyConfig,
    exec: Execution,
    phi: PhiFn,
}

impl<'a> Verifier<'a> {
    pub fn new(cfg: &'a VerifyConfig, exec: Execution) -> Self {
        Self {
            cfg,
            exec,
            phi: phi_factor,
        }
    }

    /// Replaces the Rényi prefactor used by the `phi` family.
    pub fn with_phi(mut self, phi: PhiFn) -> Self {
        self.phi = phi;
        self
    }

    fn alphas(&self) -> Result<Vec<AlphaParam>> {
        self.cfg.alphas.iter().map(|&a| AlphaParam::new(a)).collect()
    }

    /// Bounds, speed limits, prefactor and inequality chain over the random ensemble
    /// plus the shipped scenarios.
    pub fn sweep(&self) -> Result<Vec<Check>> {
        let indices = self.cfg.sweep_indices().map_err(|e| Error::Config(e.0))?;
        let alphas = self.alphas()?;
        let horizon = self.cfg.horizon();
        let shipped = shipped_systems()?;
        let per_instance = self
            .exec
            .map_range(self.cfg.instances + shipped.len(), |i| -> Result<Checks> {
                let (rho0, h, label) = if let Some(k) = i.checked_sub(self.cfg.instances) {
                    let (name, rho0, h) = shipped[k].clone();
                    (rho0, h, name)
                } else {
                    let inst = ensemble::instance(self.cfg.seed, i, &self.cfg.dims, horizon)?;
                    (inst.rho0, inst.hamiltonian, format!("instance {i}"))
                };
                let traj = propagate(&h, horizon, self.cfg.steps)?;
                let engine = BoundEngine::new(&rho0, &traj, Quadrature::Simpson)?;
                let mut checks = Checks::default();
                self.instance_checks(&engine, &h, &alphas, &indices, &label, &mut checks)?;
                Ok(checks)
            });
        let mut all = Checks::default();
        for c in per_instance {
            all.merge(&c?);
        }
        Ok(all.0.into_values().collect())
    }

    fn instance_checks(
        &self,
        engine: &BoundEngine,
        h: &HamiltonianSpec,
        alphas: &[AlphaParam],
        indices: &[usize],
        label: &str,
        checks: &mut Checks,
    ) -> Result<()> {
        let rho0 = engine.rho0();
        let full_rank = rho0.is_full_rank(crate::state::DEFAULT_RANK_TOL);
        let lambda_min = lambda_min_or_zero(rho0);
        let states: Vec<DensityMatrix> = indices.iter().map(|&n| engine.state_at(n)).collect::<Result<_>>()?;
        let ctx = |what: &str, a: f64, n: usize| format!("{label}: {what} alpha={a} t={}", engine.time(n));

        for (k, &n) in indices.iter().enumerate() {
            for family in [engine.re_family(n)?, engine.min_family(n)?] {
                let c = checks.get("bounds", VALIDITY_TOL);
                for r in &family {
                    if let Some(m) = bound_margin(r) {
                        c.record(m, || ctx(r.variant.name(), r.alpha, n));
                    }
                }
                let q = qsl_times(&family);
                if !q.flags.excludes() {
                    checks
                        .get("qsl", VALIDITY_TOL)
                        .record(q.tau - q.tau_max, || ctx(q.kind.name(), q.alpha, n));
                }
            }
            let (il, var) = skew_information(rho0, &h.sample(engine.time(n))?)?;
            checks
                .get("skew", SKEW_TOL)
                .record((var - il).min(il), || ctx("skew", 0.0, n));
            let s = entropy::quantum_relative_entropy(&states[k], rho0)?.value();
            if full_rank {
                checks
                    .get("chain", CHAIN_TOL)
                    .record(-lambda_min.ln() - s, || ctx("S <= -ln lambda_min", 1.0, n));
            }
            for &alpha in alphas {
                let a = alpha.value();
                let h_a = entropy::tsallis(&states[k], rho0, alpha);
                if let Ok(h_a) = h_a {
                    checks.get("chain", CHAIN_TOL).record(s - h_a, || ctx("H <= S", a, n));
                }
                if full_rank {
                    let g = entropy::relative_purity(&states[k], rho0, alpha)?;
                    let floor = 1.0 + (1.0 - a) * lambda_min.ln();
                    checks
                        .get("chain", CHAIN_TOL)
                        .record(g - floor, || ctx("g floor", a, n));
                    if let Ok(phi) = (self.phi)(EntropyKind::Renyi, alpha, lambda_min) {
                        checks
                            .get("phi", VALIDITY_TOL)
                            .record(g * phi - 1.0, || ctx("g phi >= 1", a, n));
                    }
                }
            }
        }

        for &alpha in alphas {
            let a = alpha.value();
            let mut appendix_symmetric = Vec::new();
            for convention in GConvention::ALL {
                for kind in EntropyKind::ALL {
                    let b = engine.alpha(kind, alpha, convention);
                    for &n in indices {
                        let family = b.family(n)?;
                        let loose = b.loose(n)?;
                        let c = checks.get("bounds", VALIDITY_TOL);
                        for r in family.iter().chain([&loose]) {
                            if let Some(m) = bound_margin(r) {
                                c.record(m, || {
                                    ctx(
                                        &format!("{} {} {}", kind.name(), r.variant.name(), convention.name()),
                                        a,
                                        n,
                                    )
                                });
                            }
                        }
                        let q = qsl_times(&family);
                        if !q.flags.excludes() {
                            checks
                                .get("qsl", VALIDITY_TOL)
                                .record(q.tau - q.tau_max, || ctx(kind.name(), a, n));
                        }
                        let [f, r, _] = &family;
                        if !f.flags.excludes() && !r.flags.excludes() {
                            let m = merit_deltas(f, r);
                            let from_fields = |x: &BoundReport| x.tau * x.g_avg - (1.0 - x.alpha).abs() * x.lhs;
                            let (d1, d2) = (from_fields(f), from_fields(r));
                            let err = (m.forward - d1)
                                .abs()
                                .max((m.reverse - d2).abs())
                                .max((m.symmetric - (d1 + d2)).abs());
                            checks
                                .get("merit_consistency", MERIT_TOL)
                                .record(-err, || ctx("merits", a, n));
                        }
                        if convention == GConvention::MainText && !f.flags.excludes() && !loose.flags.excludes() {
                            checks
                                .get("loose_dominates", LOOSE_TOL)
                                .record(loose.rhs - f.rhs, || ctx(kind.name(), a, n));
                        }
                        if kind == EntropyKind::Tsallis && convention == GConvention::Appendix {
                            appendix_symmetric.push(family[2].rhs);
                        }
                    }
                }
            }
            let main = engine.alpha(EntropyKind::Tsallis, alpha, GConvention::MainText);
            for (k, &n) in indices.iter().enumerate() {
                let diff = (main.symmetric(n)?.rhs - appendix_symmetric[k]).abs();
                checks
                    .get("convention_independence", CONVENTION_TOL)
                    .record(-diff, || ctx("tsallis symmetric", a, n));
            }
            if full_rank {
                let b = engine.alpha_with_phi(EntropyKind::Renyi, alpha, GConvention::Appendix, self.phi);
                for &n in indices {
                    for r in b.family(n)? {
                        if let Some(m) = bound_margin(&r) {
                            checks
                                .get("phi", VALIDITY_TOL)
                                .record(m, || ctx(r.variant.name(), a, n));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `|[X, Y]|_2 <= sqrt(2) |X|_2 |Y|_2` on random complex pairs of dimension 2 to 8.
    pub fn commutators(&self) -> Result<Check> {
        let results = self.exec.map_range(self.cfg.commutator_pairs, |k| -> Result<f64> {
            let mut rng = rng_for(self.cfg.seed ^ COMMUTATOR_SALT, k as u64);
            let d = 2 + k % 7;
            let x = ensemble::ginibre(&mut rng, d, d);
            let y = ensemble::ginibre(&mut rng, d, d);
            Ok(SQRT_2 * schatten2(&x) * schatten2(&y) - schatten2(&commutator(&x, &y)?))
        });
        let mut c = Check::new("commutator", COMMUTATOR_TOL);
        for (k, m) in results.into_iter().enumerate() {
            c.record(m?, || format!("pair {k}"));
        }
        Ok(c)
    }

    /// Min-relative entropy and its speed limit vanish for full-rank states.
    pub fn min_degeneracy(&self) -> Result<Check> {
        let results = self
            .exec
            .map_range(self.cfg.degeneracy_states, |k| -> Result<[f64; 4]> {
                let mut rng = rng_for(self.cfg.seed ^ DEGENERACY_SALT, k as u64);
                let d = self.cfg.dims[k % self.cfg.dims.len()];
                let rho0 = ensemble::random_state(&mut rng, d, d)?;
                let rotated = rho0.evolved(&ensemble::random_unitary(&mut rng, d))?;
                let tol = crate::state::DEFAULT_RANK_TOL;
                let fwd = entropy::min_relative_entropy(&rotated, &rho0, tol)?.value();
                let rev = entropy::min_relative_entropy(&rho0, &rotated, tol)?.value();
                let h = HamiltonianSpec::constant(ensemble::random_hermitian(&mut rng, d))?;
                let traj = propagate(&h, 1.0, DEGENERACY_STEPS)?;
                let engine = BoundEngine::new(&rho0, &traj, Quadrature::Simpson)?;
                let (bound, qsl) = engine.min_bound_and_qsl(DEGENERACY_STEPS)?;
                Ok([fwd, rev, bound.lhs, qsl.tau_max])
            });
        let mut c = Check::new("min_degeneracy", DEGENERACY_TOL);
        for (k, r) in results.into_iter().enumerate() {
            let [fwd, rev, lhs, tau0] = r?;
            c.record(-fwd.abs().max(rev.abs()).max(lhs.abs()), || {
                format!("state {k}: R_0 = {fwd}, {rev}, {lhs}")
            });
            // The speed limit must be exactly zero.
            c.record(if tau0 == 0.0 { 0.0 } else { f64::NEG_INFINITY }, || {
                format!("state {k}: tau_0 = {tau0}")
            });
        }
        Ok(c)
    }

    /// Rényi and Tsallis divergences approach the relative entropy at `alpha = 1 - 1e-4`.
    pub fn limit(&self) -> Result<Check> {
        let alpha = AlphaParam::new(1.0 - LIMIT_GAP)?;
        let results = self.exec.map_range(self.cfg.limit_pairs, |k| -> Result<[f64; 3]> {
            let mut rng = rng_for(self.cfg.seed ^ LIMIT_SALT, k as u64);
            let d = 2 + k % 2;
            let rho = ensemble::random_state(&mut rng, d, d)?;
            let omega = ensemble::random_state(&mut rng, d, d)?;
            Ok([
                entropy::renyi(&rho, &omega, alpha)?,
                entropy::tsallis(&rho, &omega, alpha)?,
                entropy::quantum_relative_entropy(&rho, &omega)?.value(),
            ])
        });
        let mut c = Check::new("limit", LIMIT_TOL);
        for (k, r) in results.into_iter().enumerate() {
            let [renyi, tsallis, s] = r?;
            c.record(-(renyi - s).abs().max((tsallis - s).abs()), || {
                format!("pair {k}: R = {renyi}, H = {tsallis}, S = {s}")
            });
        }
        Ok(c)
    }

    /// Central differences of `O_alpha(rho_t||rho_0)` against `G_alpha(t) / |1 - alpha|`
    /// in the appendix convention, on the reference qubit and full-rank random instances.
    pub fn derivative(&self) -> Result<Check> {
        let alphas = self.alphas()?;
        let mut systems = vec![reference_system()?];
        let mut i = 0;
        while systems.len() < self.cfg.derivative_instances + 1 {
            let inst = ensemble::instance(self.cfg.seed, i, &self.cfg.dims, DERIVATIVE_TAU)?;
            if inst.full_rank {
                systems.push((inst.rho0, inst.hamiltonian));
            }
            i += 1;
        }
        let points: Vec<usize> = (1..=DERIVATIVE_POINTS)
            .map(|j| (j as f64 * DERIVATIVE_STEPS as f64 / (DERIVATIVE_POINTS + 1) as f64).round() as usize)
            .collect();
        let dt = DERIVATIVE_TAU / DERIVATIVE_STEPS as f64;
        let results = self.exec.map(&systems, |(rho0, h)| -> Result<Check> {
            let traj = propagate(h, DERIVATIVE_TAU, DERIVATIVE_STEPS)?;
            let engine = BoundEngine::new(rho0, &traj, Quadrature::Simpson)?;
            let mut c = Check::new("derivative", DERIVATIVE_TOL);
            let neighbours: Vec<(DensityMatrix, DensityMatrix)> = points
                .iter()
                .map(|&k| Ok((engine.state_at(k - 1)?, engine.state_at(k + 1)?)))
                .collect::<Result<_>>()?;
            for kind in EntropyKind::ALL {
                for &alpha in &alphas {
                    let b = engine.alpha(kind, alpha, GConvention::Appendix);
                    if b.phi().is_none() {
                        continue;
                    }
                    let g = b.g_forward_samples();
                    let scale = (1.0 - alpha.value()).abs();
                    for (&k, (before, after)) in points.iter().zip(&neighbours) {
                        let o = |s: &DensityMatrix| entropy::divergence(kind, s, rho0, alpha);
                        let slope = (o(after)? - o(before)?) / (2.0 * dt);
                        c.record(g[k] / scale - slope.abs(), || {
                            format!("{} alpha={} t={}", kind.name(), alpha.value(), engine.time(k))
                        });
                    }
                }
            }
            Ok(c)
        });
        let mut all = Check::new("derivative", DERIVATIVE_TOL);
        for c in results {
            all.merge(&c?);
        }
        Ok(all)
    }

    pub fn run(&self) -> Result<VerifyReport> {
        let mut checks = self.sweep()?;
        checks.push(self.commutators()?);
        checks.push(self.min_degeneracy()?);
        checks.push(self.limit()?);
        checks.push(self.derivative()?);
        Ok(VerifyReport {
            seed: self.cfg.seed,
            instances: self.cfg.instances,
            dims: self.cfg.dims.clone(),
            steps: self.cfg.steps,
            checks,
        })
    }
}
