//! `entropies`, `bounds` and `qsl` tables for a configured scenario.

use std::cmp::Ordering;

use serde_json::json;

use crate::bounds::{qsl_times, BoundEngine, BoundReport, QslReport};
use crate::entropy::{self, EntropyKind};
use crate::evolution::{propagate, Trajectory};
use crate::parallel::Execution;
use crate::scan::config::Scenario;
use crate::scan::output::{fmt_sig, printed_slack, Table};
use crate::{Error, Result};

/// Tables produced by one command and the number of unflagged violations among them.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checked: usize,
    pub violations: usize,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub const ENTROPY_COLUMNS: [&str; 10] = [
    "tau",
    "alpha",
    "renyi",
    "renyi_reverse",
    "tsallis",
    "tsallis_reverse",
    "relative_entropy",
    "relative_entropy_reverse",
    "min",
    "min_reverse",
];

pub const BOUND_COLUMNS: [&str; 11] = [
    "tau", "alpha", "kind", "variant", "lhs", "rhs", "slack", "phi", "g_avg", "qsl", "flags",
];

pub const DELTA_COLUMNS: [&str; 9] = [
    "tau",
    "alpha",
    "kind",
    "delta_forward",
    "delta_reverse",
    "delta_symmetric",
    "delta_forward_normalized",
    "delta_reverse_normalized",
    "delta_symmetric_normalized",
];

pub const QSL_COLUMNS: [&str; 8] = [
    "tau",
    "alpha",
    "kind",
    "forward",
    "reverse",
    "symmetric",
    "tau_max",
    "flags",
];

/// One trajectory per horizon, each with `scenario.steps` intervals.
fn engines(scenario: &Scenario, exec: Execution) -> Result<Vec<BoundEngine>> {
    exec.map(&scenario.taus, |&tau| {
        let trajectory: Trajectory = propagate(&scenario.hamiltonian, tau, scenario.steps)?;
        BoundEngine::with_rank_tol(&scenario.rho0, &trajectory, scenario.quadrature, scenario.rank_tol)
    })
    .into_iter()
    .collect()
}

fn by_tau_alpha(a: &(f64, f64, usize), b: &(f64, f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// Rows keyed by `(tau, alpha, position)` and sorted on that key.
fn sorted(mut keyed: Vec<((f64, f64, usize), Vec<String>)>) -> Vec<Vec<String>> {
    keyed.sort_by(|a, b| by_tau_alpha(&a.0, &b.0));
    keyed.into_iter().map(|(_, row)| row).collect()
}

fn parameters(scenario: &Scenario) -> serde_json::Value {
    json!({ "scenario": scenario.name, "config": scenario.source })
}

fn finite_or_inf(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::NonPositivePurity { .. }) => Ok(f64::INFINITY),
        other => other,
    }
}

/// All four divergences in both directions at every `(tau, alpha)`.
pub fn entropies(scenario: &Scenario, exec: Execution) -> Result<Outcome> {
    let engines = engines(scenario, exec)?;
    let per_tau: Vec<Result<Vec<_>>> = exec.map(&engines, |engine| {
        let n = engine.steps();
        let tau = engine.time(n);
        let rho0 = engine.rho0();
        let rho_t = engine.state_at(n)?;
        let re_f = entropy::quantum_relative_entropy(&rho_t, rho0)?.value();
        let re_r = entropy::quantum_relative_entropy(rho0, &rho_t)?.value();
        let min_f = entropy::min_relative_entropy(&rho_t, rho0, scenario.rank_tol)?.value();
        let min_r = entropy::min_relative_entropy(rho0, &rho_t, scenario.rank_tol)?.value();
        scenario
            .alphas
            .iter()
            .enumerate()
            .map(|(i, &alpha)| {
                let div = |kind, a: &_, b: &_| finite_or_inf(entropy::divergence(kind, a, b, alpha));
                let values = [
                    tau,
                    alpha.value(),
                    div(EntropyKind::Renyi, &rho_t, rho0)?,
                    div(EntropyKind::Renyi, rho0, &rho_t)?,
                    div(EntropyKind::Tsallis, &rho_t, rho0)?,
                    div(EntropyKind::Tsallis, rho0, &rho_t)?,
                    re_f,
                    re_r,
                    min_f,
                    min_r,
                ];
                Ok(((tau, alpha.value(), i), values.iter().map(|&v| fmt_sig(v)).collect()))
            })
            .collect()
    });
    let mut keyed = Vec::new();
    for rows in per_tau {
        keyed.extend(rows?);
    }
    let mut table = Table::new("entropies", &ENTROPY_COLUMNS).with_parameters(parameters(scenario));
    table.rows = sorted(keyed);
    Ok(Outcome {
        tables: vec![table],
        checked: 0,
        violations: 0,
    })
}

/// Reports for one horizon: per alpha the Rényi and Tsallis forward, reverse, symmetric
/// and loose bounds, then the relative-entropy and min families.
struct HorizonReports {
    per_alpha: Vec<Vec<(BoundReport, f64)>>,
    limits: Vec<(BoundReport, f64)>,
    qsl: Vec<QslReport>,
}

fn with_components(family: [BoundReport; 3]) -> Vec<(BoundReport, f64)> {
    let q = qsl_times(&family);
    family.into_iter().zip(q.components).collect()
}

fn horizon_reports(scenario: &Scenario, engine: &BoundEngine) -> Result<HorizonReports> {
    let n = engine.steps();
    let mut per_alpha = Vec::with_capacity(scenario.alphas.len());
    let mut qsl = Vec::new();
    for &alpha in &scenario.alphas {
        let mut rows = Vec::with_capacity(8);
        for kind in EntropyKind::ALL {
            let b = engine.alpha(kind, alpha, scenario.convention);
            let family = b.family(n)?;
            qsl.push(qsl_times(&family));
            rows.extend(with_components(family));
            let loose = b.loose(n)?;
            rows.push((loose, qsl_times(&[loose; 3]).components[0]));
        }
        per_alpha.push(rows);
    }
    let re = engine.re_family(n)?;
    let min = engine.min_family(n)?;
    qsl.push(qsl_times(&re));
    qsl.push(qsl_times(&min));
    let mut limits = with_components(re);
    limits.extend(with_components(min));
    Ok(HorizonReports { per_alpha, limits, qsl })
}

fn bound_row(r: &BoundReport, qsl: f64) -> Vec<String> {
    vec![
        fmt_sig(r.tau),
        fmt_sig(r.alpha),
        r.kind.name().into(),
        r.variant.name().into(),
        fmt_sig(r.lhs),
        fmt_sig(r.rhs),
        fmt_sig(printed_slack(r.lhs, r.rhs)),
        fmt_sig(r.phi),
        fmt_sig(r.g_avg),
        fmt_sig(qsl),
        r.flags.to_string(),
    ]
}

fn qsl_row(q: &QslReport) -> Vec<String> {
    vec![
        fmt_sig(q.tau),
        fmt_sig(q.alpha),
        q.kind.name().into(),
        fmt_sig(q.components[0]),
        fmt_sig(q.components[1]),
        fmt_sig(q.components[2]),
        fmt_sig(q.tau_max),
        q.flags.to_string(),
    ]
}

/// `delta / max(delta)` over the grid, `0` when the maximum is not positive.
fn normalize(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    values.iter().map(|&v| if max > 0.0 { v / max } else { 0.0 }).collect()
}

fn all_horizons(scenario: &Scenario, exec: Execution) -> Result<Vec<HorizonReports>> {
    let engines = engines(scenario, exec)?;
    exec.map(&engines, |e| horizon_reports(scenario, e))
        .into_iter()
        .collect()
}

/// `bounds.csv` with every variant at every grid point, and `deltas.csv` with the merits.
pub fn bounds(scenario: &Scenario, exec: Execution) -> Result<Outcome> {
    let horizons = all_horizons(scenario, exec)?;
    let mut keyed = Vec::new();
    let mut deltas = Vec::new();
    let (mut checked, mut violations) = (0, 0);
    for h in &horizons {
        let all = h.per_alpha.iter().flatten().chain(&h.limits);
        for (i, (r, q)) in all.enumerate() {
            checked += 1;
            violations += usize::from(!r.is_valid());
            keyed.push(((r.tau, r.alpha, i), bound_row(r, *q)));
        }
        for rows in &h.per_alpha {
            // Rows per kind: forward, reverse, symmetric, loose.
            for chunk in rows.chunks(4) {
                let (f, rv) = (&chunk[0].0, &chunk[1].0);
                let m = crate::bounds::merit_deltas(f, rv);
                deltas.push((f.tau, f.alpha, f.kind.name(), [m.forward, m.reverse, m.symmetric]));
            }
        }
    }
    deltas.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(b.2)));
    let mut delta_table = Table::new("deltas", &DELTA_COLUMNS).with_parameters(parameters(scenario));
    for kind in EntropyKind::ALL {
        let rows: Vec<_> = deltas.iter().filter(|d| d.2 == kind.name()).collect();
        let norm: Vec<Vec<f64>> = (0..3)
            .map(|c| normalize(&rows.iter().map(|d| d.3[c]).collect::<Vec<_>>()))
            .collect();
        for (k, d) in rows.iter().enumerate() {
            let mut row = vec![fmt_sig(d.0), fmt_sig(d.1), d.2.to_string()];
            row.extend(d.3.iter().map(|&v| fmt_sig(v)));
            row.extend((0..3).map(|c| fmt_sig(norm[c][k])));
            delta_table.push(row);
        }
    }
    let mut table = Table::new("bounds", &BOUND_COLUMNS).with_parameters(parameters(scenario));
    table.rows = sorted(keyed);
    Ok(Outcome {
        tables: vec![table, delta_table],
        checked,
        violations,
    })
}

/// `qsl.csv` with the forward, reverse and symmetric speed-limit times per family.
pub fn qsl(scenario: &Scenario, exec: Execution) -> Result<Outcome> {
    let horizons = all_horizons(scenario, exec)?;
    let mut keyed = Vec::new();
    let (mut checked, mut violations) = (0, 0);
    for h in &horizons {
        for (i, q) in h.qsl.iter().enumerate() {
            checked += 1;
            violations += usize::from(!q.is_valid());
            keyed.push(((q.tau, q.alpha, i), qsl_row(q)));
        }
    }
    let mut table = Table::new("qsl", &QSL_COLUMNS).with_parameters(parameters(scenario));
    table.rows = sorted(keyed);
    Ok(Outcome {
        tables: vec![table],
        checked,
        violations,
    })
}
