//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::Instant;

use qslbound::entropy::{self, AlphaParam};
use qslbound::evolution::propagate;
use qslbound::linalg::{commutator, schatten2};
use qslbound::parallel::Execution;
use qslbound::qubit::{closed_trajectory, purity_closed, quantifiers, QubitSpec};
use qslbound::scan::config::{FigureName, FiguresConfig, VerifyConfig};
use qslbound::scan::figures::{self, FigureOutcome};
use qslbound::scan::verify::{Check, Verifier};

const SWEEP_SECONDS: f64 = 60.0;
const FIGURE_SECONDS: f64 = 30.0;
const PURITY_TOL: f64 = 1e-8;
const PURITY_STEPS: usize = 2048;
const QUANTIFIER_TOL: f64 = 1e-9;
const ORACLE_TAU: f64 = 10.0;
const ORACLE_RATIOS: [f64; 4] = [0.5, 1.0, 5.0, 10.0];
const ALPHAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

struct Suite {
    failed: usize,
}

impl Suite {
    fn report(&mut self, id: usize, title: &str, pass: bool, detail: String) {
        let status = if pass { "PASS" } else { "FAIL" };
        println!("{status} {id} {title}: {detail}");
        self.failed += usize::from(!pass);
    }
}

fn summary(c: &Check) -> String {
    let mut s = format!(
        "{} checks, {} failures, worst margin {:.3e} (tol {:.0e})",
        c.checks, c.failures, c.worst_margin, c.tolerance
    );
    if let Some(f) = &c.first_failure {
        s += &format!("; first failure {f}");
    }
    s
}

fn find<'a>(checks: &'a [Check], name: &str) -> &'a Check {
    checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("missing check {name}"))
}

fn reference(ratio: f64) -> QubitSpec {
    QubitSpec::landau_zener(0.25, FRAC_PI_4, FRAC_PI_4, ratio, 1.0).expect("valid reference qubit")
}

/// Largest `|g_numeric - g_closed|` along the propagated trajectory.
fn purity_discrepancy() -> qslbound::Result<(f64, String)> {
    let mut worst = (0.0, String::new());
    for ratio in ORACLE_RATIOS {
        let spec = reference(ratio);
        let rho0 = spec.state()?;
        let traj = propagate(&spec.hamiltonian()?, ORACLE_TAU, PURITY_STEPS)?;
        for (t, u) in traj.times.iter().zip(&traj.unitaries) {
            let rho_t = rho0.evolved(u)?;
            for a in ALPHAS {
                let alpha = AlphaParam::new(a)?;
                let err = (entropy::relative_purity(&rho_t, &rho0, alpha)? - purity_closed(alpha, &spec, *t)?).abs();
                if err > worst.0 {
                    worst = (err, format!("delta/v={ratio} t={t:.4} alpha={a}"));
                }
            }
        }
    }
    Ok(worst)
}

/// Largest deviation of the closed-form qubit quantifiers from dense evaluation.
fn quantifier_discrepancy() -> qslbound::Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for ratio in ORACLE_RATIOS {
        let spec = reference(ratio);
        let rho0 = spec.state()?;
        let traj = closed_trajectory(&spec, ORACLE_TAU, 200)?;
        let log_norm = schatten2(&rho0.log()?);
        for k in 0..traj.times.len() {
            let t = traj.times[k];
            let h = &traj.hamiltonians[k];
            let rho_t = rho0.evolved(&traj.unitaries[k])?;
            let s = entropy::quantum_relative_entropy(&rho_t, &rho0)?.value();
            let comm_rho0 = schatten2(&commutator(h, rho0.matrix())?);
            let comm_rho_t = schatten2(&commutator(h, rho_t.matrix())?);
            for a in ALPHAS {
                let alpha = AlphaParam::new(a)?;
                let q = quantifiers(&spec, alpha, t)?;
                let p = rho0.power(a)?;
                let g = entropy::relative_purity(&rho_t, &rho0, alpha)?;
                let errs = [
                    q.comm_rho0_alpha - schatten2(&commutator(h, &p)?),
                    q.comm_rho0 - comm_rho0,
                    q.comm_rho_t - comm_rho_t,
                    q.relative_entropy - s,
                    q.log_norm.expect("mixed state") - log_norm,
                    q.power_norm - schatten2(&p),
                    purity_closed(alpha, &spec, t)? - g,
                ];
                compared += errs.len();
                worst = errs.iter().fold(worst, |w, e| w.max(e.abs()));
            }
        }
    }
    Ok((worst, compared))
}

fn merit_grids_normalized(out: &FigureOutcome) -> bool {
    out.tables.iter().all(|t| {
        let values: Vec<f64> = t.rows.iter().map(|r| r[2].parse().expect("numeric cell")).collect();
        values.iter().all(|v| (0.0..=1.0).contains(v)) && values.iter().copied().fold(f64::MIN, f64::max) == 1.0
    })
}

fn main() -> ExitCode {
    let exec = Execution::Sequential;
    let mut suite = Suite { failed: 0 };
    let cfg = VerifyConfig::default();
    let verifier = Verifier::new(&cfg, exec);

    let start = Instant::now();
    let sweep = verifier.sweep().expect("sweep runs");
    let sweep_secs = start.elapsed().as_secs_f64();
    let bounds = find(&sweep, "bounds");
    suite.report(
        1,
        "bound validity sweep",
        bounds.passed() && sweep_secs <= SWEEP_SECONDS,
        format!(
            "{}; {sweep_secs:.1} s on one core (limit {SWEEP_SECONDS} s)",
            summary(bounds)
        ),
    );

    let figures_cfg = FiguresConfig::default();
    let mut outcomes = Vec::new();
    for name in FigureName::ALL {
        let start = Instant::now();
        let out = figures::figure(name, &figures_cfg, exec).expect("figure runs");
        outcomes.push((out, start.elapsed().as_secs_f64()));
    }
    let qsl = find(&sweep, "qsl");
    let grid_checks: usize = outcomes.iter().map(|(o, _)| o.numeric.checked + o.closed.checked).sum();
    let grid_violations: usize = outcomes
        .iter()
        .map(|(o, _)| o.numeric.violations + o.closed.violations)
        .sum();
    suite.report(
        2,
        "speed-limit validity",
        qsl.passed() && grid_violations == 0,
        format!(
            "sweep {}; figure grids {grid_checks} checks, {grid_violations} violations",
            summary(qsl)
        ),
    );

    let (purity_err, purity_at) = purity_discrepancy().expect("purity oracle runs");
    let (quant_err, compared) = quantifier_discrepancy().expect("quantifier oracle runs");
    suite.report(
        3,
        "closed-form oracle equivalence",
        purity_err <= PURITY_TOL && quant_err <= QUANTIFIER_TOL,
        format!(
            "relative purity max |numeric - closed| {purity_err:.3e} at {purity_at} (tol {PURITY_TOL:.0e}, {PURITY_STEPS} steps); \
             qubit quantifiers max deviation {quant_err:.3e} over {compared} comparisons (tol {QUANTIFIER_TOL:.0e})"
        ),
    );

    let limit = verifier.limit().expect("limit check runs");
    suite.report(4, "limit continuity", limit.passed(), summary(&limit));

    let degeneracy = verifier.min_degeneracy().expect("degeneracy check runs");
    suite.report(
        5,
        "full-rank min-entropy degeneracy",
        degeneracy.passed(),
        summary(&degeneracy),
    );

    let derivative = verifier.derivative().expect("derivative check runs");
    suite.report(6, "derivative inequality", derivative.passed(), summary(&derivative));

    let (chain, skew) = (find(&sweep, "chain"), find(&sweep, "skew"));
    suite.report(
        7,
        "inequality chain",
        chain.passed() && skew.passed(),
        format!("chain {}; skew {}", summary(chain), summary(skew)),
    );

    let commutators = verifier.commutators().expect("commutator check runs");
    suite.report(8, "commutator norm", commutators.passed(), summary(&commutators));

    let mut details = Vec::new();
    let mut pass = true;
    for (out, secs) in &outcomes {
        let again = figures::figure(out.figure, &figures_cfg, exec).expect("figure reruns");
        let deterministic = again.tables == out.tables;
        let full = out
            .tables
            .iter()
            .all(|t| t.rows.len() == figures_cfg.grid_points * figures_cfg.grid_points);
        let normalized = out.figure != FigureName::Fig2 || merit_grids_normalized(out);
        pass &= deterministic && full && normalized && *secs <= FIGURE_SECONDS;
        details.push(format!(
            "{} {:.2} s{}{}{}",
            out.figure.name(),
            secs,
            if deterministic { "" } else { " nondeterministic" },
            if full { "" } else { " incomplete" },
            if normalized { "" } else { " unnormalized" },
        ));
    }
    suite.report(9, "figure regeneration", pass, details.join(", "));

    println!("acceptance: {} of 9 criteria passed", 9 - suite.failed);
    if suite.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
