//! Speed-limit and merit grids for the driven qubit, numeric and closed form.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use serde_json::json;

use crate::bounds::{merit_deltas, BoundEngine, GConvention, MeritDeltas, QslReport, VALIDITY_TOL};
use crate::entropy::{AlphaParam, EntropyKind};
use crate::evolution::{propagate, Quadrature, Trajectory};
use crate::parallel::Execution;
use crate::qubit::{ClosedFamily, ClosedGrid, QubitSpec};
use crate::scan::config::{FigureName, FiguresConfig};
use crate::scan::output::{fmt_sig, Table};
use crate::Result;

/// `(r, theta, phi)` of the reference mixed state.
pub const REFERENCE_STATE: (f64, f64, f64) = (0.25, FRAC_PI_4, FRAC_PI_4);
pub const REFERENCE_RATIO: f64 = 0.5;
/// `Delta / v` of the four drive panels.
pub const DRIVE_RATIOS: [f64; 4] = [0.5, 1.0, 5.0, 10.0];
/// Mixed states of the relative-entropy panels.
pub const MIXED_STATES: [(f64, f64, f64); 4] = [
    (0.25, FRAC_PI_4, FRAC_PI_4),
    (0.25, FRAC_PI_3, FRAC_PI_4),
    (0.5, FRAC_PI_4, FRAC_PI_4),
    (0.5, FRAC_PI_3, FRAC_PI_4),
];
/// `(theta, phi)` of the pure states of the min-entropy panels.
pub const PURE_ANGLES: [(f64, f64); 4] = [
    (FRAC_PI_4, FRAC_PI_4),
    (FRAC_PI_3, FRAC_PI_4),
    (FRAC_PI_4, FRAC_PI_3),
    (FRAC_PI_3, FRAC_PI_3),
];
pub const ALPHA_RANGE: (f64, f64) = (0.01, 0.99);
pub const RATIO_RANGE: (f64, f64) = (0.1, 10.0);
pub const VELOCITY: f64 = 1.0;

pub const GRID_COLUMNS: [&str; 3] = ["x", "y", "value"];

const PANELS: [&str; 4] = ["a", "b", "c", "d"];
const MERITS: [&str; 3] = ["forward", "reverse", "symmetric"];

/// Horizons `tau_j = j tau_max / (P - 1)` on one trajectory of `stride (P - 1)` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub taus: Vec<f64>,
    /// Even number of steps between consecutive horizons.
    pub stride: usize,
    pub steps: usize,
}

impl Layout {
    pub fn new(cfg: &FiguresConfig) -> Self {
        let intervals = cfg.grid_points - 1;
        let mut stride = cfg.steps.div_ceil(intervals).max(2);
        stride += stride % 2;
        Self {
            taus: linspace(0.0, cfg.tau_max, cfg.grid_points),
            stride,
            steps: stride * intervals,
        }
    }

    pub fn tau_max(&self) -> f64 {
        *self.taus.last().expect("non-empty grid")
    }
}

pub fn linspace(start: f64, stop: f64, num: usize) -> Vec<f64> {
    (0..num)
        .map(|k| start + (stop - start) * k as f64 / (num - 1) as f64)
        .collect()
}

/// Speed-limit validity counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: usize,
    pub violations: usize,
}

impl Tally {
    fn record(&mut self, valid: bool) {
        self.checked += 1;
        self.violations += usize::from(!valid);
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.violations += other.violations;
    }
}

#[derive(Debug, Clone)]
pub struct FigureOutcome {
    pub figure: FigureName,
    pub tables: Vec<Table>,
    pub layout: Layout,
    pub numeric: Tally,
    pub closed: Tally,
}

impl FigureOutcome {
    pub fn passed(&self) -> bool {
        self.numeric.violations == 0 && self.closed.violations == 0
    }
}

/// Values indexed `[y][x]`.
type Grid = Vec<Vec<f64>>;

fn grid_table(name: String, xs: &[f64], ys: &[f64], values: &Grid, parameters: serde_json::Value) -> Table {
    let mut t = Table::new(name, &GRID_COLUMNS).with_parameters(parameters);
    for (j, x) in xs.iter().enumerate() {
        for (i, y) in ys.iter().enumerate() {
            t.push(vec![fmt_sig(*x), fmt_sig(*y), fmt_sig(values[i][j])]);
        }
    }
    t
}

fn lz(state: (f64, f64, f64), ratio: f64) -> Result<QubitSpec> {
    QubitSpec::landau_zener(state.0, state.1, state.2, ratio * VELOCITY, VELOCITY)
}

fn trajectory(spec: &QubitSpec, layout: &Layout) -> Result<Trajectory> {
    propagate(&spec.hamiltonian()?, layout.tau_max(), layout.steps)
}

fn closed_family(kind: EntropyKind) -> ClosedFamily {
    match kind {
        EntropyKind::Renyi => ClosedFamily::Renyi,
        EntropyKind::Tsallis => ClosedFamily::Tsallis,
    }
}

fn record_qsl(tally: &mut Tally, q: &QslReport) -> f64 {
    tally.record(q.is_valid());
    q.tau_max
}

/// Per `alpha` row: numeric and closed `tau_max` for each kind over all horizons.
struct AlphaRow {
    numeric: Vec<Vec<f64>>,
    closed: Vec<Vec<f64>>,
    tallies: (Tally, Tally),
}

fn alpha_rows(
    spec: &QubitSpec,
    kinds: &[EntropyKind],
    alphas: &[f64],
    layout: &Layout,
    convention: GConvention,
    exec: Execution,
) -> Result<Vec<AlphaRow>> {
    let engine = BoundEngine::new(&spec.state()?, &trajectory(spec, layout)?, Quadrature::Simpson)?;
    let closed = ClosedGrid::new(spec, layout.tau_max(), layout.steps)?;
    exec.map(alphas, |&a| {
        let alpha = AlphaParam::new(a)?;
        let (mut tn, mut tc) = (Tally::default(), Tally::default());
        let mut numeric = Vec::new();
        let mut closed_rows = Vec::new();
        for &kind in kinds {
            let b = engine.alpha(kind, alpha, convention);
            let mut row_n = Vec::with_capacity(layout.taus.len());
            let mut row_c = Vec::with_capacity(layout.taus.len());
            for j in 0..layout.taus.len() {
                let n = j * layout.stride;
                row_n.push(record_qsl(&mut tn, &b.qsl(n)?));
                row_c.push(record_qsl(&mut tc, &closed.qsl(a, n, closed_family(kind), convention)?));
            }
            numeric.push(row_n);
            closed_rows.push(row_c);
        }
        Ok(AlphaRow {
            numeric,
            closed: closed_rows,
            tallies: (tn, tc),
        })
    })
    .into_iter()
    .collect()
}

struct Context<'a> {
    figure: FigureName,
    cfg: &'a FiguresConfig,
    layout: Layout,
    exec: Execution,
    tables: Vec<Table>,
    numeric: Tally,
    closed: Tally,
}

impl Context<'_> {
    fn parameters(
        &self,
        panel: &str,
        y: &str,
        value: &str,
        source: &str,
        extra: serde_json::Value,
    ) -> serde_json::Value {
        let mut p = json!({
            "figure": self.figure.name(),
            "panel": panel,
            "x": "tau",
            "y": y,
            "value": value,
            "source": source,
            "grid_points": self.cfg.grid_points,
            "tau_max": self.cfg.tau_max,
            "stride": self.layout.stride,
            "velocity": VELOCITY,
        });
        if let (Some(p), serde_json::Value::Object(e)) = (p.as_object_mut(), extra) {
            p.extend(e);
        }
        p
    }

    fn push_pair(&mut self, stem: String, ys: &[f64], numeric: &Grid, closed: &Grid, params: [serde_json::Value; 2]) {
        let [pn, pc] = params;
        self.tables
            .push(grid_table(stem.clone(), &self.layout.taus, ys, numeric, pn));
        self.tables
            .push(grid_table(format!("{stem}_closed"), &self.layout.taus, ys, closed, pc));
    }

    /// `(tau, alpha)` speed-limit panels for one state and drive.
    fn alpha_panels(&mut self, panel: &str, stem: &str, ratio: f64, kinds: &[EntropyKind]) -> Result<()> {
        let alphas = linspace(ALPHA_RANGE.0, ALPHA_RANGE.1, self.cfg.grid_points);
        let spec = lz(REFERENCE_STATE, ratio)?;
        let rows = alpha_rows(&spec, kinds, &alphas, &self.layout, self.cfg.convention, self.exec)?;
        for (k, kind) in kinds.iter().enumerate() {
            let numeric: Grid = rows.iter().map(|r| r.numeric[k].clone()).collect();
            let closed: Grid = rows.iter().map(|r| r.closed[k].clone()).collect();
            let extra = json!({
                "kind": kind.name(),
                "state": {"r": REFERENCE_STATE.0, "theta": REFERENCE_STATE.1, "phi": REFERENCE_STATE.2},
                "delta_over_v": ratio,
            });
            let value = "tau_max";
            let params = [
                self.parameters(panel, "alpha", value, "numeric", extra.clone()),
                self.parameters(panel, "alpha", value, "closed", extra),
            ];
            let name = if kinds.len() > 1 {
                format!("{stem}_{}", kind.name())
            } else {
                stem.to_string()
            };
            self.push_pair(name, &alphas, &numeric, &closed, params);
        }
        for r in &rows {
            self.numeric.merge(r.tallies.0);
            self.closed.merge(r.tallies.1);
        }
        Ok(())
    }

    /// Normalized merits over `(tau, alpha)` for the reference state.
    fn merit_panels(&mut self) -> Result<()> {
        let alphas = linspace(ALPHA_RANGE.0, ALPHA_RANGE.1, self.cfg.grid_points);
        let spec = lz(REFERENCE_STATE, REFERENCE_RATIO)?;
        let engine = BoundEngine::new(&spec.state()?, &trajectory(&spec, &self.layout)?, Quadrature::Simpson)?;
        let closed = ClosedGrid::new(&spec, self.layout.tau_max(), self.layout.steps)?;
        let (layout, convention) = (&self.layout, self.cfg.convention);
        // Per alpha, per kind: (numeric, closed) merits at every horizon.
        let rows: Vec<Vec<(Vec<MeritDeltas>, Vec<MeritDeltas>)>> = self
            .exec
            .map(&alphas, |&a| {
                let alpha = AlphaParam::new(a)?;
                EntropyKind::ALL
                    .iter()
                    .map(|&kind| {
                        let b = engine.alpha(kind, alpha, convention);
                        let mut num = Vec::with_capacity(layout.taus.len());
                        let mut clo = Vec::with_capacity(layout.taus.len());
                        for j in 0..layout.taus.len() {
                            let n = j * layout.stride;
                            num.push(b.deltas(n)?);
                            let [f, r, _] = closed.bounds(a, n, closed_family(kind), convention)?;
                            clo.push(merit_deltas(&f, &r));
                        }
                        Ok((num, clo))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .into_iter()
            .collect::<Result<_>>()?;
        let pick = |m: &MeritDeltas, c: usize| [m.forward, m.reverse, m.symmetric][c];
        for (k, kind) in EntropyKind::ALL.iter().enumerate() {
            for c in 0..3 {
                let mut numeric: Grid = rows
                    .iter()
                    .map(|r| r[k].0.iter().map(|m| pick(m, c)).collect())
                    .collect();
                let mut closed: Grid = rows
                    .iter()
                    .map(|r| r[k].1.iter().map(|m| pick(m, c)).collect())
                    .collect();
                normalize_merits(&mut numeric, &mut self.numeric);
                normalize_merits(&mut closed, &mut self.closed);
                let panel = PANELS[c];
                let extra = json!({
                    "kind": kind.name(),
                    "merit": MERITS[c],
                    "state": {"r": REFERENCE_STATE.0, "theta": REFERENCE_STATE.1, "phi": REFERENCE_STATE.2},
                    "delta_over_v": REFERENCE_RATIO,
                });
                let value = "normalized_delta";
                let params = [
                    self.parameters(panel, "alpha", value, "numeric", extra.clone()),
                    self.parameters(panel, "alpha", value, "closed", extra),
                ];
                let stem = format!("fig2_{}_delta{}", kind.name(), c + 1);
                self.push_pair(stem, &alphas, &numeric, &closed, params);
            }
        }
        Ok(())
    }

    /// `(tau, Delta/v)` panels for four states sharing one trajectory per drive.
    fn ratio_panels(&mut self, family: ClosedFamily) -> Result<()> {
        let ratios = linspace(RATIO_RANGE.0, RATIO_RANGE.1, self.cfg.grid_points);
        let states: Vec<(f64, f64, f64)> = match family {
            ClosedFamily::Min => PURE_ANGLES.iter().map(|&(t, p)| (1.0, t, p)).collect(),
            _ => MIXED_STATES.to_vec(),
        };
        let (layout, convention) = (&self.layout, self.cfg.convention);
        // Per ratio, per state: numeric and closed rows with their tallies.
        type Cell = (Vec<f64>, Vec<f64>, Tally, Tally);
        let rows: Vec<Vec<Cell>> = self
            .exec
            .map(&ratios, |&ratio| {
                let traj = trajectory(&lz(states[0], ratio)?, layout)?;
                states
                    .iter()
                    .map(|&state| {
                        let spec = lz(state, ratio)?;
                        let engine = BoundEngine::new(&spec.state()?, &traj, Quadrature::Simpson)?;
                        let closed = ClosedGrid::new(&spec, layout.tau_max(), layout.steps)?;
                        let (mut tn, mut tc) = (Tally::default(), Tally::default());
                        let mut num = Vec::with_capacity(layout.taus.len());
                        let mut clo = Vec::with_capacity(layout.taus.len());
                        for j in 0..layout.taus.len() {
                            let n = j * layout.stride;
                            let q = match family {
                                ClosedFamily::Min => engine.min_bound_and_qsl(n)?.1,
                                _ => engine.qsl_re(n)?,
                            };
                            num.push(record_qsl(&mut tn, &q));
                            clo.push(record_qsl(&mut tc, &closed.qsl(1.0, n, family, convention)?));
                        }
                        Ok((num, clo, tn, tc))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .into_iter()
            .collect::<Result<_>>()?;
        let (figure, kind) = match family {
            ClosedFamily::Min => ("fig6", "min"),
            _ => ("fig5", "re"),
        };
        for (s, state) in states.iter().enumerate() {
            let numeric: Grid = rows.iter().map(|r| r[s].0.clone()).collect();
            let closed: Grid = rows.iter().map(|r| r[s].1.clone()).collect();
            for r in &rows {
                self.numeric.merge(r[s].2);
                self.closed.merge(r[s].3);
            }
            let extra = json!({
                "kind": kind,
                "state": {"r": state.0, "theta": state.1, "phi": state.2},
            });
            let params = [
                self.parameters(PANELS[s], "delta_over_v", "tau_max", "numeric", extra.clone()),
                self.parameters(PANELS[s], "delta_over_v", "tau_max", "closed", extra),
            ];
            self.push_pair(format!("{figure}_{}", PANELS[s]), &ratios, &numeric, &closed, params);
        }
        Ok(())
    }
}

/// Divides by the grid maximum after clearing negatives within the validity tolerance;
/// larger negatives are counted as violations and kept.
fn normalize_merits(grid: &mut Grid, tally: &mut Tally) {
    for v in grid.iter_mut().flatten() {
        if v.is_finite() {
            tally.record(*v >= -VALIDITY_TOL);
            if (-VALIDITY_TOL..0.0).contains(v) {
                *v = 0.0;
            }
        }
    }
    let max = grid
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    if max > 0.0 {
        for v in grid.iter_mut().flatten() {
            *v /= max;
        }
    }
}

/// Tables for one figure: every numeric grid followed by its `_closed` companion.
pub fn figure(name: FigureName, cfg: &FiguresConfig, exec: Execution) -> Result<FigureOutcome> {
    let mut ctx = Context {
        figure: name,
        cfg,
        layout: Layout::new(cfg),
        exec,
        tables: Vec::new(),
        numeric: Tally::default(),
        closed: Tally::default(),
    };
    match name {
        FigureName::Fig1 => ctx.alpha_panels(
            "a",
            "fig1",
            REFERENCE_RATIO,
            &[EntropyKind::Renyi, EntropyKind::Tsallis],
        )?,
        FigureName::Fig2 => ctx.merit_panels()?,
        FigureName::Fig3 | FigureName::Fig4 => {
            let kind = if name == FigureName::Fig3 {
                EntropyKind::Tsallis
            } else {
                EntropyKind::Renyi
            };
            for (p, ratio) in PANELS.iter().zip(DRIVE_RATIOS) {
                ctx.alpha_panels(p, &format!("{}_{p}", name.name()), ratio, &[kind])?;
            }
        }
        FigureName::Fig5 => ctx.ratio_panels(ClosedFamily::RelativeEntropy)?,
        FigureName::Fig6 => ctx.ratio_panels(ClosedFamily::Min)?,
    }
    Ok(FigureOutcome {
        figure: name,
        tables: ctx.tables,
        layout: ctx.layout,
        numeric: ctx.numeric,
        closed: ctx.closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FiguresConfig {
        FiguresConfig {
            grid_points: 9,
            tau_max: 4.0,
            steps: 32,
            ..FiguresConfig::default()
        }
    }

    #[test]
    fn layout_strides_are_even() {
        let l = Layout::new(&FiguresConfig::default());
        assert_eq!((l.stride, l.steps), (6, 594));
        assert_eq!(l.taus.len(), 100);
        assert_eq!(l.tau_max(), 10.0);
        let l = Layout::new(&small());
        assert_eq!((l.stride, l.steps), (4, 32));
    }

    #[test]
    fn every_figure_has_paired_grids() {
        let cfg = small();
        for (name, count) in [
            (FigureName::Fig1, 4),
            (FigureName::Fig2, 12),
            (FigureName::Fig3, 8),
            (FigureName::Fig5, 8),
            (FigureName::Fig6, 8),
        ] {
            let out = figure(name, &cfg, Execution::Sequential).unwrap();
            assert_eq!(out.tables.len(), count, "{name:?}");
            for pair in out.tables.chunks(2) {
                assert_eq!(pair[1].name, format!("{}_closed", pair[0].name));
                assert_eq!(pair[0].rows.len(), 81);
                assert_eq!(pair[0].parameters["source"], "numeric");
            }
            assert!(out.numeric.checked > 0);
            assert_eq!(out.numeric.violations, 0, "{name:?}");
        }
    }

    #[test]
    fn merits_are_normalized() {
        let out = figure(FigureName::Fig2, &small(), Execution::Sequential).unwrap();
        for t in &out.tables {
            let values: Vec<f64> = t.rows.iter().map(|r| r[2].parse().unwrap()).collect();
            assert!(values.iter().all(|v| (0.0..=1.0).contains(v)), "{}", t.name);
            assert_eq!(values.iter().copied().fold(f64::MIN, f64::max), 1.0, "{}", t.name);
        }
    }

    #[test]
    fn parallel_is_deterministic() {
        let a = figure(FigureName::Fig4, &small(), Execution::Sequential).unwrap();
        let b = figure(FigureName::Fig4, &small(), Execution::Parallel).unwrap();
        assert_eq!(a.tables, b.tables);
    }
}
