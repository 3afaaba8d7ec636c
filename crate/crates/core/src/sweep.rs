//! Parameter sweeps: endemic fraction and time-to-stationarity over a grid
//! of rates, and the threshold curve over `r0 = lambda / gamma`.
//!
//! Cells run in parallel on the rayon pool. Stochastic cells draw from
//! streams derived from the scenario seed and the cell index only, so
//! results do not depend on scheduling or thread count.

use rayon::prelude::*;
use serde::Deserialize;

use crate::deterministic;
use crate::error::{Error, Result, Violation};
use crate::interventions::SeedingSpec;
use crate::params::{in_unit_interval, Engine, ModelParams, Param};
use crate::rng::cell_rng;
use crate::scenario::Scenario;
use crate::state::CountState;
use crate::stationarity::Stationarity;
use crate::stochastic::mc_run_from;

/// One grid dimension. Every listed parameter takes the same value, so
/// `params = ["omega", "psi"]` sweeps the diagonal `omega = psi`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub params: Vec<Param>,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(params: &[Param], values: Vec<f64>) -> Self {
        Axis {
            params: params.to_vec(),
            values,
        }
    }
}

/// Cartesian product of axes over a scenario template. The first axis
/// varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    /// Replicas per cell; only the stochastic engine uses more than one.
    pub replicas: usize,
}

impl SweepGrid {
    pub fn new(axes: Vec<Axis>, replicas: usize) -> Self {
        SweepGrid { axes, replicas }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (k, axis) in self.axes.iter().enumerate() {
            if axis.params.is_empty() {
                out.push(Violation::new(format!("axis {k} names no parameter")));
            }
            if axis.values.is_empty() {
                out.push(Violation::new(format!("axis {k} has no values")));
            }
            if let Some(v) = axis.values.iter().find(|v| !in_unit_interval(**v)) {
                out.push(Violation::new(format!("axis {k} value {v} out of [0,1]")));
            }
        }
        if self.replicas < 1 {
            out.push(Violation::new("replicas must be at least 1"));
        }
        out
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameter assignments of cell `index`.
    pub fn cell(&self, mut index: usize) -> Vec<(Param, f64)> {
        let mut picks = vec![0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            picks[k] = index % axis.values.len();
            index /= axis.values.len();
        }
        self.axes
            .iter()
            .zip(picks)
            .flat_map(|(axis, pick)| axis.params.iter().map(move |&p| (p, axis.values[pick])))
            .collect()
    }
}

/// Replica aggregate of one cell. Values are present only when every
/// replica reached stationarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub mean_i_inf: Option<f64>,
    /// Standard error of the mean; absent with a single replica.
    pub se_i_inf: Option<f64>,
    /// Mean time to stationarity.
    pub tau: Option<f64>,
    pub stationary: bool,
}

impl CellSummary {
    pub const MISSING: CellSummary = CellSummary {
        mean_i_inf: None,
        se_i_inf: None,
        tau: None,
        stationary: false,
    };

    pub fn from_replicas(outcomes: &[Stationarity]) -> Self {
        if outcomes.is_empty() || !outcomes.iter().all(Stationarity::is_stationary) {
            return CellSummary::MISSING;
        }
        let k = outcomes.len() as f64;
        let values: Vec<f64> = outcomes.iter().filter_map(|o| o.i_inf).collect();
        let mean = values.iter().sum::<f64>() / k;
        let se = (outcomes.len() > 1).then(|| {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        });
        let tau = outcomes.iter().filter_map(|o| o.tau).map(|t| t as f64).sum::<f64>() / k;
        CellSummary {
            mean_i_inf: Some(mean),
            se_i_inf: se,
            tau: Some(tau),
            stationary: true,
        }
    }
}

/// Runs `s` with its own parameters: once with the deterministic engine,
/// `replicas` times with the stochastic one, replica `r` on stream
/// `(cell, r)`.
pub fn replicate(s: &Scenario, initial: &CountState, cell: u64, replicas: usize) -> Vec<Stationarity> {
    match s.engine() {
        Engine::Deterministic => vec![
            deterministic::run_from(
                initial.to_masses(),
                s.effective_mobility(),
                s.calls(),
                s.params(),
                s.stationarity(),
            )
            .stationarity,
        ],
        Engine::Stochastic => (0..replicas as u64)
            .map(|r| {
                let mut rng = cell_rng(s.rng_seed(), cell, r);
                mc_run_from(
                    initial.clone(),
                    s.effective_mobility(),
                    s.calls(),
                    s.params(),
                    s.stationarity(),
                    &mut rng,
                )
                .stationarity
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapRecord {
    pub params: ModelParams,
    pub summary: CellSummary,
    /// Why the cell could not be run; its summary is then missing.
    pub error: Option<String>,
}

/// Runs every cell of `grid` on `template`. A cell whose parameters are
/// invalid is recorded with its error and the sweep continues.
pub fn heatmap(template: &Scenario, grid: &SweepGrid) -> Result<Vec<HeatmapRecord>> {
    let v = grid.violations();
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let initial = template.initial_state()?;
    let records = (0..grid.len())
        .into_par_iter()
        .map(|index| {
            let mut params = *template.params();
            for (p, value) in grid.cell(index) {
                params.set(p, value);
            }
            match template.with_params(params) {
                Ok(s) => HeatmapRecord {
                    params,
                    summary: CellSummary::from_replicas(&replicate(&s, &initial, index as u64, grid.replicas)),
                    error: None,
                },
                Err(e) => HeatmapRecord {
                    params,
                    summary: CellSummary::MISSING,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(records)
}

/// Largest spread (max minus min) of the mean endemic fraction along
/// `param`, over all groups of records that agree on the other four rates.
/// Cells without a value are skipped.
pub fn spread_along(records: &[HeatmapRecord], param: Param) -> f64 {
    let others: Vec<Param> = Param::ALL.into_iter().filter(|&p| p != param).collect();
    let mut groups: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    for r in records {
        let Some(v) = r.summary.mean_i_inf else { continue };
        let key: Vec<f64> = others.iter().map(|&p| r.params.get(p)).collect();
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => {
                g.1 = g.1.min(v);
                g.2 = g.2.max(v);
            }
            None => groups.push((key, v, v)),
        }
    }
    groups.iter().map(|g| g.2 - g.1).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct R0Record {
    pub r0: f64,
    pub seeding: String,
    pub lambda: f64,
    pub gamma: f64,
    pub summary: CellSummary,
}

/// Endemic fraction and time to stationarity against `r0`, realized at fixed
/// `gamma` with `lambda = r0 · gamma`, once per named seeding.
///
/// Fails before running anything if some `r0` needs `lambda > 1`.
pub fn r0_curve(
    template: &Scenario,
    r0_values: &[f64],
    gamma: f64,
    seedings: &[(String, SeedingSpec)],
    replicas: usize,
) -> Result<Vec<R0Record>> {
    let mut lambdas = Vec::with_capacity(r0_values.len());
    for &r0 in r0_values {
        let lambda = r0 * gamma;
        if !(r0 >= 0.0) || !in_unit_interval(gamma) || lambda > 1.0 + 1e-12 {
            return Err(Error::R0OutOfRange { r0, gamma, lambda });
        }
        lambdas.push(lambda.min(1.0));
    }
    let mut jobs = Vec::new();
    for (name, spec) in seedings {
        let seeded = template.with_infection_seed(spec.clone())?;
        let initial = seeded.initial_state()?;
        for (&r0, &lambda) in r0_values.iter().zip(&lambdas) {
            let mut params = *template.params();
            params.lambda = lambda;
            params.gamma = gamma;
            jobs.push((r0, name.clone(), seeded.with_params(params)?, initial.clone()));
        }
    }
    Ok(jobs
        .into_par_iter()
        .enumerate()
        .map(|(index, (r0, seeding, s, initial))| {
            let p = *s.params();
            R0Record {
                r0,
                seeding,
                lambda: p.lambda,
                gamma: p.gamma,
                summary: CellSummary::from_replicas(&replicate(&s, &initial, index as u64, replicas)),
            }
        })
        .collect())
}
