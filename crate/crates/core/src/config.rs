//! TOML scenario files.
//!
//! ```toml
//! rng_seed = 7                 # default 0
//! engine = "deterministic"     # or "stochastic"
//! quarantine = [3, 8]          # default []
//!
//! [params]                     # omega, psi, xi default 0; horizon 180
//! lambda = 0.8
//! gamma = 0.4
//!
//! [mobility]                   # exactly one of path, synth, rows
//! synth = { kind = "diagonal-dominant", n = 20, diag_weight = 0.9, seed = 1 }
//!
//! [calls]                      # optional; absent means disease-only
//! path = "calls_matrix.csv"    # relative to this file
//!
//! [population]                 # exactly one of counts, total
//! total = 200000               # split evenly
//!
//! [infection_seed]
//! strategy = "uniform"         # random-single, centrality-top-k, explicit-list
//! fraction = 0.001
//!
//! [awareness_seed]             # optional
//! fraction = 0.01
//!
//! [stationarity]               # defaults shown
//! epsilon = 1e-10
//! window = 10
//! ```
//!
//! A `[sweep]` section drives the `sweep` subcommand; see [`SweepConfig`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::{read_matrix_rows, synth_matrix, SynthKind};
use crate::interventions::{AwarenessSeed, SeedingSpec};
use crate::params::{Engine, ModelParams};
use crate::scenario::{MatrixInput, Scenario, ScenarioInput};
use crate::stationarity::StationarityCriterion;
use crate::sweep::{Axis, SweepGrid};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mobility: MatrixSource,
    pub calls: Option<MatrixSource>,
    pub params: ModelParams,
    pub population: PopulationSpec,
    pub infection_seed: SeedingSpec,
    pub awareness_seed: Option<AwarenessSeed>,
    #[serde(default)]
    pub quarantine: Vec<usize>,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub stationarity: StationarityCriterion,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSource {
    pub path: Option<PathBuf>,
    pub synth: Option<SynthSpec>,
    pub rows: Option<Vec<Vec<f64>>>,
    /// Only with `rows`; defaults to `"0".."n-1"`.
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub n: usize,
    #[serde(default = "default_diag")]
    pub diag_weight: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_diag() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub counts: Option<Vec<u64>>,
    /// Split as evenly as integers allow; the remainder goes to the lowest
    /// indices.
    pub total: Option<u64>,
}

/// `[sweep]` section.
///
/// ```toml
/// [sweep]
/// replicas = 1                          # stochastic engine only
/// pairs = [[0.8, 0.4], [0.8, 0.2]]      # (lambda, gamma); one heatmap each
///
/// [[sweep.axes]]
/// params = ["omega"]
/// values = [0.0, 0.5, 1.0]
///
/// [sweep.r0]
/// values = [0.5, 1.0, 2.0]
/// gamma = 0.4                           # default
/// seedings.uniform = { strategy = "uniform", fraction = 0.001 }
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "one")]
    pub replicas: usize,
    #[serde(default)]
    pub pairs: Vec<[f64; 2]>,
    #[serde(default)]
    pub axes: Vec<Axis>,
    pub r0: Option<R0Config>,
}

fn one() -> usize {
    1
}

impl SweepConfig {
    pub fn grid(&self) -> SweepGrid {
        SweepGrid::new(self.axes.clone(), self.replicas)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct R0Config {
    pub values: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Named seeding variants, run in name order. Empty means the scenario's
    /// own infection seed.
    #[serde(default)]
    pub seedings: BTreeMap<String, SeedingSpec>,
}

fn default_gamma() -> f64 {
    0.4
}

/// Parses a scenario file; relative matrix paths are resolved against its
/// directory.
pub fn load_config(path: &Path) -> Result<(ScenarioConfig, PathBuf)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg = parse_config(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

impl MatrixSource {
    pub fn resolve(&self, base: &Path) -> Result<MatrixInput> {
        let given = [self.path.is_some(), self.synth.is_some(), self.rows.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(Error::Config(
                "a matrix needs exactly one of `path`, `synth`, `rows`".into(),
            ));
        }
        if self.labels.is_some() && self.rows.is_none() {
            return Err(Error::Config("`labels` is only allowed with `rows`".into()));
        }
        if let Some(p) = &self.path {
            let (labels, rows) = read_matrix_rows(&base.join(p))?;
            return Ok(MatrixInput { labels, rows });
        }
        if let Some(s) = &self.synth {
            return Ok((&synth_matrix(s.kind, s.n, s.diag_weight, s.seed)?).into());
        }
        let rows = self.rows.clone().unwrap_or_default();
        let labels = self
            .labels
            .clone()
            .unwrap_or_else(|| crate::matrix::default_labels(rows.len()));
        Ok(MatrixInput { labels, rows })
    }
}

impl PopulationSpec {
    pub fn resolve(&self, n: usize) -> Result<Vec<u64>> {
        match (&self.counts, self.total) {
            (Some(c), None) => Ok(c.clone()),
            (None, Some(t)) if n > 0 => {
                let (base, extra) = (t / n as u64, (t % n as u64) as usize);
                Ok((0..n).map(|k| base + u64::from(k < extra)).collect())
            }
            (None, Some(_)) => Ok(Vec::new()),
            _ => Err(Error::Config(
                "population needs exactly one of `counts`, `total`".into(),
            )),
        }
    }
}

impl ScenarioConfig {
    /// Loads matrices and expands defaults; nothing is validated yet.
    pub fn to_input(&self, base: &Path) -> Result<ScenarioInput> {
        let mobility = self.mobility.resolve(base)?;
        let calls = self.calls.as_ref().map(|c| c.resolve(base)).transpose()?;
        let population = self.population.resolve(mobility.rows.len())?;
        Ok(ScenarioInput {
            mobility,
            calls,
            params: self.params,
            population,
            infection_seed: self.infection_seed.clone(),
            awareness_seed: self.awareness_seed,
            quarantine: self.quarantine.clone(),
            rng_seed: self.rng_seed,
            engine: self.engine,
            stationarity: self.stationarity,
        })
    }

    pub fn to_scenario(&self, base: &Path) -> Result<Scenario> {
        Scenario::new(self.to_input(base)?)
    }
}
