//! A complete, validated simulation setup.

use crate::centrality::centrality;
use crate::error::{Error, Result, Violation};
use crate::interventions::{quarantine, seed_awareness, seed_infection, AwarenessSeed, SeedingSpec, SeedingStrategy};
use crate::matrix::FlowMatrix;
use crate::params::{in_unit_interval, Engine, ModelParams};
use crate::rng::seeding_rng;
use crate::state::CountState;
use crate::stationarity::StationarityCriterion;

/// Dense matrix content before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixInput {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl From<&FlowMatrix> for MatrixInput {
    fn from(m: &FlowMatrix) -> Self {
        MatrixInput {
            labels: m.labels().to_vec(),
            rows: m.rows(),
        }
    }
}

/// Every field of a scenario, unchecked.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioInput {
    pub mobility: MatrixInput,
    /// Absent for the disease-only model.
    pub calls: Option<MatrixInput>,
    pub params: ModelParams,
    pub population: Vec<u64>,
    pub infection_seed: SeedingSpec,
    pub awareness_seed: Option<AwarenessSeed>,
    pub quarantine: Vec<usize>,
    pub rng_seed: u64,
    pub engine: Engine,
    pub stationarity: StationarityCriterion,
}

impl ScenarioInput {
    /// Disease-only input with everything but the essentials defaulted:
    /// no quarantine, seed 0, deterministic engine.
    pub fn new(mobility: &FlowMatrix, params: ModelParams, population: Vec<u64>, infection_seed: SeedingSpec) -> Self {
        ScenarioInput {
            mobility: mobility.into(),
            calls: None,
            params,
            population,
            infection_seed,
            awareness_seed: None,
            quarantine: Vec::new(),
            rng_seed: 0,
            engine: Engine::Deterministic,
            stationarity: StationarityCriterion::default(),
        }
    }
}

/// Lists every broken invariant; empty iff the input forms a valid scenario.
pub fn validate_scenario(s: &ScenarioInput) -> Vec<Violation> {
    fn prefixed(what: &str, v: Vec<Violation>) -> Vec<Violation> {
        v.into_iter()
            .map(|x| Violation::new(format!("{what}: {}", x.message())))
            .collect()
    }
    let mut out = Vec::new();
    out.extend(prefixed("mobility", FlowMatrix::check(&s.mobility.labels, &s.mobility.rows)));
    let n = s.mobility.rows.len();
    if let Some(c) = &s.calls {
        out.extend(prefixed("calls", FlowMatrix::check(&c.labels, &c.rows)));
        if c.rows.len() != n {
            out.push(Violation::new(format!(
                "calls matrix has {} subpopulations, mobility has {n}",
                c.rows.len()
            )));
        } else if c.labels != s.mobility.labels {
            out.push(Violation::new("calls and mobility labels differ"));
        }
    }
    out.extend(s.params.violations());
    if s.population.len() != n {
        out.push(Violation::new(format!(
            "population has {} entries, expected {n}",
            s.population.len()
        )));
    }
    out.extend(prefixed("infection seed", s.infection_seed.violations(n)));
    if let Some(a) = &s.awareness_seed {
        if !in_unit_interval(a.fraction) {
            out.push(Violation::new("awareness fraction out of [0,1]"));
        }
    }
    let mut seen = vec![false; n];
    for &q in &s.quarantine {
        if q >= n {
            out.push(Violation::new(format!("quarantine index {q} out of range")));
        } else if std::mem::replace(&mut seen[q], true) {
            out.push(Violation::new(format!("quarantine index {q} repeated")));
        }
    }
    out.extend(s.stationarity.violations());
    out
}

/// A validated scenario. Immutable; the `with_*` methods return revalidated
/// copies.
#[derive(Debug, Clone)]
pub struct Scenario {
    input: ScenarioInput,
    mobility: FlowMatrix,
    effective_mobility: FlowMatrix,
    calls: Option<FlowMatrix>,
}

impl Scenario {
    pub fn new(input: ScenarioInput) -> Result<Self> {
        let v = validate_scenario(&input);
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        let mobility = FlowMatrix::new(input.mobility.labels.clone(), input.mobility.rows.clone())?;
        let calls = match &input.calls {
            Some(c) => Some(FlowMatrix::new(c.labels.clone(), c.rows.clone())?),
            None => None,
        };
        let effective_mobility = quarantine(&mobility, &input.quarantine)?;
        Ok(Scenario {
            input,
            mobility,
            effective_mobility,
            calls,
        })
    }

    pub fn input(&self) -> &ScenarioInput {
        &self.input
    }

    pub fn n(&self) -> usize {
        self.mobility.n()
    }

    pub fn labels(&self) -> &[String] {
        self.mobility.labels()
    }

    /// The mobility matrix as given, before quarantine.
    pub fn mobility(&self) -> &FlowMatrix {
        &self.mobility
    }

    /// The mobility matrix the engines use, with quarantine applied.
    pub fn effective_mobility(&self) -> &FlowMatrix {
        &self.effective_mobility
    }

    pub fn calls(&self) -> Option<&FlowMatrix> {
        self.calls.as_ref()
    }

    pub fn params(&self) -> &ModelParams {
        &self.input.params
    }

    pub fn population(&self) -> &[u64] {
        &self.input.population
    }

    pub fn rng_seed(&self) -> u64 {
        self.input.rng_seed
    }

    pub fn engine(&self) -> Engine {
        self.input.engine
    }

    pub fn stationarity(&self) -> &StationarityCriterion {
        &self.input.stationarity
    }

    pub fn quarantined(&self) -> &[usize] {
        &self.input.quarantine
    }

    fn modified(&self, f: impl FnOnce(&mut ScenarioInput)) -> Result<Self> {
        let mut input = self.input.clone();
        f(&mut input);
        Scenario::new(input)
    }

    pub fn with_params(&self, params: ModelParams) -> Result<Self> {
        self.modified(|s| s.params = params)
    }

    pub fn with_engine(&self, engine: Engine) -> Self {
        let mut out = self.clone();
        out.input.engine = engine;
        out
    }

    pub fn with_rng_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        out.input.rng_seed = seed;
        out
    }

    pub fn with_infection_seed(&self, spec: SeedingSpec) -> Result<Self> {
        self.modified(|s| s.infection_seed = spec)
    }

    pub fn with_quarantine(&self, targets: Vec<usize>) -> Result<Self> {
        self.modified(|s| s.quarantine = targets)
    }

    /// Hex SHA-256 of the full scenario content, recorded in output headers.
    pub fn content_hash(&self) -> String {
        crate::output::sha256_hex(format!("{:?}", self.input).as_bytes())
    }

    /// Integer initial condition shared by both engines. Centrality for
    /// top-k seeding is computed on the mobility matrix before quarantine;
    /// every random choice comes from the seeding stream of `rng_seed`.
    pub fn initial_state(&self) -> Result<CountState> {
        let spec = &self.input.infection_seed;
        let ranking = match spec.strategy {
            SeedingStrategy::CentralityTopK => Some(centrality(&self.mobility, spec.centrality_kind)?),
            _ => None,
        };
        let mut rng = seeding_rng(self.input.rng_seed);
        let state = seed_infection(&self.input.population, spec, ranking.as_ref(), &mut rng)?;
        match &self.input.awareness_seed {
            Some(a) => seed_awareness(&state, a.fraction, &mut rng),
            None => Ok(state),
        }
    }
}
