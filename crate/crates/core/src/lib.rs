//! Discrete-time metapopulation simulation of a disease spreading over a
//! mobility network, optionally coupled to immunizing information spreading
//! over a call network.
//!
//! Each subpopulation holds susceptible, infected and resistant individuals
//! (S, I, R), each also aware or unaware (A, U). Per step, disease spreads
//! locally, information spreads through calls from any subpopulation, and
//! individuals then move according to a row-stochastic mobility matrix.
//!
//! Two engines share one scenario type: [`deterministic`] iterates expected
//! values and [`stochastic`] samples integer counts. [`sweep`] runs grids of
//! either and summarizes each run by its endemic fraction and time to
//! stationarity.
//!
//! ```
//! use metapop::{deterministic, FlowMatrix, ModelParams, Scenario, ScenarioInput, SeedingSpec};
//!
//! let input = ScenarioInput::new(
//!     &FlowMatrix::identity(1),
//!     ModelParams::sis(0.8, 0.4),
//!     vec![1_000_000],
//!     SeedingSpec::uniform(0.001),
//! );
//! let run = deterministic::run(&Scenario::new(input)?)?;
//! assert!((run.i_inf().unwrap() - 0.5).abs() < 1e-6);
//! # Ok::<(), metapop::Error>(())
//! ```

pub mod centrality;
pub mod config;
pub mod deterministic;
mod error;
pub mod ingest;
pub mod interventions;
mod matrix;
mod params;
pub mod output;
pub mod rng;
mod scenario;
pub mod stationarity;
mod state;
pub mod stochastic;
pub mod sweep;

pub use centrality::{centrality, top_k, CentralityKind, CentralityRanking};
pub use error::{Error, Result, Violation};
pub use interventions::{quarantine, seed_awareness, seed_infection, AwarenessSeed, SeedingSpec, SeedingStrategy};
pub use matrix::{default_labels, FlowMatrix, ROW_SUM_TOLERANCE};
pub use params::{Engine, ModelParams, Param, DEFAULT_HORIZON};
pub use scenario::{validate_scenario, MatrixInput, Scenario, ScenarioInput};
pub use state::{Awareness, Cells, CountState, Disease, Marginals, MassState, PopulationState, PARTITION_TOLERANCE};
pub use stationarity::{detect_stationarity, RunSummary, Stationarity, StationarityCriterion};

/// The guide's code blocks, compiled as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/stochastic.md")]
    mod stochastic {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/interventions.md")]
    mod interventions {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/testing.md")]
    mod testing {}
}
