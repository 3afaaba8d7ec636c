//! Stationary-state detection on the global infected fraction.

use serde::{Deserialize, Serialize};

use crate::error::Violation;
use crate::state::PopulationState;

pub const DEFAULT_EPSILON: f64 = 1e-10;
pub const DEFAULT_WINDOW: usize = 10;

/// A run is stationary once the global infected fraction moves by less than
/// `epsilon` (absolute) on each of `window` consecutive steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarityCriterion {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

impl Default for StationarityCriterion {
    fn default() -> Self {
        StationarityCriterion {
            epsilon: DEFAULT_EPSILON,
            window: DEFAULT_WINDOW,
        }
    }
}

impl StationarityCriterion {
    pub fn new(epsilon: f64, window: usize) -> Self {
        StationarityCriterion { epsilon, window }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.epsilon >= 0.0) {
            out.push(Violation::new("stationarity epsilon must be nonnegative"));
        }
        if self.window < 1 {
            out.push(Violation::new("stationarity window must be at least 1"));
        }
        out
    }
}

/// Outcome of [`detect_stationarity`]. `tau` and `i_inf` are present exactly
/// when the run is stationary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    pub tau: Option<usize>,
    pub i_inf: Option<f64>,
}

impl Stationarity {
    pub const NOT_REACHED: Stationarity = Stationarity {
        tau: None,
        i_inf: None,
    };

    pub fn is_stationary(&self) -> bool {
        self.tau.is_some()
    }
}

/// Scans an infected-fraction series `i[0..]` for the first `tau` such that
/// `|i[t+1] - i[t]| < epsilon` for every `t` in `tau..tau + window`.
/// `i_inf` is `i[tau]`.
pub fn detect_stationarity(fractions: &[f64], criterion: &StationarityCriterion) -> Stationarity {
    let w = criterion.window.max(1);
    let mut run = 0usize;
    for t in 0..fractions.len().saturating_sub(1) {
        if (fractions[t + 1] - fractions[t]).abs() < criterion.epsilon {
            run += 1;
            if run == w {
                let tau = t + 1 - w;
                return Stationarity {
                    tau: Some(tau),
                    i_inf: Some(fractions[tau]),
                };
            }
        } else {
            run = 0;
        }
    }
    Stationarity::NOT_REACHED
}

/// Result of one run: the full trajectory (`horizon + 1` states, `t = 0` is
/// the initial condition) and its stationarity summary.
#[derive(Debug, Clone)]
pub struct RunSummary<S> {
    pub trajectory: Vec<S>,
    pub stationarity: Stationarity,
    /// `lambda / gamma` of the parameters used.
    pub r0: f64,
}

impl<S: PopulationState> RunSummary<S> {
    pub fn from_trajectory(trajectory: Vec<S>, criterion: &StationarityCriterion, r0: f64) -> Self {
        let fractions: Vec<f64> = trajectory.iter().map(|s| s.infected_fraction()).collect();
        let stationarity = detect_stationarity(&fractions, criterion);
        RunSummary {
            trajectory,
            stationarity,
            r0,
        }
    }

    pub fn infected_fractions(&self) -> Vec<f64> {
        self.trajectory.iter().map(|s| s.infected_fraction()).collect()
    }
}

impl<S> RunSummary<S> {
    pub fn stationary(&self) -> bool {
        self.stationarity.is_stationary()
    }

    pub fn i_inf(&self) -> Option<f64> {
        self.stationarity.i_inf
    }

    pub fn tau(&self) -> Option<usize> {
        self.stationarity.tau
    }

    pub fn last(&self) -> &S {
        self.trajectory.last().expect("trajectory is never empty")
    }
}
