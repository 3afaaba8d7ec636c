use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Violation;

/// One simulation step is one day; 180 steps cover a six-month window.
pub const DEFAULT_HORIZON: usize = 180;

/// Per-step transition rates and run length.
///
/// `lambda` is the product of contact rate and contagion probability,
/// `gamma` the recovery rate, `omega` the rate at which an information
/// contact immunizes a susceptible, `psi` the rate at which it makes an
/// unaware person aware, and `xi` the rate at which immunity is lost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub lambda: f64,
    pub gamma: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub psi: f64,
    #[serde(default)]
    pub xi: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

impl ModelParams {
    /// Disease-only parameters with the default horizon.
    pub fn sis(lambda: f64, gamma: f64) -> Self {
        ModelParams {
            lambda,
            gamma,
            omega: 0.0,
            psi: 0.0,
            xi: 0.0,
            horizon: DEFAULT_HORIZON,
        }
    }

    pub fn with_information(mut self, omega: f64, psi: f64, xi: f64) -> Self {
        self.omega = omega;
        self.psi = psi;
        self.xi = xi;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    /// Basic reproductive ratio of the classic SIS model, `lambda / gamma`.
    pub fn r0(&self) -> f64 {
        self.lambda / self.gamma
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Lambda => self.lambda,
            Param::Gamma => self.gamma,
            Param::Omega => self.omega,
            Param::Psi => self.psi,
            Param::Xi => self.xi,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p {
            Param::Lambda => self.lambda = value,
            Param::Gamma => self.gamma = value,
            Param::Omega => self.omega = value,
            Param::Psi => self.psi = value,
            Param::Xi => self.xi = value,
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = Param::ALL
            .iter()
            .filter(|&&p| !in_unit_interval(self.get(p)))
            .map(|p| Violation::new(format!("{p} out of [0,1]")))
            .collect();
        if self.horizon < 1 {
            out.push(Violation::new("horizon must be at least 1"));
        }
        out
    }
}

pub(crate) fn in_unit_interval(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Names of the five rates, used by sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Lambda,
    Gamma,
    Omega,
    Psi,
    Xi,
}

impl Param {
    pub const ALL: [Param; 5] = [
        Param::Lambda,
        Param::Gamma,
        Param::Omega,
        Param::Psi,
        Param::Xi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Lambda => "lambda",
            Param::Gamma => "gamma",
            Param::Omega => "omega",
            Param::Psi => "psi",
            Param::Xi => "xi",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown parameter `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Deterministic,
    Stochastic,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deterministic" => Ok(Engine::Deterministic),
            "stochastic" => Ok(Engine::Stochastic),
            _ => Err(format!("unknown engine `{s}`")),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Deterministic => "deterministic",
            Engine::Stochastic => "stochastic",
        })
    }
}
