//! Compartment states.
//!
//! The deterministic engine carries real-valued masses ([`MassState`]); the
//! stochastic engine carries integer counts split over six joint cells per
//! subpopulation ([`CountState`]), so that each individual's disease label and
//! awareness label always travel together.

use crate::error::{Error, Result, Violation};

/// Tolerance on `S + I + R = A + U` for real-valued states.
pub const PARTITION_TOLERANCE: f64 = 1e-9;

/// The five marginal compartments of one subpopulation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Marginals {
    pub s: f64,
    pub i: f64,
    pub r: f64,
    pub a: f64,
    pub u: f64,
}

impl Marginals {
    pub fn population(&self) -> f64 {
        self.s + self.i + self.r
    }
}

/// Read access shared by both state representations.
pub trait PopulationState {
    fn n(&self) -> usize;
    fn marginals(&self, node: usize) -> Marginals;

    fn total_population(&self) -> f64 {
        (0..self.n()).map(|k| self.marginals(k).population()).sum()
    }

    fn total_infected(&self) -> f64 {
        (0..self.n()).map(|k| self.marginals(k).i).sum()
    }

    fn total_aware(&self) -> f64 {
        (0..self.n()).map(|k| self.marginals(k).a).sum()
    }

    /// Global infected fraction; zero for an empty population.
    fn infected_fraction(&self) -> f64 {
        let n = self.total_population();
        if n > 0.0 {
            self.total_infected() / n
        } else {
            0.0
        }
    }
}

/// Real-valued compartment masses, one entry per subpopulation.
#[derive(Debug, Clone, PartialEq)]
pub struct MassState {
    pub(crate) s: Vec<f64>,
    pub(crate) i: Vec<f64>,
    pub(crate) r: Vec<f64>,
    pub(crate) a: Vec<f64>,
    pub(crate) u: Vec<f64>,
}

impl MassState {
    pub fn new(s: Vec<f64>, i: Vec<f64>, r: Vec<f64>, a: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        let state = MassState { s, i, r, a, u };
        let v = state.violations();
        if v.is_empty() {
            Ok(state)
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Everyone susceptible except `infected`, everyone unaware.
    pub fn seeded(population: &[f64], infected: &[f64]) -> Result<Self> {
        let s = population
            .iter()
            .zip(infected)
            .map(|(n, i)| n - i)
            .collect();
        let zeros = vec![0.0; population.len()];
        Self::new(
            s,
            infected.to_vec(),
            zeros.clone(),
            zeros,
            population.to_vec(),
        )
    }

    pub fn violations(&self) -> Vec<Violation> {
        let n = self.s.len();
        let mut out = Vec::new();
        for (name, v) in self.columns() {
            if v.len() != n {
                out.push(Violation::new(format!(
                    "compartment {name} has {} entries, expected {n}",
                    v.len()
                )));
                return out;
            }
            if let Some(k) = v.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
                out.push(Violation::new(format!(
                    "compartment {name} negative at subpopulation {k}"
                )));
            }
        }
        for k in 0..n {
            let disease = self.s[k] + self.i[k] + self.r[k];
            let awareness = self.a[k] + self.u[k];
            if (disease - awareness).abs() > PARTITION_TOLERANCE {
                out.push(Violation::new(format!(
                    "partition mismatch at subpopulation {k}: S+I+R = {disease}, A+U = {awareness}"
                )));
            }
        }
        out
    }

    fn columns(&self) -> [(&'static str, &Vec<f64>); 5] {
        [
            ("S", &self.s),
            ("I", &self.i),
            ("R", &self.r),
            ("A", &self.a),
            ("U", &self.u),
        ]
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }
    pub fn i(&self) -> &[f64] {
        &self.i
    }
    pub fn r(&self) -> &[f64] {
        &self.r
    }
    pub fn a(&self) -> &[f64] {
        &self.a
    }
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.s.len())
            .map(|k| self.s[k] + self.i[k] + self.r[k])
            .collect()
    }

    /// Largest absolute per-entry difference over all five compartments.
    pub fn max_abs_diff(&self, other: &MassState) -> f64 {
        self.columns()
            .iter()
            .zip(other.columns().iter())
            .flat_map(|((_, x), (_, y))| x.iter().zip(y.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

impl PopulationState for MassState {
    fn n(&self) -> usize {
        self.s.len()
    }

    fn marginals(&self, k: usize) -> Marginals {
        Marginals {
            s: self.s[k],
            i: self.i[k],
            r: self.r[k],
            a: self.a[k],
            u: self.u[k],
        }
    }
}

/// Disease label of a joint cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disease {
    S = 0,
    I = 1,
    R = 2,
}

/// Awareness label of a joint cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Awareness {
    U = 0,
    A = 1,
}

/// Six joint counts for one subpopulation, indexed `[disease][awareness]`.
pub type Cells = [[u64; 2]; 3];

/// Integer counts over the disease × awareness cells of every subpopulation.
///
/// Both partitions are exact by construction: `S + I + R` and `A + U` are
/// sums over the same six cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountState {
    pub(crate) cells: Vec<Cells>,
}

impl CountState {
    pub fn from_cells(cells: Vec<Cells>) -> Self {
        CountState { cells }
    }

    /// Everyone unaware; `infected[k] <= population[k]` is required.
    pub fn unaware(population: &[u64], infected: &[u64]) -> Result<Self> {
        if population.len() != infected.len() {
            return Err(Error::Invalid(vec![Violation::new(
                "population and infected lengths differ",
            )]));
        }
        let cells = population
            .iter()
            .zip(infected)
            .map(|(&n, &i)| {
                if i > n {
                    Err(Error::SeedExceedsPopulation {
                        requested: i,
                        available: n,
                    })
                } else {
                    Ok([[n - i, 0], [i, 0], [0, 0]])
                }
            })
            .collect::<Result<_>>()?;
        Ok(CountState { cells })
    }

    /// Builds a state from marginal counts, rejecting any partition mismatch.
    ///
    /// Marginals alone do not fix the joint split; aware individuals are
    /// assigned to disease cells in proportion to their size (largest
    /// remainder), which is the split independence would produce on average.
    pub fn from_marginals(s: &[u64], i: &[u64], r: &[u64], a: &[u64], u: &[u64]) -> Result<Self> {
        let n = s.len();
        if [i.len(), r.len(), a.len(), u.len()].iter().any(|&l| l != n) {
            return Err(Error::Invalid(vec![Violation::new(
                "compartment lengths differ",
            )]));
        }
        let mut violations = Vec::new();
        let mut cells = Vec::with_capacity(n);
        for k in 0..n {
            let disease = s[k] + i[k] + r[k];
            if disease != a[k] + u[k] {
                violations.push(Violation::new(format!(
                    "partition mismatch at subpopulation {k}: S+I+R = {disease}, A+U = {}",
                    a[k] + u[k]
                )));
                continue;
            }
            let aware = crate::interventions::apportion(a[k], &[s[k], i[k], r[k]]);
            cells.push([
                [s[k] - aware[0], aware[0]],
                [i[k] - aware[1], aware[1]],
                [r[k] - aware[2], aware[2]],
            ]);
        }
        if violations.is_empty() {
            Ok(CountState { cells })
        } else {
            Err(Error::Invalid(violations))
        }
    }

    pub fn cells(&self) -> &[Cells] {
        &self.cells
    }

    pub fn count(&self, node: usize, d: Disease, a: Awareness) -> u64 {
        self.cells[node][d as usize][a as usize]
    }

    pub fn population(&self, node: usize) -> u64 {
        self.cells[node].iter().flatten().sum()
    }

    pub fn populations(&self) -> Vec<u64> {
        (0..self.cells.len()).map(|k| self.population(k)).collect()
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().flatten().sum()
    }

    pub fn disease(&self, node: usize, d: Disease) -> u64 {
        self.cells[node][d as usize].iter().sum()
    }

    pub fn awareness(&self, node: usize, a: Awareness) -> u64 {
        self.cells[node].iter().map(|c| c[a as usize]).sum()
    }

    pub fn infected(&self) -> Vec<u64> {
        (0..self.cells.len())
            .map(|k| self.disease(k, Disease::I))
            .collect()
    }

    pub fn aware_total(&self) -> u64 {
        (0..self.cells.len())
            .map(|k| self.awareness(k, Awareness::A))
            .sum()
    }

    /// Converts to real-valued masses for the deterministic engine.
    pub fn to_masses(&self) -> MassState {
        let n = self.cells.len();
        let mut m = MassState {
            s: vec![0.0; n],
            i: vec![0.0; n],
            r: vec![0.0; n],
            a: vec![0.0; n],
            u: vec![0.0; n],
        };
        for k in 0..n {
            m.s[k] = self.disease(k, Disease::S) as f64;
            m.i[k] = self.disease(k, Disease::I) as f64;
            m.r[k] = self.disease(k, Disease::R) as f64;
            m.a[k] = self.awareness(k, Awareness::A) as f64;
            m.u[k] = self.awareness(k, Awareness::U) as f64;
        }
        m
    }
}

impl PopulationState for CountState {
    fn n(&self) -> usize {
        self.cells.len()
    }

    fn marginals(&self, k: usize) -> Marginals {
        Marginals {
            s: self.disease(k, Disease::S) as f64,
            i: self.disease(k, Disease::I) as f64,
            r: self.disease(k, Disease::R) as f64,
            a: self.awareness(k, Awareness::A) as f64,
            u: self.awareness(k, Awareness::U) as f64,
        }
    }
}
