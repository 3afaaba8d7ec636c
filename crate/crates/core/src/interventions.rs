//! Scenario transformations: geographic quarantine and initial seeding of
//! infection and awareness.

use rand::Rng;
use rand_distr::{Distribution, Hypergeometric};
use serde::{Deserialize, Serialize};

use crate::centrality::{top_k, CentralityKind, CentralityRanking};
use crate::error::{Error, Result, Violation};
use crate::matrix::FlowMatrix;
use crate::params::in_unit_interval;
use crate::state::{Awareness, CountState};

/// Cuts every flow into and out of the target subpopulations.
///
/// Each target's row becomes the unit vector at the target. Mass that other
/// rows sent into a target is added to their own diagonal instead: would-be
/// travellers stay home.
pub fn quarantine(m: &FlowMatrix, targets: &[usize]) -> Result<FlowMatrix> {
    let n = m.n();
    if let Some(&index) = targets.iter().find(|&&q| q >= n) {
        return Err(Error::NodeOutOfRange { index, n });
    }
    let mut is_target = vec![false; n];
    for &q in targets {
        is_target[q] = true;
    }
    let mut rows = m.rows();
    for (j, row) in rows.iter_mut().enumerate() {
        if is_target[j] {
            row.iter_mut().for_each(|w| *w = 0.0);
            row[j] = 1.0;
            continue;
        }
        let mut moved = 0.0;
        for q in (0..n).filter(|&q| is_target[q]) {
            moved += row[q];
            row[q] = 0.0;
        }
        row[j] += moved;
    }
    m.with_rows(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedingStrategy {
    /// The same fraction infected in every subpopulation.
    Uniform,
    /// All seeds in one randomly chosen subpopulation.
    RandomSingle,
    /// Seeds split over the `k` most central subpopulations.
    CentralityTopK,
    /// Seeds split over an explicit list of subpopulations.
    ExplicitList,
}

/// How the initial infected are placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedingSpec {
    pub strategy: SeedingStrategy,
    pub fraction: f64,
    #[serde(default = "one")]
    pub k: usize,
    #[serde(default = "eigen", rename = "centrality")]
    pub centrality_kind: CentralityKind,
    #[serde(default)]
    pub nodes: Vec<usize>,
}

fn one() -> usize {
    1
}

fn eigen() -> CentralityKind {
    CentralityKind::Eigenvector
}

impl SeedingSpec {
    pub fn uniform(fraction: f64) -> Self {
        SeedingSpec {
            strategy: SeedingStrategy::Uniform,
            fraction,
            k: 1,
            centrality_kind: CentralityKind::Eigenvector,
            nodes: Vec::new(),
        }
    }

    pub fn random_single(fraction: f64) -> Self {
        SeedingSpec {
            strategy: SeedingStrategy::RandomSingle,
            ..Self::uniform(fraction)
        }
    }

    pub fn top_k(fraction: f64, k: usize, kind: CentralityKind) -> Self {
        SeedingSpec {
            strategy: SeedingStrategy::CentralityTopK,
            k,
            centrality_kind: kind,
            ..Self::uniform(fraction)
        }
    }

    pub fn explicit(fraction: f64, nodes: Vec<usize>) -> Self {
        SeedingSpec {
            strategy: SeedingStrategy::ExplicitList,
            nodes,
            ..Self::uniform(fraction)
        }
    }

    pub fn violations(&self, n: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        if !in_unit_interval(self.fraction) {
            out.push(Violation::new("seeding fraction out of [0,1]"));
        }
        match self.strategy {
            SeedingStrategy::CentralityTopK if self.k < 1 || self.k > n => {
                out.push(Violation::new(format!(
                    "centrality-top-k needs 1 <= k <= {n}, got {}",
                    self.k
                )));
            }
            SeedingStrategy::ExplicitList => {
                if self.nodes.is_empty() {
                    out.push(Violation::new("explicit-list seeding with no nodes"));
                }
                if let Some(q) = self.nodes.iter().find(|&&q| q >= n) {
                    out.push(Violation::new(format!("seed node {q} out of range")));
                }
            }
            _ => {}
        }
        out
    }
}

/// Location-agnostic awareness campaign: a fraction of the whole population
/// is informed at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AwarenessSeed {
    pub fraction: f64,
}

/// Round half to even.
pub fn round_half_even(x: f64) -> u64 {
    x.round_ties_even().max(0.0) as u64
}

/// Splits `total` over slots in proportion to `weights`, with no slot
/// receiving more than its weight. Each share is rounded half-to-even; the
/// leftover from rounding goes to the heaviest slot (lowest index on ties),
/// spilling to the next heaviest when a slot is full or empty.
///
/// Requires `total <= Σ weights`.
pub fn apportion(total: u64, weights: &[u64]) -> Vec<u64> {
    let sum: u64 = weights.iter().sum();
    if sum == 0 || total == 0 {
        return vec![0; weights.len()];
    }
    let mut shares: Vec<u64> = weights
        .iter()
        .map(|&w| round_half_even(total as f64 * w as f64 / sum as f64).min(w))
        .collect();
    let mut by_weight: Vec<usize> = (0..weights.len()).collect();
    by_weight.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let assigned: u64 = shares.iter().sum();
    if assigned < total {
        let mut missing = total - assigned;
        for &k in &by_weight {
            let add = missing.min(weights[k] - shares[k]);
            shares[k] += add;
            missing -= add;
            if missing == 0 {
                break;
            }
        }
    } else {
        let mut excess = assigned - total;
        for &k in &by_weight {
            let take = excess.min(shares[k]);
            shares[k] -= take;
            excess -= take;
            if excess == 0 {
                break;
            }
        }
    }
    shares
}

/// Places the initial infected; everyone else is susceptible and unaware.
///
/// `ranking` is consulted only by the centrality strategy and must then be
/// present. `rng` is consulted only by the random-single strategy.
pub fn seed_infection<R: Rng + ?Sized>(
    population: &[u64],
    spec: &SeedingSpec,
    ranking: Option<&CentralityRanking>,
    rng: &mut R,
) -> Result<CountState> {
    let n = population.len();
    let v = spec.violations(n);
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let total: u64 = population.iter().sum();
    let target = round_half_even(spec.fraction * total as f64);
    let mut infected = vec![0u64; n];
    match spec.strategy {
        SeedingStrategy::Uniform => {
            for (k, &pop) in population.iter().enumerate() {
                infected[k] = round_half_even(spec.fraction * pop as f64).min(pop);
            }
            let assigned: u64 = infected.iter().sum();
            // residual from per-subpopulation rounding goes on the largest one
            let largest = (0..n)
                .max_by(|&a, &b| population[a].cmp(&population[b]).then(b.cmp(&a)))
                .unwrap_or(0);
            if assigned < target {
                let room = population[largest] - infected[largest];
                infected[largest] += (target - assigned).min(room);
            } else {
                let excess = (assigned - target).min(infected[largest]);
                infected[largest] -= excess;
            }
        }
        SeedingStrategy::RandomSingle => {
            let candidates: Vec<usize> = (0..n).filter(|&k| population[k] > 0).collect();
            if !candidates.is_empty() {
                let pick = candidates[rng.random_range(0..candidates.len())];
                infected[pick] = target.min(population[pick]);
            }
        }
        SeedingStrategy::CentralityTopK | SeedingStrategy::ExplicitList => {
            let nodes = if spec.strategy == SeedingStrategy::CentralityTopK {
                let ranking = ranking.ok_or_else(|| {
                    Error::Config("centrality-top-k seeding needs a centrality ranking".into())
                })?;
                top_k(ranking, spec.k)?
            } else {
                dedup(&spec.nodes)
            };
            let capacity: Vec<u64> = nodes.iter().map(|&q| population[q]).collect();
            let available: u64 = capacity.iter().sum();
            if target > available {
                return Err(Error::SeedExceedsPopulation {
                    requested: target,
                    available,
                });
            }
            for (q, share) in nodes.iter().zip(apportion(target, &capacity)) {
                infected[*q] = share;
            }
        }
    }
    CountState::unaware(population, &infected)
}

fn dedup(nodes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(nodes.len());
    for &q in nodes {
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// Number of marked items among `draws` taken without replacement from
/// `pool` items of which `marked` are marked.
fn hypergeometric<R: Rng + ?Sized>(pool: u64, marked: u64, draws: u64, rng: &mut R) -> u64 {
    match Hypergeometric::new(pool, marked, draws) {
        Ok(h) => h.sample(rng),
        // the library's small-mode sampler underflows on large pools; there the
        // mode is below 10, so sequential exact draws are cheap
        Err(_) => {
            let (mut left, mut hits) = (pool, 0);
            let (trials, targets) = (marked.min(draws), marked.max(draws));
            for _ in 0..trials {
                if rng.random_range(0..left) < targets - hits {
                    hits += 1;
                }
                left -= 1;
            }
            hits
        }
    }
}

/// Marks `round(fraction·N)` individuals aware, drawn uniformly without
/// replacement from everyone still unaware, whatever their location or
/// disease state. Disease labels are untouched.
pub fn seed_awareness<R: Rng + ?Sized>(
    state: &CountState,
    fraction: f64,
    rng: &mut R,
) -> Result<CountState> {
    if !in_unit_interval(fraction) {
        return Err(Error::Invalid(vec![Violation::new(
            "awareness fraction out of [0,1]",
        )]));
    }
    let mut cells = state.cells.clone();
    let mut remaining_pool: u64 = cells
        .iter()
        .flat_map(|c| c.iter().map(|d| d[Awareness::U as usize]))
        .sum();
    let mut draws = round_half_even(fraction * state.total() as f64).min(remaining_pool);
    // sequential conditional hypergeometric draws over (subpop, disease) cells
    'outer: for node in cells.iter_mut() {
        for d in node.iter_mut() {
            if draws == 0 {
                break 'outer;
            }
            let here = d[Awareness::U as usize];
            let picked = if here == remaining_pool {
                draws
            } else if here == 0 {
                0
            } else {
                hypergeometric(remaining_pool, here, draws, rng)
            };
            d[Awareness::U as usize] -= picked;
            d[Awareness::A as usize] += picked;
            remaining_pool -= here;
            draws -= picked;
        }
    }
    Ok(CountState::from_cells(cells))
}
