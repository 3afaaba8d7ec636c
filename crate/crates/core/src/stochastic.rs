//! Count-based Monte-Carlo realization of both generative procedures.
//!
//! Each subpopulation holds six joint cells (disease S/I/R × awareness U/A).
//! Transitions are binomial draws per cell, so an individual's two labels are
//! always updated together, and mobility moves each cell with a multinomial
//! draw over the origin's row. Both partitions and the total population are
//! exact at every step.
//!
//! Sub-step order and the reference values each draw uses are the same as in
//! [`crate::deterministic`], which is the expectation of this process.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::deterministic::information_contact;
use crate::error::Result;
use crate::matrix::FlowMatrix;
use crate::params::ModelParams;
use crate::rng::replica_rng;
use crate::scenario::Scenario;
use crate::state::{Cells, CountState};
use crate::stationarity::{RunSummary, StationarityCriterion};

const S: usize = 0;
const I: usize = 1;
const R: usize = 2;

/// One draw from `Binomial(n, p)`, exact at `p ∈ {0, 1}`.
#[inline]
pub fn binomial<G: Rng + ?Sized>(n: u64, p: f64, rng: &mut G) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p)
            .expect("probability in (0, 1)")
            .sample(rng)
    }
}

/// Multinomial split of `count` over a sparse row, by sequential conditional
/// binomials. The last listed destination takes whatever is left.
pub fn scatter<G: Rng + ?Sized>(
    count: u64,
    row: &[(usize, f64)],
    rng: &mut G,
    mut sink: impl FnMut(usize, u64),
) {
    let mut left = count;
    let mut mass_left = 1.0;
    for (pos, &(dest, w)) in row.iter().enumerate() {
        if left == 0 {
            return;
        }
        let moved = if pos + 1 == row.len() || w >= mass_left {
            left
        } else {
            binomial(left, w / mass_left, rng)
        };
        sink(dest, moved);
        left -= moved;
        mass_left -= w;
    }
}

fn infection_probability(lambda: f64, infected: u64, population: u64) -> f64 {
    if population == 0 {
        0.0
    } else {
        (lambda * infected as f64 / population as f64).min(1.0)
    }
}

/// Local transitions of one subpopulation. `contact` is `F_j` in the full
/// system and `None` in the disease-only one.
fn local_step<G: Rng + ?Sized>(
    cells: &Cells,
    p: &ModelParams,
    contact: Option<f64>,
    rng: &mut G,
) -> Cells {
    let population: u64 = cells.iter().flatten().sum();
    let infected = cells[I][0] + cells[I][1];
    let p_inf = infection_probability(p.lambda, infected, population);

    // infected at the start of the step, per awareness label
    let mut old_i = cells[I];
    let mut new_i = [0u64; 2];
    let mut s = cells[S];
    let mut r = cells[R];
    for a in 0..2 {
        new_i[a] = binomial(s[a], p_inf, rng);
        s[a] -= new_i[a];
    }

    if let Some(f) = contact {
        let p_aware = p.psi * f;
        for x in [&mut s, &mut old_i, &mut new_i, &mut r] {
            let informed = binomial(x[0], p_aware, rng);
            x[0] -= informed;
            x[1] += informed;
        }
        let p_imm = p.omega * f;
        let mut immunized = [0u64; 2];
        let mut lost = [0u64; 2];
        for a in 0..2 {
            immunized[a] = binomial(s[a], p_imm, rng);
            lost[a] = binomial(r[a], p.xi, rng);
        }
        for a in 0..2 {
            s[a] = s[a] - immunized[a] + lost[a];
            r[a] = r[a] + immunized[a] - lost[a];
        }
    }

    let mut i = [0u64; 2];
    for a in 0..2 {
        let recovered = binomial(old_i[a], p.gamma, rng);
        s[a] += recovered;
        i[a] = old_i[a] - recovered + new_i[a];
    }
    [s, i, r]
}

fn mobility<G: Rng + ?Sized>(local: &[Cells], m: &FlowMatrix, rng: &mut G) -> CountState {
    let mut out: Vec<Cells> = vec![[[0; 2]; 3]; local.len()];
    for (j, cells) in local.iter().enumerate() {
        let row = m.nonzeros(j);
        for d in 0..3 {
            for a in 0..2 {
                scatter(cells[d][a], row, rng, |k, c| out[k][d][a] += c);
            }
        }
    }
    CountState::from_cells(out)
}

/// One step of the disease-only process: infection, recovery, mobility.
pub fn mc_step_disease<G: Rng + ?Sized>(
    state: &CountState,
    m: &FlowMatrix,
    p: &ModelParams,
    rng: &mut G,
) -> CountState {
    let local: Vec<Cells> = state
        .cells
        .iter()
        .map(|c| local_step(c, p, None, rng))
        .collect();
    mobility(&local, m, rng)
}

/// One step of the full process: infection, awareness, immunization and
/// immunity loss, recovery, mobility.
pub fn mc_step_full<G: Rng + ?Sized>(
    state: &CountState,
    m: &FlowMatrix,
    c: &FlowMatrix,
    p: &ModelParams,
    rng: &mut G,
) -> CountState {
    let masses = state.to_masses();
    let f = information_contact(c, masses.a(), &masses.populations());
    let local: Vec<Cells> = state
        .cells
        .iter()
        .zip(&f)
        .map(|(cells, &fj)| local_step(cells, p, Some(fj), rng))
        .collect();
    mobility(&local, m, rng)
}

/// Samples `params.horizon` steps from `initial`. Without a calls matrix the
/// disease-only process is used.
pub fn mc_run_from<G: Rng + ?Sized>(
    initial: CountState,
    mobility: &FlowMatrix,
    calls: Option<&FlowMatrix>,
    params: &ModelParams,
    criterion: &StationarityCriterion,
    rng: &mut G,
) -> RunSummary<CountState> {
    let mut trajectory = Vec::with_capacity(params.horizon + 1);
    trajectory.push(initial);
    for _ in 0..params.horizon {
        let prev = trajectory.last().expect("nonempty");
        let next = match calls {
            Some(c) => mc_step_full(prev, mobility, c, params, rng),
            None => mc_step_disease(prev, mobility, params, rng),
        };
        trajectory.push(next);
    }
    RunSummary::from_trajectory(trajectory, criterion, params.r0())
}

/// Runs replica `replica` of a scenario. The initial condition is the same
/// for every replica; the dynamics use the replica's own random stream.
pub fn mc_run(s: &Scenario, replica: u64) -> Result<RunSummary<CountState>> {
    let initial = s.initial_state()?;
    let mut rng = replica_rng(s.rng_seed(), replica);
    Ok(mc_run_from(
        initial,
        s.effective_mobility(),
        s.calls(),
        s.params(),
        s.stationarity(),
        &mut rng,
    ))
}
