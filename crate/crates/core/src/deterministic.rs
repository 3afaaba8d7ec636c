//! Expected-value iteration of the contagion–mobility and the coupled
//! contagion–awareness–mobility systems.
//!
//! A step is evaluated as ordered sub-steps, in the order of the generative
//! stochastic procedure:
//!
//! 1. infection, `λ·S_j·I_j/N_j` from S to I;
//! 2. awareness, `ψ·U_j·F_j` from U to A;
//! 3. immunization `ω·S_j·F_j` from S to R (on the susceptibles left after
//!    step 1) and immunity loss `ξ·R_j` from R to S;
//! 4. recovery, `γ·I_j` from I back to S, where `I_j` counts those infected at
//!    the start of the step;
//! 5. mobility, `X_i ← Σ_j m_ji·X_j` for every compartment.
//!
//! `F_j = Σ_k c_kj·A_k / Σ_k c_kj·N_k` is the probability that a call received
//! in `j` comes from an aware person; it is computed once per step from the
//! pre-step state. Every outflow is a rate in `[0, 1]` times the current
//! content of its compartment, so masses stay nonnegative.

use crate::error::Result;
use crate::matrix::FlowMatrix;
use crate::params::ModelParams;
use crate::scenario::Scenario;
use crate::stationarity::{RunSummary, StationarityCriterion};
use crate::state::MassState;

/// How the local update inside a step is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sequencing {
    /// Ordered sub-steps (the default).
    #[default]
    Sequential,
    /// Every term from pre-step values, exactly as the closed-form update is
    /// usually printed. Only meant for cross-checks at small rates: with
    /// `λ + ω > 1` it can drive S negative.
    Simultaneous,
}

/// `F_j` for every `j`; zero where no calls arrive.
pub fn information_contact(calls: &FlowMatrix, aware: &[f64], population: &[f64]) -> Vec<f64> {
    let num = calls.propagate(aware);
    let den = calls.propagate(population);
    num.iter()
        .zip(&den)
        .map(|(&a, &n)| if n > 0.0 { (a / n).min(1.0) } else { 0.0 })
        .collect()
}

#[inline]
fn infection_probability(lambda: f64, i: f64, n: f64) -> f64 {
    if n > 0.0 {
        (lambda * i / n).min(1.0)
    } else {
        0.0
    }
}

fn apply_mobility(m: &FlowMatrix, local: MassState) -> MassState {
    MassState {
        s: m.propagate(&local.s),
        i: m.propagate(&local.i),
        r: m.propagate(&local.r),
        a: m.propagate(&local.a),
        u: m.propagate(&local.u),
    }
}

/// One step of the disease-only system: infection, recovery, mobility.
/// R, A and U are only moved.
pub fn step_disease(state: &MassState, m: &FlowMatrix, p: &ModelParams) -> MassState {
    let mut local = state.clone();
    for j in 0..state.s.len() {
        let (s, i) = (state.s[j], state.i[j]);
        let n = s + i + state.r[j];
        let infections = s * infection_probability(p.lambda, i, n);
        let recoveries = p.gamma * i;
        local.s[j] = s - infections + recoveries;
        local.i[j] = i + infections - recoveries;
    }
    apply_mobility(m, local)
}

/// One step of the full five-compartment system.
pub fn step_full(state: &MassState, m: &FlowMatrix, c: &FlowMatrix, p: &ModelParams) -> MassState {
    step_full_with(state, m, c, p, Sequencing::Sequential)
}

pub fn step_full_with(
    state: &MassState,
    m: &FlowMatrix,
    c: &FlowMatrix,
    p: &ModelParams,
    sequencing: Sequencing,
) -> MassState {
    let population = state.populations();
    let f = information_contact(c, &state.a, &population);
    let mut local = state.clone();
    for j in 0..state.s.len() {
        let (s, i, r, a, u) = (state.s[j], state.i[j], state.r[j], state.a[j], state.u[j]);
        let infections = s * infection_probability(p.lambda, i, population[j]);
        let informed = u * (p.psi * f[j]);
        let lost = p.xi * r;
        let recoveries = p.gamma * i;
        let immunized = match sequencing {
            Sequencing::Sequential => (s - infections) * (p.omega * f[j]),
            Sequencing::Simultaneous => s * (p.omega * f[j]),
        };
        local.s[j] = s - infections - immunized + lost + recoveries;
        local.i[j] = i + infections - recoveries;
        local.r[j] = r + immunized - lost;
        local.a[j] = a + informed;
        local.u[j] = u - informed;
    }
    apply_mobility(m, local)
}

/// Iterates from `initial` for `params.horizon` steps. Without a calls
/// matrix the disease-only system is used.
pub fn run_from(
    initial: MassState,
    mobility: &FlowMatrix,
    calls: Option<&FlowMatrix>,
    params: &ModelParams,
    criterion: &StationarityCriterion,
) -> RunSummary<MassState> {
    let mut trajectory = Vec::with_capacity(params.horizon + 1);
    trajectory.push(initial);
    for _ in 0..params.horizon {
        let prev = trajectory.last().expect("nonempty");
        let next = match calls {
            Some(c) => step_full(prev, mobility, c, params),
            None => step_disease(prev, mobility, params),
        };
        trajectory.push(next);
    }
    RunSummary::from_trajectory(trajectory, criterion, params.r0())
}

/// Runs a scenario from its seeded initial condition over the quarantined
/// mobility matrix.
pub fn run(s: &Scenario) -> Result<RunSummary<MassState>> {
    let initial = s.initial_state()?.to_masses();
    Ok(run_from(
        initial,
        s.effective_mobility(),
        s.calls(),
        s.params(),
        s.stationarity(),
    ))
}
