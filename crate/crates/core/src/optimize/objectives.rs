use super::{frank_wolfe_simplex, DescentConfig, DescentResult, Objective, OptimizeError};
use crate::engine::UrnState;
use crate::graph::Network;
use crate::oracle::{expected_exposure, infection_rate_time1, ExposureOptions};

/// `Ĩ_1` as a function of the black initialization, red fixed.
pub struct InitObjective<'a> {
    pub net: &'a Network,
    pub red: &'a [f64],
}

impl Objective for InitObjective<'_> {
    fn dim(&self) -> usize {
        self.net.node_count()
    }

    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>), OptimizeError> {
        let r = infection_rate_time1(self.net, self.red, x)?;
        Ok((r.value, r.grad_black))
    }
}

/// Expected exposure as a function of the curing step, infection step fixed.
pub struct CureObjective<'a, 's> {
    pub state: &'s UrnState<'a>,
    pub infection: &'s [f64],
    pub opts: ExposureOptions,
}

impl Objective for CureObjective<'_, '_> {
    fn dim(&self) -> usize {
        self.state.node_count()
    }

    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>), OptimizeError> {
        let e = expected_exposure(self.state, x, self.infection, &self.opts)?;
        Ok((e.value, e.grad_curing))
    }
}

/// Negated expected exposure in the infection step, curing step fixed, so the
/// infection player's best response is also a minimisation.
pub struct InfectionObjective<'a, 's> {
    pub state: &'s UrnState<'a>,
    pub curing: &'s [f64],
    pub opts: ExposureOptions,
}

impl Objective for InfectionObjective<'_, '_> {
    fn dim(&self) -> usize {
        self.state.node_count()
    }

    fn evaluate(&self, y: &[f64]) -> Result<(f64, Vec<f64>), OptimizeError> {
        let e = expected_exposure(self.state, self.curing, y, &self.opts)?;
        Ok((-e.value, e.grad_infection.into_iter().map(|g| -g).collect()))
    }
}

/// Black initialization minimising `Ĩ_1` under the budget.
pub fn optimize_init(
    net: &Network,
    red: &[f64],
    budget: f64,
    cfg: &DescentConfig,
) -> Result<DescentResult, OptimizeError> {
    // Surfaces length, sign and zero-red-mass violations before descending.
    infection_rate_time1(net, red, &vec![0.0; red.len()])?;
    frank_wolfe_simplex(&InitObjective { net, red }, budget, cfg)
}

/// One-step curing allocation minimising the expected exposure at the next
/// step against a known infection step `infection`. Use
/// [`nash_solve`](super::nash_solve) when the infection side is adversarial.
pub fn optimize_cure_step(
    state: &UrnState<'_>,
    budget: f64,
    infection: &[f64],
    cfg: &DescentConfig,
    opts: &ExposureOptions,
) -> Result<DescentResult, OptimizeError> {
    let f = CureObjective {
        state,
        infection,
        opts: *opts,
    };
    frank_wolfe_simplex(&f, budget, cfg)
}
