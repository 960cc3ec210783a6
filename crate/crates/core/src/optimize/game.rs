use serde::{Deserialize, Serialize};

use super::{
    frank_wolfe_simplex, CureObjective, DescentConfig, DescentResult, InfectionObjective,
    OptimizeError, Variant,
};
use crate::engine::UrnState;
use crate::oracle::{expected_exposure, ExposureOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    pub rounds: usize,
    /// Accept once the certified exploitability is below this.
    pub tolerance: f64,
    /// Settings for the inner best-response descents.
    pub descent: DescentConfig,
    #[serde(skip)]
    pub exposure: ExposureOptions,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            rounds: 200,
            tolerance: 1e-4,
            descent: DescentConfig {
                gap_tolerance: 1e-9,
                variant: Variant::Pairwise,
                ..Default::default()
            },
            exposure: ExposureOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSolution {
    /// Curing step `Δ_b(n)`.
    pub curing: Vec<f64>,
    /// Infection step `Δ_r(n)`.
    pub infection: Vec<f64>,
    /// Expected exposure at the returned pair.
    pub value: f64,
    /// Upper bound on `max_y E(x*, y) - min_x E(x, y*)`.
    pub exploitability: f64,
    pub converged: bool,
    pub rounds: usize,
}

fn uniform(n: usize, budget: f64) -> Vec<f64> {
    vec![budget / n as f64; n]
}

fn mix(avg: &mut [f64], next: &[f64], weight: f64) {
    for (a, b) in avg.iter_mut().zip(next) {
        *a += weight * (b - *a);
    }
}

struct Responses {
    cure: DescentResult,
    infect: DescentResult,
    epsilon: f64,
}

fn best_responses(
    state: &UrnState<'_>,
    x: &[f64],
    y: &[f64],
    budget_b: f64,
    budget_r: f64,
    cfg: &GameConfig,
) -> Result<Responses, OptimizeError> {
    let cure = frank_wolfe_simplex(
        &CureObjective {
            state,
            infection: y,
            opts: cfg.exposure,
        },
        budget_b,
        &cfg.descent,
    )?;
    let infect = frank_wolfe_simplex(
        &InfectionObjective {
            state,
            curing: x,
            opts: cfg.exposure,
        },
        budget_r,
        &cfg.descent,
    )?;
    // max_y E(x, ·) <= -infect.objective + infect.gap and
    // min_x E(·, y) >= cure.objective - cure.gap.
    let upper = -infect.objective + infect.gap;
    let lower = cure.objective - cure.gap;
    Ok(Responses {
        epsilon: (upper - lower).max(0.0),
        cure,
        infect,
    })
}

/// Equilibrium of the one-step game in which the curing player minimises and
/// the infection player maximises the expected exposure at the next step.
///
/// Runs fictitious play: both players best-respond (by Frank–Wolfe) to the
/// other's running average, and the averages are the candidate equilibrium.
/// The reported exploitability is certified by the inner duality gaps.
pub fn nash_solve(
    state: &UrnState<'_>,
    budget_b: f64,
    budget_r: f64,
    cfg: &GameConfig,
) -> Result<GameSolution, OptimizeError> {
    for b in [budget_b, budget_r] {
        if !(b.is_finite() && b >= 0.0) {
            return Err(OptimizeError::Budget(b));
        }
    }
    if cfg.rounds == 0 || !(cfg.tolerance > 0.0) {
        return Err(OptimizeError::Config(
            "game needs a positive round count and tolerance".into(),
        ));
    }
    let n = state.node_count();
    let mut x = uniform(n, budget_b);
    let mut y = uniform(n, budget_r);
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, usize)> = None;

    for round in 1..=cfg.rounds {
        let r = best_responses(state, &x, &y, budget_b, budget_r, cfg)?;
        log::debug!("game round {round}: exploitability {:.3e}", r.epsilon);
        if best.as_ref().is_none_or(|b| r.epsilon < b.0) {
            best = Some((r.epsilon, x.clone(), y.clone(), round));
        }
        if r.epsilon < cfg.tolerance {
            break;
        }
        // The uniform starting point is dropped after the first round.
        let w = 1.0 / round as f64;
        mix(&mut x, &r.cure.x, w);
        mix(&mut y, &r.infect.x, w);
    }

    let (epsilon, x, y, round) = best.expect("at least one round");
    let value = expected_exposure(state, &x, &y, &cfg.exposure)
        .map_err(OptimizeError::from)?
        .value;
    Ok(GameSolution {
        curing: x,
        infection: y,
        value,
        exploitability: epsilon,
        converged: epsilon < cfg.tolerance,
        rounds: round,
    })
}
