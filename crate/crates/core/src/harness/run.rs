use rayon::prelude::*;

use super::{stream_id, Arm, ExperimentConfig, HarnessError, SeriesRow, UniformStream};
use crate::engine::{DrawHistory, Reinforcement, UrnState};
use crate::graph::Network;
use crate::policy::{Allocation, Allocator};

/// Per-time averages of the infected fraction for one arm.
#[derive(Debug, Clone, PartialEq)]
pub struct SummarySeries {
    pub strategy: String,
    pub trials: usize,
    /// Empirical `Ĩ_n` for `n = 1..=steps`.
    pub mean: Vec<f64>,
    /// Standard error of `mean`: sample standard deviation of the per-trial
    /// infected fraction over `sqrt(trials)`.
    pub stderr: Vec<f64>,
}

impl SummarySeries {
    pub fn steps(&self) -> usize {
        self.mean.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = SeriesRow> + '_ {
        self.mean
            .iter()
            .zip(&self.stderr)
            .enumerate()
            .map(|(k, (&m, &s))| SeriesRow {
                time: k + 1,
                strategy: self.strategy.clone(),
                mean_infection: m,
                stderr: s,
                trials: self.trials,
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// Fraction of nodes drawing red at each step.
    pub fractions: Vec<f64>,
    pub history: Option<DrawHistory>,
}

/// Pairwise comparison `a - b` of two arms.
#[derive(Debug, Clone, PartialEq)]
pub struct Difference {
    pub a: String,
    pub b: String,
    pub mean: Vec<f64>,
    /// `sqrt(se_a² + se_b²)`.
    pub stderr: Vec<f64>,
    /// Standard error of the per-trial differences; meaningful when the arms
    /// share random streams.
    pub stderr_paired: Vec<f64>,
}

impl Difference {
    /// Two-sample z statistic at each time.
    pub fn z(&self) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.stderr)
            .map(|(d, s)| if *s > 0.0 { d / s } else { 0.0 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub series: Vec<SummarySeries>,
    pub differences: Vec<Difference>,
}

/// Everything a trial needs that does not depend on the trial index.
struct Prepared<'a> {
    net: &'a Network,
    red: Vec<f64>,
    black: Vec<f64>,
    cure: Option<(Allocator<'a>, f64)>,
    fixed: Reinforcement,
    infection: Vec<f64>,
    steps: usize,
    seed: u64,
    arm_index: Option<usize>,
    keep_history: bool,
}

fn prepare<'a>(
    cfg: &ExperimentConfig,
    net: &'a Network,
    arm: &Arm,
    arm_index: Option<usize>,
    keep_history: bool,
) -> Result<Prepared<'a>, HarnessError> {
    let n = net.node_count();
    let init_err = |source| HarnessError::Init {
        arm: arm.name.clone(),
        source,
    };
    let red = match &cfg.init_red {
        Some(r) => r.clone(),
        None => Allocation::uniform(n, cfg.red_budget).masses,
    };
    let black = match &cfg.init_black {
        Some(b) => b.clone(),
        None => {
            Allocator::new(net, arm.init_strategy)
                .and_then(|a| a.init(&red, arm.init_budget))
                .map_err(init_err)?
                .masses
        }
    };
    // Surface a bad initial state once rather than in every trial.
    UrnState::new(net, &red, &black).map_err(|source| HarnessError::State {
        arm: arm.name.clone(),
        source,
    })?;
    let cure = match arm.cure_strategy {
        Some(spec) => Some((
            Allocator::new(net, spec).map_err(init_err)?,
            arm.cure_budget,
        )),
        None => None,
    };
    Ok(Prepared {
        net,
        red,
        black,
        cure,
        fixed: Reinforcement::uniform(n, cfg.delta_red, cfg.delta_black),
        infection: Allocation::uniform(n, cfg.infection_budget).masses,
        steps: cfg.steps,
        seed: cfg.seed,
        arm_index,
        keep_history,
    })
}

impl Prepared<'_> {
    fn trial(&self, trial: usize) -> Result<TrialResult, HarnessError> {
        let n = self.net.node_count();
        let fail = |step: usize, message: String| HarnessError::Trial {
            trial,
            step,
            message,
        };
        let mut state =
            UrnState::new(self.net, &self.red, &self.black).map_err(|e| fail(0, e.to_string()))?;
        if self.keep_history {
            state = state.with_history();
        }
        let mut stream = UniformStream::new(self.seed, stream_id(trial, self.arm_index));
        let mut uniforms = vec![0.0; n];
        let mut fractions = Vec::with_capacity(self.steps);
        let mut step_delta;
        for t in 1..=self.steps {
            let delta = match &self.cure {
                None => &self.fixed,
                Some((alloc, budget)) => {
                    let black = alloc
                        .cure(&state, *budget, &self.infection)
                        .map_err(|e| fail(t, e.to_string()))?;
                    step_delta = Reinforcement::new(self.infection.clone(), black.masses);
                    &step_delta
                }
            };
            stream.fill(&mut uniforms);
            let draws = state
                .step(delta, &uniforms)
                .map_err(|e| fail(t, e.to_string()))?;
            fractions.push(draws.iter().filter(|&&z| z).count() as f64 / n as f64);
        }
        Ok(TrialResult {
            fractions,
            history: state.history().cloned(),
        })
    }
}

fn execute(
    p: &Prepared<'_>,
    trials: usize,
    parallel: bool,
) -> Result<Vec<TrialResult>, HarnessError> {
    if parallel {
        // `collect` keeps trial order, so aggregation is schedule independent.
        (0..trials).into_par_iter().map(|s| p.trial(s)).collect()
    } else {
        (0..trials).map(|s| p.trial(s)).collect()
    }
}

fn summarize(name: &str, steps: usize, results: &[TrialResult]) -> SummarySeries {
    let trials = results.len();
    let mut mean = vec![0.0; steps];
    for r in results {
        for (m, f) in mean.iter_mut().zip(&r.fractions) {
            *m += f;
        }
    }
    mean.iter_mut().for_each(|m| *m /= trials as f64);
    let stderr = (0..steps)
        .map(|t| {
            if trials < 2 {
                return 0.0;
            }
            let ss: f64 = results
                .iter()
                .map(|r| (r.fractions[t] - mean[t]).powi(2))
                .sum();
            (ss / (trials - 1) as f64).sqrt() / (trials as f64).sqrt()
        })
        .collect();
    SummarySeries {
        strategy: name.to_string(),
        trials,
        mean,
        stderr,
    }
}

/// Raw per-trial results for one arm. `arm_index` selects independent streams;
/// `None` uses the shared streams.
pub fn run_trials(
    cfg: &ExperimentConfig,
    net: &Network,
    arm: &Arm,
    arm_index: Option<usize>,
    keep_history: bool,
) -> Result<Vec<TrialResult>, HarnessError> {
    cfg.validate()?;
    let p = prepare(cfg, net, arm, arm_index, keep_history)?;
    execute(&p, cfg.trials, cfg.parallel)
}

/// Runs one arm on shared streams and summarizes it.
pub fn run_arm(
    cfg: &ExperimentConfig,
    net: &Network,
    arm: &Arm,
) -> Result<SummarySeries, HarnessError> {
    let results = run_trials(cfg, net, arm, None, false)?;
    Ok(summarize(&arm.name, cfg.steps, &results))
}

/// Runs the arm described by the top-level config keys.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    net: &Network,
) -> Result<SummarySeries, HarnessError> {
    run_arm(cfg, net, &cfg.base_arm())
}

/// Runs every arm and the pairwise differences between them. Arms share random
/// streams unless `independent_arms` is set.
pub fn compare_strategies(
    cfg: &ExperimentConfig,
    net: &Network,
    arms: &[Arm],
) -> Result<Comparison, HarnessError> {
    cfg.validate()?;
    let mut per_arm = Vec::with_capacity(arms.len());
    for (k, arm) in arms.iter().enumerate() {
        let index = cfg.independent_arms.then_some(k);
        per_arm.push(run_trials(cfg, net, arm, index, false)?);
    }
    let series: Vec<SummarySeries> = arms
        .iter()
        .zip(&per_arm)
        .map(|(arm, r)| summarize(&arm.name, cfg.steps, r))
        .collect();
    let mut differences = Vec::new();
    for a in 0..arms.len() {
        for b in a + 1..arms.len() {
            let (sa, sb) = (&series[a], &series[b]);
            let mean: Vec<f64> = sa.mean.iter().zip(&sb.mean).map(|(x, y)| x - y).collect();
            let stderr = sa
                .stderr
                .iter()
                .zip(&sb.stderr)
                .map(|(x, y)| x.hypot(*y))
                .collect();
            let trials = cfg.trials;
            let stderr_paired = (0..cfg.steps)
                .map(|t| {
                    if trials < 2 {
                        return 0.0;
                    }
                    let ss: f64 = per_arm[a]
                        .iter()
                        .zip(&per_arm[b])
                        .map(|(ra, rb)| (ra.fractions[t] - rb.fractions[t] - mean[t]).powi(2))
                        .sum();
                    (ss / (trials - 1) as f64).sqrt() / (trials as f64).sqrt()
                })
                .collect();
            differences.push(Difference {
                a: sa.strategy.clone(),
                b: sb.strategy.clone(),
                mean,
                stderr,
                stderr_paired,
            });
        }
    }
    Ok(Comparison {
        series,
        differences,
    })
}
