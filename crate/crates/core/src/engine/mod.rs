//! The infinite-memory Polya network contagion process.
//!
//! Each node owns an urn of red (infection) and black (healthiness) mass.
//! A node draws from its super urn, the union of the urns in its closed
//! neighborhood, and the drawn colour is reinforced in the node's own urn.

mod trace;

pub use trace::{SummaryRow, TraceRecorder, TraceRow};

use thiserror::Error;

use crate::graph::Network;

/// Steps between full recomputations of the super-urn sums.
const REBUILD_INTERVAL: usize = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("{what} at node {node} is {value}; masses must be finite and nonnegative")]
    InvalidMass {
        what: &'static str,
        node: usize,
        value: f64,
    },
    #[error("super urn of node {0} is empty")]
    EmptySuperUrn(usize),
}

/// Per-node reinforcement for one time step: `Δ_r,i(n)` and `Δ_b,i(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reinforcement {
    pub red: Vec<f64>,
    pub black: Vec<f64>,
}

impl Reinforcement {
    pub fn new(red: Vec<f64>, black: Vec<f64>) -> Self {
        Self { red, black }
    }

    pub fn uniform(n: usize, red: f64, black: f64) -> Self {
        Self {
            red: vec![red; n],
            black: vec![black; n],
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), EngineError> {
        check_masses("red reinforcement", &self.red, n)?;
        check_masses("black reinforcement", &self.black, n)
    }

    /// Exchanges the red and black sides.
    pub fn swapped(&self) -> Self {
        Self {
            red: self.black.clone(),
            black: self.red.clone(),
        }
    }
}

fn check_masses(what: &'static str, values: &[f64], n: usize) -> Result<(), EngineError> {
    if values.len() != n {
        return Err(EngineError::LengthMismatch {
            what,
            got: values.len(),
            expected: n,
        });
    }
    match values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(node) => Err(EngineError::InvalidMass {
            what,
            node: node + 1,
            value: values[node],
        }),
        None => Ok(()),
    }
}

/// How a uniform `Y` is compared with the red proportion `S`.
///
/// `Closed` infects when `Y <= S`. `Open` infects when `Y < S`; running the
/// colour-swapped process under `Open` with uniforms `1 - Y` reproduces the
/// complement of the `Closed` draws exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DrawRule {
    #[default]
    Closed,
    Open,
}

impl DrawRule {
    #[inline]
    pub fn draws_red(self, y: f64, s: f64) -> bool {
        match self {
            DrawRule::Closed => y <= s,
            DrawRule::Open => y < s,
        }
    }
}

/// Realized draws, one column per elapsed step; `true` means infected.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DrawHistory {
    columns: Vec<Vec<bool>>,
}

impl DrawHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a history from per-time columns (`columns[t-1][i]` = `Z_{i,t}`).
    pub fn from_columns(columns: Vec<Vec<bool>>) -> Self {
        Self { columns }
    }

    pub fn push(&mut self, column: Vec<bool>) {
        self.columns.push(column);
    }

    pub fn steps(&self) -> usize {
        self.columns.len()
    }

    /// Draws at time `t` (1-based).
    pub fn at_time(&self, t: usize) -> &[bool] {
        &self.columns[t - 1]
    }

    pub fn get(&self, node: usize, t: usize) -> bool {
        self.columns[t - 1][node]
    }

    pub fn columns(&self) -> &[Vec<bool>] {
        &self.columns
    }
}

/// Snapshot of the running infection metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// Network susceptibility: mean individual-urn red proportion.
    pub susceptibility: f64,
    /// Network exposure: mean super-urn red proportion.
    pub exposure: f64,
    pub urn_proportions: Vec<f64>,
    pub super_proportions: Vec<f64>,
}

/// State of one trial of the process.
#[derive(Debug, Clone)]
pub struct UrnState<'a> {
    net: &'a Network,
    initial_red: Vec<f64>,
    initial_black: Vec<f64>,
    red: Vec<f64>,
    black: Vec<f64>,
    super_red: Vec<f64>,
    super_black: Vec<f64>,
    time: usize,
    rule: DrawRule,
    history: Option<DrawHistory>,
    since_rebuild: usize,
}

impl<'a> UrnState<'a> {
    /// State at time 0 from initial red `R` and black `B` masses.
    pub fn new(net: &'a Network, red: &[f64], black: &[f64]) -> Result<Self, EngineError> {
        let n = net.node_count();
        check_masses("initial red", red, n)?;
        check_masses("initial black", black, n)?;
        let mut state = Self {
            net,
            initial_red: red.to_vec(),
            initial_black: black.to_vec(),
            red: red.to_vec(),
            black: black.to_vec(),
            super_red: vec![0.0; n],
            super_black: vec![0.0; n],
            time: 0,
            rule: DrawRule::Closed,
            history: None,
            since_rebuild: 0,
        };
        state.rebuild_super_urns();
        if let Some(i) = (0..n).find(|&i| state.super_red[i] + state.super_black[i] <= 0.0) {
            return Err(EngineError::EmptySuperUrn(i + 1));
        }
        Ok(state)
    }

    pub fn with_rule(mut self, rule: DrawRule) -> Self {
        self.rule = rule;
        self
    }

    /// Keep every draw column so the full history can be inspected.
    pub fn with_history(mut self) -> Self {
        self.history = Some(DrawHistory::new());
        self
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    pub fn node_count(&self) -> usize {
        self.net.node_count()
    }

    /// Number of completed steps `n`.
    pub fn time(&self) -> usize {
        self.time
    }

    pub fn history(&self) -> Option<&DrawHistory> {
        self.history.as_ref()
    }

    pub fn initial_red(&self) -> &[f64] {
        &self.initial_red
    }

    pub fn initial_black(&self) -> &[f64] {
        &self.initial_black
    }

    /// Red mass in node `i`'s own urn, initial plus reinforcements.
    pub fn red_mass(&self, i: usize) -> f64 {
        self.red[i]
    }

    pub fn black_mass(&self, i: usize) -> f64 {
        self.black[i]
    }

    /// Total mass `X_{i,n}` in node `i`'s urn.
    pub fn total_mass(&self, i: usize) -> f64 {
        self.red[i] + self.black[i]
    }

    /// Red mass in the super urn of `i` (the `c_i` of the exposure objective).
    pub fn super_red(&self, i: usize) -> f64 {
        self.super_red[i]
    }

    /// Black mass in the super urn of `i` (the `d_i` of the exposure objective).
    pub fn super_black(&self, i: usize) -> f64 {
        self.super_black[i]
    }

    /// `S_{i,n}`: red proportion of the super urn, which is also the probability
    /// that node `i` draws red at the next step.
    pub fn super_proportion(&self, i: usize) -> f64 {
        self.super_red[i] / (self.super_red[i] + self.super_black[i])
    }

    /// `U_{i,n}`: red proportion of the node's own urn. An urn that has never
    /// held any mass reports its super-urn proportion instead.
    pub fn urn_proportion(&self, i: usize) -> f64 {
        let total = self.total_mass(i);
        if total > 0.0 {
            self.red[i] / total
        } else {
            self.super_proportion(i)
        }
    }

    pub fn super_proportions(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|i| self.super_proportion(i))
            .collect()
    }

    pub fn metrics(&self) -> Metrics {
        let n = self.node_count() as f64;
        let urn: Vec<f64> = (0..self.node_count())
            .map(|i| self.urn_proportion(i))
            .collect();
        let sup = self.super_proportions();
        Metrics {
            susceptibility: urn.iter().sum::<f64>() / n,
            exposure: sup.iter().sum::<f64>() / n,
            urn_proportions: urn,
            super_proportions: sup,
        }
    }

    /// Advances one step. Node `i` draws red when `uniforms[i]` passes the draw
    /// rule against `S_{i,n-1}`; the drawn colour's reinforcement is then added
    /// to the node's urn and propagated to every super urn containing it.
    pub fn step(
        &mut self,
        delta: &Reinforcement,
        uniforms: &[f64],
    ) -> Result<Vec<bool>, EngineError> {
        let n = self.node_count();
        delta.validate(n)?;
        if uniforms.len() != n {
            return Err(EngineError::LengthMismatch {
                what: "uniforms",
                got: uniforms.len(),
                expected: n,
            });
        }
        let draws: Vec<bool> = (0..n)
            .map(|i| self.rule.draws_red(uniforms[i], self.super_proportion(i)))
            .collect();
        self.apply_draws(delta, &draws)?;
        Ok(draws)
    }

    /// Applies a given draw vector, bypassing sampling. Used to replay histories.
    pub fn apply_draws(
        &mut self,
        delta: &Reinforcement,
        draws: &[bool],
    ) -> Result<(), EngineError> {
        let n = self.node_count();
        delta.validate(n)?;
        if draws.len() != n {
            return Err(EngineError::LengthMismatch {
                what: "draws",
                got: draws.len(),
                expected: n,
            });
        }
        for (j, &red) in draws.iter().enumerate() {
            let (own, amount) = if red {
                (&mut self.red, delta.red[j])
            } else {
                (&mut self.black, delta.black[j])
            };
            if amount == 0.0 {
                continue;
            }
            own[j] += amount;
            // i ∈ N'(j) ⇔ j ∈ N'(i), so j's addition lands in the super urns of N'(j).
            let target = if red {
                &mut self.super_red
            } else {
                &mut self.super_black
            };
            for &i in self.net.closed_neighborhood(j) {
                target[i] += amount;
            }
        }
        self.time += 1;
        self.since_rebuild += 1;
        if self.since_rebuild >= REBUILD_INTERVAL {
            self.rebuild_super_urns();
        }
        if let Some(h) = self.history.as_mut() {
            h.push(draws.to_vec());
        }
        Ok(())
    }

    fn rebuild_super_urns(&mut self) {
        for i in 0..self.node_count() {
            let nbhd = self.net.closed_neighborhood(i);
            self.super_red[i] = nbhd.iter().map(|&j| self.red[j]).sum();
            self.super_black[i] = nbhd.iter().map(|&j| self.black[j]).sum();
        }
        self.since_rebuild = 0;
    }
}
