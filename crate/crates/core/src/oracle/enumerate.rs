use super::{OracleError, Schedule};
use crate::engine::{DrawHistory, UrnState};
use crate::graph::Network;

/// Largest `N·n` (in bits) the enumerating routines accept by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Probability of the draw vector `draws` given the current super-urn proportions.
fn step_probability(state: &UrnState<'_>, draws: &[bool]) -> f64 {
    draws
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let s = state.super_proportion(i);
            if z {
                s
            } else {
                1.0 - s
            }
        })
        .product()
}

/// Probability of one complete draw history: the product over time and nodes of
/// `S_{i,t-1}` for red draws and `1 - S_{i,t-1}` for black ones.
pub fn joint_probability(
    net: &Network,
    red: &[f64],
    black: &[f64],
    schedule: &Schedule,
    history: &DrawHistory,
) -> Result<f64, OracleError> {
    let n = net.node_count();
    let mut state = UrnState::new(net, red, black)?;
    let mut prob = 1.0;
    for t in 1..=history.steps() {
        let column = history.at_time(t);
        if column.len() != n {
            return Err(OracleError::Dimension(format!(
                "history column {t} has {} entries for {n} nodes",
                column.len()
            )));
        }
        prob *= step_probability(&state, column);
        if prob == 0.0 {
            return Ok(0.0);
        }
        state.apply_draws(schedule.at(t)?, column)?;
    }
    Ok(prob)
}

/// Exhaustive walks over draw histories.
#[derive(Debug, Clone, Copy)]
pub struct Enumerator {
    /// Maximum number of enumerated draw bits, `N·steps`.
    pub cap: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl Enumerator {
    pub fn with_cap(cap: usize) -> Self {
        Self { cap }
    }

    fn check(&self, bits: usize) -> Result<(), OracleError> {
        if bits > self.cap {
            Err(OracleError::CapExceeded {
                bits,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// `P(Z_{i,n} = 1)` for every node: the expectation of `S_{i,n-1}` over all
    /// histories of length `n - 1`.
    pub fn marginal_infection(
        &self,
        net: &Network,
        red: &[f64],
        black: &[f64],
        schedule: &Schedule,
        n: usize,
    ) -> Result<Vec<f64>, OracleError> {
        if n == 0 {
            return Err(OracleError::Dimension("time must be at least 1".into()));
        }
        let nodes = net.node_count();
        self.check(nodes * (n - 1))?;
        let state = UrnState::new(net, red, black)?;
        let mut acc = vec![0.0; nodes];
        walk(&state, schedule, 1, n - 1, 1.0, &mut |leaf, weight| {
            for (i, a) in acc.iter_mut().enumerate() {
                *a += weight * leaf.super_proportion(i);
            }
        })?;
        Ok(acc)
    }

    /// Average infection rate `Ĩ_n`: mean over nodes of the marginal probability
    /// of drawing red at time `n`.
    pub fn average_infection_rate(
        &self,
        net: &Network,
        red: &[f64],
        black: &[f64],
        schedule: &Schedule,
        n: usize,
    ) -> Result<f64, OracleError> {
        let marginals = self.marginal_infection(net, red, black, schedule, n)?;
        Ok(marginals.iter().sum::<f64>() / marginals.len() as f64)
    }

    /// Sums [`joint_probability`] over every `N × steps` history. Should be 1.
    pub fn partition_sanity(
        &self,
        net: &Network,
        red: &[f64],
        black: &[f64],
        schedule: &Schedule,
        steps: usize,
    ) -> Result<f64, OracleError> {
        let nodes = net.node_count();
        let bits = nodes * steps;
        self.check(bits)?;
        let mut total = 0.0;
        for code in 0u64..(1u64 << bits) {
            let columns = (0..steps)
                .map(|t| {
                    (0..nodes)
                        .map(|i| code >> (t * nodes + i) & 1 == 1)
                        .collect()
                })
                .collect();
            total += joint_probability(
                net,
                red,
                black,
                schedule,
                &DrawHistory::from_columns(columns),
            )?;
        }
        Ok(total)
    }
}

/// Depth-first walk over all draw vectors for `remaining` steps, calling `visit`
/// on every leaf state with its path probability. Zero-probability branches are cut.
fn walk<'a, F>(
    state: &UrnState<'a>,
    schedule: &Schedule,
    t: usize,
    remaining: usize,
    weight: f64,
    visit: &mut F,
) -> Result<(), OracleError>
where
    F: FnMut(&UrnState<'a>, f64),
{
    if remaining == 0 {
        visit(state, weight);
        return Ok(());
    }
    let nodes = state.node_count();
    let delta = schedule.at(t)?;
    let mut draws = vec![false; nodes];
    for code in 0u64..(1u64 << nodes) {
        for (i, d) in draws.iter_mut().enumerate() {
            *d = code >> i & 1 == 1;
        }
        let p = step_probability(state, &draws);
        if p == 0.0 {
            continue;
        }
        let mut next = state.clone();
        next.apply_draws(delta, &draws)?;
        walk(&next, schedule, t + 1, remaining - 1, weight * p, visit)?;
    }
    Ok(())
}
