//! Allocation strategies for the black initialization and the per-step curing
//! reinforcement.
//!
//! Both sides share nine families:
//!
//! | tag  | support          | shares                    |
//! |------|------------------|---------------------------|
//! | i    | all nodes        | Frank–Wolfe optimum       |
//! | ii   | all nodes        | uniform                   |
//! | iii  | inner nodes      | uniform                   |
//! | iv   | inner nodes      | weighted                  |
//! | v    | layered targets  | uniform                   |
//! | vi   | layered targets  | weighted                  |
//! | vii  | dense targets    | uniform                   |
//! | viii | dense targets    | weighted                  |
//! | ix   | all nodes        | weighted                  |
//!
//! The weight of node `i` is `|N_i|·C_i` (degree times closeness) for
//! initialization and `|N_i|·C_i·S_{i,n-1}` for curing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::UrnState;
use crate::graph::{
    inner_target_set, target_set_dense, target_set_layered, GraphError, Network, TargetSet,
};
use crate::optimize::{optimize_cure_step, optimize_init, DescentConfig, OptimizeError};
use crate::oracle::ExposureOptions;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("cannot parse strategy `{0}`; expected `init:<i..ix>` or `cure:<i..ix>`")]
    Parse(String),
    #[error("strategy {0} needs descent parameters")]
    MissingParameters(StrategySpec),
    #[error("strategy {got} used where a {expected} strategy is required")]
    SideMismatch { expected: Side, got: StrategySpec },
    #[error("target set for {0} is empty")]
    EmptyTargetSet(StrategySpec),
    #[error("budget must be finite and nonnegative, got {0}")]
    Budget(f64),
    #[error("{what} has length {got}, expected {expected}")]
    Length {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Init,
    Cure,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Init => "init",
            Side::Cure => "cure",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
}

const ROMAN: [&str; 9] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix"];
const FAMILIES: [Family; 9] = [
    Family::I,
    Family::II,
    Family::III,
    Family::IV,
    Family::V,
    Family::VI,
    Family::VII,
    Family::VIII,
    Family::IX,
];

/// Where a family's support comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    All,
    Inner,
    Layered,
    Dense,
}

impl Family {
    pub fn all() -> [Family; 9] {
        FAMILIES
    }

    pub fn roman(self) -> &'static str {
        ROMAN[self as usize]
    }

    pub fn support(self) -> Support {
        match self {
            Family::I | Family::II | Family::IX => Support::All,
            Family::III | Family::IV => Support::Inner,
            Family::V | Family::VI => Support::Layered,
            Family::VII | Family::VIII => Support::Dense,
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, Family::IV | Family::VI | Family::VIII | Family::IX)
    }

    pub fn is_optimizer(self) -> bool {
        self == Family::I
    }
}

impl FromStr for Family {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let lower = s.trim().to_ascii_lowercase();
        ROMAN
            .iter()
            .position(|r| *r == lower)
            .map(|k| FAMILIES[k])
            .ok_or(())
    }
}

/// One row of the strategy tables, e.g. `init:vi` or `cure:iv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategySpec {
    pub side: Side,
    pub family: Family,
    /// Required for family (i).
    pub descent: Option<DescentConfig>,
}

impl StrategySpec {
    /// Family (i) gets the default descent configuration.
    pub fn new(side: Side, family: Family) -> Self {
        Self {
            side,
            family,
            descent: family.is_optimizer().then(DescentConfig::default),
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        match (self.family.is_optimizer(), self.descent) {
            (true, None) => Err(PolicyError::MissingParameters(*self)),
            (true, Some(cfg)) => Ok(cfg.validate()?),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.side, self.family.roman())
    }
}

impl FromStr for StrategySpec {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, PolicyError> {
        let err = || PolicyError::Parse(s.to_string());
        let (side, family) = s.split_once(':').ok_or_else(err)?;
        let side = match side.trim().to_ascii_lowercase().as_str() {
            "init" => Side::Init,
            "cure" => Side::Cure,
            _ => return Err(err()),
        };
        let family = family.parse().map_err(|_| err())?;
        Ok(Self::new(side, family))
    }
}

impl Serialize for StrategySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StrategySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-node masses together with the budget they were drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub masses: Vec<f64>,
    pub budget: f64,
}

impl Allocation {
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn uniform(n: usize, budget: f64) -> Self {
        Self {
            masses: vec![budget / n as f64; n],
            budget,
        }
    }
}

/// A strategy bound to a network, with its target set and structural weights
/// computed once.
#[derive(Debug, Clone)]
pub struct Allocator<'a> {
    net: &'a Network,
    spec: StrategySpec,
    targets: TargetSet,
    /// `|N_i|·C_i`.
    structural: Vec<f64>,
    pub exposure: ExposureOptions,
}

impl<'a> Allocator<'a> {
    pub fn new(net: &'a Network, spec: StrategySpec) -> Result<Self, PolicyError> {
        spec.validate()?;
        let n = net.node_count();
        let targets = match spec.family.support() {
            Support::All => TargetSet::all(n),
            Support::Inner => inner_target_set(net),
            Support::Layered => target_set_layered(net),
            Support::Dense => target_set_dense(net, false)?,
        };
        if targets.is_empty() {
            return Err(PolicyError::EmptyTargetSet(spec));
        }
        let structural = if spec.family.is_weighted() {
            net.closeness_centrality()?
                .iter()
                .enumerate()
                .map(|(i, c)| net.degree(i) as f64 * c)
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            net,
            spec,
            targets,
            structural,
            exposure: ExposureOptions::default(),
        })
    }

    pub fn spec(&self) -> StrategySpec {
        self.spec
    }

    pub fn targets(&self) -> &TargetSet {
        &self.targets
    }

    fn check(&self, side: Side, budget: f64) -> Result<(), PolicyError> {
        if self.spec.side != side {
            return Err(PolicyError::SideMismatch {
                expected: side,
                got: self.spec,
            });
        }
        if !(budget.is_finite() && budget >= 0.0) {
            return Err(PolicyError::Budget(budget));
        }
        Ok(())
    }

    /// Splits `budget` over the target set in proportion to `weight(i)`.
    fn spread(&self, budget: f64, weight: impl Fn(usize) -> f64) -> Allocation {
        let mut masses = vec![0.0; self.net.node_count()];
        let weights: Vec<f64> = if self.spec.family.is_weighted() {
            self.targets.nodes.iter().map(|&i| weight(i)).collect()
        } else {
            vec![1.0; self.targets.len()]
        };
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            for (&i, w) in self.targets.nodes.iter().zip(&weights) {
                masses[i] = w / total * budget;
            }
        } else {
            log::warn!(
                "{}: all weights are zero; spreading uniformly over {} targets",
                self.spec,
                self.targets.len()
            );
            let share = budget / self.targets.len() as f64;
            for &i in &self.targets.nodes {
                masses[i] = share;
            }
        }
        Allocation { masses, budget }
    }

    /// Black initialization `B` given the red initialization.
    pub fn init(&self, red: &[f64], budget: f64) -> Result<Allocation, PolicyError> {
        self.check(Side::Init, budget)?;
        let n = self.net.node_count();
        if red.len() != n {
            return Err(PolicyError::Length {
                what: "red initialization",
                got: red.len(),
                expected: n,
            });
        }
        if let Some(cfg) = self
            .spec
            .descent
            .filter(|_| self.spec.family.is_optimizer())
        {
            let r = optimize_init(self.net, red, budget, &cfg)?;
            return Ok(Allocation {
                masses: r.x,
                budget,
            });
        }
        Ok(self.spread(budget, |i| self.structural[i]))
    }

    /// Curing step `Δ_b(n)` given the state after `n - 1` steps and the
    /// infection step the other side will play (used by family (i) only).
    pub fn cure(
        &self,
        state: &UrnState<'_>,
        budget: f64,
        infection: &[f64],
    ) -> Result<Allocation, PolicyError> {
        self.check(Side::Cure, budget)?;
        if let Some(cfg) = self
            .spec
            .descent
            .filter(|_| self.spec.family.is_optimizer())
        {
            let r = optimize_cure_step(state, budget, infection, &cfg, &self.exposure)?;
            return Ok(Allocation {
                masses: r.x,
                budget,
            });
        }
        Ok(self.spread(budget, |i| self.structural[i] * state.super_proportion(i)))
    }
}

/// One-shot form of [`Allocator::init`].
pub fn allocate_init(
    spec: StrategySpec,
    net: &Network,
    red: &[f64],
    budget: f64,
) -> Result<Allocation, PolicyError> {
    Allocator::new(net, spec)?.init(red, budget)
}

/// One-shot form of [`Allocator::cure`].
pub fn allocate_cure(
    spec: StrategySpec,
    net: &Network,
    state: &UrnState<'_>,
    budget: f64,
    infection: &[f64],
) -> Result<Allocation, PolicyError> {
    Allocator::new(net, spec)?.cure(state, budget, infection)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> StrategySpec {
        s.parse().unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn parse_and_display() {
        for side in ["init", "cure"] {
            for r in ROMAN {
                let text = format!("{side}:{r}");
                assert_eq!(spec(&text).to_string(), text);
            }
        }
        assert_eq!(spec("CURE:IV").to_string(), "cure:iv");
        for bad in ["init", "init:x", "heal:i", ":ii", "init:"] {
            assert!(bad.parse::<StrategySpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn optimizer_needs_parameters() {
        let mut s = spec("init:i");
        assert!(s.validate().is_ok());
        s.descent = None;
        assert!(matches!(
            s.validate(),
            Err(PolicyError::MissingParameters(_))
        ));
    }

    #[test]
    fn uniform_init() {
        let net = Network::cycle(4);
        let a = allocate_init(spec("init:ii"), &net, &[1.0; 4], 8.0).unwrap();
        assert_eq!(a.masses, vec![2.0; 4]);
    }

    #[test]
    fn inner_uniform_on_p5() {
        let net = Network::path(5);
        let a = allocate_init(spec("init:iii"), &net, &[1.0; 5], 6.0).unwrap();
        assert!(close(&a.masses, &[0.0, 2.0, 2.0, 2.0, 0.0]));
    }

    #[test]
    fn layered_weighted_on_p5() {
        let net = Network::path(5);
        let a = allocate_init(spec("init:vi"), &net, &[1.0; 5], 7.0).unwrap();
        assert!(close(&a.masses, &[0.0, 3.5, 0.0, 3.5, 0.0]));
    }

    #[test]
    fn cure_weighted_by_exposure() {
        let net = Network::path(5);
        // S_2 = 0.8, S_4 = 0.2 on the layered targets {2, 4}.
        let red = [4.0, 0.0, 0.0, 1.0, 0.0];
        let black = [0.0, 0.0, 1.0, 0.0, 3.0];
        let state = UrnState::new(&net, &red, &black).unwrap();
        assert!((state.super_proportion(1) - 0.8).abs() < 1e-15);
        assert!((state.super_proportion(3) - 0.2).abs() < 1e-15);
        let a = allocate_cure(spec("cure:vi"), &net, &state, 10.0, &[0.0; 5]).unwrap();
        assert!(
            close(&a.masses, &[0.0, 8.0, 0.0, 2.0, 0.0]),
            "{:?}",
            a.masses
        );
    }

    #[test]
    fn cure_uniform() {
        let net = Network::path(5);
        let state = UrnState::new(&net, &[1.0; 5], &[1.0; 5]).unwrap();
        let a = allocate_cure(spec("cure:ii"), &net, &state, 10.0, &[0.0; 5]).unwrap();
        assert_eq!(a.masses, vec![2.0; 5]);
    }

    #[test]
    fn zero_exposure_falls_back_to_uniform() {
        let net = Network::path(5);
        let state = UrnState::new(&net, &[0.0; 5], &[1.0; 5]).unwrap();
        let a = allocate_cure(spec("cure:vi"), &net, &state, 10.0, &[0.0; 5]).unwrap();
        assert!(close(&a.masses, &[0.0, 5.0, 0.0, 5.0, 0.0]));
    }

    #[test]
    fn side_is_checked() {
        let net = Network::path(3);
        let err = allocate_init(spec("cure:ii"), &net, &[1.0; 3], 1.0).unwrap_err();
        assert!(matches!(err, PolicyError::SideMismatch { .. }));
        assert!(allocate_init(spec("init:ii"), &net, &[1.0; 3], -1.0).is_err());
    }

    #[test]
    fn optimizer_family_delegates() {
        let net = Network::star(3);
        let a = allocate_init(spec("init:i"), &net, &[1.0; 4], 5.0).unwrap();
        assert!(a.masses[0] > 5.0 * 0.999);
        assert!((a.total() - 5.0).abs() < 1e-12);
    }
}
