use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{HarnessError, OutputFormat};
use crate::graph::{barabasi_albert, load_network, LoadOptions, Network};
use crate::policy::{Side, StrategySpec};

/// Experiment description, read from TOML.
///
/// ```toml
/// ba_nodes = 100
/// ba_m = 1
/// ba_seed = 7
/// seed = 1
/// trials = 1000
/// steps = 50
/// init_budget = 1000.0
/// red_budget = 1000.0
/// delta_red = 5.0
/// delta_black = 5.0
///
/// [arm.uniform]
/// init_strategy = "init:ii"
///
/// [arm.inner]
/// init_strategy = "init:iii"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Adjacency-matrix or edge-list file. Relative paths resolve against the
    /// config file's directory.
    pub network: Option<PathBuf>,
    pub largest_component: bool,
    /// Preferential-attachment network, used when `network` is unset.
    pub ba_nodes: Option<usize>,
    pub ba_m: Option<usize>,
    pub ba_seed: u64,

    pub seed: u64,
    pub trials: usize,
    pub steps: usize,

    pub init_strategy: StrategySpec,
    /// Black initialization budget.
    pub init_budget: f64,
    /// Red initialization budget, spread uniformly.
    pub red_budget: f64,
    /// Explicit initial masses; these override the strategy and budgets.
    pub init_red: Option<Vec<f64>>,
    pub init_black: Option<Vec<f64>>,

    /// Per-step curing strategy. Without one, `delta_red`/`delta_black` are
    /// added at every node.
    pub cure_strategy: Option<StrategySpec>,
    pub cure_budget: f64,
    /// Per-step infection budget, spread uniformly.
    pub infection_budget: f64,
    pub delta_red: f64,
    pub delta_black: f64,

    /// Give each arm its own random streams instead of sharing them.
    pub independent_arms: bool,
    pub parallel: bool,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,

    #[serde(rename = "arm", skip_serializing_if = "BTreeMap::is_empty")]
    pub arms: BTreeMap<String, ArmConfig>,
}

/// Per-arm overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArmConfig {
    pub init_strategy: Option<StrategySpec>,
    pub init_budget: Option<f64>,
    pub cure_strategy: Option<StrategySpec>,
    pub cure_budget: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            network: None,
            largest_component: false,
            ba_nodes: None,
            ba_m: None,
            ba_seed: 0,
            seed: 0,
            trials: 1000,
            steps: 50,
            init_strategy: "init:ii".parse().expect("valid tag"),
            init_budget: 0.0,
            red_budget: 0.0,
            init_red: None,
            init_black: None,
            cure_strategy: None,
            cure_budget: 0.0,
            infection_budget: 0.0,
            delta_red: 0.0,
            delta_black: 0.0,
            independent_arms: false,
            parallel: true,
            out: None,
            format: OutputFormat::Csv,
            arms: BTreeMap::new(),
        }
    }
}

/// A fully resolved comparison arm.
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub name: String,
    pub init_strategy: StrategySpec,
    pub init_budget: f64,
    pub cure_strategy: Option<StrategySpec>,
    pub cure_budget: f64,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Reads a config file, resolving a relative `network` path against the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(net), Some(dir)) = (cfg.network.as_mut(), path.parent()) {
            if net.is_relative() {
                *net = dir.join(&*net);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.steps == 0 {
            return bad("steps must be at least 1");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        let budgets = [
            ("init_budget", self.init_budget),
            ("red_budget", self.red_budget),
            ("cure_budget", self.cure_budget),
            ("infection_budget", self.infection_budget),
            ("delta_red", self.delta_red),
            ("delta_black", self.delta_black),
        ];
        for (name, v) in budgets {
            if !(v.is_finite() && v >= 0.0) {
                return bad(&format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        for arm in self.resolved_arms() {
            if arm.init_strategy.side != Side::Init {
                return bad(&format!(
                    "arm `{}`: init_strategy must be init:<tag>",
                    arm.name
                ));
            }
            if arm.cure_strategy.is_some_and(|s| s.side != Side::Cure) {
                return bad(&format!(
                    "arm `{}`: cure_strategy must be cure:<tag>",
                    arm.name
                ));
            }
            if !(arm.init_budget.is_finite() && arm.init_budget >= 0.0)
                || !(arm.cure_budget.is_finite() && arm.cure_budget >= 0.0)
            {
                return bad(&format!("arm `{}`: budgets must be nonnegative", arm.name));
            }
        }
        Ok(())
    }

    pub fn load_network(&self) -> Result<Network, HarnessError> {
        if let Some(path) = &self.network {
            let opts = LoadOptions {
                largest_component: self.largest_component,
                ..Default::default()
            };
            return Ok(load_network(path, &opts)?);
        }
        match (self.ba_nodes, self.ba_m) {
            (Some(n), Some(m)) => Ok(barabasi_albert(n, m, self.ba_seed)?),
            _ => Err(HarnessError::Config(
                "set `network`, or both `ba_nodes` and `ba_m`".into(),
            )),
        }
    }

    /// The arm described by the top-level keys alone.
    pub fn base_arm(&self) -> Arm {
        Arm {
            name: self.cure_strategy.unwrap_or(self.init_strategy).to_string(),
            init_strategy: self.init_strategy,
            init_budget: self.init_budget,
            cure_strategy: self.cure_strategy,
            cure_budget: self.cure_budget,
        }
    }

    /// `[arm.*]` sections in name order, or the base arm when there are none.
    pub fn resolved_arms(&self) -> Vec<Arm> {
        if self.arms.is_empty() {
            return vec![self.base_arm()];
        }
        self.arms
            .iter()
            .map(|(name, a)| Arm {
                name: name.clone(),
                init_strategy: a.init_strategy.unwrap_or(self.init_strategy),
                init_budget: a.init_budget.unwrap_or(self.init_budget),
                cure_strategy: a.cure_strategy.or(self.cure_strategy),
                cure_budget: a.cure_budget.unwrap_or(self.cure_budget),
            })
            .collect()
    }
}
