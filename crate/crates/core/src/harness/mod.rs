//! Seeded Monte Carlo experiments: initialize, then run the contagion for a
//! number of steps and average the infected fraction over trials.

mod config;
mod emit;
mod rng;
mod run;

pub use config::{Arm, ArmConfig, ExperimentConfig};
pub use emit::{emit, read_csv, read_json, write_csv, write_json, SeriesRow};
pub use rng::{stream_id, uniform_at, unit_f64, UniformStream};
pub use run::{
    compare_strategies, run_arm, run_experiment, run_trials, Comparison, Difference, SummarySeries,
    TrialResult,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EngineError;
use crate::graph::GraphError;
use crate::policy::PolicyError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("initialization for arm `{arm}`: {source}")]
    Init { arm: String, source: PolicyError },
    #[error("initial state for arm `{arm}`: {source}")]
    State { arm: String, source: EngineError },
    #[error("trial {trial}, step {step}: {message}")]
    Trial {
        trial: usize,
        step: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown output format `{other}` (csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}
