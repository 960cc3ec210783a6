//! Exact probability computations for small instances.
//!
//! Everything here is deterministic. Enumeration over draw histories grows as
//! `2^(N·n)`, so those routines refuse instances past a configurable cap.

mod enumerate;
mod exposure;
mod time1;

pub use enumerate::{joint_probability, Enumerator, DEFAULT_ENUMERATION_CAP};
pub use exposure::{expected_exposure, ExposureOptions, ExposureValue};
pub use time1::{infection_rate_time1, infection_rate_time1_red_gradient, InfectionRateTime1};

use thiserror::Error;

use crate::engine::{EngineError, Reinforcement};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(
        "enumeration over 2^{bits} histories exceeds the cap of 2^{cap}; use Monte Carlo instead"
    )]
    CapExceeded { bits: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("super urn of node {0} holds no red mass")]
    NoRedMass(usize),
    #[error("exposure denominator vanishes at node {0}")]
    Degenerate(usize),
}

/// Reinforcement amounts fixed in advance for every step.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(Reinforcement),
    PerStep(Vec<Reinforcement>),
}

impl Schedule {
    pub fn constant(n: usize, red: f64, black: f64) -> Self {
        Self::Constant(Reinforcement::uniform(n, red, black))
    }

    /// Reinforcement applied after the draws of time `t` (1-based).
    pub fn at(&self, t: usize) -> Result<&Reinforcement, OracleError> {
        match self {
            Schedule::Constant(r) => Ok(r),
            Schedule::PerStep(steps) => steps.get(t.wrapping_sub(1)).ok_or_else(|| {
                OracleError::Dimension(format!(
                    "schedule has {} steps, time {t} requested",
                    steps.len()
                ))
            }),
        }
    }

    /// The colour-swapped schedule.
    pub fn swapped(&self) -> Self {
        match self {
            Schedule::Constant(r) => Schedule::Constant(r.swapped()),
            Schedule::PerStep(s) => {
                Schedule::PerStep(s.iter().map(Reinforcement::swapped).collect())
            }
        }
    }
}
