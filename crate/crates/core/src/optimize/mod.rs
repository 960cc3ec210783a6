//! Frank–Wolfe descent on the budget simplex and the curing/infection game.

mod game;
mod objectives;

pub use game::{nash_solve, GameConfig, GameSolution};
pub use objectives::{
    optimize_cure_step, optimize_init, CureObjective, InfectionObjective, InitObjective,
};

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::OracleError;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid descent configuration: {0}")]
    Config(String),
    #[error("budget must be finite and nonnegative, got {0}")]
    Budget(f64),
    #[error("objective returned a non-finite value at iteration {0}")]
    NonFinite(usize),
}

/// Which coordinate wins when several share the smallest partial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
    HighestIndex,
}

/// Search direction used by [`frank_wolfe_simplex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Move toward the steepest vertex: `x + α(x̄ - x)`.
    #[default]
    Classic,
    /// Shift mass from the active coordinate with the largest partial
    /// derivative to the one with the smallest. Converges linearly on the
    /// simplex where the classic step zig-zags near faces.
    Pairwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescentConfig {
    /// Iteration cap.
    pub stoptime: usize,
    /// Width of the final golden-section bracket on the step size.
    pub line_tolerance: f64,
    /// Stop once the Frank–Wolfe gap drops to this value.
    pub gap_tolerance: f64,
    /// Stop once an iteration decreases the objective by less than this.
    pub min_decrease: f64,
    pub tie_break: TieBreak,
    pub variant: Variant,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            stoptime: 5000,
            line_tolerance: 1e-8,
            gap_tolerance: 1e-9,
            min_decrease: 0.0,
            tie_break: TieBreak::LowestIndex,
            variant: Variant::Classic,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        if self.stoptime == 0 {
            return Err(OptimizeError::Config("stoptime must be positive".into()));
        }
        if !(self.line_tolerance > 0.0 && self.gap_tolerance > 0.0) {
            return Err(OptimizeError::Config("tolerances must be positive".into()));
        }
        if !(self.min_decrease >= 0.0) {
            return Err(OptimizeError::Config(
                "min_decrease must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// A differentiable function on allocations, minimised by [`frank_wolfe_simplex`].
pub trait Objective {
    fn dim(&self) -> usize;

    /// Value and gradient at `x`.
    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>), OptimizeError>;

    /// Value only; used by the line search.
    fn value(&self, x: &[f64]) -> Result<f64, OptimizeError> {
        Ok(self.evaluate(x)?.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub objective: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentResult {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Frank–Wolfe gap `∇f(x)·(x - x̄)` at the returned iterate; bounds `f(x) - f*`
    /// from above for convex `f`.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

impl DescentResult {
    /// Columns `iteration,objective,gap`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.trace {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn steepest(grad: &[f64], tie: TieBreak) -> usize {
    let mut best = 0;
    for (j, &g) in grad.iter().enumerate().skip(1) {
        let better = match tie {
            TieBreak::LowestIndex => g < grad[best],
            TieBreak::HighestIndex => g <= grad[best],
        };
        if better {
            best = j;
        }
    }
    best
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimiser of `phi` on `[0, 1]`, with the
/// endpoints checked as well. Returns `(alpha, phi(alpha))`.
fn line_search<F>(mut phi: F, phi0: f64, tol: f64) -> Result<(f64, f64), OptimizeError>
where
    F: FnMut(f64) -> Result<f64, OptimizeError>,
{
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = phi(c)?;
    let mut fd = phi(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = phi(d)?;
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    let f1 = phi(1.0)?;
    if f1 <= best.1 {
        best = (1.0, f1);
    }
    if phi0 <= best.1 {
        best = (0.0, phi0);
    }
    Ok(best)
}

/// Minimises `f` over `{x >= 0, Σx = budget}` starting from the vertex
/// `(budget, 0, ..., 0)`.
///
/// Each iteration moves toward the vertex carrying the whole budget on the
/// coordinate with the smallest partial derivative, with the step size chosen
/// by golden-section search. A step that would not lower `f` is never taken.
pub fn frank_wolfe_simplex<O: Objective + ?Sized>(
    f: &O,
    budget: f64,
    cfg: &DescentConfig,
) -> Result<DescentResult, OptimizeError> {
    cfg.validate()?;
    if !(budget.is_finite() && budget >= 0.0) {
        return Err(OptimizeError::Budget(budget));
    }
    let n = f.dim();
    let mut x = vec![0.0; n];
    if n == 0 {
        return Ok(DescentResult {
            x,
            objective: 0.0,
            gap: 0.0,
            iterations: 0,
            converged: true,
            trace: Vec::new(),
        });
    }
    if budget == 0.0 {
        let objective = f.value(&x)?;
        return Ok(DescentResult {
            x,
            objective,
            gap: 0.0,
            iterations: 0,
            converged: true,
            trace: vec![TracePoint {
                iteration: 0,
                objective,
                gap: 0.0,
            }],
        });
    }
    x[0] = budget;
    let mut trace = Vec::new();
    let mut trial = vec![0.0; n];
    let mut k = 0;
    loop {
        let (value, grad) = f.evaluate(&x)?;
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(OptimizeError::NonFinite(k));
        }
        let i = steepest(&grad, cfg.tie_break);
        let gap =
            (grad.iter().zip(&x).map(|(g, v)| g * v).sum::<f64>() - budget * grad[i]).max(0.0);
        trace.push(TracePoint {
            iteration: k,
            objective: value,
            gap,
        });
        if gap <= cfg.gap_tolerance || k == cfg.stoptime {
            return Ok(DescentResult {
                x,
                objective: value,
                gap,
                iterations: k,
                converged: gap <= cfg.gap_tolerance,
                trace,
            });
        }
        // Pairwise steps move mass from the active coordinate `a` with the
        // largest partial derivative; the classic step drains every coordinate.
        let away = match cfg.variant {
            Variant::Classic => None,
            Variant::Pairwise => (0..n)
                .filter(|&j| x[j] > 0.0 && j != i)
                .max_by(|&a, &b| grad[a].total_cmp(&grad[b]).then(b.cmp(&a))),
        };
        let apply = |alpha: f64, out: &mut [f64], x: &[f64]| match away {
            None => {
                for (j, t) in out.iter_mut().enumerate() {
                    let vertex = if j == i { budget } else { 0.0 };
                    *t = x[j] + alpha * (vertex - x[j]);
                }
            }
            Some(a) => {
                out.copy_from_slice(x);
                let moved = alpha * x[a];
                out[i] += moved;
                out[a] = if alpha == 1.0 { 0.0 } else { x[a] - moved };
            }
        };
        if cfg.variant == Variant::Pairwise && away.is_none() {
            // x already sits on vertex i.
            return Ok(DescentResult {
                x,
                objective: value,
                gap,
                iterations: k,
                converged: gap <= cfg.gap_tolerance,
                trace,
            });
        }
        let (alpha, new_value) = line_search(
            |alpha| {
                apply(alpha, &mut trial, &x);
                f.value(&trial)
            },
            value,
            cfg.line_tolerance,
        )?;
        let stalled = alpha == 0.0 || value - new_value <= cfg.min_decrease;
        if alpha > 0.0 && new_value < value {
            apply(alpha, &mut trial, &x);
            x.copy_from_slice(&trial);
            // Keep Σx on the budget despite accumulated rounding.
            let s: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v *= budget / s);
        }
        k += 1;
        if stalled {
            let (objective, grad) = f.evaluate(&x)?;
            let i = steepest(&grad, cfg.tie_break);
            let gap =
                (grad.iter().zip(&x).map(|(g, v)| g * v).sum::<f64>() - budget * grad[i]).max(0.0);
            trace.push(TracePoint {
                iteration: k,
                objective,
                gap,
            });
            return Ok(DescentResult {
                x,
                objective,
                gap,
                iterations: k,
                converged: gap <= cfg.gap_tolerance,
                trace,
            });
        }
    }
}
