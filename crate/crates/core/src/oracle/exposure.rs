//! Expected network exposure `E[S̃_n | F_{n-1}]` as a function of the curing
//! step `x = Δ_b(n)` and the infection step `y = Δ_r(n)`.
//!
//! For node `i` with accumulated super-urn masses `c_i` (red) and `d_i` (black),
//!
//! ```text
//! f_i(x, y, z) = (c_i + Σ_{j∈N'(i)} y_j z_j) / (c_i + d_i + Σ_{j∈N'(i)} y_j z_j + Σ_{j∈N'(i)} x_j (1 - z_j))
//! ```
//!
//! and the next-step draws `z_j` are independent Bernoulli(`S_{j,n-1}`) given
//! the history, so each node's expectation only needs its own neighborhood.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OracleError;
use crate::engine::{EngineError, UrnState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExposureOptions {
    /// Closed neighborhoods larger than this are sampled instead of enumerated.
    pub degree_cap: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for ExposureOptions {
    fn default() -> Self {
        Self {
            degree_cap: 20,
            mc_samples: 100_000,
            seed: 0x5eed_e4b0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExposureValue {
    pub value: f64,
    /// Gradient in the curing step `x`; every entry is `<= 0`.
    pub grad_curing: Vec<f64>,
    /// Gradient in the infection step `y`; every entry is `>= 0`.
    pub grad_infection: Vec<f64>,
}

fn check_step(what: &'static str, v: &[f64], n: usize) -> Result<(), OracleError> {
    if v.len() != n {
        return Err(EngineError::LengthMismatch {
            what,
            got: v.len(),
            expected: n,
        }
        .into());
    }
    if let Some(node) = v.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(EngineError::InvalidMass {
            what,
            node: node + 1,
            value: v[node],
        }
        .into());
    }
    Ok(())
}

struct NodeTerm<'s> {
    node: usize,
    nbhd: &'s [usize],
    c: f64,
    d: f64,
}

impl NodeTerm<'_> {
    /// Adds `weight * f` and `weight * ∇f` for the draw pattern `red(k)` over the
    /// neighborhood (k indexes `nbhd`).
    #[inline]
    fn accumulate(
        &self,
        x: &[f64],
        y: &[f64],
        red: impl Fn(usize) -> bool,
        weight: f64,
        acc: &mut (f64, Vec<f64>, Vec<f64>),
    ) -> Result<(), OracleError> {
        let mut gained_red = 0.0;
        let mut gained_black = 0.0;
        for (k, &j) in self.nbhd.iter().enumerate() {
            if red(k) {
                gained_red += y[j];
            } else {
                gained_black += x[j];
            }
        }
        let num = self.c + gained_red;
        let den = num + self.d + gained_black;
        if den <= 0.0 {
            return Err(OracleError::Degenerate(self.node + 1));
        }
        let den2 = den * den;
        acc.0 += weight * num / den;
        let dx = -weight * num / den2;
        let dy = weight * (self.d + gained_black) / den2;
        for (k, &j) in self.nbhd.iter().enumerate() {
            if red(k) {
                acc.2[j] += dy;
            } else {
                acc.1[j] += dx;
            }
        }
        Ok(())
    }
}

/// Evaluates `E[S̃_n | F_{n-1}]` and both gradients at the state's current time.
pub fn expected_exposure(
    state: &UrnState<'_>,
    x: &[f64],
    y: &[f64],
    opts: &ExposureOptions,
) -> Result<ExposureValue, OracleError> {
    let net = state.network();
    let n = net.node_count();
    check_step("curing step", x, n)?;
    check_step("infection step", y, n)?;
    let probs = state.super_proportions();
    let mut acc = (0.0, vec![0.0; n], vec![0.0; n]);

    for i in 0..n {
        let term = NodeTerm {
            node: i,
            nbhd: net.closed_neighborhood(i),
            c: state.super_red(i),
            d: state.super_black(i),
        };
        let k = term.nbhd.len();
        if k <= opts.degree_cap {
            for mask in 0u64..(1u64 << k) {
                let weight: f64 = term
                    .nbhd
                    .iter()
                    .enumerate()
                    .map(|(b, &j)| {
                        if mask >> b & 1 == 1 {
                            probs[j]
                        } else {
                            1.0 - probs[j]
                        }
                    })
                    .product();
                if weight == 0.0 {
                    continue;
                }
                term.accumulate(x, y, |b| mask >> b & 1 == 1, weight, &mut acc)?;
            }
        } else {
            // Fixed per-node seed: repeated evaluations share samples, so the
            // estimate stays a smooth function of (x, y).
            let mut rng = ChaCha8Rng::seed_from_u64(
                opts.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            );
            let weight = 1.0 / opts.mc_samples as f64;
            let mut pattern = vec![false; k];
            for _ in 0..opts.mc_samples {
                for (slot, &j) in pattern.iter_mut().zip(term.nbhd) {
                    *slot = rng.gen::<f64>() < probs[j];
                }
                term.accumulate(x, y, |b| pattern[b], weight, &mut acc)?;
            }
        }
    }

    let scale = 1.0 / n as f64;
    let (value, mut gx, mut gy) = acc;
    gx.iter_mut().chain(gy.iter_mut()).for_each(|g| *g *= scale);
    Ok(ExposureValue {
        value: value * scale,
        grad_curing: gx,
        grad_infection: gy,
    })
}
