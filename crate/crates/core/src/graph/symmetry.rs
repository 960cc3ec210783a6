//! Automorphism checks and orbit partitions under a single permutation.

use super::{GraphError, Network};

/// Bijection on `0..n`, stored as the image of each node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, GraphError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            if img >= n || std::mem::replace(&mut seen[img], true) {
                return Err(GraphError::InvalidPermutation(format!(
                    "{img} is out of range or repeated"
                )));
            }
        }
        Ok(Self(images))
    }

    /// From 1-indexed images such as `(2, 3, 4, 1)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self, GraphError> {
        if images.contains(&0) {
            return Err(GraphError::InvalidPermutation("ids are 1-indexed".into()));
        }
        Self::new(images.iter().map(|v| v - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// Cycles of the permutation, each starting at its smallest node.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(v);
                v = self.0[v];
            }
            cycles.push(cycle);
        }
        cycles
    }
}

/// Orbits of the cyclic group generated by an automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbits: Vec<Vec<usize>>,
    /// Smallest `k > 0` with `σ^k(i) = i`, per node.
    pub periods: Vec<usize>,
    /// Order of the generated subgroup (lcm of cycle lengths); `None` on overflow.
    pub order: Option<u128>,
}

impl OrbitPartition {
    /// Replaces each value by the mean over its orbit. Equal to averaging
    /// `values[σ^j(i)]` for `j = 1..=order` since each period divides the order.
    pub fn average(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; values.len()];
        for orbit in &self.orbits {
            let mean = orbit.iter().map(|&v| values[v]).sum::<f64>() / orbit.len() as f64;
            for &v in orbit {
                out[v] = mean;
            }
        }
        out
    }

    /// True when `values` is constant on every orbit.
    pub fn is_invariant(&self, values: &[f64]) -> bool {
        self.orbits
            .iter()
            .all(|o| o.iter().all(|&v| values[v] == values[o[0]]))
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Checks that `sigma` maps edges to edges. Since `sigma` is a bijection and the
/// edge count is preserved, one direction suffices. Returns the orbit partition
/// when it is an automorphism.
pub fn verify_automorphism(net: &Network, sigma: &Permutation) -> Option<OrbitPartition> {
    if sigma.len() != net.node_count() {
        return None;
    }
    if !net
        .edges()
        .all(|(u, v)| net.has_edge(sigma.apply(u), sigma.apply(v)))
    {
        return None;
    }
    let orbits = sigma.cycles();
    let mut periods = vec![0; net.node_count()];
    let mut order = Some(1u128);
    for orbit in &orbits {
        for &v in orbit {
            periods[v] = orbit.len();
        }
        let len = orbit.len() as u128;
        order = order.and_then(|m| (m / gcd(m, len)).checked_mul(len));
    }
    Some(OrbitPartition {
        orbits,
        periods,
        order,
    })
}
