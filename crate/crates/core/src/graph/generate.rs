use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphError, Network};

/// Barabási–Albert preferential attachment.
///
/// Starts from a complete graph on `m + 1` nodes; every later node attaches to
/// `m` distinct existing nodes chosen with probability proportional to degree.
/// The result has `m(m+1)/2 + (n-m-1)m` edges: 99 for `(100, 1)` and 945 for
/// `(100, 10)`.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Network, GraphError> {
    if m == 0 || m >= n {
        return Err(GraphError::InvalidAttachment { m, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m * (m + 1) / 2 + (n - m - 1) * m);
    // Every edge endpoint once: sampling uniformly from it is sampling by degree.
    let mut endpoints = Vec::with_capacity(2 * edges.capacity());
    for u in 0..=m {
        for v in u + 1..=m {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut picked = Vec::with_capacity(m);
    for new in m + 1..n {
        picked.clear();
        while picked.len() < m {
            let candidate = endpoints[rng.gen_range(0..endpoints.len())];
            if !picked.contains(&candidate) {
                picked.push(candidate);
            }
        }
        for &t in &picked {
            edges.push((t, new));
            endpoints.extend([t, new]);
        }
    }
    Network::from_edges(n, edges)
}
