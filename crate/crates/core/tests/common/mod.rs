#![allow(dead_code)]

use polya_core::graph::Network;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph: a random spanning tree plus each other pair with
/// probability `p`.
pub fn random_connected(n: usize, p: f64, rng: &mut impl Rng) -> Network {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.contains(&(u, v)) && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Network::from_edges(n, edges).unwrap()
}

/// Random connected graph with at least one strictly nested pair, i.e. at
/// least one outer node. Needs `n >= 3`.
pub fn random_nested(n: usize, rng: &mut impl Rng) -> Network {
    loop {
        let p = rng.gen_range(0.05..0.6);
        let net = random_connected(n, p, rng);
        if !net.outer_nodes().is_empty() {
            return net;
        }
    }
}

pub fn masses(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Random point on `{x >= 0, Σx = budget}`.
pub fn simplex_point(n: usize, budget: f64, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-12f64..1.0).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s * budget).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Closed-neighborhood containment check straight from the adjacency relation.
pub fn brute_nested(net: &Network, i: usize, j: usize) -> bool {
    let n = net.node_count();
    let in_closed = |a: usize, b: usize| a == b || net.has_edge(a, b);
    let subset = (0..n).all(|k| !in_closed(i, k) || in_closed(j, k));
    let strict = (0..n).any(|k| in_closed(j, k) && !in_closed(i, k));
    i != j && subset && strict
}
