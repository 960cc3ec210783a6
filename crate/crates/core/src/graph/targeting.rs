//! Node-targeting: which nodes receive resources.

use serde::Serialize;

use super::{GraphError, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    /// Nodes without a strictly nested closed neighborhood.
    InnerNodes,
    /// Layered outer-node peeling.
    Layered,
    /// Greedy closeness ranking until full coverage.
    Dense,
    /// [`TargetKind::Dense`] followed by reverse-order pruning.
    DensePruned,
    All,
}

/// A set of targeted nodes. `nodes` is sorted; `order` keeps insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSet {
    pub kind: TargetKind,
    pub nodes: Vec<usize>,
    pub order: Vec<usize>,
}

impl TargetSet {
    fn from_order(kind: TargetKind, order: Vec<usize>) -> Self {
        let mut nodes = order.clone();
        nodes.sort_unstable();
        Self { kind, nodes, order }
    }

    pub fn all(n: usize) -> Self {
        Self::from_order(TargetKind::All, (0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    /// 1-indexed ids in insertion order, the JSON wire form.
    pub fn one_based(&self) -> Vec<usize> {
        self.order.iter().map(|v| v + 1).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.one_based()).expect("ids serialize")
    }
}

/// True when every node has a member of `targets` in its closed neighborhood.
pub fn covers(net: &Network, targets: &[usize]) -> bool {
    let mut covered = vec![false; net.node_count()];
    for &t in targets {
        for &v in net.closed_neighborhood(t) {
            covered[v] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

pub fn inner_target_set(net: &Network) -> TargetSet {
    TargetSet::from_order(TargetKind::InnerNodes, net.inner_nodes())
}

/// Rounds of the layered targeting loop.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LayeredTrace {
    /// Targets added in each round that found outer nodes.
    pub rounds: Vec<Vec<usize>>,
    /// Nodes added whole when no outer nodes remained, if that happened.
    pub remainder: Option<Vec<usize>>,
}

/// Runs the layered targeting loop and records which round added each target.
pub fn layered_trace(net: &Network) -> LayeredTrace {
    let n = net.node_count();
    let mut testing = vec![true; n];
    let mut remaining = n;
    let mut chosen = vec![false; n];
    let mut trace = LayeredTrace::default();

    while remaining > 0 {
        let outer = net.outer_within(&testing);
        if outer.is_empty() {
            let rest: Vec<usize> = (0..n).filter(|&v| testing[v] && !chosen[v]).collect();
            trace.remainder = Some(rest);
            break;
        }
        let mut is_outer = vec![false; n];
        for &v in &outer {
            is_outer[v] = true;
        }
        let added: Vec<usize> = (0..n)
            .filter(|&i| testing[i] && !is_outer[i])
            .filter(|&i| net.closed_neighborhood(i).iter().any(|&j| is_outer[j]))
            .collect();
        let mut round = Vec::new();
        for &t in &added {
            if !chosen[t] {
                chosen[t] = true;
                round.push(t);
            }
            for &v in net.closed_neighborhood(t) {
                if testing[v] {
                    testing[v] = false;
                    remaining -= 1;
                }
            }
        }
        trace.rounds.push(round);
    }
    trace
}

/// Layered targeting: find outer nodes among the nodes still under test, target
/// the inner nodes adjacent to them, drop everything those targets cover, and
/// repeat. When no outer nodes remain the leftover test set is added whole.
pub fn target_set_layered(net: &Network) -> TargetSet {
    let trace = layered_trace(net);
    let order = trace
        .rounds
        .into_iter()
        .flatten()
        .chain(trace.remainder.into_iter().flatten())
        .collect();
    TargetSet::from_order(TargetKind::Layered, order)
}

/// Dense targeting: add nodes by descending closeness centrality (ties to the
/// lower index) until their closed neighborhoods cover the network. With
/// `prune`, walk the picks in reverse and drop any whose removal keeps coverage.
pub fn target_set_dense(net: &Network, prune: bool) -> Result<TargetSet, GraphError> {
    let n = net.node_count();
    let sums = net.distance_sums()?;
    let mut ranking: Vec<usize> = (0..n).collect();
    // Descending C_i = 1/sum is ascending sum; integer sums keep ties exact.
    ranking.sort_by_key(|&i| (sums[i], i));

    let mut cover_count = vec![0usize; n];
    let mut covered = 0;
    let mut order = Vec::new();
    for &node in &ranking {
        if covered == n {
            break;
        }
        order.push(node);
        for &v in net.closed_neighborhood(node) {
            if cover_count[v] == 0 {
                covered += 1;
            }
            cover_count[v] += 1;
        }
    }

    if !prune {
        return Ok(TargetSet::from_order(TargetKind::Dense, order));
    }
    let mut keep = vec![true; order.len()];
    for idx in (0..order.len()).rev() {
        let node = order[idx];
        if net
            .closed_neighborhood(node)
            .iter()
            .all(|&v| cover_count[v] > 1)
        {
            for &v in net.closed_neighborhood(node) {
                cover_count[v] -= 1;
            }
            keep[idx] = false;
        }
    }
    let pruned = order
        .into_iter()
        .zip(keep)
        .filter_map(|(v, k)| k.then_some(v))
        .collect();
    Ok(TargetSet::from_order(TargetKind::DensePruned, pruned))
}
