//! Undirected networks with closed neighborhoods, the substrate every urn lives on.
//!
//! Nodes are `0..n` internally. File formats, JSON output and the CLI use
//! 1-indexed ids; conversion happens at those boundaries only.

mod generate;
mod io;
mod symmetry;
mod targeting;

pub use generate::barabasi_albert;
pub use io::{
    load_network, parse_adjacency_matrix, parse_edge_list, parse_network, write_adjacency_matrix,
    write_edge_list, GraphFormat, LoadOptions,
};
pub use symmetry::{verify_automorphism, OrbitPartition, Permutation};
pub use targeting::{
    covers, inner_target_set, layered_trace, target_set_dense, target_set_layered, LayeredTrace,
    TargetKind, TargetSet,
};

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("adjacency matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("self loop at node {0}")]
    SelfLoop(usize),
    #[error("graph is disconnected; components: {}", format_components(.components))]
    Disconnected { components: Vec<Vec<usize>> },
    #[error("network has no nodes")]
    Empty,
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("invalid attachment count m={m} for {n} nodes (need 1 <= m < n)")]
    InvalidAttachment { m: usize, n: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_components(components: &[Vec<usize>]) -> String {
    components
        .iter()
        .map(|c| {
            let ids: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
            format!("{{{}}}", ids.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Simple undirected graph with precomputed open and closed neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    neighbors: Vec<Vec<usize>>,
    closed: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Network {
    /// Builds a connected network; duplicate edges are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let net = Self::from_edges_allow_disconnected(n, edges)?;
        net.ensure_connected()?;
        Ok(net)
    }

    /// Same as [`Network::from_edges`] but keeps disconnected graphs. Centrality and the
    /// dense targeting algorithm still reject them.
    pub fn from_edges_allow_disconnected<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut neighbors = vec![Vec::new(); n];
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node: node + 1, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u + 1));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        let closed = neighbors
            .iter()
            .enumerate()
            .map(|(i, list)| {
                let mut c = list.clone();
                let pos = c.binary_search(&i).unwrap_err();
                c.insert(pos, i);
                c
            })
            .collect();
        Ok(Self {
            neighbors,
            closed,
            edge_count: edge_count / 2,
        })
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path graph")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle graph")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::from_edges(n, edges).expect("complete graph")
    }

    /// Star with node 0 as the center and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).expect("star graph")
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Open neighborhood, sorted ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Closed neighborhood `{i} ∪ N(i)`, sorted ascending.
    pub fn closed_neighborhood(&self, i: usize) -> &[usize] {
        &self.closed[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.neighbors[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    pub fn ensure_connected(&self) -> Result<(), GraphError> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(GraphError::Disconnected {
                components: self.components(),
            })
        }
    }

    /// Induced subgraph on the largest component (ties go to the component with
    /// the smallest node). Returns the subgraph and the original id of each new node.
    pub fn largest_component(&self) -> (Network, Vec<usize>) {
        let comps = self.components();
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let keep = comps[best].clone();
        let mut index = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let edges: Vec<_> = self
            .edges()
            .filter(|&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|(u, v)| (index[u], index[v]))
            .collect();
        let sub = Network::from_edges(keep.len(), edges).expect("component is connected");
        (sub, keep)
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<u64>> {
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.neighbors[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// `Σ_j d(i, j)` for every node, by one BFS per node.
    pub fn distance_sums(&self) -> Result<Vec<u64>, GraphError> {
        (0..self.node_count())
            .map(|i| {
                self.bfs_distances(i)
                    .into_iter()
                    .sum::<Option<u64>>()
                    .ok_or_else(|| GraphError::Disconnected {
                        components: self.components(),
                    })
            })
            .collect()
    }

    /// Closeness centrality `C_i = 1 / Σ_j d(i, j)`. A single isolated node scores 0.
    pub fn closeness_centrality(&self) -> Result<Vec<f64>, GraphError> {
        Ok(self
            .distance_sums()?
            .into_iter()
            .map(|s| if s == 0 { 0.0 } else { 1.0 / s as f64 })
            .collect())
    }

    /// True when `N'(i)` is a strict subset of `N'(j)`.
    pub fn strictly_nested(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.closed[i], &self.closed[j]);
        a.len() < b.len() && is_sorted_subset(a, b)
    }

    /// Nodes whose closed neighborhood is strictly contained in another node's.
    pub fn outer_nodes(&self) -> Vec<usize> {
        let all = vec![true; self.node_count()];
        self.outer_within(&all)
    }

    /// Complement of [`Network::outer_nodes`].
    pub fn inner_nodes(&self) -> Vec<usize> {
        let outer = self.outer_nodes();
        (0..self.node_count())
            .filter(|i| outer.binary_search(i).is_err())
            .collect()
    }

    /// Members `i` of `active` with `N'(i) ⊊ N'(j)` for some active `j`, using
    /// neighborhoods of the whole graph.
    pub(crate) fn outer_within(&self, active: &[bool]) -> Vec<usize> {
        // N'(i) ⊊ N'(j) forces i ∈ N'(j), so only neighbors of i can contain it.
        (0..self.node_count())
            .filter(|&i| active[i])
            .filter(|&i| {
                self.neighbors[i]
                    .iter()
                    .any(|&j| active[j] && self.strictly_nested(i, j))
            })
            .collect()
    }
}

fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}
