//! Adjacency-matrix and edge-list text formats.
//!
//! Adjacency matrix: first line holds `N`, followed by `N` rows of `N`
//! whitespace-separated 0/1 entries. A file whose first line already has
//! several entries is read as a bare matrix. Edge list: one `i j` pair per
//! line, 1-indexed, `N` = largest id seen. Blank lines and `#` comments are
//! skipped in both.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{GraphError, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    AdjacencyMatrix,
    EdgeList,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adj" | "matrix" | "adjacency" => Ok(Self::AdjacencyMatrix),
            "edges" | "edgelist" | "edge-list" => Ok(Self::EdgeList),
            other => Err(format!("unknown graph format `{other}` (use adj or edges)")),
        }
    }
}

impl GraphFormat {
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "adj" | "mat" | "matrix" => Some(Self::AdjacencyMatrix),
            "edges" | "edgelist" | "el" => Some(Self::EdgeList),
            _ => None,
        }
    }

    /// Content sniffing for files with an unhelpful extension: a leading line
    /// made only of 0/1 tokens, or a single count, means a matrix.
    fn sniff(text: &str) -> Self {
        let first = content_lines(text).next().map(|(_, l)| l);
        match first {
            Some(line) => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                let binary = toks.iter().all(|t| *t == "0" || *t == "1");
                // A two-token line is an edge unless it contains a 0 (ids are 1-indexed).
                let pair_is_edge = toks.len() == 2 && !toks.contains(&"0");
                if toks.len() == 1 || (binary && !pair_is_edge) {
                    Self::AdjacencyMatrix
                } else {
                    Self::EdgeList
                }
            }
            None => Self::AdjacencyMatrix,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Overrides extension and content sniffing.
    pub format: Option<GraphFormat>,
    /// Keep only the largest connected component instead of rejecting.
    pub largest_component: bool,
    /// Accept a disconnected network as is. Closeness and the dense target
    /// set are undefined on it.
    pub allow_disconnected: bool,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        msg: msg.into(),
    }
}

fn matrix_edges(text: &str) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
    let mut lines = content_lines(text).peekable();
    let (first_no, first) = *lines.peek().ok_or_else(|| parse_err(1, "empty input"))?;
    let first_toks: Vec<&str> = first.split_whitespace().collect();
    let (n, rows): (usize, Vec<(usize, &str)>) = if first_toks.len() == 1 && {
        let rest: Vec<_> = content_lines(text).skip(1).collect();
        !rest.is_empty()
    } {
        let n = first_toks[0]
            .parse::<usize>()
            .map_err(|_| parse_err(first_no, format!("bad node count `{}`", first_toks[0])))?;
        lines.next();
        (n, lines.collect())
    } else {
        let rows: Vec<_> = lines.collect();
        (rows.len(), rows)
    };
    if n == 0 {
        return Err(GraphError::Empty);
    }
    if rows.len() != n {
        return Err(parse_err(
            rows.last().map_or(first_no, |r| r.0),
            format!("expected {n} matrix rows, found {}", rows.len()),
        ));
    }
    let mut matrix = vec![vec![false; n]; n];
    for (r, (line_no, row)) in rows.iter().enumerate() {
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != n {
            return Err(parse_err(
                *line_no,
                format!("expected {n} entries, found {}", toks.len()),
            ));
        }
        for (c, tok) in toks.iter().enumerate() {
            matrix[r][c] = match *tok {
                "0" => false,
                "1" => true,
                other => return Err(parse_err(*line_no, format!("entry `{other}` is not 0/1"))),
            };
        }
    }
    let mut edges = Vec::new();
    for r in 0..n {
        if matrix[r][r] {
            return Err(GraphError::SelfLoop(r + 1));
        }
        for c in r + 1..n {
            if matrix[r][c] != matrix[c][r] {
                return Err(GraphError::Asymmetric {
                    row: r + 1,
                    col: c + 1,
                });
            }
            if matrix[r][c] {
                edges.push((r, c));
            }
        }
    }
    Ok((n, edges))
}

fn edge_list_edges(text: &str) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (line_no, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(line_no, "expected `i j`"));
        }
        let mut ids = [0usize; 2];
        for (slot, tok) in ids.iter_mut().zip(&toks) {
            let v: usize = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad node id `{tok}`")))?;
            if v == 0 {
                return Err(parse_err(line_no, "node ids are 1-indexed"));
            }
            *slot = v - 1;
        }
        n = n.max(ids[0] + 1).max(ids[1] + 1);
        edges.push((ids[0], ids[1]));
    }
    if n == 0 {
        return Err(parse_err(1, "empty edge list"));
    }
    Ok((n, edges))
}

fn build(
    (n, edges): (usize, Vec<(usize, usize)>),
    opts: &LoadOptions,
) -> Result<Network, GraphError> {
    let net = Network::from_edges_allow_disconnected(n, edges)?;
    if opts.allow_disconnected {
        return Ok(net);
    }
    if opts.largest_component && !net.is_connected() {
        let (sub, _) = net.largest_component();
        log::warn!(
            "network disconnected; keeping largest component ({} of {} nodes)",
            sub.node_count(),
            net.node_count()
        );
        return Ok(sub);
    }
    net.ensure_connected()?;
    Ok(net)
}

pub fn parse_adjacency_matrix(text: &str) -> Result<Network, GraphError> {
    build(matrix_edges(text)?, &LoadOptions::default())
}

pub fn parse_edge_list(text: &str) -> Result<Network, GraphError> {
    build(edge_list_edges(text)?, &LoadOptions::default())
}

/// Parses text in the given (or sniffed) format.
pub fn parse_network(text: &str, opts: &LoadOptions) -> Result<Network, GraphError> {
    let format = opts.format.unwrap_or_else(|| GraphFormat::sniff(text));
    let parts = match format {
        GraphFormat::AdjacencyMatrix => matrix_edges(text)?,
        GraphFormat::EdgeList => edge_list_edges(text)?,
    };
    build(parts, opts)
}

pub fn load_network(path: &Path, opts: &LoadOptions) -> Result<Network, GraphError> {
    let text = std::fs::read_to_string(path)?;
    let opts = LoadOptions {
        format: opts.format.or_else(|| GraphFormat::from_extension(path)),
        ..opts.clone()
    };
    parse_network(&text, &opts)
}

pub fn write_adjacency_matrix(net: &Network) -> String {
    let n = net.node_count();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<&str> = (0..n)
            .map(|j| if net.has_edge(i, j) { "1" } else { "0" })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_edge_list(net: &Network) -> String {
    let mut out = String::new();
    for (u, v) in net.edges() {
        writeln!(out, "{} {}", u + 1, v + 1).unwrap();
    }
    out
}
